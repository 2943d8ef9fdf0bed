#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "mmswitch/errors.hpp"
#include "mmswitch/linalg.hpp"
#include "mmswitch/model.hpp"

namespace mmswitch {

// Q - diag(lambda), the sub-generator driving the between-arrival dynamics.
inline Mat sub_generator(const SwitchingModel& model) {
  Mat g = model.Q;
  for (int i = 0; i < model.num_states(); ++i) g(i, i) -= model.lambda[i];
  return g;
}

// One matrix exponential step, shared by lattice sweeps and path scans.
struct FlowCache {
  double dt;
  Mat P;  // exp(dt * (Q - diag(lambda)))
  FlowCache(const SwitchingModel& model, double step)
      : dt(step), P(expm(step * sub_generator(model))) {}
};

struct UnnormalizedBelief {
  std::vector<double> m;  // m_i(t, pi)
  double survival;        // sum_i m_i = P{no arrival by t}
};

// m(t, pi) = pi * exp(t (Q - Lambda)). The survival mass is the probability
// of seeing no arrival in [0, t].
inline double propagate_m_raw(const SwitchingModel& model, double t, const double* pi,
                              double* out) {
  if (t < 0.0) throw Error(Errc::NegativeTime, "propagate_m needs t >= 0");
  const int m = model.num_states();
  Mat e = expm(t * sub_generator(model));
  vec_mat(pi, e, out);
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    if (out[i] < 0.0) out[i] = 0.0;  // roundoff-level negatives only
    s += out[i];
  }
  if (!(s > 0.0))
    throw Error(Errc::DegenerateMass,
                "survival mass underflowed; evaluate in chained steps");
  return s;
}

inline UnnormalizedBelief propagate_m(const SwitchingModel& model, double t,
                                      const Belief& pi) {
  UnnormalizedBelief out;
  out.m.resize(model.num_states());
  out.survival = propagate_m_raw(model, t, pi.data(), out.m.data());
  return out;
}

// Normalized flow x(t, pi) = m(t, pi) / s(t, pi), evaluated in steps of at
// most 5 / lambda_max so the running mass never underflows.
inline void flow_x_raw(const SwitchingModel& model, double t, const double* pi,
                       double* out) {
  if (t < 0.0) throw Error(Errc::NegativeTime, "flow_x needs t >= 0");
  const int m = model.num_states();
  for (int i = 0; i < m; ++i) out[i] = pi[i];
  if (t == 0.0) return;
  const double max_step = 5.0 / model.lambda_max;
  const int steps = std::max(1, static_cast<int>(std::ceil(t / max_step)));
  const Mat e = expm((t / steps) * sub_generator(model));
  std::vector<double> tmp(m);
  for (int k = 0; k < steps; ++k) {
    vec_mat(out, e, tmp.data());
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      if (tmp[i] < 0.0) tmp[i] = 0.0;
      s += tmp[i];
    }
    if (!(s > 0.0)) throw Error(Errc::DegenerateMass, "flow step lost all mass");
    for (int i = 0; i < m; ++i) out[i] = tmp[i] / s;
  }
}

inline Belief flow_x(const SwitchingModel& model, double t, const Belief& pi) {
  std::vector<double> out(model.num_states());
  flow_x_raw(model, t, pi.data(), out.data());
  return Belief(std::move(out));
}

// Right side of the belief ODE between arrivals:
//   dx_i/dt = sum_j q_{j,i} x_j - lambda_i x_i + x_i sum_j lambda_j x_j.
inline void flow_drift(const SwitchingModel& model, const double* pi, double* out) {
  const int m = model.num_states();
  double lam_bar = 0.0;
  for (int j = 0; j < m; ++j) lam_bar += model.lambda[j] * pi[j];
  for (int i = 0; i < m; ++i) {
    double in_flux = 0.0;
    for (int j = 0; j < m; ++j) in_flux += model.Q(j, i) * pi[j];
    out[i] = in_flux - model.lambda[i] * pi[i] + pi[i] * lam_bar;
  }
}

inline std::vector<double> flow_drift(const SwitchingModel& model, const Belief& pi) {
  std::vector<double> out(model.num_states());
  flow_drift(model, pi.data(), out.data());
  return out;
}

// Bayes update at an arrival with mark index j: posterior proportional to
// lambda_i nu[i][j] pi_i. A zero normalizer means the observed mark has zero
// likelihood under the current belief.
inline void jump_update_raw(const SwitchingModel& model, const double* pi, int mark_j,
                            double* out) {
  const int m = model.num_states();
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    out[i] = model.lambda[i] * model.nu(i, mark_j) * pi[i];
    z += out[i];
  }
  if (!(z > 0.0))
    throw Error(Errc::ImpossibleMark, "mark " + std::to_string(mark_j) +
                                          " has zero likelihood under the current belief");
  for (int i = 0; i < m; ++i) out[i] /= z;
}

inline Belief jump_update(const SwitchingModel& model, const Belief& pi, int mark_j) {
  std::vector<double> out(model.num_states());
  jump_update_raw(model, pi.data(), mark_j, out.data());
  return Belief(std::move(out));
}

struct FilterSample {
  double t;
  std::vector<double> pi;
};

struct FilterArrival {
  double t;
  int mark;
  std::vector<double> pre;   // left limit
  std::vector<double> post;  // after the Bayes jump
};

struct FilterTrajectory {
  std::vector<FilterSample> samples;    // right-continuous values on the mesh
  std::vector<FilterArrival> arrivals;  // pre/post pairs at each arrival
};

// Reconstructs the belief path given the observed arrivals: deterministic
// flow between arrivals, Bayes jump at each one. Mesh samples at an arrival
// time take the post-jump value.
inline FilterTrajectory filter_path(const SwitchingModel& model,
                                    const std::vector<std::pair<double, int>>& arrivals,
                                    const Belief& pi0, double horizon,
                                    const std::vector<double>& mesh) {
  const int m = model.num_states();
  for (size_t k = 0; k < arrivals.size(); ++k) {
    const double t = arrivals[k].first;
    if (t <= 0.0 || t > horizon || (k > 0 && t <= arrivals[k - 1].first))
      throw Error(Errc::UnsortedArrivals,
                  "arrival times must be strictly increasing within (0, T]");
    if (arrivals[k].second < 0 || arrivals[k].second >= model.num_marks())
      throw Error(Errc::ImpossibleMark, "mark index out of range");
  }
  for (size_t k = 0; k < mesh.size(); ++k) {
    if (mesh[k] < 0.0 || mesh[k] > horizon || (k > 0 && mesh[k] < mesh[k - 1]))
      throw Error(Errc::UnsortedArrivals, "mesh times must be nondecreasing in [0, T]");
  }

  FilterTrajectory traj;
  traj.samples.reserve(mesh.size());
  std::vector<double> cur(pi0.data(), pi0.data() + m);
  std::vector<double> tmp(m);
  double t_cur = 0.0;
  size_t next_arrival = 0;

  auto flow_to = [&](double t) {
    if (t > t_cur) {
      flow_x_raw(model, t - t_cur, cur.data(), tmp.data());
      cur = tmp;
      t_cur = t;
    }
  };

  for (double t : mesh) {
    while (next_arrival < arrivals.size() && arrivals[next_arrival].first <= t) {
      const auto& [sigma, mark] = arrivals[next_arrival];
      flow_to(sigma);
      FilterArrival rec;
      rec.t = sigma;
      rec.mark = mark;
      rec.pre = cur;
      jump_update_raw(model, rec.pre.data(), mark, cur.data());
      rec.post = cur;
      traj.arrivals.push_back(std::move(rec));
      ++next_arrival;
    }
    flow_to(t);
    traj.samples.push_back({t, cur});
  }
  // Record arrivals beyond the last mesh point as well.
  while (next_arrival < arrivals.size()) {
    const auto& [sigma, mark] = arrivals[next_arrival];
    flow_to(sigma);
    FilterArrival rec;
    rec.t = sigma;
    rec.mark = mark;
    rec.pre = cur;
    jump_update_raw(model, rec.pre.data(), mark, cur.data());
    rec.post = cur;
    traj.arrivals.push_back(std::move(rec));
    ++next_arrival;
  }
  return traj;
}

}  // namespace mmswitch
