#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "mmswitch/beliefgrid.hpp"
#include "mmswitch/errors.hpp"
#include "mmswitch/filter.hpp"
#include "mmswitch/model.hpp"
#include "mmswitch/parallel.hpp"

namespace mmswitch {

struct SolverConfig {
  double dt = 0.0;        // 0: T/400 on a finite horizon, t_max/400 stationary
  int grid_n = 0;         // 0: 200 for two states, 60 for three, 24 beyond
  double eps_fix = 0.0;   // 0: 1e-4 * cmax / rho
  int max_iterations = 500;
  int sweep_cap = 0;      // 0: |A| + 1
  size_t node_cap = 2000000;
  int threads = 0;        // 0: hardware / MMSWITCH_THREADS
};

inline int default_grid_resolution(int m) {
  if (m <= 2) return 200;
  if (m == 3) return 60;
  return 24;
}

// Value table over (time layer x lattice node x policy). A stationary surface
// has a single layer and an infinite horizon.
struct ValueSurface {
  SwitchingModel model;
  std::shared_ptr<const SimplexLattice> lattice;
  double dt = 0.0;
  double horizon = 0.0;
  bool stationary = false;
  int num_policies = 0;
  std::vector<std::vector<double>> layers;  // layers[l][node * A + a]

  int num_layers() const { return static_cast<int>(layers.size()); }
  double tau_of(int layer) const { return stationary ? horizon : layer * dt; }

  double value(int layer, size_t node, int a) const {
    return layers[layer][node * num_policies + a];
  }

  double eval(int layer, const double* pi, int a) const {
    return lattice->interpolate(layers[layer].data() + a, num_policies, pi);
  }

  // Index of the nearest layer at or below the remaining horizon tau.
  int layer_for(double tau) const {
    if (stationary) return 0;
    if (tau < -1e-9 || tau > horizon + 1e-9)
      throw Error(Errc::HorizonExceeded, "remaining horizon outside the solved surface");
    int l = static_cast<int>(std::floor(tau / dt + 1e-9));
    return std::min(std::max(l, 0), num_layers() - 1);
  }
};

struct Intervention {
  double value;
  int policy;
};

// Best single switch net of its cost, with the smallest maximizing policy.
// vals[b] holds w(tau, pi, b) for every policy b.
inline Intervention intervene_from_values(const SwitchingModel& model, const double* vals,
                                          const double* pi, int a) {
  const int A = model.num_policies();
  Intervention best{-std::numeric_limits<double>::infinity(), -1};
  for (int b = 0; b < A; ++b) {
    if (b == a) continue;
    const double net = vals[b] - cost_K(model, a, b, pi);
    if (net > best.value) best = {net, b};
  }
  return best;
}

inline Intervention intervene(const ValueSurface& surface, int layer, const double* pi,
                              int a) {
  const int A = surface.num_policies;
  std::vector<double> vals(A);
  int32_t idx[SimplexLattice::kMaxStates];
  double w[SimplexLattice::kMaxStates];
  const int n = surface.lattice->stencil(pi, idx, w);
  const double* layer_data = surface.layers[layer].data();
  for (int b = 0; b < A; ++b) {
    double acc = 0.0;
    for (int t = 0; t < n; ++t) acc += w[t] * layer_data[static_cast<size_t>(idx[t]) * A + b];
    vals[b] = acc;
  }
  return intervene_from_values(surface.model, vals.data(), pi, a);
}

// S_i applied to one layer: sum over marks of nu[i][j] times the interpolated
// value at the Bayes update of pi. Marks with zero likelihood under pi cannot
// occur from pi and contribute nothing.
inline double jump_expectation_S(const ValueSurface& surface, int layer, int i,
                                 const double* pi, int a) {
  const SwitchingModel& model = surface.model;
  const int m = model.num_states();
  const int d = model.num_marks();
  double post[SimplexLattice::kMaxStates];
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    if (model.nu(i, j) == 0.0) continue;
    double z = 0.0;
    for (int s = 0; s < m; ++s) {
      post[s] = model.lambda[s] * model.nu(s, j) * pi[s];
      z += post[s];
    }
    if (!(z > 0.0)) continue;
    for (int s = 0; s < m; ++s) post[s] /= z;
    acc += model.nu(i, j) * surface.eval(layer, post, a);
  }
  return acc;
}

// Exact no-action value: by the tower property the expected benefit rate at
// time u is pi e^{uQ} c~(a), with c~ the arrival-adjusted rate, so
// U0(T, pi, a) = pi [ int_0^T e^{u(Q - rho I)} du ] c~(a).
inline double u0_exact(const SwitchingModel& model, double T, const double* pi, int a) {
  const int m = model.num_states();
  Mat gen = model.Q;
  for (int i = 0; i < m; ++i) gen(i, i) -= model.rho;
  Mat F;
  expm_with_integral(gen, T, nullptr, &F);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) row += F(i, j) * model.effective_rate(j, a);
    acc += pi[i] * row;
  }
  return acc;
}

inline double u0_exact(const SwitchingModel& model, double T, const Belief& pi, int a) {
  return u0_exact(model, T, pi.data(), a);
}

// Stationary no-action value pi (rho I - Q)^{-1} c~(a); requires rho > 0.
inline std::vector<double> u0_stationary_weights(const SwitchingModel& model, int a) {
  const int m = model.num_states();
  Mat A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = (i == j ? model.rho : 0.0) - model.Q(i, j);
  std::vector<double> rhs(m);
  for (int i = 0; i < m; ++i) rhs[i] = model.effective_rate(i, a);
  return solve(A, rhs);
}

namespace detail {

struct EngineTables {
  const SwitchingModel* model = nullptr;
  std::shared_ptr<const SimplexLattice> lattice;
  double dt = 0.0;
  int k_max = 0;  // flow steps cached per node
  size_t cached_nodes = 0;
  std::vector<double> mcache;       // [(node * (k_max+1) + k) * m + i]
  std::vector<double> disc;         // e^{-rho k dt}
  Mat ctilde;                       // m x A effective rates
  Mat mom0, mom1;                   // discounted step moments of e^{u(Q - Lambda)}
  std::vector<double> u0_floor;     // finite: [(layer * A + a) * m + i] weights
  std::vector<double> w0_weights;   // stationary: [a * m + i] weights

  const double* m_at(size_t node, int k) const {
    return &mcache[(node * (k_max + 1) + k) * model->num_states()];
  }
  double dot_belief(size_t node, const double* wv) const {
    const int m = model->num_states();
    const double* pi = lattice->belief(node);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += pi[i] * wv[i];
    return acc;
  }
  double u0_node(int layer, size_t node, int a) const {
    const int m = model->num_states();
    return dot_belief(node,
                      &u0_floor[(static_cast<size_t>(layer) * model->num_policies() + a) * m]);
  }
  double w0_node(size_t node, int a) const {
    const int m = model->num_states();
    return dot_belief(node, &w0_weights[static_cast<size_t>(a) * m]);
  }
};

inline void build_scalars(EngineTables& t) {
  const SwitchingModel& model = *t.model;
  const int m = model.num_states();
  const int A = model.num_policies();
  t.disc.resize(t.k_max + 1);
  for (int k = 0; k <= t.k_max; ++k) t.disc[k] = std::exp(-model.rho * k * t.dt);
  t.ctilde = Mat(m, A);
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < A; ++a) t.ctilde(i, a) = model.effective_rate(i, a);
  Mat gen = sub_generator(model);
  for (int i = 0; i < m; ++i) gen(i, i) -= model.rho;
  expm_step_moments(gen, t.dt, &t.mom0, &t.mom1);
}

// Unnormalized flow vectors m(k dt, pi) for every lattice node, advanced by
// repeated products with the cached step matrix.
inline void build_node_flows(EngineTables& t, int threads) {
  const SwitchingModel& model = *t.model;
  const int m = model.num_states();
  const size_t n = t.lattice->size();
  const FlowCache flow(model, t.dt);
  t.cached_nodes = n;
  t.mcache.resize(n * (t.k_max + 1) * m);
  parallel_for(n, threads, [&](size_t begin, size_t end) {
    for (size_t p = begin; p < end; ++p) {
      double* row = &t.mcache[(p * (t.k_max + 1)) * m];
      const double* pi = t.lattice->belief(p);
      for (int i = 0; i < m; ++i) row[i] = pi[i];
      for (int k = 1; k <= t.k_max; ++k) {
        vec_mat(row + (k - 1) * m, flow.P, row + k * m);
        for (int i = 0; i < m; ++i)
          if (row[k * m + i] < 0.0) row[k * m + i] = 0.0;
      }
    }
  });
}

struct NodeWorkspace {
  std::vector<double> ecur;   // d x A interpolated post-jump values at step k
  std::vector<double> eprev;  // same at step k-1
  std::vector<double> vb;     // A interpolated pre-jump values
  std::vector<double> acc;    // per-policy integrals and candidates
};

// One node of the first-jump update.
//
// The running integral is advanced one step at a time with exact discounted
// exponential moments: within [u, u + dt] the unnormalized flow and survival
// weights are integrated in closed form against the step matrices mom0/mom1,
// and only the interpolated post-jump values are taken linear across the
// step. Constant value functions therefore integrate exactly.
//
// Finite case: `layers` holds horizons 0..L-1 and the layer being built is L;
// the u = 0 endpoint would reference layer L itself, so its jump term is
// evaluated one layer back, an O(dt) perturbation carrying O(dt) weight.
// Stationary case: every lookup goes to the previous iterate `stat_layer`,
// and the t = 0 deadline (an immediate switch) is a valid candidate.
//
// Candidates per policy a: switch at deadline t = k dt for k in the grid, or
// never switch before the first arrival (the integral alone).
inline void first_jump_node(const EngineTables& t,
                            const std::vector<std::vector<double>>& layers, int L,
                            const double* stat_layer, size_t node, double* out,
                            NodeWorkspace& ws) {
  const SwitchingModel& model = *t.model;
  const int m = model.num_states();
  const int A = model.num_policies();
  const int d = model.num_marks();
  const bool stationary = stat_layer != nullptr;
  const int k_end = stationary ? t.k_max : L;

  ws.ecur.resize(static_cast<size_t>(d) * A);
  ws.eprev.resize(static_cast<size_t>(d) * A);
  ws.vb.resize(A);
  ws.acc.resize(static_cast<size_t>(2) * A);
  double* I = ws.acc.data();
  double* best = I + A;
  double xk[SimplexLattice::kMaxStates], post[SimplexLattice::kMaxStates];
  double u0[SimplexLattice::kMaxStates], u1[SimplexLattice::kMaxStates];
  int32_t sidx[SimplexLattice::kMaxStates];
  double sw[SimplexLattice::kMaxStates];

  for (int a = 0; a < A; ++a) {
    I[a] = 0.0;
    best[a] = -std::numeric_limits<double>::infinity();
  }

  for (int k = 0; k <= k_end; ++k) {
    const double* mk = t.m_at(node, k);
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += mk[i];
    for (int i = 0; i < m; ++i) xk[i] = mk[i] / s;

    const double* wS =
        stationary ? stat_layer : layers[k == 0 ? L - 1 : L - k].data();

    // Interpolated values after each possible jump, shared across policies.
    for (int j = 0; j < d; ++j) {
      double z = 0.0;
      for (int i = 0; i < m; ++i) {
        post[i] = model.lambda[i] * model.nu(i, j) * mk[i];
        z += post[i];
      }
      double* erow = &ws.ecur[static_cast<size_t>(j) * A];
      if (!(z > 0.0)) {
        for (int b = 0; b < A; ++b) erow[b] = 0.0;
        continue;
      }
      for (int i = 0; i < m; ++i) post[i] /= z;
      const int ns = t.lattice->stencil(post, sidx, sw);
      for (int b = 0; b < A; ++b) {
        double acc = 0.0;
        for (int q = 0; q < ns; ++q)
          acc += sw[q] * wS[static_cast<size_t>(sidx[q]) * A + b];
        erow[b] = acc;
      }
    }

    if (k >= 1) {
      // Integral over [(k-1) dt, k dt] from the flow at the left endpoint.
      const double* mp = t.m_at(node, k - 1);
      vec_mat(mp, t.mom0, u0);
      vec_mat(mp, t.mom1, u1);
      for (int i = 0; i < m; ++i) {
        if (u0[i] < 0.0) u0[i] = 0.0;
        if (u1[i] < 0.0) u1[i] = 0.0;
      }
      for (int a = 0; a < A; ++a) {
        double seg = 0.0;
        for (int i = 0; i < m; ++i) seg += (u0[i] + u1[i]) * t.ctilde(i, a);
        I[a] += t.disc[k - 1] * seg;
      }
      for (int j = 0; j < d; ++j) {
        double z0 = 0.0, z1 = 0.0;
        for (int i = 0; i < m; ++i) {
          const double lam_nu = model.lambda[i] * model.nu(i, j);
          z0 += lam_nu * u0[i];
          z1 += lam_nu * u1[i];
        }
        if (z0 == 0.0 && z1 == 0.0) continue;
        const double* ep = &ws.eprev[static_cast<size_t>(j) * A];
        const double* ec = &ws.ecur[static_cast<size_t>(j) * A];
        for (int a = 0; a < A; ++a)
          I[a] += t.disc[k - 1] * (z0 * ep[a] + z1 * ec[a]);
      }
    }

    // Deadline candidate: switch at t = k dt if no arrival came first.
    if (k >= 1 || stationary) {
      const double* wD = stationary ? stat_layer : layers[L - k].data();
      const int ns = t.lattice->stencil(xk, sidx, sw);
      for (int b = 0; b < A; ++b) {
        double acc = 0.0;
        for (int q = 0; q < ns; ++q)
          acc += sw[q] * wD[static_cast<size_t>(sidx[q]) * A + b];
        ws.vb[b] = acc;
      }
      for (int a = 0; a < A; ++a) {
        const double mw = intervene_from_values(model, ws.vb.data(), xk, a).value;
        const double cand = s * t.disc[k] * mw + I[a];
        if (cand > best[a]) best[a] = cand;
      }
    }

    ws.ecur.swap(ws.eprev);
  }

  for (int a = 0; a < A; ++a) out[a] = std::max(best[a], I[a]);
}

// Immediate-switch closure at t = 0: Jacobi passes against a snapshot until
// nothing changes. The triangle inequality on K makes one improving pass
// sufficient; the final pass confirms the fixed point.
inline int intervention_sweeps(const SwitchingModel& model, const SimplexLattice& lattice,
                               std::vector<double>& layer, int sweep_cap, int threads) {
  const int A = model.num_policies();
  const size_t n = lattice.size();
  std::vector<double> snapshot;
  std::vector<char> changed_flags(n);
  int sweeps = 0;
  for (;;) {
    if (sweeps >= sweep_cap)
      throw Error(Errc::MaxIterations, "intervention sweeps did not settle");
    ++sweeps;
    snapshot = layer;
    parallel_for(n, threads, [&](size_t begin, size_t end) {
      for (size_t p = begin; p < end; ++p) {
        changed_flags[p] = 0;
        const double* pi = lattice.belief(p);
        for (int a = 0; a < A; ++a) {
          const Intervention iv = intervene_from_values(model, &snapshot[p * A], pi, a);
          if (iv.value > layer[p * A + a]) {
            layer[p * A + a] = iv.value;
            changed_flags[p] = 1;
          }
        }
      }
    });
    bool changed = false;
    for (size_t p = 0; p < n; ++p) changed |= (changed_flags[p] != 0);
    if (!changed) break;
  }
  return sweeps;
}

// Full update of one finite-horizon layer: first-jump values, the exact
// no-action floor, then immediate-switch sweeps.
inline std::vector<double> compute_layer(const EngineTables& tables,
                                         const std::vector<std::vector<double>>& layers,
                                         int L, int sweep_cap, int threads,
                                         int* sweeps_out) {
  const SwitchingModel& model = *tables.model;
  const int A = model.num_policies();
  const size_t n = tables.lattice->size();
  std::vector<double> layer(n * A, 0.0);
  parallel_for(n, threads, [&](size_t begin, size_t end) {
    NodeWorkspace ws;
    std::vector<double> out(A);
    for (size_t p = begin; p < end; ++p) {
      first_jump_node(tables, layers, L, nullptr, p, out.data(), ws);
      for (int a = 0; a < A; ++a)
        layer[p * A + a] = std::max(out[a], tables.u0_node(L, p, a));
    }
  });
  const int sweeps = intervention_sweeps(model, *tables.lattice, layer, sweep_cap, threads);
  if (sweeps_out) *sweeps_out = sweeps;
  return layer;
}

// Exact no-action weight vectors per (layer, policy), accumulated from the
// one-step exponential and its integral.
inline std::vector<double> u0_layer_weights(const SwitchingModel& model, double dt,
                                            int layers) {
  const int m = model.num_states();
  const int A = model.num_policies();
  Mat gen = model.Q;
  for (int i = 0; i < m; ++i) gen(i, i) -= model.rho;
  Mat Estep, Fstep;
  expm_with_integral(gen, dt, &Estep, &Fstep);
  Mat E = Mat::identity(m);
  Mat F(m, m);
  std::vector<double> out(static_cast<size_t>(layers + 1) * A * m, 0.0);
  for (int l = 1; l <= layers; ++l) {
    F += E * Fstep;
    E = E * Estep;
    for (int a = 0; a < A; ++a) {
      double* wv = &out[(static_cast<size_t>(l) * A + a) * m];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) wv[i] += F(i, j) * model.effective_rate(j, a);
    }
  }
  return out;
}

}  // namespace detail

// Public form of the first-jump operator at an arbitrary belief: the discrete
// supremum over planned switch deadlines plus the hold-to-maturity candidate,
// using the layers below `layer` of a (possibly partially built) surface.
inline double apply_first_jump(const SwitchingModel& model, const ValueSurface& surface,
                               int layer, const double* pi, int a) {
  if (layer < 1 || layer > surface.num_layers())
    throw Error(Errc::MissingLayer, "layer index out of range");
  for (int l = 0; l < layer; ++l)
    if (surface.layers[l].empty())
      throw Error(Errc::MissingLayer, "layer " + std::to_string(l) + " not yet computed");

  const int m = model.num_states();
  detail::EngineTables t;
  t.model = &model;
  t.lattice = surface.lattice;
  t.dt = surface.dt;
  t.k_max = layer;
  detail::build_scalars(t);
  t.cached_nodes = 1;
  t.mcache.assign(static_cast<size_t>(layer + 1) * m, 0.0);
  const FlowCache flow(model, surface.dt);
  for (int i = 0; i < m; ++i) t.mcache[i] = pi[i];
  for (int k = 1; k <= layer; ++k) {
    vec_mat(&t.mcache[(k - 1) * m], flow.P, &t.mcache[k * m]);
    for (int i = 0; i < m; ++i)
      if (t.mcache[k * m + i] < 0.0) t.mcache[k * m + i] = 0.0;
  }

  std::vector<double> out(model.num_policies());
  detail::NodeWorkspace ws;
  detail::first_jump_node(t, surface.layers, layer, nullptr, 0, out.data(), ws);
  return out[a];
}

struct SolveDiagnostics {
  int iterations = 0;         // stationary operator applications
  double final_change = 0.0;  // last sup-norm change
  std::vector<double> sup_changes;
  int max_sweeps = 0;         // largest intervention sweep count per layer
  double eps_fix_used = 0.0;  // stationary stopping tolerance actually applied
  double t_max = 0.0;         // stationary deadline horizon
};

struct SolveResult {
  ValueSurface surface;
  SolveDiagnostics diag;
};

// No-action value surface U0 on a lattice, from the closed form.
inline ValueSurface value_noaction(const SwitchingModel& model, double T,
                                   const SolverConfig& cfg = {}) {
  if (!model.validated) throw Error(Errc::ConfigError, "model must be validated first");
  if (T < 0.0) throw Error(Errc::NegativeTime, "horizon must be >= 0");
  const int m = model.num_states();
  const int A = model.num_policies();
  const int L_max =
      T > 0.0 ? (cfg.dt > 0.0 ? std::max(1, static_cast<int>(std::llround(T / cfg.dt)))
                              : 400)
              : 0;
  const double dt = T > 0.0 ? T / L_max : 1.0;

  ValueSurface s;
  s.model = model;
  s.lattice = build_lattice(m, cfg.grid_n > 0 ? cfg.grid_n : default_grid_resolution(m),
                            cfg.node_cap);
  s.dt = dt;
  s.horizon = T;
  s.num_policies = A;
  const size_t n = s.lattice->size();
  s.layers.assign(L_max + 1, std::vector<double>(n * A, 0.0));
  if (L_max == 0) return s;

  const auto weights = detail::u0_layer_weights(model, dt, L_max);
  for (int l = 1; l <= L_max; ++l) {
    auto& layer = s.layers[l];
    for (size_t p = 0; p < n; ++p) {
      const double* pi = s.lattice->belief(p);
      for (int a = 0; a < A; ++a) {
        const double* wv = &weights[(static_cast<size_t>(l) * A + a) * m];
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += pi[i] * wv[i];
        layer[p * A + a] = acc;
      }
    }
  }
  return s;
}

// Finite-horizon solver: forward in the remaining horizon, one first-jump
// update per layer followed by immediate-switch sweeps. The exact no-action
// value enters each layer as a candidate, so U >= U0 holds by construction.
inline SolveResult solve_finite(const SwitchingModel& model, double T,
                                const SolverConfig& cfg = {}) {
  if (!model.validated) throw Error(Errc::ConfigError, "model must be validated first");
  if (!(T > 0.0)) throw Error(Errc::NegativeTime, "horizon must be positive");
  const int m = model.num_states();
  const int A = model.num_policies();
  const int threads = cfg.threads > 0 ? cfg.threads : default_threads();

  const int L_max =
      cfg.dt > 0.0 ? std::max(1, static_cast<int>(std::llround(T / cfg.dt))) : 400;
  const double dt = T / L_max;

  SolveResult result;
  ValueSurface& s = result.surface;
  s.model = model;
  s.lattice = build_lattice(m, cfg.grid_n > 0 ? cfg.grid_n : default_grid_resolution(m),
                            cfg.node_cap);
  s.dt = dt;
  s.horizon = T;
  s.num_policies = A;
  const size_t n = s.lattice->size();
  s.layers.assign(L_max + 1, std::vector<double>());
  s.layers[0].assign(n * A, 0.0);

  detail::EngineTables tables;
  tables.model = &model;
  tables.lattice = s.lattice;
  tables.dt = dt;
  tables.k_max = L_max;
  detail::build_scalars(tables);
  detail::build_node_flows(tables, threads);
  tables.u0_floor = detail::u0_layer_weights(model, dt, L_max);

  const int sweep_cap = cfg.sweep_cap > 0 ? cfg.sweep_cap : A + 1;
  for (int L = 1; L <= L_max; ++L) {
    int sweeps = 0;
    s.layers[L] = detail::compute_layer(tables, s.layers, L, sweep_cap, threads, &sweeps);
    result.diag.max_sweeps = std::max(result.diag.max_sweeps, sweeps);
  }
  return result;
}

// Re-applies the full layer update of `layer` against the frozen lower layers
// of a solved surface; the discrete fixed-point property says this changes
// nothing.
inline std::vector<double> recompute_layer(const SwitchingModel& model,
                                           const ValueSurface& surface, int layer,
                                           int threads = 0) {
  if (layer < 1 || layer >= surface.num_layers())
    throw Error(Errc::MissingLayer, "layer index out of range");
  if (threads <= 0) threads = default_threads();
  detail::EngineTables tables;
  tables.model = &model;
  tables.lattice = surface.lattice;
  tables.dt = surface.dt;
  tables.k_max = layer;
  detail::build_scalars(tables);
  detail::build_node_flows(tables, threads);
  tables.u0_floor = detail::u0_layer_weights(model, surface.dt, layer);
  return detail::compute_layer(tables, surface.layers, layer,
                               model.num_policies() + 1, threads, nullptr);
}

// Stationary solver for rho > 0: monotone iteration of the stationary
// first-jump operator from the exact no-action value.
inline SolveResult solve_infinite(const SwitchingModel& model,
                                  const SolverConfig& cfg = {}) {
  if (!model.validated) throw Error(Errc::ConfigError, "model must be validated first");
  if (!(model.rho > 0.0))
    throw Error(Errc::NoDiscount, "the stationary problem needs rho > 0");
  const int m = model.num_states();
  const int A = model.num_policies();
  const int threads = cfg.threads > 0 ? cfg.threads : default_threads();

  const double scale = std::max(model.cmax, 1e-6);
  const double eps = cfg.eps_fix > 0.0 ? cfg.eps_fix : 1e-4 * scale / model.rho;
  // Deadline horizon long enough that the discounted tail is below eps.
  const double t_max = std::max(std::log(scale / (model.rho * eps)) / model.rho, 1.0);
  const int k_max =
      cfg.dt > 0.0 ? std::max(1, static_cast<int>(std::ceil(t_max / cfg.dt))) : 400;
  const double dt = cfg.dt > 0.0 ? cfg.dt : t_max / k_max;

  SolveResult result;
  result.diag.eps_fix_used = eps;
  result.diag.t_max = k_max * dt;
  ValueSurface& s = result.surface;
  s.model = model;
  s.lattice = build_lattice(m, cfg.grid_n > 0 ? cfg.grid_n : default_grid_resolution(m),
                            cfg.node_cap);
  s.dt = dt;
  s.horizon = std::numeric_limits<double>::infinity();
  s.stationary = true;
  s.num_policies = A;
  const size_t n = s.lattice->size();

  detail::EngineTables tables;
  tables.model = &model;
  tables.lattice = s.lattice;
  tables.dt = dt;
  tables.k_max = k_max;
  detail::build_scalars(tables);
  detail::build_node_flows(tables, threads);
  tables.w0_weights.assign(static_cast<size_t>(A) * m, 0.0);
  for (int a = 0; a < A; ++a) {
    auto wv = u0_stationary_weights(model, a);
    std::copy(wv.begin(), wv.end(), tables.w0_weights.begin() + static_cast<size_t>(a) * m);
  }

  s.layers.assign(1, std::vector<double>(n * A, 0.0));
  auto& layer = s.layers[0];
  for (size_t p = 0; p < n; ++p)
    for (int a = 0; a < A; ++a) layer[p * A + a] = tables.w0_node(p, a);

  const int sweep_cap = cfg.sweep_cap > 0 ? cfg.sweep_cap : A + 1;
  std::vector<double> prev(n * A);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    prev = layer;
    parallel_for(n, threads, [&](size_t begin, size_t end) {
      detail::NodeWorkspace ws;
      std::vector<double> out(A);
      for (size_t p = begin; p < end; ++p) {
        detail::first_jump_node(tables, s.layers, 0, prev.data(), p, out.data(), ws);
        for (int a = 0; a < A; ++a) {
          const double floor_val = std::max(tables.w0_node(p, a), prev[p * A + a]);
          layer[p * A + a] = std::max(out[a], floor_val);
        }
      }
    });
    const int sweeps =
        detail::intervention_sweeps(model, *s.lattice, layer, sweep_cap, threads);
    result.diag.max_sweeps = std::max(result.diag.max_sweeps, sweeps);

    double change = 0.0;
    for (size_t i = 0; i < layer.size(); ++i)
      change = std::max(change, layer[i] - prev[i]);
    result.diag.sup_changes.push_back(change);
    result.diag.final_change = change;
    ++result.diag.iterations;
    if (change < eps) return result;
  }
  throw Error(Errc::MaxIterations, "stationary iteration did not converge");
}

}  // namespace mmswitch
