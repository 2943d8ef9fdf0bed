#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "mmswitch/errors.hpp"
#include "mmswitch/linalg.hpp"

namespace mmswitch {

// Problem instance: hidden chain, observation process, costs. Immutable after
// validate(); all operations on it are pure.
struct SwitchingModel {
  std::vector<std::string> states;    // m hidden-state labels
  Mat Q;                              // m x m generator
  std::vector<double> lambda;         // m arrival intensities
  std::vector<double> marks;          // d mark values
  Mat nu;                             // m x d mark distribution per state
  std::vector<std::string> policies;  // A policy labels
  Mat c;                              // m x A running benefit rates
  Mat c1;                             // d x A per-arrival benefits (empty = none)
  std::vector<double> K;              // m*A*A switch costs, K[(i*A+a)*A+b]
  double rho = 0.0;

  // Derived constants cached by validate().
  double cmax = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double k0 = 0.0;
  bool validated = false;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_policies() const { return static_cast<int>(policies.size()); }
  int num_marks() const { return static_cast<int>(marks.size()); }

  double switch_cost(int i, int a, int b) const {
    const int A = num_policies();
    return K[(static_cast<size_t>(i) * A + a) * A + b];
  }
  double& switch_cost(int i, int a, int b) {
    const int A = num_policies();
    return K[(static_cast<size_t>(i) * A + a) * A + b];
  }

  bool has_arrival_benefits() const { return !c1.empty(); }

  // Per-arrival expected benefit in state i under policy a: sum_j nu[i][j]*c1[j][a].
  double arrival_benefit(int i, int a) const {
    if (c1.empty()) return 0.0;
    double s = 0.0;
    for (int j = 0; j < num_marks(); ++j) s += nu(i, j) * c1(j, a);
    return s;
  }

  // Effective benefit rate c_i(a) + lambda_i * E[c1(Y,a) | state i]; the
  // running-cost rate that already accounts for arrival benefits.
  double effective_rate(int i, int a) const {
    return c(i, a) + lambda[i] * arrival_benefit(i, a);
  }

  int policy_index(const std::string& label) const {
    for (int a = 0; a < num_policies(); ++a)
      if (policies[a] == label) return a;
    throw Error(Errc::ConfigError, "unknown policy label '" + label + "'");
  }
};

inline std::vector<ValidationIssue> validate(SwitchingModel& model) {
  std::vector<ValidationIssue> issues;
  const int m = model.num_states();
  const int A = model.num_policies();
  const int d = model.num_marks();
  auto add = [&issues](Errc code, const std::string& msg) {
    issues.push_back({code, msg});
  };
  char buf[256];

  if (m < 1) add(Errc::ConfigError, "at least one state required");
  if (A < 2) add(Errc::ConfigError, "at least two policies required");
  if (d < 1) add(Errc::ConfigError, "at least one mark required");
  if (model.Q.rows() != m || model.Q.cols() != m)
    add(Errc::ConfigError, "Q must be m x m");
  if (static_cast<int>(model.lambda.size()) != m)
    add(Errc::ConfigError, "lambda must have one entry per state");
  if (model.nu.rows() != m || model.nu.cols() != d)
    add(Errc::ConfigError, "nu must be m x d");
  if (model.c.rows() != m || model.c.cols() != A)
    add(Errc::BadCostMatrix, "c must be m x A");
  if (!model.c1.empty() && (model.c1.rows() != d || model.c1.cols() != A))
    add(Errc::BadCostMatrix, "c1 must be d x A");
  if (model.K.size() != static_cast<size_t>(m) * A * A)
    add(Errc::ConfigError, "K must be m x A x A");
  if (model.rho < 0.0) add(Errc::ConfigError, "rho must be nonnegative");
  if (!issues.empty()) return issues;

  // Generator rows sum to zero with nonnegative off-diagonals.
  for (int i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      row_sum += model.Q(i, j);
      if (i != j && model.Q(i, j) < 0.0) {
        std::snprintf(buf, sizeof buf, "Q[%d][%d] = %g is negative off-diagonal", i, j,
                      model.Q(i, j));
        add(Errc::NonGenerator, buf);
      }
    }
    if (std::fabs(row_sum) > 1e-9) {
      std::snprintf(buf, sizeof buf, "Q row %d sums to %g, expected 0", i, row_sum);
      add(Errc::NonGenerator, buf);
    }
  }

  for (int i = 0; i < m; ++i) {
    if (!(model.lambda[i] > 0.0)) {
      std::snprintf(buf, sizeof buf, "lambda[%d] = %g must be positive", i,
                    model.lambda[i]);
      add(Errc::NonPositiveIntensity, buf);
    }
    double row_sum = 0.0;
    for (int j = 0; j < d; ++j) {
      row_sum += model.nu(i, j);
      if (model.nu(i, j) < 0.0) {
        std::snprintf(buf, sizeof buf, "nu[%d][%d] = %g is negative", i, j,
                      model.nu(i, j));
        add(Errc::BadStochasticRow, buf);
      }
    }
    if (std::fabs(row_sum - 1.0) > 1e-9) {
      std::snprintf(buf, sizeof buf, "nu row %d sums to %g, expected 1", i, row_sum);
      add(Errc::BadStochasticRow, buf);
    }
  }

  // Switch costs: zero diagonal, strictly positive floor off-diagonal,
  // triangle inequality per state.
  double k0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < A; ++a) {
      if (model.switch_cost(i, a, a) != 0.0) {
        std::snprintf(buf, sizeof buf, "K[%d][%d][%d] must be 0 on the diagonal", i, a, a);
        add(Errc::NonPositiveSwitchCost, buf);
      }
      for (int b = 0; b < A; ++b) {
        if (a == b) continue;
        k0 = std::min(k0, model.switch_cost(i, a, b));
        if (!(model.switch_cost(i, a, b) > 1e-12)) {
          std::snprintf(buf, sizeof buf, "K[%d][%d][%d] = %g must exceed 0", i, a, b,
                        model.switch_cost(i, a, b));
          add(Errc::NonPositiveSwitchCost, buf);
        }
        for (int cc = 0; cc < A; ++cc) {
          const double lhs = model.switch_cost(i, a, b) + model.switch_cost(i, b, cc);
          const double rhs = model.switch_cost(i, a, cc);
          if (lhs < rhs - 1e-12) {
            std::snprintf(buf, sizeof buf,
                          "K[%d][%d][%d] + K[%d][%d][%d] = %g < K[%d][%d][%d] = %g "
                          "violates the triangle inequality",
                          i, a, b, i, b, cc, lhs, i, a, cc, rhs);
            add(Errc::TriangleViolation, buf);
          }
        }
      }
    }
  }

  if (!issues.empty()) return issues;

  model.cmax = 0.0;
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < A; ++a) model.cmax = std::max(model.cmax, std::fabs(model.c(i, a)));
  model.lambda_max = *std::max_element(model.lambda.begin(), model.lambda.end());
  model.lambda_min = *std::min_element(model.lambda.begin(), model.lambda.end());
  model.k0 = k0;
  model.validated = true;
  return issues;
}

inline void ensure_valid(SwitchingModel& model) {
  auto issues = validate(model);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Point on the belief simplex. Construction clamps roundoff-level negatives
// and renormalizes small drift; anything worse is an error.
class Belief {
 public:
  explicit Belief(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw Error(Errc::BadBelief, "empty belief vector");
    double sum = 0.0;
    for (double& v : p_) {
      if (v < 0.0) {
        if (v < -1e-9) throw Error(Errc::BadBelief, "negative belief entry");
        v = 0.0;
      }
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw Error(Errc::BadBelief, "belief entries sum to " + std::to_string(sum));
    if (sum != 1.0)
      for (double& v : p_) v /= sum;
  }

  static Belief vertex(int m, int i) {
    std::vector<double> p(m, 0.0);
    p[i] = 1.0;
    return Belief(std::move(p));
  }
  static Belief uniform(int m) {
    return Belief(std::vector<double>(m, 1.0 / m));
  }

  int size() const { return static_cast<int>(p_.size()); }
  const std::vector<double>& p() const { return p_; }
  const double* data() const { return p_.data(); }
  double operator[](int i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

// C(pi, a) = sum_i c_i(a) pi_i.
inline double cost_C(const SwitchingModel& model, const double* pi, int a) {
  double s = 0.0;
  for (int i = 0; i < model.num_states(); ++i) s += model.c(i, a) * pi[i];
  return s;
}
inline double cost_C(const SwitchingModel& model, const Belief& pi, int a) {
  return cost_C(model, pi.data(), a);
}

// K(a, b, pi) = sum_i K_i(a,b) pi_i; zero when a == b.
inline double cost_K(const SwitchingModel& model, int a, int b, const double* pi) {
  if (a == b) return 0.0;
  double s = 0.0;
  for (int i = 0; i < model.num_states(); ++i) s += model.switch_cost(i, a, b) * pi[i];
  return s;
}
inline double cost_K(const SwitchingModel& model, int a, int b, const Belief& pi) {
  return cost_K(model, a, b, pi.data());
}

}  // namespace mmswitch
