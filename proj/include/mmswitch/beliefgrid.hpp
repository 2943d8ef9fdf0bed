#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "mmswitch/errors.hpp"
#include "mmswitch/model.hpp"

namespace mmswitch {

// Regular lattice on the belief simplex: all nonnegative integer m-tuples
// summing to N, in lexicographic order, node k mapping to the belief k / N.
// Piecewise-linear interpolation uses the Freudenthal (Kuhn) triangulation in
// cumulative coordinates: cell location is a floor plus a sort of fractional
// parts, so lookups are O(m log m) and the interpolant is continuous across
// cell faces with nonnegative barycentric weights.
class SimplexLattice {
 public:
  SimplexLattice(int m, int N, size_t node_cap = 2000000) : m_(m), N_(N) {
    if (m < 1 || N < 1) throw Error(Errc::ConfigError, "lattice needs m >= 1, N >= 1");
    build_choose_table();
    const uint64_t count = choose(N_ + m_ - 1, m_ - 1);
    if (count > node_cap)
      throw Error(Errc::ResolutionTooLarge,
                  "lattice would have " + std::to_string(count) + " nodes (cap " +
                      std::to_string(node_cap) + ")");
    tuples_.reserve(count * m_);
    std::vector<int> k(m_, 0);
    enumerate(k, 0, N_);
    beliefs_.resize(tuples_.size());
    for (size_t i = 0; i < tuples_.size(); ++i)
      beliefs_[i] = static_cast<double>(tuples_[i]) / N_;
  }

  int dim() const { return m_; }
  int resolution() const { return N_; }
  size_t size() const { return tuples_.size() / m_; }
  const int* tuple(size_t node) const { return &tuples_[node * m_]; }
  const double* belief(size_t node) const { return &beliefs_[node * m_]; }

  size_t index_of(const int* k) const {
    uint64_t rank = 0;
    int remaining = N_;
    for (int j = 0; j < m_ - 1; ++j) {
      const int mj = m_ - 1 - j;  // free coordinates after position j
      rank += choose(remaining + mj, mj) - choose(remaining - k[j] + mj, mj);
      remaining -= k[j];
    }
    return static_cast<size_t>(rank);
  }

  // Vertices and barycentric weights of the cell containing pi. Writes at
  // most m (node index, weight) pairs; zero-weight vertices are dropped.
  int stencil(const double* pi, int32_t* idx, double* w) const {
    if (m_ == 1) {
      idx[0] = 0;
      w[0] = 1.0;
      return 1;
    }
    const int nz = m_ - 1;
    double z[kMaxStates], frac[kMaxStates];
    int base[kMaxStates], order[kMaxStates], zv[kMaxStates];
    double cum = 0.0, lo = 0.0;
    for (int j = 0; j < nz; ++j) {
      cum += pi[j];
      double v = N_ * cum;
      v = std::min(std::max(v, lo), static_cast<double>(N_));
      z[j] = v;
      lo = v;
      base[j] = static_cast<int>(std::floor(v));
      if (base[j] > N_) base[j] = N_;
      frac[j] = v - base[j];
      order[j] = j;
    }
    // Descending fractional part; ties resolved toward the later coordinate,
    // which keeps every vertex inside the ordered region.
    std::sort(order, order + nz, [&](int a, int b) {
      if (frac[a] != frac[b]) return frac[a] > frac[b];
      return a > b;
    });

    for (int j = 0; j < nz; ++j) zv[j] = base[j];
    int count = 0;
    double prev = 1.0;
    for (int t = 0; t <= nz; ++t) {
      const double next = (t < nz) ? frac[order[t]] : 0.0;
      const double weight = prev - next;
      if (weight > 0.0) {
        int k[kMaxStates];
        int prev_z = 0;
        bool ok = true;
        for (int j = 0; j < nz; ++j) {
          k[j] = zv[j] - prev_z;
          prev_z = zv[j];
          if (k[j] < 0) ok = false;
        }
        k[nz] = N_ - prev_z;
        if (k[nz] < 0) ok = false;
        assert(ok && "stencil vertex left the simplex");
        if (ok) {
          idx[count] = static_cast<int32_t>(index_of(k));
          w[count] = weight;
          ++count;
        }
      }
      if (t < nz) zv[order[t]] += 1;
      prev = next;
    }
    return count;
  }

  // Piecewise-linear extension of nodal values; values[node * stride] holds
  // the value at `node`.
  double interpolate(const double* values, size_t stride, const double* pi) const {
    int32_t idx[kMaxStates];
    double w[kMaxStates];
    const int n = stencil(pi, idx, w);
    double acc = 0.0;
    for (int t = 0; t < n; ++t) acc += w[t] * values[static_cast<size_t>(idx[t]) * stride];
    return acc;
  }

  static constexpr int kMaxStates = 64;

 private:
  void build_choose_table() {
    if (m_ > kMaxStates)
      throw Error(Errc::ResolutionTooLarge, "more hidden states than supported");
    const int nmax = N_ + m_ + 1;
    const int kmax = m_ + 1;
    choose_.assign(static_cast<size_t>(nmax) * kmax, 0);
    for (int n = 0; n < nmax; ++n) {
      choose_[static_cast<size_t>(n) * kmax] = 1;
      for (int k = 1; k < kmax && k <= n; ++k) {
        const uint64_t without = choose_[static_cast<size_t>(n - 1) * kmax + k];
        const uint64_t with = choose_[static_cast<size_t>(n - 1) * kmax + (k - 1)];
        choose_[static_cast<size_t>(n) * kmax + k] = without + with;
      }
    }
  }

  uint64_t choose(int n, int k) const {
    if (k < 0 || k > n) return 0;
    return choose_[static_cast<size_t>(n) * (m_ + 1) + k];
  }

  void enumerate(std::vector<int>& k, int pos, int remaining) {
    if (pos == m_ - 1) {
      k[pos] = remaining;
      tuples_.insert(tuples_.end(), k.begin(), k.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[pos] = v;
      enumerate(k, pos + 1, remaining - v);
    }
  }

  int m_, N_;
  std::vector<int> tuples_;
  std::vector<double> beliefs_;
  std::vector<uint64_t> choose_;
};

// Per-policy nodal values over a lattice.
struct NodeFunction {
  std::shared_ptr<const SimplexLattice> lattice;
  int num_policies = 0;
  std::vector<double> values;  // values[node * num_policies + a]

  NodeFunction() = default;
  NodeFunction(std::shared_ptr<const SimplexLattice> lat, int A)
      : lattice(std::move(lat)), num_policies(A),
        values(lattice->size() * static_cast<size_t>(A), 0.0) {}

  double& at(size_t node, int a) { return values[node * num_policies + a]; }
  double at(size_t node, int a) const { return values[node * num_policies + a]; }

  double eval(const double* pi, int a) const {
    return lattice->interpolate(values.data() + a, num_policies, pi);
  }
};

inline std::shared_ptr<SimplexLattice> build_lattice(int m, int N,
                                                     size_t node_cap = 2000000) {
  return std::make_shared<SimplexLattice>(m, N, node_cap);
}

}  // namespace mmswitch
