#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mmswitch/bellman.hpp"

namespace mmswitch {

// Action label per (layer, node, policy): kContinue or the target policy.
struct StrategyTable {
  static constexpr int8_t kContinue = -1;

  std::shared_ptr<const SimplexLattice> lattice;
  int num_policies = 0;
  bool stationary = false;
  double dt = 0.0;
  double eps_switch = 0.0;
  std::vector<std::vector<int8_t>> layers;  // [layer][node * A + a]

  int num_layers() const { return static_cast<int>(layers.size()); }
  int8_t action(int layer, size_t node, int a) const {
    return layers[layer][node * num_policies + a];
  }
};

inline double default_eps_switch(const ValueSurface& surface) {
  const SwitchingModel& model = surface.model;
  const double scale = surface.stationary ? model.cmax / model.rho
                                          : model.cmax * surface.horizon;
  return 1e-6 * std::max(1.0, scale);
}

// Labels each node: switch-to-b where the value gap to the best intervention
// closes within eps_switch, continue elsewhere.
inline StrategyTable classify_regions(const ValueSurface& surface, double eps_switch = 0.0) {
  if (eps_switch <= 0.0) eps_switch = default_eps_switch(surface);
  const SwitchingModel& model = surface.model;
  const int A = surface.num_policies;
  const size_t n = surface.lattice->size();

  StrategyTable table;
  table.lattice = surface.lattice;
  table.num_policies = A;
  table.stationary = surface.stationary;
  table.dt = surface.dt;
  table.eps_switch = eps_switch;
  table.layers.assign(surface.num_layers(), std::vector<int8_t>(n * A, StrategyTable::kContinue));

  for (int l = 0; l < surface.num_layers(); ++l) {
    const auto& vals = surface.layers[l];
    auto& labels = table.layers[l];
    for (size_t p = 0; p < n; ++p) {
      const double* pi = surface.lattice->belief(p);
      for (int a = 0; a < A; ++a) {
        const Intervention iv = intervene_from_values(model, &vals[p * A], pi, a);
        const double gap = vals[p * A + a] - iv.value;
        if (gap <= eps_switch) labels[p * A + a] = static_cast<int8_t>(iv.policy);
      }
    }
  }
  return table;
}

// Extremal first coordinate of the switch-to-b region per layer (two hidden
// states only): the switching boundaries of the region plots.
struct BoundarySlice {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
};

inline std::vector<BoundarySlice> boundary_curve(const StrategyTable& table, int a, int b) {
  if (table.lattice->dim() != 2)
    throw Error(Errc::ConfigError, "scalar boundary curves need two states");
  std::vector<BoundarySlice> out(table.num_layers());
  for (int l = 0; l < table.num_layers(); ++l) {
    BoundarySlice slice;
    for (size_t p = 0; p < table.lattice->size(); ++p) {
      if (table.action(l, p, a) != b) continue;
      const double pi1 = table.lattice->belief(p)[0];
      if (slice.empty) {
        slice = {false, pi1, pi1};
      } else {
        slice.lo = std::min(slice.lo, pi1);
        slice.hi = std::max(slice.hi, pi1);
      }
    }
    out[l] = slice;
  }
  return out;
}

// Nodes of the switch-to-b region that touch a node with a different label:
// the region outline for simplex plots (three and more states).
inline std::vector<std::vector<size_t>> boundary_nodes(const StrategyTable& table, int a,
                                                       int b) {
  const SimplexLattice& lat = *table.lattice;
  const int m = lat.dim();
  std::vector<std::vector<size_t>> out(table.num_layers());
  std::vector<int> k(m);
  for (int l = 0; l < table.num_layers(); ++l) {
    for (size_t p = 0; p < lat.size(); ++p) {
      if (table.action(l, p, a) != b) continue;
      const int* kp = lat.tuple(p);
      bool edge = false;
      for (int i = 0; i < m && !edge; ++i) {
        for (int j = 0; j < m && !edge; ++j) {
          if (i == j || kp[i] == 0) continue;
          std::copy(kp, kp + m, k.begin());
          k[i] -= 1;
          k[j] += 1;
          const size_t q = lat.index_of(k.data());
          if (table.action(l, q, a) != b) edge = true;
        }
      }
      if (edge) out[l].push_back(p);
    }
  }
  return out;
}

struct Decision {
  bool do_switch = false;
  int to = -1;
};

// Executable optimal policy: switch wherever the interpolated value gap
// closes within eps_switch, to the smallest best policy. Horizon lookups are
// conservative (nearest layer below the remaining time).
class Controller {
 public:
  Controller(const ValueSurface& surface, double eps_switch = 0.0)
      : surface_(&surface),
        eps_switch_(eps_switch > 0.0 ? eps_switch : default_eps_switch(surface)) {}

  const ValueSurface& surface() const { return *surface_; }
  double eps_switch() const { return eps_switch_; }

  // U(tau, pi, a) - MU(tau, pi, a), interpolated.
  double gap(const double* pi, double tau, int a) const {
    const int layer = layer_of(tau);
    const Intervention iv = intervene(*surface_, layer, pi, a);
    return surface_->eval(layer, pi, a) - iv.value;
  }

  Decision decide(const double* pi, double tau, int a) const {
    const int layer = layer_of(tau);
    const Intervention iv = intervene(*surface_, layer, pi, a);
    const double gap = surface_->eval(layer, pi, a) - iv.value;
    if (gap <= eps_switch_) return {true, iv.policy};
    return {false, -1};
  }
  Decision decide(const Belief& pi, double tau, int a) const {
    return decide(pi.data(), tau, a);
  }

 private:
  int layer_of(double tau) const {
    if (surface_->stationary) return 0;
    return surface_->layer_for(tau);
  }

  const ValueSurface* surface_;
  double eps_switch_;
};

}  // namespace mmswitch
