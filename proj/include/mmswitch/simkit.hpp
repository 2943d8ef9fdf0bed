#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mmswitch/config.hpp"
#include "mmswitch/filter.hpp"
#include "mmswitch/parallel.hpp"
#include "mmswitch/rng.hpp"
#include "mmswitch/strategy.hpp"

namespace mmswitch {

enum class EventType : int { Chain = 0, Arrival = 1, Switch = 2 };

struct PathEvent {
  EventType type;
  double t;
  int a = 0;  // Chain: new state; Arrival: mark index; Switch: from-policy
  int b = 0;  // Switch: to-policy
  std::vector<double> belief;  // filtered belief after the event, when recorded
};

// One realized trajectory: hidden chain, observed arrivals, applied switches,
// and the payoff split into its components. The payoff is recomputable from
// the events alone.
struct SamplePath {
  uint64_t seed = 0;
  uint64_t index = 0;
  uint64_t model_hash_v = 0;
  double horizon = 0.0;
  int initial_state = -1;  // -1: observation-only replay, no chain recorded
  int initial_policy = 0;
  std::vector<double> pi0;
  std::vector<PathEvent> events;
  double payoff = 0.0;
  double running_benefit = 0.0;
  double arrival_benefit = 0.0;
  double switch_cost_total = 0.0;

  bool has_chain() const { return initial_state >= 0; }
};

// Exact simulation of the hidden chain and its modulated arrivals. Draw order
// per sojourn: holding time, then arrival gaps with a mark draw after each
// accepted arrival, then the embedded-chain step. Deterministic given
// (seed, index).
inline SamplePath simulate_system(const SwitchingModel& model, const Belief& pi0,
                                  double T, uint64_t seed, uint64_t index = 0) {
  if (!(T > 0.0)) throw Error(Errc::NegativeTime, "simulation horizon must be positive");
  const int m = model.num_states();
  const int d = model.num_marks();
  Philox rng(seed, index);

  SamplePath path;
  path.seed = seed;
  path.index = index;
  path.model_hash_v = model_hash(model);
  path.horizon = T;
  path.pi0.assign(pi0.data(), pi0.data() + m);
  path.initial_state = rng.next_categorical(pi0.data(), m);

  int state = path.initial_state;
  double t = 0.0;
  std::vector<double> embedded(m);
  while (t < T) {
    const double out_rate = -model.Q(state, state);
    const double t_jump =
        out_rate > 0.0 ? t + rng.next_exponential(out_rate)
                       : std::numeric_limits<double>::infinity();
    const double sojourn_end = std::min(t_jump, T);
    double s = t;
    for (;;) {
      s += rng.next_exponential(model.lambda[state]);
      if (s >= sojourn_end) break;
      const int mark = rng.next_categorical(model.nu.row(state), d);
      path.events.push_back({EventType::Arrival, s, mark, 0, {}});
    }
    if (t_jump >= T) break;
    double norm = 0.0;
    for (int j = 0; j < m; ++j) {
      embedded[j] = j == state ? 0.0 : std::max(model.Q(state, j), 0.0) / out_rate;
      norm += embedded[j];
    }
    (void)norm;
    const int next_state = rng.next_categorical(embedded.data(), m);
    path.events.push_back({EventType::Chain, t_jump, next_state, 0, {}});
    state = next_state;
    t = t_jump;
  }
  return path;
}

// Strategy driven along a filtered path. The evaluator feeds it only the
// belief and the remaining horizon, never the hidden state.
class PathStrategy {
 public:
  virtual ~PathStrategy() = default;
  // Continuous score whose <= 0 sublevel set is the switch region.
  virtual double score(const double* pi, double tau, int a) const = 0;
  virtual int target(const double* pi, double tau, int a) const = 0;
  // False when the switch set cannot be entered between arrivals.
  virtual bool tracks_flow() const { return true; }
  // True for strategies that act exactly at arrivals, regardless of score.
  virtual bool arrival_only() const { return false; }
  // Non-null for scripted strategies: fixed (time, to-policy) switches.
  virtual const std::vector<std::pair<double, int>>* script() const { return nullptr; }
};

class OptimalStrategy : public PathStrategy {
 public:
  explicit OptimalStrategy(const ValueSurface& surface, double eps_switch = 0.0)
      : ctrl_(surface, eps_switch) {}
  double score(const double* pi, double tau, int a) const override {
    return ctrl_.gap(pi, std::max(tau, 0.0), a) - ctrl_.eps_switch();
  }
  int target(const double* pi, double tau, int a) const override {
    return ctrl_.decide(pi, std::max(tau, 0.0), a).to;
  }
  const Controller& controller() const { return ctrl_; }

 private:
  Controller ctrl_;
};

class NeverSwitch : public PathStrategy {
 public:
  double score(const double*, double, int) const override { return 1.0; }
  int target(const double*, double, int a) const override { return a; }
  bool tracks_flow() const override { return false; }
};

// Two-state, two-policy threshold rule: hold policy 0 while pi_1 stays above
// the threshold, policy 1 below it. A small hysteresis band keeps the rule
// from oscillating on the boundary itself.
class MyopicThreshold : public PathStrategy {
 public:
  explicit MyopicThreshold(double threshold, double band = 1e-6)
      : thr_(threshold), band_(band) {}
  double score(const double* pi, double, int a) const override {
    return a == 0 ? pi[0] - (thr_ - band_) : (thr_ + band_) - pi[0];
  }
  int target(const double*, double, int a) const override { return 1 - a; }

 private:
  double thr_, band_;
};

class SwitchEveryArrival : public PathStrategy {
 public:
  explicit SwitchEveryArrival(int num_policies) : A_(num_policies) {}
  double score(const double*, double, int) const override { return 1.0; }
  int target(const double*, double, int a) const override { return (a + 1) % A_; }
  bool tracks_flow() const override { return false; }
  bool arrival_only() const override { return true; }

 private:
  int A_;
};

class ScriptedStrategy : public PathStrategy {
 public:
  explicit ScriptedStrategy(std::vector<std::pair<double, int>> switches)
      : switches_(std::move(switches)) {}
  double score(const double*, double, int) const override { return 1.0; }
  int target(const double*, double, int a) const override { return a; }
  bool tracks_flow() const override { return false; }
  const std::vector<std::pair<double, int>>* script() const override { return &switches_; }

 private:
  std::vector<std::pair<double, int>> switches_;
};

struct EvalConfig {
  double scan_dt = 0.0;    // 0: horizon / 400
  double bisect_tol = 0.0; // 0: scan_dt / 100
  int keep_paths = 0;      // record full detail for the first k paths
  int threads = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  uint64_t paths = 0;
  uint64_t seed = 0;
  std::vector<SamplePath> kept;
};

namespace detail {

inline double pairwise_sum(const double* x, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double discount_integral(double rho, double u0, double u1) {
  if (rho == 0.0) return u1 - u0;
  return (std::exp(-rho * u0) - std::exp(-rho * u1)) / rho;
}

struct PathWalker {
  const SwitchingModel& model;
  const PathStrategy& strat;
  const FlowCache& scan;
  double horizon;
  double tol;
  bool record_beliefs;

  std::vector<double> pi;      // current filtered belief
  double t_seg = 0.0;          // time the belief above refers to
  int policy = 0;
  double last_switch = -1.0;
  std::vector<PathEvent> switches;

  PathWalker(const SwitchingModel& mdl, const PathStrategy& st, const FlowCache& sc,
             double T, double tol_, bool record)
      : model(mdl), strat(st), scan(sc), horizon(T), tol(tol_), record_beliefs(record) {}

  void record_switch(double t, int from, int to, const double* belief_at) {
    PathEvent ev{EventType::Switch, t, from, to, {}};
    if (record_beliefs)
      ev.belief.assign(belief_at, belief_at + model.num_states());
    switches.push_back(std::move(ev));
    last_switch = t;
  }

  // At-an-instant decision; at most one switch may fire per instant.
  void instant_check(double t, bool at_arrival) {
    const double tau = horizon - t;
    bool want;
    if (at_arrival && strat.arrival_only()) {
      want = true;
    } else if (strat.arrival_only()) {
      want = false;
    } else {
      want = strat.score(pi.data(), tau, policy) <= 0.0;
    }
    if (!want) return;
    if (t <= last_switch)
      throw Error(Errc::InadmissibleStrategy, "two switches at the same instant");
    const int to = strat.target(pi.data(), tau, policy);
    if (to == policy)
      throw Error(Errc::InadmissibleStrategy, "switch to the current policy");
    record_switch(t, policy, to, pi.data());
    policy = to;
    if (!strat.arrival_only() && strat.score(pi.data(), horizon - t, policy) <= 0.0)
      throw Error(Errc::InadmissibleStrategy, "strategy chatters at one instant");
  }

  // Flows the belief to t_end, applying any switch the strategy requests
  // along the way. Crossings within one bisection tolerance of t_end are
  // deferred to the decision at t_end itself.
  void advance_to(double t_end) {
    if (t_end <= t_seg + 1e-15) {
      t_seg = std::max(t_seg, t_end);
      return;
    }
    const int m = model.num_states();
    std::vector<double> cur = pi, nxt(m), probe(m);
    double t_cur = t_seg;
    if (!strat.tracks_flow()) {
      flow_x_raw(model, t_end - t_seg, pi.data(), nxt.data());
      pi = nxt;
      t_seg = t_end;
      return;
    }
    while (t_cur < t_end - 1e-15) {
      const bool full_step = t_cur + scan.dt <= t_end;
      const double t_next = full_step ? t_cur + scan.dt : t_end;
      if (full_step) {
        vec_mat(cur.data(), scan.P, nxt.data());
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
          if (nxt[i] < 0.0) nxt[i] = 0.0;
          s += nxt[i];
        }
        for (int i = 0; i < m; ++i) nxt[i] /= s;
      } else {
        flow_x_raw(model, t_next - t_cur, cur.data(), nxt.data());
      }
      if (strat.score(nxt.data(), horizon - t_next, policy) <= 0.0) {
        // Bracketed crossing in (t_cur, t_next]; bisect to tolerance.
        double lo = t_cur, hi = t_next;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          flow_x_raw(model, mid - t_cur, cur.data(), probe.data());
          if (strat.score(probe.data(), horizon - mid, policy) <= 0.0)
            hi = mid;
          else
            lo = mid;
        }
        if (t_end - hi <= tol) {
          // Defer to the decision at the segment end.
          pi = nxt;
          t_seg = t_next;
          if (t_next >= t_end - 1e-15) return;
          cur = nxt;
          t_cur = t_next;
          continue;
        }
        flow_x_raw(model, hi - t_cur, cur.data(), probe.data());
        const double tau = horizon - hi;
        const int to = strat.target(probe.data(), tau, policy);
        if (to == policy)
          throw Error(Errc::InadmissibleStrategy, "switch to the current policy");
        if (hi <= last_switch)
          throw Error(Errc::InadmissibleStrategy, "switch time did not advance");
        record_switch(hi, policy, to, probe.data());
        policy = to;
        if (strat.score(probe.data(), tau, policy) <= 0.0)
          throw Error(Errc::InadmissibleStrategy, "strategy chatters after a switch");
        cur = probe;
        t_cur = hi;
        pi = probe;
        t_seg = hi;
        continue;
      }
      cur = nxt;
      t_cur = t_next;
      pi = cur;
      t_seg = t_cur;
    }
  }
};

}  // namespace detail

// Runs a strategy along the observed arrivals of `path`, inserting SWITCH
// events. The strategy sees the filtered belief only. Scripted strategies
// bypass the controller logic and replay their fixed switch times.
inline void run_strategy_on_path(const SwitchingModel& model, const PathStrategy& strat,
                                 SamplePath& path, const Belief& pi0, int a0,
                                 const FlowCache& scan, double bisect_tol,
                                 bool record_beliefs) {
  const int m = model.num_states();
  const double T = path.horizon;
  path.initial_policy = a0;

  std::vector<std::pair<double, int>> arrivals;
  for (const auto& ev : path.events)
    if (ev.type == EventType::Arrival) arrivals.emplace_back(ev.t, ev.a);

  std::vector<PathEvent> switches;
  std::vector<std::vector<double>> arrival_beliefs(record_beliefs ? arrivals.size() : 0);

  if (const auto* script = strat.script()) {
    double prev = -1.0;
    for (const auto& [t, to] : *script) {
      if (t < 0.0 || t <= prev)
        throw Error(Errc::InadmissibleStrategy,
                    "scripted switch times must be strictly increasing and nonnegative");
      prev = t;
    }
    int policy = a0;
    for (const auto& [t, to] : *script) {
      if (t > T) break;
      if (to < 0 || to >= model.num_policies())
        throw Error(Errc::InadmissibleStrategy, "scripted switch to unknown policy");
      PathEvent ev{EventType::Switch, t, policy, to, {}};
      switches.push_back(ev);
      policy = to;
    }
    if (record_beliefs) {
      // Track the filter for the trace even though the script ignores it.
      auto traj = filter_path(model, arrivals, pi0, T, {});
      for (size_t k = 0; k < arrivals.size(); ++k)
        arrival_beliefs[k] = traj.arrivals[k].post;
    }
  } else {
    detail::PathWalker walker(model, strat, scan, T, bisect_tol, record_beliefs);
    walker.pi.assign(pi0.data(), pi0.data() + m);
    walker.policy = a0;
    walker.instant_check(0.0, false);
    for (size_t k = 0; k < arrivals.size(); ++k) {
      walker.advance_to(arrivals[k].first);
      jump_update_raw(model, walker.pi.data(), arrivals[k].second, walker.pi.data());
      if (record_beliefs) arrival_beliefs[k] = walker.pi;
      walker.instant_check(arrivals[k].first, true);
    }
    walker.advance_to(T);
    switches = std::move(walker.switches);
  }

  // Merge switches into the event list; at equal times arrivals precede the
  // switches they trigger.
  if (record_beliefs) {
    size_t k = 0;
    for (auto& ev : path.events)
      if (ev.type == EventType::Arrival) ev.belief = arrival_beliefs[k++];
  }
  std::vector<PathEvent> merged;
  merged.reserve(path.events.size() + switches.size());
  size_t i = 0, j = 0;
  while (i < path.events.size() || j < switches.size()) {
    const bool take_event =
        j >= switches.size() ||
        (i < path.events.size() && path.events[i].t <= switches[j].t);
    if (take_event)
      merged.push_back(std::move(path.events[i++]));
    else
      merged.push_back(std::move(switches[j++]));
  }
  path.events = std::move(merged);
}

// Discounted payoff of a path from its event record: running benefit at the
// hidden state's rate, per-arrival benefits, switch costs at the hidden state
// in force. Requires a recorded chain.
inline void assemble_payoff(const SwitchingModel& model, SamplePath& path) {
  if (!path.has_chain())
    throw Error(Errc::ConfigError, "cannot price a path without its hidden chain");
  const double rho = model.rho;
  double running = 0.0, arrival = 0.0, cost = 0.0;
  double t_cur = 0.0;
  int state = path.initial_state;
  int policy = path.initial_policy;
  for (const auto& ev : path.events) {
    running += model.c(state, policy) * detail::discount_integral(rho, t_cur, ev.t);
    t_cur = ev.t;
    switch (ev.type) {
      case EventType::Chain:
        state = ev.a;
        break;
      case EventType::Arrival:
        if (model.has_arrival_benefits())
          arrival += std::exp(-rho * ev.t) * model.c1(ev.a, policy);
        break;
      case EventType::Switch:
        if (ev.a != policy)
          throw Error(Errc::InadmissibleStrategy, "switch record out of sequence");
        cost += std::exp(-rho * ev.t) * model.switch_cost(state, ev.a, ev.b);
        policy = ev.b;
        break;
    }
  }
  running += model.c(state, policy) * detail::discount_integral(rho, t_cur, path.horizon);
  path.running_benefit = running;
  path.arrival_benefit = arrival;
  path.switch_cost_total = cost;
  path.payoff = running + arrival - cost;
}

// Monte Carlo estimate of a strategy's expected discounted payoff. Paths are
// independent substreams; the reduction is a fixed pairwise tree, so the
// estimate does not depend on the thread count.
inline McEstimate evaluate_strategy(const SwitchingModel& model, const PathStrategy& strat,
                                    const Belief& pi0, int a0, double T, uint64_t paths,
                                    uint64_t seed, const EvalConfig& cfg = {}) {
  if (paths == 0) throw Error(Errc::ConfigError, "need at least one path");
  const double scan_dt = cfg.scan_dt > 0.0 ? cfg.scan_dt : T / 400.0;
  const double tol = cfg.bisect_tol > 0.0 ? cfg.bisect_tol : scan_dt / 100.0;
  const FlowCache scan(model, scan_dt);

  McEstimate est;
  est.paths = paths;
  est.seed = seed;
  est.kept.resize(std::min<uint64_t>(cfg.keep_paths, paths));

  std::vector<double> payoffs(paths);
  parallel_for(paths, cfg.threads, [&](size_t begin, size_t end) {
    for (size_t idx = begin; idx < end; ++idx) {
      SamplePath path = simulate_system(model, pi0, T, seed, idx);
      const bool keep = idx < est.kept.size();
      run_strategy_on_path(model, strat, path, pi0, a0, scan, tol, keep);
      assemble_payoff(model, path);
      payoffs[idx] = path.payoff;
      if (keep) est.kept[idx] = std::move(path);
    }
  });

  est.mean = detail::pairwise_sum(payoffs.data(), paths) / static_cast<double>(paths);
  if (paths > 1) {
    std::vector<double> sq(paths);
    for (size_t i = 0; i < paths; ++i) {
      const double d = payoffs[i] - est.mean;
      sq[i] = d * d;
    }
    const double var =
        detail::pairwise_sum(sq.data(), paths) / static_cast<double>(paths - 1);
    est.std_error = std::sqrt(var / static_cast<double>(paths));
  }
  return est;
}

// Observation-only replay: runs the filter and a strategy along a fixed
// arrival sequence. No chain is simulated, so the result carries switch and
// belief records but no payoff.
inline SamplePath replay_path(const SwitchingModel& model, const PathStrategy& strat,
                              const Belief& pi0,
                              int a0, double T,
                              const std::vector<std::pair<double, int>>& arrivals,
                              double scan_dt = 0.0) {
  SamplePath path;
  path.horizon = T;
  path.model_hash_v = model_hash(model);
  path.pi0.assign(pi0.data(), pi0.data() + model.num_states());
  for (size_t k = 0; k < arrivals.size(); ++k) {
    if (arrivals[k].first <= 0.0 || arrivals[k].first > T ||
        (k > 0 && arrivals[k].first <= arrivals[k - 1].first))
      throw Error(Errc::UnsortedArrivals, "replay arrivals must be strictly increasing");
    path.events.push_back({EventType::Arrival, arrivals[k].first, arrivals[k].second, 0, {}});
  }
  const double step = scan_dt > 0.0 ? scan_dt : T / 400.0;
  const FlowCache scan(model, step);
  run_strategy_on_path(model, strat, path, pi0, a0, scan, step / 100.0, true);
  return path;
}

// Tower-property check: path averages of the filtered belief against the
// unconditional law pi0 e^{tQ} at a set of checkpoints.
struct FilterCheckEntry {
  double t = 0.0;
  int state = 0;
  double expected = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct FilterCheckReport {
  std::vector<FilterCheckEntry> entries;
  double max_abs_dev = 0.0;
  double max_dev_over_se = 0.0;
};

inline FilterCheckReport filter_consistency_check(const SwitchingModel& model,
                                                  const Belief& pi0, double T,
                                                  uint64_t paths, uint64_t seed,
                                                  std::vector<double> checkpoints = {},
                                                  int threads = 0) {
  const int m = model.num_states();
  if (checkpoints.empty()) checkpoints = {T / 4.0, T / 2.0, T};
  std::sort(checkpoints.begin(), checkpoints.end());
  const size_t nc = checkpoints.size();

  std::vector<double> samples(paths * nc * m);
  parallel_for(paths, threads, [&](size_t begin, size_t end) {
    for (size_t idx = begin; idx < end; ++idx) {
      SamplePath path = simulate_system(model, pi0, T, seed, idx);
      std::vector<std::pair<double, int>> arrivals;
      for (const auto& ev : path.events)
        if (ev.type == EventType::Arrival) arrivals.emplace_back(ev.t, ev.a);
      auto traj = filter_path(model, arrivals, pi0, T, checkpoints);
      for (size_t c = 0; c < nc; ++c)
        for (int i = 0; i < m; ++i)
          samples[(idx * nc + c) * m + i] = traj.samples[c].pi[i];
    }
  });

  FilterCheckReport report;
  std::vector<double> column(paths);
  for (size_t c = 0; c < nc; ++c) {
    Mat law = expm(checkpoints[c] * model.Q);
    for (int i = 0; i < m; ++i) {
      double expected = 0.0;
      for (int j = 0; j < m; ++j) expected += pi0[j] * law(j, i);
      for (size_t idx = 0; idx < paths; ++idx)
        column[idx] = samples[(idx * nc + c) * m + i];
      const double mean =
          detail::pairwise_sum(column.data(), paths) / static_cast<double>(paths);
      double se = 0.0;
      if (paths > 1) {
        for (size_t idx = 0; idx < paths; ++idx) {
          const double dev = column[idx] - mean;
          column[idx] = dev * dev;
        }
        se = std::sqrt(detail::pairwise_sum(column.data(), paths) /
                       static_cast<double>(paths - 1) / static_cast<double>(paths));
      }
      report.entries.push_back({checkpoints[c], i, expected, mean, se});
      const double dev = std::fabs(mean - expected);
      report.max_abs_dev = std::max(report.max_abs_dev, dev);
      if (se > 0.0)
        report.max_dev_over_se = std::max(report.max_dev_over_se, dev / se);
    }
  }
  return report;
}

}  // namespace mmswitch
