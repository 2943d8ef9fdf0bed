#pragma once

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmswitch/io.hpp"

namespace mmswitch {

inline constexpr const char* kToolVersion = "0.1.0";

namespace cli {

// Exit codes: 0 ok, 2 config, 3 solver/runtime, 4 artifact mismatch, 5 check
// failure.

inline int load_validated(const std::string& config_path, SwitchingModel& model) {
  try {
    model = load_model(config_path);
  } catch (const Error& e) {
    std::cout << "config error: " << e.what() << "\n";
    return 2;
  }
  const auto issues = validate(model);
  if (!issues.empty()) {
    std::cout << "config validation failed for " << config_path << ":\n";
    for (const auto& i : issues) std::cout << "  - " << i.message << "\n";
    return 2;
  }
  return 0;
}

inline std::optional<std::vector<double>> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (cur.empty()) return std::nullopt;
      try {
        out.push_back(std::stod(cur));
      } catch (...) {
        return std::nullopt;
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

inline std::optional<std::vector<std::pair<double, int>>> parse_arrivals(
    const std::string& text) {
  // "t:mark,t:mark" with 1-based mark indices.
  std::vector<std::pair<double, int>> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      const auto colon = cur.find(':');
      if (colon == std::string::npos) return std::nullopt;
      try {
        out.emplace_back(std::stod(cur.substr(0, colon)),
                         std::stoi(cur.substr(colon + 1)) - 1);
      } catch (...) {
        return std::nullopt;
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

struct SolveOptions {
  std::string config;
  std::string out = "out";
  double horizon = 0.0;
  bool infinite = false;
  double dt = 0.0;
  int grid = 0;
  double eps_fix = 0.0;
  double eps_switch = 0.0;
  int threads = 0;
  bool no_svg = false;
};

inline int cmd_solve(const SolveOptions& opt) {
  SwitchingModel model;
  if (int rc = load_validated(opt.config, model)) return rc;
  if (!opt.infinite && !(opt.horizon > 0.0)) {
    std::cout << "solve needs --horizon T > 0 or --infinite\n";
    return 2;
  }

  SolverConfig cfg;
  cfg.dt = opt.dt;
  cfg.grid_n = opt.grid;
  cfg.eps_fix = opt.eps_fix;
  cfg.threads = opt.threads;

  SolveResult res;
  try {
    res = opt.infinite ? solve_infinite(model, cfg)
                       : solve_finite(model, opt.horizon, cfg);
  } catch (const Error& e) {
    std::cout << "solver error: " << e.what() << "\n";
    return 3;
  }

  const ValueSurface& surface = res.surface;
  const double eps_switch =
      opt.eps_switch > 0.0 ? opt.eps_switch : default_eps_switch(surface);
  StrategyTable table = classify_regions(surface, eps_switch);

  fs::create_directories(opt.out);
  std::vector<std::string> outputs;
  try {
    write_values_csv(fs::path(opt.out) / "values.csv", surface);
    outputs.push_back("values.csv");
    write_strategy_csv(fs::path(opt.out) / "strategy.csv", table, model,
                       surface.horizon);
    outputs.push_back("strategy.csv");
    if (model.num_states() == 2) {
      write_boundaries_csv(fs::path(opt.out) / "boundaries.csv", table, model,
                           surface.horizon);
      outputs.push_back("boundaries.csv");
    }
    if (!opt.no_svg) {
      if (write_regions_svg(fs::path(opt.out) / "regions.svg", surface, table))
        outputs.push_back("regions.svg");
      if (write_value_svg(fs::path(opt.out) / "value.svg", surface))
        outputs.push_back("value.svg");
    }

    json manifest;
    manifest["tool"] = "mmswitch";
    manifest["version"] = kToolVersion;
    manifest["command"] = "solve";
    manifest["config"] = opt.config;
    manifest["model_hash"] = hash_hex(model_hash(model));
    json params;
    params["mode"] = opt.infinite ? "infinite" : "finite";
    if (!opt.infinite) params["horizon"] = surface.horizon;
    params["dt"] = surface.dt;
    params["grid_n"] = surface.lattice->resolution();
    params["eps_switch"] = eps_switch;
    if (opt.infinite) {
      params["eps_fix"] = res.diag.eps_fix_used;
      params["t_max"] = res.diag.t_max;
      params["iterations"] = res.diag.iterations;
    }
    params["svg"] = !opt.no_svg;
    manifest["params"] = params;
    manifest["outputs"] = outputs;
    write_manifest(opt.out, manifest);
  } catch (const Error& e) {
    std::cout << "output error: " << e.what() << "\n";
    return 3;
  }

  std::cout << "solved " << (opt.infinite ? "stationary" : "finite-horizon")
            << " problem on " << surface.lattice->size() << " nodes";
  if (!opt.infinite)
    std::cout << ", " << surface.num_layers() << " layers";
  else
    std::cout << ", " << res.diag.iterations << " operator iterations";
  std::cout << "; outputs in " << opt.out << "\n";
  return 0;
}

struct SimulateOptions {
  std::string config;
  std::string out = "sim";
  std::string solve_dir;
  std::string strategy = "optimal";
  std::string pi0_text;
  std::string a0_label;
  std::string replay_text;
  double horizon = 0.0;
  uint64_t paths = 10000;
  uint64_t seed = 1;
  int keep_paths = 5;
  double scan_dt = 0.0;
  int threads = 0;
};

inline int cmd_simulate(const SimulateOptions& opt) {
  SwitchingModel model;
  if (int rc = load_validated(opt.config, model)) return rc;
  const int m = model.num_states();

  std::vector<double> pi0_raw(m, 1.0 / m);
  if (!opt.pi0_text.empty()) {
    auto parsed = parse_vector(opt.pi0_text);
    if (!parsed || static_cast<int>(parsed->size()) != m) {
      std::cout << "--pi0 needs " << m << " comma-separated entries\n";
      return 2;
    }
    pi0_raw = *parsed;
  }
  std::optional<Belief> pi0;
  try {
    pi0.emplace(pi0_raw);
  } catch (const Error& e) {
    std::cout << "bad --pi0: " << e.what() << "\n";
    return 2;
  }
  int a0 = 0;
  if (!opt.a0_label.empty()) {
    try {
      a0 = model.policy_index(opt.a0_label);
    } catch (const Error& e) {
      std::cout << e.what() << "\n";
      return 2;
    }
  }

  // The optimal strategy needs a prior solve's outputs.
  std::optional<ValueSurface> surface;
  if (opt.strategy == "optimal") {
    const std::string dir = opt.solve_dir.empty() ? opt.out : opt.solve_dir;
    try {
      json manifest = read_manifest(dir);
      if (manifest.value("command", "") != "solve")
        throw Error(Errc::ArtifactMismatch, "manifest in " + dir + " is not a solve run");
      if (manifest.value("model_hash", "") != hash_hex(model_hash(model)))
        throw Error(Errc::ArtifactMismatch,
                    "model hash mismatch between config and solve artifacts");
      const json& params = manifest["params"];
      const bool stationary = params.value("mode", "finite") == "infinite";
      surface = read_values_csv(
          fs::path(dir) / "values.csv", model, params["grid_n"].get<int>(),
          params["dt"].get<double>(),
          stationary ? std::numeric_limits<double>::infinity()
                     : params["horizon"].get<double>(),
          stationary);
    } catch (const Error& e) {
      std::cout << "solve artifacts unusable: " << e.what() << "\n";
      return 4;
    } catch (const json::exception& e) {
      std::cout << "solve artifacts unusable: " << e.what() << "\n";
      return 4;
    }
  }

  double horizon = opt.horizon;
  if (!(horizon > 0.0)) {
    if (surface && !surface->stationary)
      horizon = surface->horizon;
    else {
      std::cout << "--horizon T > 0 is required here\n";
      return 2;
    }
  }
  if (surface && !surface->stationary && horizon > surface->horizon + 1e-12) {
    std::cout << "--horizon exceeds the solved horizon " << surface->horizon << "\n";
    return 4;
  }

  std::unique_ptr<PathStrategy> strat;
  std::string strategy_name = opt.strategy;
  if (opt.strategy == "optimal") {
    strat = std::make_unique<OptimalStrategy>(*surface);
  } else if (opt.strategy == "none") {
    strat = std::make_unique<NeverSwitch>();
  } else if (opt.strategy == "arrival") {
    strat = std::make_unique<SwitchEveryArrival>(model.num_policies());
  } else if (opt.strategy.rfind("myopic", 0) == 0) {
    double thr = 0.5;
    if (opt.strategy.size() > 7 && opt.strategy[6] == ':')
      thr = std::stod(opt.strategy.substr(7));
    if (m != 2 || model.num_policies() != 2) {
      std::cout << "the myopic threshold strategy needs two states and two policies\n";
      return 2;
    }
    strat = std::make_unique<MyopicThreshold>(thr);
  } else if (opt.strategy.rfind("file:", 0) == 0) {
    const std::string path = opt.strategy.substr(5);
    std::ifstream in(path);
    if (!in) {
      std::cout << "cannot read strategy file " << path << "\n";
      return 2;
    }
    std::vector<std::pair<double, int>> script;
    double t;
    std::string label;
    while (in >> t >> label) {
      try {
        script.emplace_back(t, model.policy_index(label));
      } catch (const Error& e) {
        std::cout << e.what() << "\n";
        return 2;
      }
    }
    strat = std::make_unique<ScriptedStrategy>(std::move(script));
  } else {
    std::cout << "unknown strategy '" << opt.strategy << "'\n";
    return 2;
  }

  const double scan_dt =
      opt.scan_dt > 0.0 ? opt.scan_dt
                        : (surface ? surface->dt : horizon / 400.0);

  fs::create_directories(opt.out);
  json manifest;
  manifest["tool"] = "mmswitch";
  manifest["version"] = kToolVersion;
  manifest["command"] = "simulate";
  manifest["config"] = opt.config;
  manifest["model_hash"] = hash_hex(model_hash(model));
  json params;
  params["strategy"] = strategy_name;
  params["pi0"] = pi0_raw;
  params["a0"] = model.policies[a0];
  params["horizon"] = horizon;
  params["scan_dt"] = scan_dt;
  if (!opt.solve_dir.empty()) params["solve_dir"] = opt.solve_dir;

  try {
    if (!opt.replay_text.empty()) {
      auto arrivals = parse_arrivals(opt.replay_text);
      if (!arrivals) {
        std::cout << "--replay needs \"t:mark,t:mark,...\" with 1-based marks\n";
        return 2;
      }
      SamplePath trace =
          replay_path(model, *strat, *pi0, a0, horizon, *arrivals, scan_dt);
      write_paths_txt(fs::path(opt.out) / "paths.txt", model, {trace});
      params["replay"] = opt.replay_text;
      manifest["params"] = params;
      manifest["outputs"] = {"paths.txt"};
      write_manifest(opt.out, manifest);
      int between = 0, at = 0;
      for (const auto& ev : trace.events) {
        if (ev.type != EventType::Switch) continue;
        bool at_arrival = false;
        for (const auto& arr : *arrivals)
          if (arr.first == ev.t) at_arrival = true;
        (at_arrival ? at : between) += 1;
        std::cout << "switch at t=" << g17(ev.t) << " " << model.policies[ev.a]
                  << " -> " << model.policies[ev.b]
                  << (at_arrival ? " (at arrival)" : " (between arrivals)") << "\n";
      }
      std::cout << "replayed " << arrivals->size() << " arrivals: " << (between + at)
                << " switches (" << between << " between arrivals, " << at
                << " at arrivals)\n";
      return 0;
    }

    EvalConfig ecfg;
    ecfg.scan_dt = scan_dt;
    ecfg.keep_paths = opt.keep_paths;
    ecfg.threads = opt.threads;
    McEstimate est =
        evaluate_strategy(model, *strat, *pi0, a0, horizon, opt.paths, opt.seed, ecfg);

    double solved = std::numeric_limits<double>::quiet_NaN();
    if (surface) {
      const int layer =
          surface->stationary ? 0 : surface->layer_for(horizon);
      solved = surface->eval(layer, pi0->data(), a0);
    }
    write_mc_csv(fs::path(opt.out) / "mc_estimate.csv", strategy_name, model, pi0_raw,
                 a0, horizon, est, solved);
    write_paths_txt(fs::path(opt.out) / "paths.txt", model, est.kept);
    params["paths"] = opt.paths;
    params["seed"] = opt.seed;
    params["keep_paths"] = opt.keep_paths;
    manifest["params"] = params;
    manifest["outputs"] = {"mc_estimate.csv", "paths.txt"};
    write_manifest(opt.out, manifest);

    char line[256];
    std::snprintf(line, sizeof line, "mc estimate: %.6f +/- %.6f (%llu paths)",
                  est.mean, est.std_error,
                  static_cast<unsigned long long>(est.paths));
    std::cout << line << "\n";
    if (!std::isnan(solved)) {
      std::snprintf(line, sizeof line,
                    "solved value at pi0: %.6f (difference %+.6f, %.2f s.e.)", solved,
                    est.mean - solved,
                    est.std_error > 0 ? (est.mean - solved) / est.std_error : 0.0);
      std::cout << line << "\n";
    }
  } catch (const Error& e) {
    std::cout << "simulation error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

struct CheckOptions {
  std::string config;
  std::string out;
  uint64_t paths = 2000;
  uint64_t seed = 7;
  int threads = 0;
};

inline int cmd_check(const CheckOptions& opt) {
  SwitchingModel model;
  if (int rc = load_validated(opt.config, model)) return rc;
  const int m = model.num_states();

  std::vector<std::pair<std::string, std::string>> failures;
  std::ostringstream report;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    const std::string line =
        "check " + name + ": " + (ok ? "PASS" : "FAIL") + " (" + detail + ")";
    std::cout << line << "\n";
    report << line << "\n";
    if (!ok) failures.emplace_back(name, detail);
  };
  char buf[160];

  try {
    // Filter semigroup and normalization.
    {
      Philox rng(opt.seed, 0);
      double worst = 0.0, worst_norm = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(m);
        double sum = 0.0;
        for (double& v : p) sum += (v = 0.05 + rng.next_double());
        for (double& v : p) v /= sum;
        Belief pi(p);
        const double t = 2.0 * rng.next_double(), u = 2.0 * rng.next_double();
        Belief direct = flow_x(model, t + u, pi);
        Belief composed = flow_x(model, u, flow_x(model, t, pi));
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
          worst = std::max(worst, std::fabs(direct[i] - composed[i]));
          s += direct[i];
        }
        worst_norm = std::max(worst_norm, std::fabs(s - 1.0));
      }
      std::snprintf(buf, sizeof buf, "max deviation %.2e", worst);
      check("filter-semigroup", worst < 1e-8, buf);
      std::snprintf(buf, sizeof buf, "max drift %.2e", worst_norm);
      check("filter-normalization", worst_norm < 1e-10, buf);
    }

    // Reduced-scale solve.
    const bool stationary = model.rho > 0.0;
    SolverConfig cfg;
    cfg.grid_n = m <= 2 ? 60 : 20;
    cfg.threads = opt.threads;
    double horizon = 1.0;
    SolveResult res;
    if (stationary) {
      cfg.dt = 0.05;
      cfg.eps_fix = 1e-3 * std::max(model.cmax, 1.0) / model.rho;
      res = solve_infinite(model, cfg);
    } else {
      cfg.dt = 0.01;
      res = solve_finite(model, horizon, cfg);
    }
    const ValueSurface& s = res.surface;
    const size_t n = s.lattice->size();
    const int A = s.num_policies;

    {
      const double bound =
          stationary ? model.cmax / model.rho : model.cmax * horizon;
      double worst = 0.0;
      for (const auto& layer : s.layers)
        for (double v : layer) worst = std::max(worst, std::fabs(v));
      std::snprintf(buf, sizeof buf, "max |value| %.4g vs bound %.4g", worst, bound);
      check("value-bound", worst <= bound + 1e-9, buf);
    }

    if (!stationary) {
      double worst = 0.0;
      for (int l = 1; l < s.num_layers(); ++l)
        for (size_t i = 0; i < s.layers[l].size(); ++i)
          worst = std::max(worst, std::fabs(s.layers[l][i] - s.layers[l - 1][i]));
      std::snprintf(buf, sizeof buf, "max layer step %.4g vs cmax dt %.4g", worst,
                    model.cmax * s.dt);
      check("value-lipschitz", worst <= model.cmax * s.dt + 1e-9, buf);
    }

    {
      Philox rng(opt.seed, 1);
      const double eps_grid =
          4.0 * std::max(model.cmax, 1e-9) *
          (stationary ? 1.0 / model.rho : horizon) / s.lattice->resolution();
      double worst = -1e300;
      const int top = s.num_layers() - 1;
      for (int trial = 0; trial < 200; ++trial) {
        const size_t p = static_cast<size_t>(rng.next_double() * n) % n;
        const size_t q = static_cast<size_t>(rng.next_double() * n) % n;
        std::vector<double> mid(m);
        for (int i = 0; i < m; ++i)
          mid[i] = 0.5 * (s.lattice->belief(p)[i] + s.lattice->belief(q)[i]);
        for (int a = 0; a < A; ++a)
          worst = std::max(worst, s.eval(top, mid.data(), a) -
                                      0.5 * (s.value(top, p, a) + s.value(top, q, a)));
      }
      std::snprintf(buf, sizeof buf, "max midpoint excess %.4g vs %.4g", worst,
                    eps_grid);
      check("value-convexity", worst <= eps_grid, buf);
    }

    {
      double residual = 0.0;
      if (stationary) {
        residual = res.diag.final_change;
        std::snprintf(buf, sizeof buf, "last sup change %.4g vs eps %.4g", residual,
                      res.diag.eps_fix_used);
        check("fixed-point", residual < res.diag.eps_fix_used, buf);
      } else {
        const int top = s.num_layers() - 1;
        auto fresh = recompute_layer(model, s, top, opt.threads);
        for (size_t i = 0; i < fresh.size(); ++i)
          residual = std::max(residual, std::fabs(fresh[i] - s.layers[top][i]));
        std::snprintf(buf, sizeof buf, "top-layer residual %.4g", residual);
        check("fixed-point", residual <= 1e-9 * std::max(model.cmax * horizon, 1.0),
              buf);
      }
    }

    {
      double worst = 0.0;
      for (size_t p = 0; p < n; ++p)
        for (int a = 0; a < A; ++a) {
          const double u0 =
              stationary
                  ? [&] {
                      auto wv = u0_stationary_weights(model, a);
                      double acc = 0.0;
                      for (int i = 0; i < m; ++i) acc += s.lattice->belief(p)[i] * wv[i];
                      return acc;
                    }()
                  : u0_exact(model, horizon, s.lattice->belief(p), a);
          const int top = s.num_layers() - 1;
          worst = std::max(worst, u0 - s.value(top, p, a));
        }
      std::snprintf(buf, sizeof buf, "max U0 excess over U %.4g", worst);
      check("no-action-admissible", worst <= 1e-9, buf);
    }

    // Monte Carlo consistency at reduced scale.
    {
      const double T = stationary ? 2.0 : horizon;
      auto rep = filter_consistency_check(model, Belief::uniform(m), T, opt.paths,
                                          opt.seed, {}, opt.threads);
      std::snprintf(buf, sizeof buf, "max |dev|/se %.2f over %zu entries",
                    rep.max_dev_over_se, rep.entries.size());
      check("tower-property", rep.max_dev_over_se < 3.5 || rep.max_abs_dev < 1e-10,
            buf);
    }
    {
      const double T = stationary ? 2.0 : horizon;
      NeverSwitch never;
      EvalConfig ecfg;
      ecfg.scan_dt = s.dt;
      ecfg.threads = opt.threads;
      McEstimate est = evaluate_strategy(model, never, Belief::uniform(m), 0, T,
                                         opt.paths, opt.seed + 1, ecfg);
      const double expect = u0_exact(model, T, Belief::uniform(m), 0);
      const double tol = 3.5 * est.std_error + 1e-9;
      std::snprintf(buf, sizeof buf, "estimate %.5f vs U0 %.5f (se %.5f)", est.mean,
                    expect, est.std_error);
      check("mc-noaction", std::fabs(est.mean - expect) <= tol, buf);
    }
  } catch (const Error& e) {
    std::cout << "check run error: " << e.what() << "\n";
    return 3;
  }

  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    std::ofstream out = open_out(fs::path(opt.out) / "check_report.txt");
    out << report.str();
  }
  if (!failures.empty()) {
    std::cout << "FAILED checks:";
    for (const auto& f : failures) std::cout << " " << f.first;
    std::cout << "\n";
    return 5;
  }
  std::cout << "all checks passed\n";
  return 0;
}

}  // namespace cli

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"solver and simulator for optimal switching under point-process "
               "observations of a hidden Markov chain"};
  app.require_subcommand(1);
  int rc = 0;

  cli::SolveOptions sopt;
  auto* solve = app.add_subcommand("solve", "compute the value surface and regions");
  solve->add_option("config", sopt.config, "model configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--horizon", sopt.horizon, "finite time horizon T");
  solve->add_flag("--infinite", sopt.infinite, "solve the stationary problem");
  solve->add_option("--dt", sopt.dt, "time step (default T/400)");
  solve->add_option("--grid", sopt.grid, "simplex lattice resolution N");
  solve->add_option("--eps-fix", sopt.eps_fix, "stationary stopping tolerance");
  solve->add_option("--eps-switch", sopt.eps_switch, "region classification tolerance");
  solve->add_option("--out", sopt.out, "output directory (default out)");
  solve->add_option("--threads", sopt.threads, "worker threads (default auto)");
  solve->add_flag("--no-svg", sopt.no_svg, "skip SVG plots");
  solve->callback([&] { rc = cli::cmd_solve(sopt); });

  cli::SimulateOptions mopt;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a strategy");
  sim->add_option("config", mopt.config, "model configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--strategy", mopt.strategy,
                  "optimal | none | myopic[:thr] | arrival | file:PATH");
  sim->add_option("--solve-dir", mopt.solve_dir,
                  "directory with solve outputs (default --out)");
  sim->add_option("--pi0", mopt.pi0_text, "initial belief, comma separated");
  sim->add_option("--a0", mopt.a0_label, "initial policy label");
  sim->add_option("--horizon", mopt.horizon, "simulation horizon");
  sim->add_option("--paths", mopt.paths, "number of Monte Carlo paths");
  sim->add_option("--seed", mopt.seed, "random seed");
  sim->add_option("--keep-paths", mopt.keep_paths, "paths recorded in paths.txt");
  sim->add_option("--scan-dt", mopt.scan_dt, "flow scan step");
  sim->add_option("--replay", mopt.replay_text,
                  "replay fixed arrivals t:mark,... instead of sampling");
  sim->add_option("--out", mopt.out, "output directory (default sim)");
  sim->add_option("--threads", mopt.threads, "worker threads (default auto)");
  sim->callback([&] { rc = cli::cmd_simulate(mopt); });

  cli::CheckOptions copt;
  auto* chk = app.add_subcommand("check", "run reduced-scale invariant checks");
  chk->add_option("config", copt.config, "model configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  chk->add_option("--paths", copt.paths, "Monte Carlo paths per check");
  chk->add_option("--seed", copt.seed, "random seed");
  chk->add_option("--out", copt.out, "optional report directory");
  chk->add_option("--threads", copt.threads, "worker threads (default auto)");
  chk->callback([&] { rc = cli::cmd_check(copt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return rc;
}

inline int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("mmswitch");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mmswitch
