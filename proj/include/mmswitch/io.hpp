#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mmswitch/bellman.hpp"
#include "mmswitch/config.hpp"
#include "mmswitch/simkit.hpp"
#include "mmswitch/strategy.hpp"

namespace mmswitch {

namespace fs = std::filesystem;

// %.17g round-trips doubles exactly, which is what makes the CSV outputs a
// bit-exact contract.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
  return out;
}

// ---------------------------------------------------------------------------
// Value surface CSV
// ---------------------------------------------------------------------------

inline std::string values_csv_header(const SwitchingModel& model) {
  std::string h = "layer,tau,node";
  for (int i = 0; i < model.num_states(); ++i)
    h += ",pi_" + std::to_string(i + 1);
  h += ",policy,value";
  return h;
}

inline void write_values_csv(const fs::path& p, const ValueSurface& s) {
  std::ofstream out = open_out(p);
  out << values_csv_header(s.model) << "\n";
  const int A = s.num_policies;
  for (int l = 0; l < s.num_layers(); ++l) {
    const std::string tau = s.stationary ? "inf" : g17(s.tau_of(l));
    for (size_t node = 0; node < s.lattice->size(); ++node) {
      std::string prefix = std::to_string(l) + "," + tau + "," + std::to_string(node);
      const double* pi = s.lattice->belief(node);
      for (int i = 0; i < s.lattice->dim(); ++i) prefix += "," + g17(pi[i]);
      for (int a = 0; a < A; ++a)
        out << prefix << "," << s.model.policies[a] << "," << g17(s.value(l, node, a))
            << "\n";
    }
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Rebuilds a surface from values.csv given the solver geometry (normally
// taken from the run manifest).
inline ValueSurface read_values_csv(const fs::path& p, const SwitchingModel& model,
                                    int grid_n, double dt, double horizon,
                                    bool stationary, size_t node_cap = 2000000) {
  std::ifstream in(p);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  ValueSurface s;
  s.model = model;
  s.lattice = build_lattice(model.num_states(), grid_n, node_cap);
  s.dt = dt;
  s.horizon = horizon;
  s.stationary = stationary;
  s.num_policies = model.num_policies();
  const int layers =
      stationary ? 1 : static_cast<int>(std::llround(horizon / dt)) + 1;
  s.layers.assign(layers, std::vector<double>(s.lattice->size() * s.num_policies, 0.0));

  std::string line;
  if (!std::getline(in, line) || line != values_csv_header(model))
    throw Error(Errc::ArtifactMismatch, "unexpected values.csv header in " + p.string());
  size_t rows = 0;
  const int m = model.num_states();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) != 3 + m + 2)
      throw Error(Errc::ArtifactMismatch, "malformed values.csv row");
    const int l = std::stoi(f[0]);
    const size_t node = std::stoul(f[2]);
    const int a = model.policy_index(f[3 + m]);
    if (l < 0 || l >= layers || node >= s.lattice->size())
      throw Error(Errc::ArtifactMismatch, "values.csv row outside the surface geometry");
    s.layers[l][node * s.num_policies + a] = std::stod(f[4 + m]);
    ++rows;
  }
  if (rows != static_cast<size_t>(layers) * s.lattice->size() * s.num_policies)
    throw Error(Errc::ArtifactMismatch, "values.csv row count does not match geometry");
  return s;
}

// ---------------------------------------------------------------------------
// Strategy and boundary CSV
// ---------------------------------------------------------------------------

inline void write_strategy_csv(const fs::path& p, const StrategyTable& table,
                               const SwitchingModel& model, double horizon) {
  std::ofstream out = open_out(p);
  out << "layer,tau,node";
  for (int i = 0; i < table.lattice->dim(); ++i) out << ",pi_" << i + 1;
  out << ",policy,action\n";
  for (int l = 0; l < table.num_layers(); ++l) {
    const std::string tau =
        table.stationary ? "inf" : g17(std::min(l * table.dt, horizon));
    for (size_t node = 0; node < table.lattice->size(); ++node) {
      std::string prefix = std::to_string(l) + "," + tau + "," + std::to_string(node);
      const double* pi = table.lattice->belief(node);
      for (int i = 0; i < table.lattice->dim(); ++i) prefix += "," + g17(pi[i]);
      for (int a = 0; a < table.num_policies; ++a) {
        const int8_t act = table.action(l, node, a);
        out << prefix << "," << model.policies[a] << ",";
        if (act == StrategyTable::kContinue)
          out << "continue";
        else
          out << "switch:" << model.policies[act];
        out << "\n";
      }
    }
  }
}

// Two-state boundary table. With exactly two policies this is the classic
// (tau, lower, upper) form: the upper edge of the switch-out-of-1 region and
// the lower edge of the switch-out-of-2 region. More policies append a
// (lo, hi) column pair per ordered policy pair.
inline void write_boundaries_csv(const fs::path& p, const StrategyTable& table,
                                 const SwitchingModel& model, double horizon) {
  if (table.lattice->dim() != 2)
    throw Error(Errc::ConfigError, "boundary tables need two states");
  std::ofstream out = open_out(p);
  const int A = table.num_policies;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < A; ++a)
    for (int b = 0; b < A; ++b)
      if (a != b) pairs.emplace_back(a, b);

  std::vector<std::vector<BoundarySlice>> curves;
  curves.reserve(pairs.size());
  for (auto [a, b] : pairs) curves.push_back(boundary_curve(table, a, b));

  if (A == 2) {
    out << "tau,lower_pi1,upper_pi1\n";
    for (int l = 0; l < table.num_layers(); ++l) {
      out << (table.stationary ? std::string("inf")
                               : g17(std::min(l * table.dt, horizon)));
      const BoundarySlice& lower = curves[0][l];  // policy 1 -> 2 region
      const BoundarySlice& upper = curves[1][l];  // policy 2 -> 1 region
      out << "," << (lower.empty ? "" : g17(lower.hi));
      out << "," << (upper.empty ? "" : g17(upper.lo));
      out << "\n";
    }
    return;
  }

  out << "tau";
  for (auto [a, b] : pairs)
    out << ",gamma_" << model.policies[a] << "_" << model.policies[b] << "_lo"
        << ",gamma_" << model.policies[a] << "_" << model.policies[b] << "_hi";
  out << "\n";
  for (int l = 0; l < table.num_layers(); ++l) {
    out << (table.stationary ? std::string("inf")
                             : g17(std::min(l * table.dt, horizon)));
    for (size_t c = 0; c < pairs.size(); ++c) {
      const BoundarySlice& s = curves[c][l];
      out << "," << (s.empty ? "" : g17(s.lo)) << "," << (s.empty ? "" : g17(s.hi));
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate CSV and path traces
// ---------------------------------------------------------------------------

inline void write_mc_csv(const fs::path& p, const std::string& strategy_name,
                         const SwitchingModel& model, const std::vector<double>& pi0,
                         int a0, double horizon, const McEstimate& est,
                         double solved_value = std::numeric_limits<double>::quiet_NaN()) {
  std::ofstream out = open_out(p);
  out << "strategy,pi0,a0,horizon,paths,seed,mean,std_error,solved_value\n";
  out << strategy_name << ",\"";
  for (size_t i = 0; i < pi0.size(); ++i) out << (i ? " " : "") << g17(pi0[i]);
  out << "\"," << model.policies[a0] << "," << g17(horizon) << "," << est.paths << ","
      << est.seed << "," << g17(est.mean) << "," << g17(est.std_error) << ",";
  if (!std::isnan(solved_value)) out << g17(solved_value);
  out << "\n";
}

inline void write_paths_txt(const fs::path& p, const SwitchingModel& model,
                            const std::vector<SamplePath>& paths) {
  std::ofstream out = open_out(p);
  out << "# mmswitch sample paths\n";
  if (!paths.empty()) {
    out << "seed " << paths.front().seed << "\n";
    out << "model " << hash_hex(paths.front().model_hash_v) << "\n";
    out << "horizon " << g17(paths.front().horizon) << "\n";
  }
  out << "count " << paths.size() << "\n";
  for (const auto& path : paths) {
    out << "path " << path.index << "\n";
    out << "pi0";
    for (double v : path.pi0) out << " " << g17(v);
    out << "\n";
    out << "init";
    out << " state=" << (path.has_chain() ? model.states[path.initial_state] : "-");
    out << " policy=" << model.policies[path.initial_policy] << "\n";
    for (const auto& ev : path.events) {
      switch (ev.type) {
        case EventType::Chain:
          out << "CHAIN " << g17(ev.t) << " " << model.states[ev.a];
          break;
        case EventType::Arrival:
          out << "ARRIVAL " << g17(ev.t) << " " << ev.a + 1 << " "
              << g17(model.marks[ev.a]);
          break;
        case EventType::Switch:
          out << "SWITCH " << g17(ev.t) << " " << model.policies[ev.a] << " "
              << model.policies[ev.b];
          break;
      }
      if (!ev.belief.empty()) {
        out << " belief";
        for (double v : ev.belief) out << " " << g17(v);
      }
      out << "\n";
    }
    if (path.has_chain()) {
      out << "running " << g17(path.running_benefit) << "\n";
      out << "arrival " << g17(path.arrival_benefit) << "\n";
      out << "switchcost " << g17(path.switch_cost_total) << "\n";
      out << "payoff " << g17(path.payoff) << "\n";
    }
    out << "end\n";
  }
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline void write_manifest(const fs::path& dir, const json& manifest) {
  std::ofstream out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

inline json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in)
    throw Error(Errc::ArtifactMismatch,
                "missing manifest.json in " + dir.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::ArtifactMismatch, std::string("bad manifest: ") + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

namespace svg {

inline const char* palette(int i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#ff7f0e", "#9467bd", "#8c564b"};
  return colors[i % 6];
}

struct Canvas {
  double width, height;
  std::ostringstream body;
  Canvas(double w, double h) : width(w), height(h) {}

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    body << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
         << "\" y2=\"" << num(y2) << "\" style=\"" << style << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& style) {
    if (pts.size() < 2) return;
    body << "<polyline fill=\"none\" style=\"" << style << "\" points=\"";
    for (const auto& [x, y] : pts) body << num(x) << "," << num(y) << " ";
    body << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    body << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
         << "\" fill=\"" << fill << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& style) {
    body << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
         << "\" height=\"" << num(h) << "\" style=\"" << style << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 12) {
    body << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
         << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }
  void save(const fs::path& p) {
    std::ofstream out = open_out(p);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
  }
};

inline std::pair<double, double> ternary_xy(const double* pi, double x0, double y0,
                                            double side) {
  // Vertices: state 1 bottom-left, state 2 bottom-right, state 3 top.
  const double h = side * std::sqrt(3.0) / 2.0;
  const double x = x0 + pi[1] * side + pi[2] * side * 0.5;
  const double y = y0 - pi[2] * h;
  return {x, y};
}

}  // namespace svg

// Switching-region plot. Two states: regions in the (remaining time, pi_1)
// rectangle. Three states: one simplex panel per policy, nodes colored by
// action. Other dimensions are skipped.
inline bool write_regions_svg(const fs::path& p, const ValueSurface& surface,
                              const StrategyTable& table) {
  const int m = surface.lattice->dim();
  const int A = surface.num_policies;
  const SwitchingModel& model = surface.model;

  if (m == 2) {
    const double W = 640, H = 480, ml = 60, mb = 50, mt = 30, mr = 20;
    svg::Canvas canvas(W, H);
    const double pw = W - ml - mr, ph = H - mt - mb;
    const double tmax = table.stationary ? 1.0 : surface.horizon;
    auto X = [&](double s) { return ml + (table.stationary ? 0.5 : s / tmax) * pw; };
    auto Y = [&](double pi1) { return mt + (1.0 - pi1) * ph; };

    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < A; ++b) {
        if (a == b) continue;
        auto curve = boundary_curve(table, a, b);
        std::string fill = std::string("fill:") + svg::palette(a * A + b) +
                           ";fill-opacity:0.25;stroke:none";
        for (int l = 0; l < table.num_layers(); ++l) {
          if (curve[l].empty) continue;
          const double s = table.stationary ? 0.5 * tmax : surface.tau_of(l);
          const double wbar = table.stationary ? pw : pw / table.num_layers();
          canvas.rect(X(s) - wbar / 2, Y(curve[l].hi), wbar,
                      Y(curve[l].lo) - Y(curve[l].hi), fill);
        }
        std::vector<std::pair<double, double>> line;
        for (int l = 0; l < table.num_layers(); ++l) {
          if (curve[l].empty) continue;
          const double s = table.stationary ? 0.5 * tmax : surface.tau_of(l);
          const double edge = surface.lattice->belief(0)[0] <= 0.5 ? curve[l].hi
                                                                   : curve[l].lo;
          line.emplace_back(X(s), Y(edge));
        }
        canvas.polyline(line, std::string("stroke:") + svg::palette(a * A + b) +
                                  ";stroke-width:1.5");
      }
    }
    canvas.line(ml, mt, ml, H - mb, "stroke:black");
    canvas.line(ml, H - mb, W - mr, H - mb, "stroke:black");
    canvas.text(ml - 45, mt + 10, "pi_1");
    canvas.text(W / 2 - 60, H - 12,
                table.stationary ? "stationary regions" : "time to maturity");
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < A; ++b)
        if (a != b)
          canvas.text(W - 180, mt + 16 * (a * A + b + 1),
                      "switch " + model.policies[a] + " to " + model.policies[b], 11);
    canvas.save(p);
    return true;
  }

  if (m == 3) {
    const double side = 240, gap = 40, mt = 60;
    const double W = A * side + (A + 1) * gap, H = side + mt + 60;
    svg::Canvas canvas(W, H);
    const int layer = table.num_layers() - 1;
    for (int a = 0; a < A; ++a) {
      const double x0 = gap + a * (side + gap), y0 = H - 40;
      const double h = side * std::sqrt(3.0) / 2.0;
      canvas.line(x0, y0, x0 + side, y0, "stroke:black");
      canvas.line(x0, y0, x0 + side / 2, y0 - h, "stroke:black");
      canvas.line(x0 + side, y0, x0 + side / 2, y0 - h, "stroke:black");
      canvas.text(x0 + side / 2 - 30, 20, "policy " + model.policies[a]);
      canvas.text(x0 - 10, y0 + 15, model.states[0], 10);
      canvas.text(x0 + side - 10, y0 + 15, model.states[1], 10);
      canvas.text(x0 + side / 2 - 10, y0 - h - 6, model.states[2], 10);
      for (size_t node = 0; node < table.lattice->size(); ++node) {
        const auto [x, y] = svg::ternary_xy(table.lattice->belief(node), x0, y0, side);
        const int8_t act = table.action(layer, node, a);
        canvas.circle(x, y, 2.2,
                      act == StrategyTable::kContinue ? "#cccccc" : svg::palette(act));
      }
    }
    canvas.save(p);
    return true;
  }
  return false;
}

// Value plot: curves over pi_1 for two states, color-ramped simplex panels
// for three.
inline bool write_value_svg(const fs::path& p, const ValueSurface& surface) {
  const int m = surface.lattice->dim();
  const int A = surface.num_policies;
  const int layer = surface.num_layers() - 1;
  const SwitchingModel& model = surface.model;

  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (size_t node = 0; node < surface.lattice->size(); ++node)
    for (int a = 0; a < A; ++a) {
      vmin = std::min(vmin, surface.value(layer, node, a));
      vmax = std::max(vmax, surface.value(layer, node, a));
    }
  if (vmax <= vmin) vmax = vmin + 1.0;

  if (m == 2) {
    const double W = 640, H = 480, ml = 70, mb = 50, mt = 30, mr = 20;
    svg::Canvas canvas(W, H);
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto X = [&](double pi1) { return ml + pi1 * pw; };
    auto Y = [&](double v) { return mt + (vmax - v) / (vmax - vmin) * ph; };
    for (int a = 0; a < A; ++a) {
      std::vector<std::pair<double, double>> pts;
      for (size_t node = 0; node < surface.lattice->size(); ++node)
        pts.emplace_back(X(surface.lattice->belief(node)[0]),
                         Y(surface.value(layer, node, a)));
      canvas.polyline(pts, std::string("stroke:") + svg::palette(a) +
                               ";stroke-width:1.5");
      canvas.text(W - 150, mt + 16 * (a + 1), "policy " + model.policies[a], 11);
    }
    canvas.line(ml, mt, ml, H - mb, "stroke:black");
    canvas.line(ml, H - mb, W - mr, H - mb, "stroke:black");
    canvas.text(ml - 60, mt + 10, "value");
    canvas.text(W / 2 - 10, H - 12, "pi_1");
    canvas.text(ml, 18, "value at full horizon; range [" + svg::Canvas::num(vmin) +
                            ", " + svg::Canvas::num(vmax) + "]", 11);
    canvas.save(p);
    return true;
  }

  if (m == 3) {
    const double side = 240, gap = 40;
    const double W = A * side + (A + 1) * gap, H = side + 120;
    svg::Canvas canvas(W, H);
    for (int a = 0; a < A; ++a) {
      const double x0 = gap + a * (side + gap), y0 = H - 40;
      const double h = side * std::sqrt(3.0) / 2.0;
      canvas.line(x0, y0, x0 + side, y0, "stroke:black");
      canvas.line(x0, y0, x0 + side / 2, y0 - h, "stroke:black");
      canvas.line(x0 + side, y0, x0 + side / 2, y0 - h, "stroke:black");
      canvas.text(x0 + side / 2 - 30, 20, "policy " + model.policies[a]);
      for (size_t node = 0; node < surface.lattice->size(); ++node) {
        const double v = surface.value(layer, node, a);
        const double t = (v - vmin) / (vmax - vmin);
        char color[16];
        std::snprintf(color, sizeof color, "#%02x00%02x",
                      static_cast<int>(255 * t), static_cast<int>(255 * (1 - t)));
        const auto [x, y] = svg::ternary_xy(surface.lattice->belief(node), x0, y0, side);
        canvas.circle(x, y, 2.2, color);
      }
    }
    canvas.text(gap, H - 12, "value range [" + svg::Canvas::num(vmin) + ", " +
                                 svg::Canvas::num(vmax) + "]", 11);
    canvas.save(p);
    return true;
  }
  return false;
}

}  // namespace mmswitch
