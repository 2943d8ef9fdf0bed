#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmswitch/errors.hpp"
#include "mmswitch/model.hpp"

namespace mmswitch {

using nlohmann::json;

namespace detail {

inline Mat mat_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw Error(Errc::ConfigError, key + " must be a matrix (array of rows)");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw Error(Errc::ConfigError, key + " rows have inconsistent lengths");
    for (int jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
  }
  return m;
}

inline std::vector<std::string> labels_from_json(const json& j, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (v.is_string())
      out.push_back(v.get<std::string>());
    else
      out.push_back(v.dump());
  }
  if (out.empty()) throw Error(Errc::ConfigError, key + " must be nonempty");
  return out;
}

}  // namespace detail

// Builds the switch-cost tensor from any of the accepted forms:
//   scalar k            -> K[i][a][b] = k for a != b
//   A x A matrix        -> broadcast over states
//   m x A x A tensor    -> used verbatim
inline std::vector<double> expand_switch_costs(const json& j, int m, int A) {
  std::vector<double> K(static_cast<size_t>(m) * A * A, 0.0);
  auto at = [&K, A](int i, int a, int b) -> double& {
    return K[(static_cast<size_t>(i) * A + a) * A + b];
  };
  if (j.is_number()) {
    const double k = j.get<double>();
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < A; ++b)
          if (a != b) at(i, a, b) = k;
    return K;
  }
  if (j.is_array() && !j.empty() && j.front().is_array() && !j.front().empty() &&
      j.front().front().is_array()) {
    if (static_cast<int>(j.size()) != m)
      throw Error(Errc::ConfigError, "K tensor must have one A x A block per state");
    for (int i = 0; i < m; ++i) {
      Mat blk = detail::mat_from_json(j[i], "K");
      if (blk.rows() != A || blk.cols() != A)
        throw Error(Errc::ConfigError, "K blocks must be A x A");
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < A; ++b) at(i, a, b) = blk(a, b);
    }
    return K;
  }
  if (j.is_array()) {
    Mat blk = detail::mat_from_json(j, "K");
    if (blk.rows() != A || blk.cols() != A)
      throw Error(Errc::ConfigError, "K matrix must be A x A");
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < A; ++b) at(i, a, b) = blk(a, b);
    return K;
  }
  throw Error(Errc::ConfigError, "K must be a scalar, an A x A matrix, or an m x A x A tensor");
}

inline SwitchingModel model_from_json(const json& j) {
  SwitchingModel model;
  try {
    if (!j.is_object()) throw Error(Errc::ConfigError, "config root must be an object");
    for (const char* key : {"states", "Q", "lambda", "policies", "c", "K"})
      if (!j.contains(key))
        throw Error(Errc::ConfigError, std::string("missing required key '") + key + "'");

    model.states = detail::labels_from_json(j["states"], "states");
    const int m = static_cast<int>(model.states.size());
    model.Q = detail::mat_from_json(j["Q"], "Q");
    model.lambda = j["lambda"].get<std::vector<double>>();

    if (j.contains("marks")) {
      model.marks = j["marks"].get<std::vector<double>>();
      if (!j.contains("nu"))
        throw Error(Errc::ConfigError, "marks given without mark distribution nu");
      model.nu = detail::mat_from_json(j["nu"], "nu");
    } else {
      // Simple (unmarked) Poisson observations.
      model.marks = {1.0};
      model.nu = Mat(m, 1, 1.0);
    }

    model.policies = detail::labels_from_json(j["policies"], "policies");
    const int A = static_cast<int>(model.policies.size());
    model.c = detail::mat_from_json(j["c"], "c");
    if (j.contains("c1")) model.c1 = detail::mat_from_json(j["c1"], "c1");
    model.K = expand_switch_costs(j["K"], m, A);
    model.rho = j.value("rho", 0.0);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, e.what());
  }
  return model;
}

inline SwitchingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("config parse error: ") + e.what());
  }
  return model_from_json(j);
}

// Canonical serialization of a model; the basis for the content hash recorded
// in run manifests.
inline std::string canonical_string(const SwitchingModel& model) {
  std::ostringstream os;
  char buf[32];
  auto put = [&os, &buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g,", v);
    os << buf;
  };
  os << "states:";
  for (const auto& s : model.states) os << s << ",";
  os << ";Q:";
  for (int i = 0; i < model.Q.rows(); ++i)
    for (int j = 0; j < model.Q.cols(); ++j) put(model.Q(i, j));
  os << ";lambda:";
  for (double v : model.lambda) put(v);
  os << ";marks:";
  for (double v : model.marks) put(v);
  os << ";nu:";
  for (int i = 0; i < model.nu.rows(); ++i)
    for (int j = 0; j < model.nu.cols(); ++j) put(model.nu(i, j));
  os << ";policies:";
  for (const auto& s : model.policies) os << s << ",";
  os << ";c:";
  for (int i = 0; i < model.c.rows(); ++i)
    for (int j = 0; j < model.c.cols(); ++j) put(model.c(i, j));
  os << ";c1:";
  for (int i = 0; i < model.c1.rows(); ++i)
    for (int j = 0; j < model.c1.cols(); ++j) put(model.c1(i, j));
  os << ";K:";
  for (double v : model.K) put(v);
  os << ";rho:";
  put(model.rho);
  return os.str();
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t model_hash(const SwitchingModel& model) {
  return fnv1a(canonical_string(model));
}

inline std::string hash_hex(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mmswitch
