#include "mmswitch/model.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "mmswitch/config.hpp"

using namespace mmswitch;

namespace {

std::string config_path(const char* name) {
  return std::string(MMSWITCH_CONFIG_DIR) + "/" + name;
}

SwitchingModel load_valid(const char* name) {
  SwitchingModel m = load_model(config_path(name));
  ensure_valid(m);
  return m;
}

bool has_issue(const std::vector<ValidationIssue>& issues, Errc code) {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("bundled example configs validate") {
  SwitchingModel onoff = load_valid("onoff.cfg");
  CHECK(onoff.num_states() == 2);
  CHECK(onoff.num_policies() == 2);
  CHECK(onoff.num_marks() == 1);
  CHECK(onoff.Q(0, 0) == -1.0);
  CHECK(onoff.Q(1, 0) == 3.0);
  CHECK(onoff.lambda[1] == 4.0);
  CHECK(onoff.switch_cost(0, 0, 1) == 0.05);
  CHECK(onoff.cmax == 1.0);
  CHECK(onoff.lambda_max == 4.0);
  CHECK(onoff.k0 == 0.05);

  SwitchingModel fed = load_valid("fed.cfg");
  CHECK(fed.num_states() == 3);
  CHECK(fed.num_policies() == 3);
  CHECK(fed.cmax == 2.0);

  SwitchingModel cc = load_valid("callcenter.cfg");
  CHECK(cc.num_states() == 3);
  CHECK(cc.num_marks() == 3);
  CHECK(cc.rho == 0.5);
  CHECK(cc.has_arrival_benefits());
  CHECK(cc.cmax == 50.0);
  CHECK(cc.k0 == 2.0);
}

TEST_CASE("validate rejects a broken generator") {
  SwitchingModel m = load_model(config_path("onoff.cfg"));
  m.Q(1, 1) = -2.0;  // row sums to 1
  auto issues = validate(m);
  REQUIRE_FALSE(issues.empty());
  CHECK(has_issue(issues, Errc::NonGenerator));
  CHECK_FALSE(m.validated);
}

TEST_CASE("validate rejects bad stochastic rows and intensities") {
  SwitchingModel m = load_model(config_path("callcenter.cfg"));
  m.nu(0, 0) = 0.9;
  auto issues = validate(m);
  CHECK(has_issue(issues, Errc::BadStochasticRow));

  SwitchingModel m2 = load_model(config_path("onoff.cfg"));
  m2.lambda[0] = 0.0;
  CHECK(has_issue(validate(m2), Errc::NonPositiveIntensity));
}

TEST_CASE("validate reports a triangle-inequality violation") {
  // 1-based policy triple (1,2,3) with K(1,2)=1, K(2,3)=1, K(1,3)=5.
  SwitchingModel m;
  m.states = {"s"};
  m.Q = Mat(1, 1, {0.0});
  m.lambda = {1.0};
  m.marks = {1.0};
  m.nu = Mat(1, 1, 1.0);
  m.policies = {"1", "2", "3"};
  m.c = Mat(1, 3);
  m.K.assign(9, 1.0);
  m.switch_cost(0, 0, 0) = 0.0;
  m.switch_cost(0, 1, 1) = 0.0;
  m.switch_cost(0, 2, 2) = 0.0;
  m.switch_cost(0, 0, 2) = 5.0;
  auto issues = validate(m);
  REQUIRE(has_issue(issues, Errc::TriangleViolation));
  bool names_triple = false;
  for (const auto& i : issues)
    if (i.message.find("K[0][0][1] + K[0][1][2]") != std::string::npos) names_triple = true;
  CHECK(names_triple);
}

TEST_CASE("validate rejects a zero switch cost off the diagonal") {
  SwitchingModel m = load_model(config_path("onoff.cfg"));
  m.switch_cost(0, 0, 1) = 0.0;
  CHECK(has_issue(validate(m), Errc::NonPositiveSwitchCost));
}

TEST_CASE("cost_C evaluates the running benefit") {
  SwitchingModel onoff = load_valid("onoff.cfg");
  CHECK(cost_C(onoff, Belief::vertex(2, 0), 0) == Catch::Approx(1.0));

  SwitchingModel fed = load_valid("fed.cfg");
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      CHECK(cost_C(fed, Belief::vertex(3, i), a) == Catch::Approx(fed.c(i, a)));
  CHECK(cost_C(fed, Belief::uniform(3), 0) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("cost_K evaluates the switch cost") {
  SwitchingModel onoff = load_valid("onoff.cfg");
  CHECK(cost_K(onoff, 0, 0, Belief::uniform(2)) == 0.0);
  CHECK(cost_K(onoff, 0, 1, Belief::uniform(2)) == Catch::Approx(0.05));

  SwitchingModel cc = load_valid("callcenter.cfg");
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double a = u(gen), b = u(gen), c = u(gen);
    const double s = a + b + c;
    Belief pi({a / s, b / s, c / s});
    CHECK(cost_K(cc, 0, 1, pi) == Catch::Approx(2.0));
    CHECK(cost_K(cc, 1, 0, pi) == Catch::Approx(2.0));
  }
}

TEST_CASE("C and K are linear in the belief") {
  SwitchingModel fed = load_valid("fed.cfg");
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double x[3] = {u(gen), u(gen), u(gen)}, y[3] = {u(gen), u(gen), u(gen)};
    double sx = x[0] + x[1] + x[2], sy = y[0] + y[1] + y[2];
    for (double& v : x) v /= sx;
    for (double& v : y) v /= sy;
    const double t = u(gen);
    double mix[3];
    for (int i = 0; i < 3; ++i) mix[i] = t * x[i] + (1 - t) * y[i];
    for (int a = 0; a < 3; ++a) {
      CHECK(cost_C(fed, mix, a) ==
            Catch::Approx(t * cost_C(fed, x, a) + (1 - t) * cost_C(fed, y, a))
                .margin(1e-12));
      const int b = (a + 1) % 3;
      CHECK(cost_K(fed, a, b, mix) ==
            Catch::Approx(t * cost_K(fed, a, b, x) + (1 - t) * cost_K(fed, a, b, y))
                .margin(1e-12));
    }
  }
}

TEST_CASE("belief construction clamps drift and rejects junk") {
  Belief ok({0.5, 0.5 + 1e-12});
  CHECK(ok[0] + ok[1] == Catch::Approx(1.0).epsilon(1e-15));
  Belief clamped({1.0 + 1e-12, -1e-12});
  CHECK(clamped[1] == 0.0);
  CHECK_THROWS_AS(Belief({0.6, 0.6}), Error);
  CHECK_THROWS_AS(Belief({1.5, -0.5}), Error);
}

TEST_CASE("switch-cost broadcasting accepts all three forms") {
  json scalar = 0.3;
  auto K1 = expand_switch_costs(scalar, 2, 2);
  CHECK(K1[0 * 2 * 2 + 0 * 2 + 1] == 0.3);
  CHECK(K1[0] == 0.0);

  json matrix = json::parse("[[0.0, 1.0], [2.0, 0.0]]");
  auto K2 = expand_switch_costs(matrix, 2, 2);
  CHECK(K2[(0 * 2 + 1) * 2 + 0] == 2.0);
  CHECK(K2[(1 * 2 + 1) * 2 + 0] == 2.0);

  json tensor = json::parse("[[[0.0,1.0],[1.0,0.0]], [[0.0,2.0],[2.0,0.0]]]");
  auto K3 = expand_switch_costs(tensor, 2, 2);
  CHECK(K3[(0 * 2 + 0) * 2 + 1] == 1.0);
  CHECK(K3[(1 * 2 + 0) * 2 + 1] == 2.0);
}

TEST_CASE("model hash is stable and content sensitive") {
  SwitchingModel a = load_valid("onoff.cfg");
  SwitchingModel b = load_valid("onoff.cfg");
  CHECK(model_hash(a) == model_hash(b));
  b.rho = 0.1;
  CHECK(model_hash(a) != model_hash(b));
}
