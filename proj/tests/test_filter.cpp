#include "mmswitch/filter.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "mmswitch/config.hpp"

using namespace mmswitch;

namespace {

SwitchingModel load_valid(const char* name) {
  SwitchingModel m = load_model(std::string(MMSWITCH_CONFIG_DIR) + "/" + name);
  ensure_valid(m);
  return m;
}

SwitchingModel scalar_model(double lambda) {
  SwitchingModel m;
  m.states = {"s"};
  m.Q = Mat(1, 1, {0.0});
  m.lambda = {lambda};
  m.marks = {1.0};
  m.nu = Mat(1, 1, 1.0);
  m.policies = {"a", "b"};
  m.c = Mat(1, 2);
  m.K.assign(4, 0.0);
  m.switch_cost(0, 0, 1) = 1.0;
  m.switch_cost(0, 1, 0) = 1.0;
  ensure_valid(m);
  return m;
}

// Independent oracle: classic RK4 on dm_i/dt = -lambda_i m_i + sum_j m_j q_{j,i}.
std::vector<double> rk4_unnormalized(const SwitchingModel& model, double t,
                                     const std::vector<double>& pi0, double h) {
  const int m = model.num_states();
  auto deriv = [&](const std::vector<double>& v) {
    std::vector<double> dv(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double acc = -model.lambda[i] * v[i];
      for (int j = 0; j < m; ++j) acc += v[j] * model.Q(j, i);
      dv[i] = acc;
    }
    return dv;
  };
  std::vector<double> v = pi0;
  const int steps = static_cast<int>(std::ceil(t / h));
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    auto k1 = deriv(v);
    std::vector<double> tmp(m);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + 0.5 * dt * k1[i];
    auto k2 = deriv(tmp);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + 0.5 * dt * k2[i];
    auto k3 = deriv(tmp);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + dt * k3[i];
    auto k4 = deriv(tmp);
    for (int i = 0; i < m; ++i)
      v[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return v;
}

Belief random_belief(int m, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> p(m);
  double s = 0.0;
  for (double& v : p) {
    v = u(gen);
    s += v;
  }
  for (double& v : p) v /= s;
  return Belief(std::move(p));
}

}  // namespace

TEST_CASE("propagate_m at t = 0 is the identity") {
  SwitchingModel m = load_valid("onoff.cfg");
  Belief pi({0.3, 0.7});
  auto out = propagate_m(m, 0.0, pi);
  CHECK(out.m[0] == Catch::Approx(0.3));
  CHECK(out.m[1] == Catch::Approx(0.7));
  CHECK(out.survival == Catch::Approx(1.0));
}

TEST_CASE("propagate_m rejects negative times") {
  SwitchingModel m = load_valid("onoff.cfg");
  CHECK_THROWS_AS(propagate_m(m, -0.1, Belief::uniform(2)), Error);
  CHECK_THROWS_AS(flow_x(m, -1e-9, Belief::uniform(2)), Error);
}

TEST_CASE("single-state survival is a scalar exponential") {
  SwitchingModel m = scalar_model(2.0);
  auto out = propagate_m(m, 1.0, Belief::vertex(1, 0));
  CHECK(out.m[0] == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(flow_x(m, 3.0, Belief::vertex(1, 0))[0] == Catch::Approx(1.0));
}

TEST_CASE("propagate_m matches an independent RK4 integrator") {
  for (const char* name : {"onoff.cfg", "fed.cfg", "callcenter.cfg"}) {
    SwitchingModel model = load_valid(name);
    const int m = model.num_states();
    Belief pi = Belief::vertex(m, 0);
    for (double t : {0.1, 1.0, 5.0}) {
      auto exact = propagate_m(model, t, pi);
      auto oracle = rk4_unnormalized(model, t, pi.p(), 1e-4);
      for (int i = 0; i < m; ++i)
        CHECK(exact.m[i] == Catch::Approx(oracle[i]).margin(1e-8));
    }
  }
}

TEST_CASE("survival mass stays within the intensity envelope") {
  SwitchingModel model = load_valid("callcenter.cfg");
  std::mt19937 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    Belief pi = random_belief(3, gen);
    const double t = 0.1 + 0.2 * trial;
    const double s = propagate_m(model, t, pi).survival;
    CHECK(s <= std::exp(-model.lambda_min * t) + 1e-12);
    CHECK(s >= std::exp(-model.lambda_max * t) - 1e-12);
  }
}

TEST_CASE("flow semigroup property") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> ut(0.0, 2.0);
  for (const char* name : {"onoff.cfg", "fed.cfg", "callcenter.cfg"}) {
    SwitchingModel model = load_valid(name);
    const int m = model.num_states();
    for (int trial = 0; trial < 100; ++trial) {
      Belief pi = random_belief(m, gen);
      const double t = ut(gen), u = ut(gen);
      Belief direct = flow_x(model, t + u, pi);
      Belief composed = flow_x(model, u, flow_x(model, t, pi));
      for (int i = 0; i < m; ++i)
        CHECK(std::fabs(direct[i] - composed[i]) < 1e-8);
    }
  }
}

TEST_CASE("flow converges to the stationary point of the drift") {
  SwitchingModel model = load_valid("onoff.cfg");
  // Root-find the drift of the first coordinate on the 1-D simplex slice.
  auto drift1 = [&model](double p1) {
    double pi[2] = {p1, 1.0 - p1};
    double d[2];
    flow_drift(model, pi, d);
    return d[0];
  };
  double lo = 0.5, hi = 1.0;
  REQUIRE(drift1(lo) > 0.0);
  REQUIRE(drift1(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (drift1(mid) > 0.0 ? lo : hi) = mid;
  }
  const double star = 0.5 * (lo + hi);
  Belief far = flow_x(model, 50.0, Belief({0.5, 0.5}));
  CHECK(std::fabs(far[0] - star) < 1e-6);
}

TEST_CASE("drift is tangent to the simplex and zero for one state") {
  SwitchingModel cc = load_valid("callcenter.cfg");
  std::mt19937 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    Belief pi = random_belief(3, gen);
    auto d = flow_drift(cc, pi);
    CHECK(std::fabs(d[0] + d[1] + d[2]) < 1e-13);
  }
  SwitchingModel one = scalar_model(3.0);
  auto d = flow_drift(one, Belief::vertex(1, 0));
  CHECK(d[0] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("drift matches a finite difference of the flow") {
  SwitchingModel model = load_valid("onoff.cfg");
  Belief pi({0.5, 0.5});
  const double h = 1e-5;
  Belief fwd = flow_x(model, h, pi);
  Belief bwd = pi;
  auto d = flow_drift(model, pi);
  for (int i = 0; i < 2; ++i) {
    const double fd = (fwd[i] - bwd[i]) / h;
    CHECK(std::fabs(fd - d[i]) < 1e-4);
  }
  // Central difference at an interior time.
  Belief base = flow_x(model, 0.3, pi);
  Belief plus = flow_x(model, 0.3 + h, pi);
  Belief minus = flow_x(model, 0.3 - h, pi);
  auto db = flow_drift(model, base);
  for (int i = 0; i < 2; ++i)
    CHECK(std::fabs((plus[i] - minus[i]) / (2 * h) - db[i]) < 1e-6);
}

TEST_CASE("flow ODE residual shrinks at first order") {
  SwitchingModel model = load_valid("fed.cfg");
  Belief pi = Belief::uniform(3);
  const double t = 0.4;
  Belief xt = flow_x(model, t, pi);
  auto d = flow_drift(model, xt);
  auto residual = [&](double h) {
    Belief xth = flow_x(model, t + h, pi);
    double r = 0.0;
    for (int i = 0; i < 3; ++i)
      r = std::max(r, std::fabs((xth[i] - xt[i]) / h - d[i]));
    return r;
  };
  const double r3 = residual(1e-3), r4 = residual(1e-4);
  CHECK(r4 < r3);
  CHECK(r3 / r4 > 5.0);
  CHECK(r3 / r4 < 20.0);
}

TEST_CASE("jump update follows Bayes rule") {
  SwitchingModel onoff = load_valid("onoff.cfg");
  Belief post = jump_update(onoff, Belief({0.5, 0.5}), 0);
  CHECK(post[0] == Catch::Approx(0.2).epsilon(1e-12));
  CHECK(post[1] == Catch::Approx(0.8).epsilon(1e-12));

  SwitchingModel cc = load_valid("callcenter.cfg");
  Belief post3 = jump_update(cc, Belief::uniform(3), 2);  // mark value 24
  CHECK(post3[0] == Catch::Approx(1.0 / 13.0).epsilon(1e-9));
  CHECK(post3[1] == Catch::Approx(4.0 / 13.0).epsilon(1e-9));
  CHECK(post3[2] == Catch::Approx(8.0 / 13.0).epsilon(1e-9));
}

TEST_CASE("jump update is the identity when states are indistinguishable") {
  SwitchingModel m;
  m.states = {"x", "y"};
  m.Q = Mat(2, 2, {-1.0, 1.0, 1.0, -1.0});
  m.lambda = {2.0, 2.0};
  m.marks = {1.0, 5.0};
  m.nu = Mat(2, 2, {0.4, 0.6, 0.4, 0.6});
  m.policies = {"a", "b"};
  m.c = Mat(2, 2);
  m.K.assign(8, 0.0);
  m.switch_cost(0, 0, 1) = m.switch_cost(0, 1, 0) = 1.0;
  m.switch_cost(1, 0, 1) = m.switch_cost(1, 1, 0) = 1.0;
  ensure_valid(m);
  Belief pi({0.3, 0.7});
  Belief post = jump_update(m, pi, 1);
  CHECK(post[0] == Catch::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("impossible marks are an error, not a renormalization") {
  SwitchingModel m;
  m.states = {"x", "y"};
  m.Q = Mat(2, 2, {-1.0, 1.0, 1.0, -1.0});
  m.lambda = {1.0, 1.0};
  m.marks = {0.0, 1.0};
  m.nu = Mat(2, 2, {1.0, 0.0, 0.0, 1.0});
  m.policies = {"a", "b"};
  m.c = Mat(2, 2);
  m.K.assign(8, 0.0);
  m.switch_cost(0, 0, 1) = m.switch_cost(0, 1, 0) = 1.0;
  m.switch_cost(1, 0, 1) = m.switch_cost(1, 1, 0) = 1.0;
  ensure_valid(m);
  CHECK_THROWS_AS(jump_update(m, Belief::vertex(2, 0), 1), Error);
}

TEST_CASE("filter_path composes flow and jumps") {
  SwitchingModel model = load_valid("onoff.cfg");
  Belief pi0({0.5, 0.5});

  SECTION("no arrivals reduces to the flow") {
    auto traj = filter_path(model, {}, pi0, 1.0, {0.0, 0.25, 0.5, 1.0});
    REQUIRE(traj.samples.size() == 4);
    for (const auto& s : traj.samples) {
      Belief expect = flow_x(model, s.t, pi0);
      CHECK(s.pi[0] == Catch::Approx(expect[0]).margin(1e-12));
    }
  }

  SECTION("single arrival splits into flow, jump, flow") {
    const double sigma = 0.4;
    auto traj = filter_path(model, {{sigma, 0}}, pi0, 1.0, {0.0, 0.4, 0.9});
    REQUIRE(traj.arrivals.size() == 1);
    Belief pre = flow_x(model, sigma, pi0);
    CHECK(traj.arrivals[0].pre[0] == Catch::Approx(pre[0]).margin(1e-12));
    Belief post = jump_update(model, pre, 0);
    CHECK(traj.arrivals[0].post[0] == Catch::Approx(post[0]).margin(1e-12));
    // Mesh point at the arrival takes the post-jump value.
    CHECK(traj.samples[1].pi[0] == Catch::Approx(post[0]).margin(1e-12));
    Belief later = flow_x(model, 0.5, post);
    CHECK(traj.samples[2].pi[0] == Catch::Approx(later[0]).margin(1e-10));
  }

  SECTION("unsorted arrivals are rejected") {
    CHECK_THROWS_AS(filter_path(model, {{0.5, 0}, {0.4, 0}}, pi0, 1.0, {0.0}), Error);
  }
}

TEST_CASE("call-center sample path drifts to the quiet fixed point") {
  SwitchingModel model = load_valid("callcenter.cfg");
  std::vector<std::pair<double, int>> arrivals = {
      {0.51, 1}, {0.66, 2}, {1.44, 0}, {2.23, 1}};
  auto traj = filter_path(model, arrivals, Belief::vertex(3, 1), 40.0, {40.0});
  REQUIRE(traj.samples.size() == 1);
  const auto& tail = traj.samples[0].pi;
  CHECK(std::fabs(tail[0] - 0.70) < 0.005);
  CHECK(std::fabs(tail[1] - 0.23) < 0.005);
  CHECK(std::fabs(tail[2] - 0.07) < 0.005);
}

TEST_CASE("returned beliefs stay normalized and nonnegative") {
  std::mt19937 gen(21);
  SwitchingModel model = load_valid("callcenter.cfg");
  for (int trial = 0; trial < 40; ++trial) {
    Belief pi = random_belief(3, gen);
    Belief out = flow_x(model, 0.05 * trial, pi);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(out[i] >= 0.0);
      s += out[i];
    }
    CHECK(std::fabs(s - 1.0) < 1e-10);
    Belief post = jump_update(model, out, trial % 3);
    s = 0.0;
    for (int i = 0; i < 3; ++i) s += post[i];
    CHECK(std::fabs(s - 1.0) < 1e-10);
  }
}
