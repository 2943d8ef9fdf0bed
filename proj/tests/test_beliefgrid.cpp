#include "mmswitch/beliefgrid.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

using namespace mmswitch;

namespace {

std::vector<double> random_point(int m, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(m);
  double s = 0.0;
  for (double& v : p) {
    v = u(gen);
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

TEST_CASE("lattice node counts and ordering") {
  SimplexLattice g24(2, 4);
  REQUIRE(g24.size() == 5);
  CHECK(g24.belief(0)[0] == 0.0);
  CHECK(g24.belief(1)[0] == 0.25);
  CHECK(g24.belief(4)[0] == 1.0);

  SimplexLattice g32(3, 2);
  CHECK(g32.size() == 6);

  SimplexLattice g350(3, 50);
  CHECK(g350.size() == 1326);

  for (size_t i = 0; i < g350.size(); ++i)
    REQUIRE(g350.index_of(g350.tuple(i)) == i);
}

TEST_CASE("vertices are nodes") {
  SimplexLattice g(4, 7);
  for (int i = 0; i < 4; ++i) {
    int k[4] = {0, 0, 0, 0};
    k[i] = 7;
    const size_t idx = g.index_of(k);
    CHECK(g.belief(idx)[i] == 1.0);
  }
}

TEST_CASE("resolution cap is enforced") {
  CHECK_THROWS_AS(SimplexLattice(5, 500, 100000), Error);
}

TEST_CASE("interpolation is exact at nodes") {
  SimplexLattice g(3, 12);
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> vals(g.size());
  for (double& v : vals) v = u(gen);
  for (size_t i = 0; i < g.size(); ++i)
    CHECK(g.interpolate(vals.data(), 1, g.belief(i)) == Catch::Approx(vals[i]).margin(1e-13));
}

TEST_CASE("linear functions are reproduced exactly") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int m : {1, 2, 3, 4}) {
    SimplexLattice g(m, 9);
    std::vector<double> wvec(m);
    for (double& v : wvec) v = u(gen);
    std::vector<double> vals(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += wvec[j] * g.belief(i)[j];
      vals[i] = s;
    }
    for (int trial = 0; trial < 200; ++trial) {
      auto p = random_point(m, gen);
      double expect = 0.0;
      for (int j = 0; j < m; ++j) expect += wvec[j] * p[j];
      CHECK(g.interpolate(vals.data(), 1, p.data()) ==
            Catch::Approx(expect).margin(1e-12));
    }
  }
}

TEST_CASE("hand-checked 1-D hat function") {
  SimplexLattice g(2, 2);
  // Values 0, 1, 0 at pi_1 = 0, 0.5, 1.
  std::vector<double> vals = {0.0, 1.0, 0.0};
  double p[2] = {0.25, 0.75};
  CHECK(g.interpolate(vals.data(), 1, p) == Catch::Approx(0.5));
  double q[2] = {0.5, 0.5};
  CHECK(g.interpolate(vals.data(), 1, q) == Catch::Approx(1.0));
}

TEST_CASE("interpolant is continuous across faces") {
  SimplexLattice g(3, 20);
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(g.size());
  for (double& v : vals) v = u(gen);

  // Points on cell faces: rational coordinates with ties in N*pi.
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_point(3, gen);
    // Snap the first cumulative coordinate to the nearest lattice plane.
    const double z1 = std::round(20 * p[0]) / 20.0;
    const double rest = 1.0 - z1;
    const double total = p[1] + p[2];
    if (total <= 0) continue;
    double q[3] = {z1, rest * p[1] / total, rest * p[2] / total};
    const double base = g.interpolate(vals.data(), 1, q);
    for (double eps : {1e-13, -1e-13}) {
      double q2[3] = {q[0] + eps, q[1] - eps, q[2]};
      if (q2[0] < 0 || q2[0] > 1 || q2[1] < 0) continue;
      const double perturbed = g.interpolate(vals.data(), 1, q2);
      CHECK(std::fabs(perturbed - base) < 1e-9);
    }
  }
}

TEST_CASE("raising a nodal value never lowers the interpolant") {
  SimplexLattice g(3, 8);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(g.size());
  for (double& v : vals) v = u(gen);
  std::vector<std::vector<double>> probes;
  for (int i = 0; i < 50; ++i) probes.push_back(random_point(3, gen));
  std::vector<double> before(probes.size());
  for (size_t i = 0; i < probes.size(); ++i)
    before[i] = g.interpolate(vals.data(), 1, probes[i].data());
  std::uniform_int_distribution<size_t> pick(0, g.size() - 1);
  for (int bump = 0; bump < 10; ++bump) {
    auto vals2 = vals;
    vals2[pick(gen)] += 2.0;
    for (size_t i = 0; i < probes.size(); ++i) {
      const double after = g.interpolate(vals2.data(), 1, probes[i].data());
      CHECK(after >= before[i] - 1e-15);
    }
  }
}

TEST_CASE("interpolation of convex samples stays above the function") {
  SimplexLattice g(3, 10);
  auto f = [](const double* p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; };
  std::vector<double> vals(g.size());
  for (size_t i = 0; i < g.size(); ++i) vals[i] = f(g.belief(i));
  std::mt19937 gen(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_point(3, gen);
    CHECK(g.interpolate(vals.data(), 1, p.data()) >= f(p.data()) - 1e-12);
  }
}

TEST_CASE("single-state lattice degenerates cleanly") {
  SimplexLattice g(1, 5);
  CHECK(g.size() == 1);
  std::vector<double> vals = {3.25};
  double p[1] = {1.0};
  CHECK(g.interpolate(vals.data(), 1, p) == 3.25);
}

TEST_CASE("NodeFunction evaluates per policy") {
  auto lat = build_lattice(2, 4);
  NodeFunction f(lat, 2);
  for (size_t i = 0; i < lat->size(); ++i) {
    f.at(i, 0) = lat->belief(i)[0];
    f.at(i, 1) = 1.0 - lat->belief(i)[0];
  }
  double p[2] = {0.3, 0.7};
  CHECK(f.eval(p, 0) == Catch::Approx(0.3));
  CHECK(f.eval(p, 1) == Catch::Approx(0.7));
}
