#include "mmswitch/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

using namespace mmswitch;

namespace {

// Reference exponential: scaled Taylor series, independent of the Pade path.
Mat expm_taylor(Mat a) {
  const int n = a.rows();
  int s = 0;
  while (norm1(a) > 0.25) {
    a *= 0.5;
    ++s;
  }
  Mat sum = Mat::identity(n);
  Mat term = Mat::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = term * a;
    term *= 1.0 / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::fabs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace

TEST_CASE("expm of zero and diagonal matrices") {
  Mat z(3, 3);
  CHECK(max_abs_diff(expm(z), Mat::identity(3)) < 1e-15);

  Mat d(2, 2, {-1.0, 0.0, 0.0, 2.5});
  Mat e = expm(d);
  CHECK(e(0, 0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == Catch::Approx(std::exp(2.5)).epsilon(1e-14));
  CHECK(std::fabs(e(0, 1)) < 1e-15);
}

TEST_CASE("expm of nilpotent and rotation blocks") {
  Mat nil(2, 2, {0.0, 1.0, 0.0, 0.0});
  Mat e = expm(nil);
  CHECK(e(0, 0) == Catch::Approx(1.0));
  CHECK(e(0, 1) == Catch::Approx(1.0));
  CHECK(e(1, 0) == Catch::Approx(0.0).margin(1e-16));

  const double th = 0.7;
  Mat rot(2, 2, {0.0, -th, th, 0.0});
  Mat r = expm(rot);
  CHECK(r(0, 0) == Catch::Approx(std::cos(th)).epsilon(1e-14));
  CHECK(r(1, 0) == Catch::Approx(std::sin(th)).epsilon(1e-14));
}

TEST_CASE("expm matches Taylor reference on random matrices") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(gen);
    CHECK(max_abs_diff(expm(a), expm_taylor(a)) < 1e-12);
  }
}

TEST_CASE("generator exponential keeps row sums at one") {
  Mat q(3, 3, {-4.0, 3.0, 1.0, 2.0, -4.0, 2.0, 0.0, 3.0, -3.0});
  for (double t : {0.1, 1.0, 5.0, 25.0}) {
    Mat p = expm(t * q);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) {
        s += p(i, j);
        CHECK(p(i, j) >= -1e-13);
      }
      CHECK(s == Catch::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("solve recovers known systems") {
  Mat a(3, 3, {2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0});
  std::vector<double> x_true = {1.0, -2.0, 0.5};
  std::vector<double> b(3, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i] += a(i, j) * x_true[j];
  auto x = solve(a, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == Catch::Approx(x_true[i]).epsilon(1e-13));
}

TEST_CASE("expm_with_integral matches quadrature") {
  Mat a(2, 2, {-2.0, 1.0, 3.0, -4.0});
  const double t = 1.3;
  Mat e, f;
  expm_with_integral(a, t, &e, &f);
  CHECK(max_abs_diff(e, expm(t * a)) < 1e-13);

  // Simpson quadrature oracle on a fine grid.
  const int steps = 2000;
  const double h = t / steps;
  Mat acc(2, 2);
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * expm(k * h * a);
  }
  acc *= h / 3.0;
  CHECK(max_abs_diff(f, acc) < 1e-10);
}

TEST_CASE("expm_step_moments matches quadrature") {
  Mat a(2, 2, {-2.0, 1.0, 3.0, -4.5});
  const double h = 0.07;
  Mat m0, m1;
  expm_step_moments(a, h, &m0, &m1);

  const int steps = 2000;
  const double dh = h / steps;
  Mat q0(2, 2), q1(2, 2);
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double u = k * dh;
    Mat e = expm(u * a);
    q0 += (w * (1.0 - u / h)) * e;
    q1 += (w * (u / h)) * e;
  }
  q0 *= dh / 3.0;
  q1 *= dh / 3.0;
  CHECK(max_abs_diff(m0, q0) < 1e-12);
  CHECK(max_abs_diff(m1, q1) < 1e-12);

  // The two moments sum to the plain step integral.
  Mat f;
  expm_with_integral(a, h, nullptr, &f);
  CHECK(max_abs_diff(m0 + m1, f) < 1e-13);
}

TEST_CASE("vec_mat multiplies a row vector") {
  Mat a(2, 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  double v[2] = {2.0, -1.0};
  double out[3];
  vec_mat(v, a, out);
  CHECK(out[0] == Catch::Approx(-2.0));
  CHECK(out[1] == Catch::Approx(-1.0));
  CHECK(out[2] == Catch::Approx(0.0).margin(1e-15));
}
