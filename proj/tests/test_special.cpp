#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "helm/errors.hpp"
#include "helm/special.hpp"

using namespace helm;

namespace {

// Independent ascending-series oracle in extended precision (float128),
// valid for small-to-moderate arguments. Distinct code path from the
// library implementation.
__float128 oracle_j(int order, __float128 x) {
  const __float128 hx = x / 2;
  __float128 term = 1;
  for (int i = 1; i <= order; ++i) term *= hx / i;
  __float128 sum = term;
  const __float128 t = hx * hx;
  for (int m = 1; m < 200; ++m) {
    term *= -t / (static_cast<__float128>(m) * (m + order));
    sum += term;
  }
  return sum;
}

__float128 oracle_y0(__float128 x) {
  const __float128 pi = 3.14159265358979323846264338327950288Q;
  const __float128 gamma = 0.57721566490153286060651209008240243Q;
  const __float128 hx = x / 2;
  const __float128 t = hx * hx;
  __float128 sum = 0, term = 1, harm = 0;
  for (int m = 1; m < 200; ++m) {
    term *= t / (static_cast<__float128>(m) * m);
    harm += static_cast<__float128>(1) / m;
    sum += (m % 2 == 1 ? harm : -harm) * term;
  }
  // log evaluated in long double; its 1e-19 relative error is far below
  // the 1e-12 tolerance this oracle backs.
  const __float128 log_hx = std::log(static_cast<long double>(hx));
  return 2 / pi * ((log_hx + gamma) * oracle_j(0, x) + sum);
}

} // namespace

TEST_CASE("bessel_j small-argument limit") {
  CHECK(bessel_j(0, 1e-8) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hankel1(0,1) matches the frozen oracle value") {
  const Cplx h = hankel1(0, 1.0);
  CHECK(std::abs(h.real() - 0.7651976866) < 1e-9);
  CHECK(std::abs(h.imag() - 0.0882569642) < 1e-9);
}

TEST_CASE("bessel functions agree with the extended-precision series oracle") {
  for (double x : {0.05, 0.3, 0.5, 1.0, 2.0, 5.0, 9.0, 12.0}) {
    for (int order : {0, 1, 2, 5, 11}) {
      const double jref = static_cast<double>(oracle_j(order, x));
      CHECK(std::abs(bessel_j(order, x) - jref) < 1e-12);
    }
    const double yref = static_cast<double>(oracle_y0(x));
    CHECK(std::abs(bessel_y(0, x) - yref) < 1e-12);
  }
}

TEST_CASE("bessel functions agree with std::cyl_bessel at large arguments") {
  // absolute at order-unity magnitudes, relative where Y blows up
  for (double x : {15.0, 20.0, 50.0, 120.0, 200.0}) {
    for (int order : {0, 1, 3, 10, 40, 60}) {
      const double jref = std::cyl_bessel_j(order, x);
      const double yref = std::cyl_neumann(order, x);
      CHECK(std::abs(bessel_j(order, x) - jref) < 2e-12 * std::max(1.0, std::abs(jref)));
      CHECK(std::abs(bessel_y(order, x) - yref) < 2e-12 * std::max(1.0, std::abs(yref)));
    }
  }
}

TEST_CASE("Wronskian identity at the pinned sample arguments") {
  for (double x : {0.5, 1.0, 3.0, 10.0}) {
    const double j0 = bessel_j(0, x), y0 = bessel_y(0, x);
    const double j1 = bessel_j(1, x), y1 = bessel_y(1, x);
    // J0' = -J1, Y0' = -Y1
    const double w = (-j1) * y0 - j0 * (-y1);
    CHECK(std::abs(w - (-2.0 / (std::numbers::pi * x))) < 1e-11);
  }
}

TEST_CASE("three-term recurrence consistency across the supported range") {
  for (double x : {0.05, 0.4, 1.0, 3.0, 10.0, 37.0, 110.0, 200.0}) {
    for (int nu : {1, 2, 7, 20, 41, 59}) {
      const double lhs_j = bessel_j(nu - 1, x) + bessel_j(nu + 1, x);
      const double rhs_j = 2.0 * nu / x * bessel_j(nu, x);
      CHECK(std::abs(lhs_j - rhs_j) <
            1e-11 * std::max({1.0, std::abs(lhs_j), std::abs(rhs_j)}));
      const double lhs_y = bessel_y(nu - 1, x) + bessel_y(nu + 1, x);
      const double rhs_y = 2.0 * nu / x * bessel_y(nu, x);
      CHECK(std::abs(lhs_y - rhs_y) <
            1e-11 * std::max({1.0, std::abs(lhs_y), std::abs(rhs_y)}));
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_j(0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_y(2, 0.0), DomainError);
  CHECK_THROWS_AS(exact_mode({0, 1.0, 0.5}, {0.2, 0.0}), InsideObstacle);
}

TEST_CASE("exact_mode boundary value and sample point") {
  const ModeSolution m{0, 1.0, 0.5};
  // on the inner circle the mode equals cos(j theta) exactly
  for (double theta : {0.0, 0.7, 2.0}) {
    const Eigen::Vector2d p(0.5 * std::cos(theta), 0.5 * std::sin(theta));
    const Cplx u = exact_mode(m, p);
    CHECK(u.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u.imag() == doctest::Approx(0.0).epsilon(1e-15));
  }
  const ModeSolution m3{3, 2.0, 0.5};
  for (double theta : {0.3, 1.9}) {
    const Eigen::Vector2d p(0.5 * std::cos(theta), 0.5 * std::sin(theta));
    CHECK(std::abs(exact_mode(m3, p) - Cplx(std::cos(3 * theta), 0)) < 1e-13);
  }
  // j=0, k=1: u(1,0) = H0(1)/H0(0.5)
  const Cplx expect = hankel1(0, 1.0) / hankel1(0, 0.5);
  CHECK(std::abs(exact_mode(m, {1.0, 0.0}) - expect) < 1e-14);
}

TEST_CASE("far-field decay: |u| sqrt(r) approaches an angle-independent constant") {
  const ModeSolution m{2, 1.0, 0.5};
  const double c50 = std::abs(exact_mode(m, {50.0, 0.0})) * std::sqrt(50.0);
  const double c100 = std::abs(exact_mode(m, {100.0, 0.0})) * std::sqrt(100.0);
  CHECK(std::abs(c50 - c100) / c100 < 0.01);
}

TEST_CASE("exact_mode_gradient is radial for j=0 and matches central differences") {
  const ModeSolution m{0, 1.0, 0.5};
  const Eigen::Vector2cd g = exact_mode_gradient(m, {1.3, 0.0});
  CHECK(std::abs(g[1]) < 1e-14);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> rad(0.7, 3.0), ang(0.0, 6.28);
  const ModeSolution modes[] = {{0, 1.0, 0.5}, {2, 0.5, 0.5}, {3, 2.0, 0.5}};
  for (const auto& mode : modes) {
    for (int trial = 0; trial < 5; ++trial) {
      const double r = rad(rng), th = ang(rng);
      const Eigen::Vector2d p(r * std::cos(th), r * std::sin(th));
      const double step = 1e-6 * r;
      const Eigen::Vector2cd grad = exact_mode_gradient(mode, p);
      for (int d = 0; d < 2; ++d) {
        Eigen::Vector2d dp = Eigen::Vector2d::Zero();
        dp[d] = step;
        const Cplx fd = (exact_mode(mode, p + dp) - exact_mode(mode, p - dp)) / (2 * step);
        CHECK(std::abs(grad[d] - fd) < 1e-7 * (1 + std::abs(grad[d])));
      }
    }
  }
}

TEST_CASE("exact_mode satisfies the Helmholtz equation on a 5-point stencil") {
  const ModeSolution m{2, 2.0, 0.5};
  const double hstep = 1e-3;
  const Eigen::Vector2d p(1.2, 0.6);
  const Cplx u = exact_mode(m, p);
  const Cplx lap = (exact_mode(m, p + Eigen::Vector2d(hstep, 0)) +
                    exact_mode(m, p - Eigen::Vector2d(hstep, 0)) +
                    exact_mode(m, p + Eigen::Vector2d(0, hstep)) +
                    exact_mode(m, p - Eigen::Vector2d(0, hstep)) - 4.0 * u) /
                   (hstep * hstep);
  CHECK(std::abs(lap + m.k * m.k * u) < 1e-5);
}

TEST_CASE("series solution collapses to the single mode for g = cos(j theta)") {
  for (int j : {0, 2}) {
    const ModeSolution m{j, 1.0, 0.5};
    auto g = [j](double theta) { return Cplx(std::cos(j * theta), 0.0); };
    for (const Eigen::Vector2d p : {Eigen::Vector2d(0.9, 0.4), Eigen::Vector2d(-1.2, 0.3)}) {
      const Cplx series = series_solution(g, 40, 1.0, 0.5, p);
      CHECK(std::abs(series - exact_mode(m, p)) < 1e-10);
    }
  }
}

TEST_CASE("radiated flux of the outgoing mode is rho-independent (Wronskian)") {
  // Im integral of u_r conj(u) over |x| = rho equals 4/|H0(k r_hat)|^2.
  const double k = 1.0, r_hat = 0.5;
  const double expected = 4.0 / std::norm(hankel1(0, k * r_hat));
  for (double rho : {0.8, 1.7, 3.1}) {
    const int n = 4096;
    double flux = 0;
    for (int s = 0; s < n; ++s) {
      const double theta = 2 * std::numbers::pi * s / n;
      const Eigen::Vector2d p(rho * std::cos(theta), rho * std::sin(theta));
      const Cplx u = exact_mode({0, k, r_hat}, p);
      const Cplx ur = exact_mode_radial_derivative({0, k, r_hat}, p);
      flux += std::imag(ur * std::conj(u));
    }
    flux *= 2 * std::numbers::pi * rho / n;
    CHECK(flux == doctest::Approx(expected).epsilon(1e-10));
  }
}
