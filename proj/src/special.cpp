#include "helm/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "helm/errors.hpp"

namespace helm {
namespace {

// Internals run in long double: the ascending series loses ~e^x of
// precision to cancellation, so 80-bit arithmetic keeps the x < 14 branch
// at ~1e-13 absolute, and the asymptotic branch takes over where its
// optimally truncated error e^{-2x} is below that.
using LD = long double;

constexpr LD kPi = 3.14159265358979323846264338327950288L;
constexpr LD kEulerGamma = 0.57721566490153286060651209008240243L;
constexpr double kSeriesAsymptoticSplit = 14.0;

LD half_x_pow(LD hx, int n) {
  LD p = 1.0L;
  for (int i = 0; i < n; ++i) p *= hx;
  return p;
}

// Ascending series, any order; used for x below the split point.
LD bessel_j_series(int order, LD x) {
  const LD hx = 0.5L * x;
  const LD t = hx * hx;
  // leading term (x/2)^order / order!
  LD term = half_x_pow(hx, order);
  for (int i = 2; i <= order; ++i) term /= static_cast<LD>(i);
  LD sum = term;
  for (int m = 1; m < 800; ++m) {
    term *= -t / (static_cast<LD>(m) * static_cast<LD>(m + order));
    sum += term;
    if (std::abs(term) < 1e-24L * (std::abs(sum) + 1e-30L)) break;
  }
  return sum;
}

LD harmonic(int m) {
  LD h = 0.0L;
  for (int i = 1; i <= m; ++i) h += 1.0L / static_cast<LD>(i);
  return h;
}

LD bessel_y0_series(LD x) {
  const LD hx = 0.5L * x;
  const LD t = hx * hx;
  const LD j0 = bessel_j_series(0, x);
  LD sum = 0.0L;
  LD term = 1.0L; // t^m / (m!)^2 running value
  for (int m = 1; m < 800; ++m) {
    term *= t / (static_cast<LD>(m) * static_cast<LD>(m));
    const LD contrib = (m % 2 == 1 ? 1.0L : -1.0L) * harmonic(m) * term;
    sum += contrib;
    if (std::abs(contrib) < 1e-24L * (std::abs(sum) + 1e-30L)) break;
  }
  return (2.0L / kPi) * ((std::log(hx) + kEulerGamma) * j0 + sum);
}

LD bessel_y1_series(LD x) {
  const LD hx = 0.5L * x;
  const LD t = hx * hx;
  const LD j1 = bessel_j_series(1, x);
  // sum_m (H_m + H_{m+1}) (-t)^m / (m! (m+1)!)
  LD sum = 0.0L;
  LD term = 1.0L; // t^m / (m!(m+1)!)
  for (int m = 0; m < 800; ++m) {
    if (m > 0) term *= t / (static_cast<LD>(m) * static_cast<LD>(m + 1));
    const LD contrib = (m % 2 == 0 ? 1.0L : -1.0L) * (harmonic(m) + harmonic(m + 1)) * term;
    sum += contrib;
    if (m > 2 && std::abs(contrib) < 1e-24L * (std::abs(sum) + 1e-30L)) break;
  }
  return (2.0L / kPi) * (std::log(hx) + kEulerGamma) * j1 - 2.0L / (kPi * x) -
         (x / (2.0L * kPi)) * sum;
}

// Hankel asymptotic expansion, orders 0/1, x >= split. P and Q series are
// truncated at their minimal term.
struct PQ {
  LD p, q;
};

PQ asymptotic_pq(int order, LD x) {
  const LD mu = 4.0L * order * order;
  LD term = 1.0L;
  LD p = 1.0L, q = 0.0L;
  LD prev = std::numeric_limits<LD>::max();
  for (int k = 1; k < 80; ++k) {
    const LD num = mu - static_cast<LD>((2 * k - 1) * (2 * k - 1));
    term *= num / (static_cast<LD>(k) * 8.0L * x);
    if (std::abs(term) > prev) break; // divergent tail reached
    prev = std::abs(term);
    if (k % 2 == 1) {
      q += (k % 4 == 1 ? term : -term);
    } else {
      p += (k % 4 == 2 ? -term : term);
    }
    if (std::abs(term) < 1e-26L) break;
  }
  return {p, q};
}

void bessel_jy_asymptotic(int order, LD x, LD& j, LD& y) {
  const auto [p, q] = asymptotic_pq(order, x);
  const LD omega = x - 0.5L * order * kPi - 0.25L * kPi;
  const LD amp = std::sqrt(2.0L / (kPi * x));
  const LD c = std::cos(omega), s = std::sin(omega);
  j = amp * (c * p - s * q);
  y = amp * (s * p + c * q);
}

void bessel_jy_base(LD x, LD& j0, LD& j1, LD& y0, LD& y1) {
  if (x < kSeriesAsymptoticSplit) {
    j0 = bessel_j_series(0, x);
    j1 = bessel_j_series(1, x);
    y0 = bessel_y0_series(x);
    y1 = bessel_y1_series(x);
  } else {
    bessel_jy_asymptotic(0, x, j0, y0);
    bessel_jy_asymptotic(1, x, j1, y1);
  }
}

// Downward (Miller) recurrence normalized by J_0 + 2 sum J_{2m} = 1;
// the stable direction for J at large order.
LD bessel_j_miller(int order, LD x) {
  const int start = std::max(order, static_cast<int>(x)) + 60;
  LD fp = 0.0L;      // f_{m+1}
  LD fc = 1e-30L;    // f_m
  LD norm = 0.0L;
  LD target = 0.0L;
  for (int m = start; m >= 1; --m) {
    const LD fm = (2.0L * m / x) * fc - fp;
    fp = fc;
    fc = fm;
    if (m - 1 == order) target = fc;
    if ((m - 1) % 2 == 0 && m - 1 > 0) norm += 2.0L * fc;
    if (std::abs(fc) > 1e300L) {
      fc *= 1e-300L;
      fp *= 1e-300L;
      norm *= 1e-300L;
      target *= 1e-300L;
    }
  }
  norm += fc;
  if (order == 0) target = fc;
  return target / norm;
}

LD bessel_j_ld(int order, LD x) {
  if (x < kSeriesAsymptoticSplit) return bessel_j_series(order, x);
  if (order <= 1) {
    LD j0, j1, y0, y1;
    bessel_jy_base(x, j0, j1, y0, y1);
    return order == 0 ? j0 : j1;
  }
  if (x > 2.0L * order) {
    // upward recurrence is stable while x dominates the order
    LD j0, j1, y0, y1;
    bessel_jy_base(x, j0, j1, y0, y1);
    LD jm1 = j0, jc = j1;
    for (int m = 1; m < order; ++m) {
      const LD jn = (2.0L * m / x) * jc - jm1;
      jm1 = jc;
      jc = jn;
    }
    return jc;
  }
  return bessel_j_miller(order, x);
}

LD bessel_y_ld(int order, LD x) {
  LD j0, j1, y0, y1;
  bessel_jy_base(x, j0, j1, y0, y1);
  if (order == 0) return y0;
  if (order == 1) return y1;
  LD ym1 = y0, yc = y1;
  for (int m = 1; m < order; ++m) {
    const LD yn = (2.0L * m / x) * yc - ym1;
    ym1 = yc;
    yc = yn;
  }
  return yc;
}

void check_args(int order, double x) {
  if (!(x > 0.0)) throw DomainError("bessel: argument must be positive");
  if (order < 0) throw DomainError("bessel: order must be nonnegative");
}

} // namespace

double bessel_j(int order, double x) {
  check_args(order, x);
  return static_cast<double>(bessel_j_ld(order, static_cast<LD>(x)));
}

double bessel_y(int order, double x) {
  check_args(order, x);
  return static_cast<double>(bessel_y_ld(order, static_cast<LD>(x)));
}

Cplx hankel1(int order, double x) {
  check_args(order, x);
  return {bessel_j(order, x), bessel_y(order, x)};
}

Cplx hankel1_derivative(int order, double x) {
  check_args(order, x);
  if (order == 0) return -hankel1(1, x);
  return hankel1(order - 1, x) - (static_cast<double>(order) / x) * hankel1(order, x);
}

Cplx exact_mode(const ModeSolution& mode, const Eigen::Vector2d& point) {
  const double r = point.norm();
  if (r < mode.r_hat * (1.0 - 1e-12))
    throw InsideObstacle("exact_mode: point inside the obstacle disk");
  const double theta = std::atan2(point.y(), point.x());
  const Cplx radial = hankel1(mode.j, mode.k * r) / hankel1(mode.j, mode.k * mode.r_hat);
  return radial * std::cos(mode.j * theta);
}

Eigen::Vector2cd exact_mode_gradient(const ModeSolution& mode, const Eigen::Vector2d& point) {
  const double r = point.norm();
  if (r < mode.r_hat * (1.0 - 1e-12))
    throw InsideObstacle("exact_mode_gradient: point inside the obstacle disk");
  const double theta = std::atan2(point.y(), point.x());
  const Cplx denom = hankel1(mode.j, mode.k * mode.r_hat);
  const Cplx du_dr = mode.k * hankel1_derivative(mode.j, mode.k * r) / denom *
                     std::cos(mode.j * theta);
  const Cplx du_dtheta_over_r =
      -static_cast<double>(mode.j) / r * hankel1(mode.j, mode.k * r) / denom *
      std::sin(mode.j * theta);
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Vector2cd grad;
  grad[0] = du_dr * c - du_dtheta_over_r * s;
  grad[1] = du_dr * s + du_dtheta_over_r * c;
  return grad;
}

Cplx exact_mode_radial_derivative(const ModeSolution& mode, const Eigen::Vector2d& point) {
  const double r = point.norm();
  if (r < mode.r_hat * (1.0 - 1e-12))
    throw InsideObstacle("exact_mode_radial_derivative: point inside the obstacle disk");
  const double theta = std::atan2(point.y(), point.x());
  return mode.k * hankel1_derivative(mode.j, mode.k * r) /
         hankel1(mode.j, mode.k * mode.r_hat) * std::cos(mode.j * theta);
}

Cplx series_solution(const std::function<Cplx(double)>& g, int ell_max, double k, double r_hat,
                     const Eigen::Vector2d& point, int quad_points) {
  const double r = point.norm();
  if (r < r_hat * (1.0 - 1e-12))
    throw InsideObstacle("series_solution: point inside the obstacle disk");
  const double theta = std::atan2(point.y(), point.x());
  const double dt = 2.0 * std::numbers::pi / quad_points;
  Cplx sum = 0.0;
  for (int ell = 0; ell <= ell_max; ++ell) {
    Cplx moment = 0.0;
    for (int q = 0; q < quad_points; ++q) {
      const double tq = q * dt;
      moment += g(tq) * std::cos(ell * (theta - tq)) * dt;
    }
    const Cplx radial = hankel1(ell, k * r) / hankel1(ell, k * r_hat);
    const double factor = (ell == 0) ? 0.5 : 1.0;
    sum += factor * radial * moment;
  }
  return sum / std::numbers::pi;
}

} // namespace helm
