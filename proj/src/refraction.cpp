#include "helm/refraction.hpp"

#include <cmath>
#include <utility>
#include <numbers>
#include <sstream>

#include "helm/errors.hpp"

namespace helm {
namespace {

double gaussian_pair_value(double x, double y, double r) {
  const double g = std::exp(-(x - 1) * (x - 1) - y * y) + std::exp(-(x + 1) * (x + 1) - y * y);
  return 2.0 + g * x / r;
}

// One-time numerical bounds for the Gaussian pair model, from a polar grid
// scan over r in (0, 12]; the model tends to 2 beyond.
std::pair<double, double> gaussian_pair_bounds() {
  static const std::pair<double, double> bounds = [] {
    double lo = 2.0, hi = 2.0;
    const int nr = 512, nt = 512;
    for (int i = 1; i <= nr; ++i) {
      const double r = 12.0 * i / nr;
      for (int j = 0; j < nt; ++j) {
        const double t = 2.0 * std::numbers::pi * j / nt;
        const double v = gaussian_pair_value(r * std::cos(t), r * std::sin(t), r);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    // grid-resolution slack so sampled values stay inside the bounds
    const double pad = 1e-4;
    return std::pair{lo - pad, hi + pad};
  }();
  return bounds;
}

} // namespace

RefractionModel::RefractionModel(RefractionKind kind, double param) : kind_(kind), param_(param) {
  switch (kind_) {
    case RefractionKind::Constant:
      if (!(param_ > 0)) throw NonPositiveIndex("refraction: constant index must be positive");
      lower_ = upper_ = param_;
      break;
    case RefractionKind::GaussianPair:
      std::tie(lower_, upper_) = gaussian_pair_bounds();
      break;
    case RefractionKind::AngularLinear:
      // a >= 2 yields a nonpositive model; construction is allowed so the
      // admissibility check can report it, use is rejected downstream.
      if (param_ < 0) throw NonPositiveIndex("refraction: angular amplitude must be nonnegative");
      lower_ = 2.0 - param_;
      upper_ = 2.0 + param_;
      break;
  }
}

RefractionModel RefractionModel::constant(double n0) {
  return RefractionModel(RefractionKind::Constant, n0);
}

RefractionModel RefractionModel::gaussian_pair() {
  return RefractionModel(RefractionKind::GaussianPair, 0.0);
}

RefractionModel RefractionModel::angular_linear(double a) {
  return RefractionModel(RefractionKind::AngularLinear, a);
}

double RefractionModel::sup_deviation_bound() const {
  switch (kind_) {
    case RefractionKind::Constant:
      return 0.0;
    case RefractionKind::AngularLinear:
      if (!(param_ < 2.0)) return 1e300;
      return param_ / (2.0 - param_);
    case RefractionKind::GaussianPair:
      // n_sharp is exactly 2 (the integrand is odd under x -> -x), so the
      // sup follows from the pointwise extrema of n.
      return std::max(2.0 / lower_ - 1.0, 1.0 - 2.0 / upper_);
  }
  return 0.0;
}

double RefractionModel::operator()(const Eigen::Vector2d& p) const {
  if (kind_ == RefractionKind::Constant) return param_;
  const double r = p.norm();
  if (r == 0.0)
    throw OriginSingularity("refraction: angular models are undefined at the origin");
  if (kind_ == RefractionKind::GaussianPair) return gaussian_pair_value(p.x(), p.y(), r);
  return 2.0 + param_ * p.x() / r;
}

std::string RefractionModel::tag() const {
  std::ostringstream s;
  switch (kind_) {
    case RefractionKind::Constant:
      s << "constant:" << param_;
      break;
    case RefractionKind::GaussianPair:
      s << "gaussian_pair";
      break;
    case RefractionKind::AngularLinear:
      s << "angular:" << param_;
      break;
  }
  return s.str();
}

double radial_average_n(const RefractionModel& model, double r, int quad_points) {
  if (model.is_constant()) return model.parameter();
  double sum = 0;
  for (int q = 0; q < quad_points; ++q) {
    const double t = 2.0 * std::numbers::pi * q / quad_points;
    sum += model(Eigen::Vector2d(r * std::cos(t), r * std::sin(t)));
  }
  return sum / quad_points;
}

Admissibility check_admissibility(const RefractionModel& model, double r_max, int n_samples) {
  if (!(r_max > 0)) throw Error("check_admissibility: r_max must be positive");
  const int n = std::max(16, n_samples);
  Admissibility result;
  double min_n = model.is_constant() ? model.parameter() : 1e300;
  for (int i = 1; i <= n; ++i) {
    const double r = r_max * i / n;
    const double ns = radial_average_n(model, r, std::max(64, n));
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * std::numbers::pi * j / n;
      const double nv = model(Eigen::Vector2d(r * std::cos(t), r * std::sin(t)));
      min_n = std::min(min_n, nv);
      if (nv > 0) result.sup_deviation = std::max(result.sup_deviation, std::abs(1.0 - ns / nv));
    }
  }
  if (min_n <= 0)
    throw NonPositiveIndex("check_admissibility: sampled index is nonpositive (min " +
                           std::to_string(min_n) + ")");
  result.admissible = result.sup_deviation < 1.0;
  return result;
}

} // namespace helm
