#pragma once

// Index-of-refraction models n(x), their circle averages n_sharp(r), and
// the admissibility check sup |1 - n_sharp/n| < 1 required by the
// convergence theory.

#include <string>

#include <Eigen/Dense>

namespace helm {

enum class RefractionKind { Constant, GaussianPair, AngularLinear };

class RefractionModel {
 public:
  static RefractionModel constant(double n0);
  static RefractionModel gaussian_pair();
  static RefractionModel angular_linear(double a);

  // Pointwise n(x); throws OriginSingularity at (0,0) for the angular kinds.
  double operator()(const Eigen::Vector2d& p) const;

  RefractionKind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool is_constant() const { return kind_ == RefractionKind::Constant; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  // Model-level sup |1 - n_sharp/n| (analytic for the closed forms,
  // cached numeric scan for the Gaussian pair).
  double sup_deviation_bound() const;
  std::string tag() const; // config syntax: constant:2, gaussian_pair, angular:0.1

 private:
  RefractionModel(RefractionKind kind, double param);
  RefractionKind kind_;
  double param_;
  double lower_ = 0, upper_ = 0;
};

// (1 / 2 pi r) * integral of n over the circle |x| = r, periodic trapezoid
// rule with quad_points nodes.
double radial_average_n(const RefractionModel& model, double r, int quad_points = 64);

struct Admissibility {
  double sup_deviation = 0;
  bool admissible = false;
};

// sup over sampled radii in (0, r_max] and sampled angles of
// |1 - n_sharp(r)/n(r,theta)|; throws NonPositiveIndex if n <= 0 anywhere
// in the sample.
Admissibility check_admissibility(const RefractionModel& model, double r_max, int n_samples);

} // namespace helm
