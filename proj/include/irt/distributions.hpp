#pragma once

#include <string>

#include "irt/rng.hpp"

namespace irt {

/// A fully specified univariate law: the "true" marginal g of theta in
/// simulations, and the oracle imputation distribution.
class Law {
 public:
  enum class Family { Normal, ChiSquared, StudentT, Bernoulli, Binomial, PointMass };

  static Law normal(double mean, double variance);
  static Law chi_squared(double df);
  static Law student_t(double df);
  static Law bernoulli(double q);
  static Law binomial(int trials, double q);
  static Law point_mass(double value);

  Family family() const noexcept { return family_; }
  bool is_discrete() const noexcept;
  double sample(Rng& rng) const;

  /// Density for continuous families; throws DiscreteKind otherwise.
  double density(double x) const;
  double log_density(double x) const;
  /// Probability mass for discrete families; throws ContinuousKind otherwise.
  /// Point masses are treated as discrete.
  double pmf(double x) const;
  double log_pmf(double x) const;

  double param1() const noexcept { return a_; }
  double param2() const noexcept { return b_; }
  std::string describe() const;

 private:
  Law(Family family, double a, double b) : family_(family), a_(a), b_(b) {}

  Family family_;
  double a_;  // mean | df | q | trials | value
  double b_;  // variance | q (binomial)
};

}  // namespace irt
