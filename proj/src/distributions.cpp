#include "irt/distributions.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "irt/error.hpp"

namespace irt {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidHyperparameter, what);
}

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

}  // namespace

Law Law::normal(double mean, double variance) {
  require(std::isfinite(mean) && variance > 0.0 && std::isfinite(variance), "normal needs variance > 0");
  return {Family::Normal, mean, variance};
}

Law Law::chi_squared(double df) {
  require(df > 0.0 && std::isfinite(df), "chi-squared needs df > 0");
  return {Family::ChiSquared, df, 0.0};
}

Law Law::student_t(double df) {
  require(df > 0.0 && std::isfinite(df), "t needs df > 0");
  return {Family::StudentT, df, 0.0};
}

Law Law::bernoulli(double q) {
  require(q >= 0.0 && q <= 1.0, "bernoulli needs q in [0,1]");
  return {Family::Bernoulli, q, 0.0};
}

Law Law::binomial(int trials, double q) {
  require(trials >= 1 && q >= 0.0 && q <= 1.0, "binomial needs trials >= 1 and q in [0,1]");
  return {Family::Binomial, static_cast<double>(trials), q};
}

Law Law::point_mass(double value) {
  require(std::isfinite(value), "point mass needs a finite value");
  return {Family::PointMass, value, 0.0};
}

bool Law::is_discrete() const noexcept {
  return family_ == Family::Bernoulli || family_ == Family::Binomial || family_ == Family::PointMass;
}

double Law::sample(Rng& rng) const {
  switch (family_) {
    case Family::Normal:
      return boost::random::normal_distribution<double>(a_, std::sqrt(b_))(rng);
    case Family::ChiSquared:
      return boost::random::chi_squared_distribution<double>(a_)(rng);
    case Family::StudentT:
      return boost::random::student_t_distribution<double>(a_)(rng);
    case Family::Bernoulli:
      return rng.uniform() < a_ ? 1.0 : 0.0;
    case Family::Binomial:
      return static_cast<double>(boost::random::binomial_distribution<int, double>(static_cast<int>(a_), b_)(rng));
    case Family::PointMass:
      return a_;
  }
  return 0.0;
}

double Law::density(double x) const {
  switch (family_) {
    case Family::Normal:
      return boost::math::pdf(boost::math::normal_distribution<double>(a_, std::sqrt(b_)), x);
    case Family::ChiSquared:
      return x < 0.0 ? 0.0 : boost::math::pdf(boost::math::chi_squared_distribution<double>(a_), x);
    case Family::StudentT:
      return boost::math::pdf(boost::math::students_t_distribution<double>(a_), x);
    default:
      fail(ErrorCode::DiscreteKind, describe() + " has no density; use pmf");
  }
}

double Law::log_density(double x) const {
  if (family_ == Family::Normal) {
    const double d = x - a_;
    return -0.5 * std::log(2.0 * M_PI * b_) - d * d / (2.0 * b_);
  }
  const double d = density(x);
  return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

double Law::pmf(double x) const {
  switch (family_) {
    case Family::Bernoulli:
      if (x == 1.0) return a_;
      if (x == 0.0) return 1.0 - a_;
      return 0.0;
    case Family::Binomial:
      if (!is_integer(x) || x < 0.0 || x > a_) return 0.0;
      return boost::math::pdf(boost::math::binomial_distribution<double>(a_, b_), x);
    case Family::PointMass:
      return x == a_ ? 1.0 : 0.0;
    default:
      fail(ErrorCode::ContinuousKind, describe() + " has no pmf; use density");
  }
}

double Law::log_pmf(double x) const {
  const double p = pmf(x);
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

std::string Law::describe() const {
  std::ostringstream out;
  switch (family_) {
    case Family::Normal: out << "normal(" << a_ << "," << b_ << ")"; break;
    case Family::ChiSquared: out << "chi2(" << a_ << ")"; break;
    case Family::StudentT: out << "t(" << a_ << ")"; break;
    case Family::Bernoulli: out << "bernoulli(" << a_ << ")"; break;
    case Family::Binomial: out << "binomial(" << a_ << "," << b_ << ")"; break;
    case Family::PointMass: out << "point_mass(" << a_ << ")"; break;
  }
  return out.str();
}

}  // namespace irt
