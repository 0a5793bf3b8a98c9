#include <doctest.h>

#include <cmath>

#include "irt/distributions.hpp"
#include "irt/error.hpp"

using namespace irt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an irt::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("law densities and pmfs") {
  CHECK(Law::normal(1.0, 4.0).density(1.0) == doctest::Approx(1.0 / std::sqrt(8 * M_PI)));
  CHECK(Law::normal(1.0, 4.0).log_density(3.0) == doctest::Approx(std::log(Law::normal(1.0, 4.0).density(3.0))));
  // chi2(4) density x/4 exp(-x/2).
  CHECK(Law::chi_squared(4).density(2.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(Law::chi_squared(4).density(-1.0) == 0.0);
  // t(1) is Cauchy.
  CHECK(Law::student_t(1).density(1.0) == doctest::Approx(1.0 / (2 * M_PI)));
  CHECK(Law::bernoulli(0.3).pmf(1.0) == doctest::Approx(0.3));
  CHECK(Law::bernoulli(0.3).pmf(0.5) == 0.0);
  CHECK(Law::binomial(100, 0.1).pmf(10) == doctest::Approx(0.1318653468).epsilon(1e-8));
  CHECK(Law::binomial(100, 0.1).pmf(10.5) == 0.0);
  CHECK(Law::point_mass(2.0).pmf(2.0) == 1.0);
  CHECK(Law::binomial(3, 0.5).log_pmf(4) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("law kind errors and validation") {
  CHECK(code_of([] { Law::binomial(5, 0.5).density(1.0); }) == ErrorCode::DiscreteKind);
  CHECK(code_of([] { Law::normal(0, 1).pmf(0.0); }) == ErrorCode::ContinuousKind);
  CHECK(code_of([] { Law::normal(0, 0); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([] { Law::chi_squared(-1); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([] { Law::bernoulli(1.2); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([] { Law::binomial(0, 0.5); }) == ErrorCode::InvalidHyperparameter);
}

TEST_CASE("law sample means") {
  Rng rng(4);
  const std::size_t draws = 100000;
  auto mean_of = [&](const Law& law) {
    double s = 0;
    for (std::size_t i = 0; i < draws; ++i) s += law.sample(rng);
    return s / draws;
  };
  CHECK(mean_of(Law::normal(2.0, 1.0)) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(mean_of(Law::chi_squared(4)) == doctest::Approx(4.0).epsilon(0.02));
  CHECK(std::abs(mean_of(Law::student_t(4))) < 0.02);
  CHECK(mean_of(Law::bernoulli(0.3)) == doctest::Approx(0.3).epsilon(0.02));
  CHECK(mean_of(Law::binomial(100, 0.1)) == doctest::Approx(10.0).epsilon(0.01));
  CHECK(mean_of(Law::point_mass(-3.0)) == -3.0);
}

TEST_CASE("rng substreams are reproducible and distinct") {
  Rng a = Rng::substream(42, Stream::Imputation, 3);
  Rng b = Rng::substream(42, Stream::Imputation, 3);
  Rng c = Rng::substream(42, Stream::Randomization, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
