#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "irt/error.hpp"
#include "irt/verify.hpp"

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

TEST_CASE("lr_product trivial cases") {
  const Law truth = Law::normal(0, 1);
  const auto oracle = Imputer::fit(OracleSpec{truth}, std::vector<double>{});
  const std::vector<double> holdout{0.3, -1.2, 2.0};
  CHECK(lr_product(truth, oracle, holdout) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lr_product(truth, oracle, std::vector<double>{}) == 0.0);

  const Law bin = Law::binomial(100, 0.1);
  const auto emp = Imputer::fit(EmpiricalSpec{}, std::vector<double>{9, 10, 11});
  CHECK(lr_product(bin, emp, std::vector<double>{10, 12}) == 1.0);
  CHECK(code_of([&] { lr_product(bin, emp, std::vector<double>{101}); }) == ErrorCode::TrueDensityZero);
}

TEST_CASE("lr_product by hand") {
  // Known-variance predictive N(0, 1.5) against truth N(0, 1) at x = 1:
  // ratio = sqrt(1/1.5) * exp(-1/3 + 1/2).
  const auto imp = Imputer::fit(NormalKnownVarSpec{1.0, 0.0, 1.0}, std::vector<double>{0.0});
  const double ratio = std::sqrt(1 / 1.5) * std::exp(-1.0 / 3 + 0.5);
  CHECK(lr_product(Law::normal(0, 1), imp, std::vector<double>{1.0}) == doctest::Approx(std::abs(ratio - 1)));
  CHECK(lr_product(Law::normal(0, 1), imp, std::vector<double>{1.0, 1.0}) ==
        doctest::Approx(std::abs(ratio * ratio - 1)));
}

TEST_CASE("lr_product is invariant to holdout order") {
  Rng rng(3);
  std::vector<double> data(500), holdout(300);
  for (double& v : data) v = Law::normal(0, 1).sample(rng);
  for (double& v : holdout) v = Law::normal(0, 1).sample(rng);
  const auto imp = Imputer::fit(NigSpec{}, data);
  const double base = lr_product(Law::normal(0, 1), imp, holdout);
  for (int rep = 0; rep < 10; ++rep) {
    for (std::size_t a = holdout.size() - 1; a > 0; --a) std::swap(holdout[a], holdout[rng.below(a + 1)]);
    CHECK(std::abs(lr_product(Law::normal(0, 1), imp, holdout) - base) <= 1e-12);
  }
}

TEST_CASE("missing rate anchor and observed count") {
  CHECK(missing_rate(100, 0.5) == doctest::Approx(0.5));
  CHECK(missing_rate(10000, 0.5) == doctest::Approx(0.05));
  CHECK(observed_count(100, 0.7) == 50);
  CHECK(observed_count(1000, 0.5) == static_cast<std::size_t>(std::llround(1000 * (1 - 0.5 / std::sqrt(10.0)))));
  CHECK(observed_count(1000, 0.5, 0.0) == 1000);
}

TEST_CASE("zero missing rate gives an identically zero curve") {
  const std::vector<std::size_t> grid{100, 400};
  for (auto s : {VerifyScenario::NigNormal, VerifyScenario::KernelNormal, VerifyScenario::BetaBinomial,
                 VerifyScenario::EmpiricalBinomial}) {
    for (const auto& p : lr_expectation_curve(s, grid, 0.5, 5, 1, 1, 0.0)) CHECK(p.mean_abs_dev == 0.0);
  }
}

TEST_CASE("curves are deterministic and well formed") {
  const std::vector<std::size_t> grid{100, 1000};
  const auto a = lr_expectation_curve(VerifyScenario::BetaBinomial, grid, 0.6, 20, 9);
  const auto b = lr_expectation_curve(VerifyScenario::BetaBinomial, grid, 0.6, 20, 9, 3);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean_abs_dev == b[i].mean_abs_dev);
    CHECK(a[i].mean_abs_dev >= 0.0);
    CHECK(a[i].n1 == observed_count(grid[i], 0.6));
    CHECK(a[i].reps == 20);
    CHECK(a[i].scenario == "beta_binomial");
  }
  CHECK(parse_verify_scenario("kernel_normal") == VerifyScenario::KernelNormal);
  CHECK(code_of([] { parse_verify_scenario("bogus"); }) == ErrorCode::InvalidArgument);
}
