#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>

#include "irt/error.hpp"
#include "irt/imputation.hpp"

using namespace irt;
using boost::math::quadrature::gauss_kronrod;

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

double integrate(const std::function<double(double)>& f, double lo, double hi, double step) {
  double total = 0.0;
  for (double a = lo; a < hi; a += step) {
    total += gauss_kronrod<double, 31>::integrate(f, a, std::min(a + step, hi), 10, 1e-13);
  }
  return total;
}

double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * M_PI * var);
}

}  // namespace

TEST_CASE("empirical fit and draws") {
  const std::vector<double> obs{1.0, 2.0};
  const auto imp = Imputer::fit(EmpiricalSpec{}, obs);
  CHECK(imp.kind() == ImputerKind::Empirical);
  CHECK(imp.is_discrete());
  CHECK(imp.predictive_pmf(1.0) == 0.5);
  CHECK(imp.predictive_pmf(2.0) == 0.5);
  CHECK(imp.predictive_pmf(1.5) == 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double v = imp.sample(rng);
    CHECK((v == 1.0 || v == 2.0));
  }
  CHECK(code_of([] { Imputer::fit(EmpiricalSpec{}, std::vector<double>{}); }) == ErrorCode::EmptyObserved);
  CHECK(code_of([&] { imp.predictive_density(1.0); }) == ErrorCode::DiscreteKind);
}

TEST_CASE("empirical long-run frequencies") {
  const std::vector<double> obs{-1.0, 0.5, 0.5, 3.0, 7.0};
  const auto imp = Imputer::fit(EmpiricalSpec{}, obs);
  std::map<double, std::size_t> counts;
  Rng rng(2);
  const std::size_t draws = 100000;
  for (std::size_t i = 0; i < draws; ++i) ++counts[imp.sample(rng)];
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(std::count(obs.begin(), obs.end(), v)) / obs.size();
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(static_cast<double>(c) / draws - p) <= 4 * se);
  }
  CHECK(counts.size() == 4);
}

TEST_CASE("normal known variance posterior") {
  const std::vector<double> data{0.0};
  const auto imp = Imputer::fit(NormalKnownVarSpec{1.0, 0.0, 1.0}, data);
  CHECK(imp.posterior().variance == doctest::Approx(0.5));
  CHECK(imp.posterior().mean == doctest::Approx(0.0));
  CHECK(imp.posterior().predictive_variance == doctest::Approx(1.5));
  CHECK(imp.predictive_density(0.0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI * 1.5)));

  // No data: the prior predictive N(mu0, sigma0^2 + sigma^2).
  const auto prior = Imputer::fit(NormalKnownVarSpec{2.0, 1.0, 3.0}, std::vector<double>{});
  CHECK(prior.posterior().mean == doctest::Approx(1.0));
  CHECK(prior.posterior().predictive_variance == doctest::Approx(5.0));

  CHECK(code_of([] { Imputer::fit(NormalKnownVarSpec{0.0, 0.0, 1.0}, std::vector<double>{1}); }) ==
        ErrorCode::InvalidHyperparameter);
}

TEST_CASE("nig posterior and predictive") {
  const std::vector<double> data{0.0, 0.0};
  const auto imp = Imputer::fit(NigSpec{}, data);
  const auto& p = imp.posterior();
  CHECK(p.alpha == 2.0);
  CHECK(p.kappa == 3.0);
  CHECK(p.mean == 0.0);
  CHECK(p.beta == 1.0);
  CHECK(p.dof == 4.0);
  CHECK(p.variance == doctest::Approx(2.0 / 3.0));
  for (double x : {0.3, 1.1, 2.5}) CHECK(imp.predictive_density(x) == doctest::Approx(imp.predictive_density(-x)));
  CHECK(code_of([] { Imputer::fit(NigSpec{0.0, 1.0, 1.0, 0.0}, std::vector<double>{1}); }) ==
        ErrorCode::InvalidHyperparameter);
}

TEST_CASE("nig predictive matches 2-d quadrature of the posterior mixture") {
  const std::vector<double> data{0.4, -1.2, 0.9, 2.1};
  const NigSpec prior{1.0, 1.0, 1.0, 0.0};
  const auto imp = Imputer::fit(prior, data);
  // Posterior parameters recomputed independently.
  const double n = 4, xbar = (0.4 - 1.2 + 0.9 + 2.1) / 4;
  double ss = 0;
  for (double x : data) ss += (x - xbar) * (x - xbar);
  const double kn = 1 + n, an = 1 + n / 2, mn = n * xbar / kn;
  const double bn = 1 + 0.5 * (ss + n / kn * xbar * xbar);
  for (double x : {-2.0, -0.5, 0.55, 1.3, 3.0}) {
    auto outer = [&](double s2) {
      const double inv_gamma =
          std::exp(an * std::log(bn) - std::lgamma(an) - (an + 1) * std::log(s2) - bn / s2);
      auto inner = [&](double mu) { return normal_pdf(x, mu, s2) * normal_pdf(mu, mn, s2 / kn); };
      return inv_gamma * gauss_kronrod<double, 61>::integrate(inner, -std::numeric_limits<double>::infinity(),
                                                               std::numeric_limits<double>::infinity(), 15, 1e-12);
    };
    const double oracle =
        gauss_kronrod<double, 61>::integrate(outer, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-10);
    CHECK(std::abs(imp.predictive_density(x) - oracle) < 1e-3);
  }
}

TEST_CASE("beta-binomial update and pmf") {
  const std::vector<double> data{1, 0, 1};
  const auto imp = Imputer::fit(BetaBinomialSpec{1, 1.0, 1.0}, data);
  CHECK(imp.posterior().alpha == 3.0);
  CHECK(imp.posterior().beta == 2.0);
  CHECK(imp.predictive_pmf(1.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(imp.predictive_pmf(0.0) + imp.predictive_pmf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([&] { imp.predictive_pmf(2.0); }) == ErrorCode::OutOfSupport);
  CHECK(code_of([&] { imp.predictive_density(1.0); }) == ErrorCode::DiscreteKind);
  CHECK(code_of([] { Imputer::fit(BetaBinomialSpec{1, 1.0, 1.0}, std::vector<double>{2}); }) ==
        ErrorCode::OutOfSupport);

  // m = 10 against the textbook pmf via the beta function.
  const std::vector<double> counts{3, 7, 2, 5};
  const auto bb = Imputer::fit(BetaBinomialSpec{10, 2.0, 3.0}, counts);
  const double a = 2 + 17, b = 3 + 40 - 17;
  double total = 0;
  for (int x = 0; x <= 10; ++x) {
    const double want = std::exp(std::lgamma(11) - std::lgamma(x + 1) - std::lgamma(11 - x)) *
                        boost::math::beta(x + a, 10 - x + b) / boost::math::beta(a, b);
    CHECK(bb.predictive_pmf(x) == doctest::Approx(want).epsilon(1e-10));
    total += bb.predictive_pmf(x);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // No data: prior predictive.
  const auto prior = Imputer::fit(BetaBinomialSpec{1, 2.0, 3.0}, std::vector<double>{});
  CHECK(prior.predictive_pmf(1.0) == doctest::Approx(0.4));
}

TEST_CASE("kernel bandwidth rule") {
  std::vector<double> xs(100);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i % 2 == 0 ? -1.0 : 1.0;
  const double sd = std::sqrt(100.0 / 99.0);
  CHECK(kernel_bandwidth(xs) == doctest::Approx(1.06 * sd * std::pow(100.0, -0.2)));
  std::vector<double> big(3200);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = i % 2 == 0 ? -1.0 : 1.0;
  const double ratio = kernel_bandwidth(xs) / kernel_bandwidth(big);
  const double sd_ratio = std::sqrt(100.0 / 99.0) / std::sqrt(3200.0 / 3199.0);
  CHECK(ratio / sd_ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(code_of([] { kernel_bandwidth(std::vector<double>{1.0, 1.0}); }) == ErrorCode::DegenerateSample);
}

TEST_CASE("kernel density and fallback") {
  KernelSpec pinned;
  pinned.bandwidth = 0.3;
  const auto one = Imputer::fit(pinned, std::vector<double>{0.0});
  CHECK(one.predictive_density(0.0) == doctest::Approx(1.0 / (0.3 * std::sqrt(2 * M_PI))));
  CHECK(one.predictive_density(0.2) == doctest::Approx(one.predictive_density(-0.2)));

  const auto fallback = Imputer::fit(KernelSpec{}, std::vector<double>{2.0, 2.0, 2.0});
  CHECK(fallback.kind() == ImputerKind::Empirical);
  REQUIRE(fallback.warning().has_value());
  CHECK(fallback.predictive_pmf(2.0) == 1.0);

  // Far tail falls back to log-sum-exp rather than -inf.
  const auto imp = Imputer::fit(KernelSpec{}, std::vector<double>{0.0, 1.0, 2.0});
  CHECK(std::isfinite(imp.log_predictive_density(50.0)));
  CHECK(imp.log_predictive_density(50.0) < imp.log_predictive_density(10.0));
}

TEST_CASE("binned kernel log-density agrees with the exact sum") {
  Rng rng(7);
  std::vector<double> data(20000);
  for (double& v : data) v = Law::normal(0, 1).sample(rng);
  const auto imp = Imputer::fit(KernelSpec{}, data);
  std::vector<double> xs;
  for (int i = 0; i < 400; ++i) xs.push_back(-5.0 + 0.025 * i);
  xs.push_back(9.0);
  const auto binned = imp.log_predictive_density(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double exact = imp.log_predictive_density(xs[i]);
    CHECK(std::abs(std::expm1(binned[i] - exact)) < 1e-6);
  }
}

TEST_CASE("continuous predictive densities integrate to one") {
  const std::vector<double> data{0.3, -0.8, 1.7, 0.2, 2.4, -1.1};
  const auto check = [](const Imputer& imp, double lo, double hi, double step) {
    const double mass = integrate([&](double x) { return imp.predictive_density(x); }, lo, hi, step);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  };
  check(Imputer::fit(NormalKnownVarSpec{}, data), -30, 30, 0.5);
  check(Imputer::fit(KernelSpec{}, data), -30, 30, 0.1);
  // Heavy t tails: integrate the far tails analytically-free by widening.
  const auto nig = Imputer::fit(NigSpec{}, data);
  const double body = integrate([&](double x) { return nig.predictive_density(x); }, -2000, 2000, 1.0);
  CHECK(body == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("draw preserves observed entries") {
  PartialTheta partial;
  partial.values = {1.0, std::nan(""), 3.0, std::nan(""), 5.0};
  partial.observed = {1, 0, 1, 0, 1};
  std::vector<ImputerSpec> specs{OracleSpec{Law::normal(0, 1)}, EmpiricalSpec{}, KernelSpec{}, NormalKnownVarSpec{},
                                 NigSpec{}};
  Rng rng(9);
  for (const auto& spec : specs) {
    const auto imp = Imputer::fit(spec, partial);
    for (int rep = 0; rep < 50; ++rep) {
      const auto full = imp.draw(partial, rng);
      CHECK(full[0] == 1.0);
      CHECK(full[2] == 3.0);
      CHECK(full[4] == 5.0);
      CHECK(std::isfinite(full[1]));
      CHECK(std::isfinite(full[3]));
    }
  }
  const auto point = Imputer::fit(OracleSpec{Law::point_mass(4.5)}, partial);
  const auto full = point.draw(partial, rng);
  CHECK(full[1] == 4.5);
  CHECK(full[3] == 4.5);

  PartialTheta all{{1.0, 2.0}, {1, 1}};
  CHECK(Imputer::fit(NigSpec{}, all).draw(all, rng) == all.values);
}

TEST_CASE("sampler moments match the predictive") {
  const std::vector<double> data{0.5, 1.5, 1.0, 2.0};
  Rng rng(12);
  const std::size_t draws = 200000;
  auto moments = [&](const Imputer& imp) {
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      const double v = imp.sample(rng);
      s += v;
      s2 += v * v;
    }
    const double m = s / draws;
    return std::pair{m, s2 / draws - m * m};
  };
  const auto known = Imputer::fit(NormalKnownVarSpec{}, data);
  auto [m1, v1] = moments(known);
  CHECK(m1 == doctest::Approx(known.posterior().mean).epsilon(0.02));
  CHECK(v1 == doctest::Approx(known.posterior().predictive_variance).epsilon(0.02));

  const auto nig = Imputer::fit(NigSpec{}, data);
  auto [m2, v2] = moments(nig);
  const auto& p = nig.posterior();
  CHECK(m2 == doctest::Approx(p.mean).epsilon(0.02));
  CHECK(v2 == doctest::Approx(p.variance * p.dof / (p.dof - 2)).epsilon(0.03));

  const auto bb = Imputer::fit(BetaBinomialSpec{5, 1.0, 1.0}, std::vector<double>{1, 4, 2});
  auto [m3, v3] = moments(bb);
  const double a = bb.posterior().alpha, b = bb.posterior().beta;
  CHECK(m3 == doctest::Approx(5 * a / (a + b)).epsilon(0.01));
  CHECK(v3 == doctest::Approx(5 * a * b * (a + b + 5) / ((a + b) * (a + b) * (a + b + 1))).epsilon(0.02));
}
