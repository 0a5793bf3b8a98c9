#include "irt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irt/error.hpp"
#include "irt/parallel.hpp"

namespace irt {

namespace {

// Neumaier summation.
double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace

std::string to_string(VerifyScenario scenario) {
  switch (scenario) {
    case VerifyScenario::NigNormal: return "nig_normal";
    case VerifyScenario::KernelNormal: return "kernel_normal";
    case VerifyScenario::BetaBinomial: return "beta_binomial";
    case VerifyScenario::EmpiricalBinomial: return "empirical_binomial";
  }
  return "unknown";
}

VerifyScenario parse_verify_scenario(const std::string& name) {
  for (auto s : {VerifyScenario::NigNormal, VerifyScenario::KernelNormal, VerifyScenario::BetaBinomial,
                 VerifyScenario::EmpiricalBinomial}) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorCode::InvalidArgument, "unknown verify scenario '" + name + "'");
}

Law verify_truth(VerifyScenario scenario) {
  switch (scenario) {
    case VerifyScenario::NigNormal:
    case VerifyScenario::KernelNormal: return Law::normal(0.0, 1.0);
    default: return Law::binomial(100, 0.1);
  }
}

ImputerSpec verify_imputer(VerifyScenario scenario) {
  switch (scenario) {
    case VerifyScenario::NigNormal: return NigSpec{};
    case VerifyScenario::KernelNormal: return KernelSpec{};
    case VerifyScenario::BetaBinomial: return BetaBinomialSpec{100, 1.0, 1.0};
    case VerifyScenario::EmpiricalBinomial: return EmpiricalSpec{};
  }
  return EmpiricalSpec{};
}

double lr_product(const Law& truth, const Imputer& imputer, std::span<const double> holdout) {
  if (holdout.empty()) return 0.0;
  std::vector<double> log_truth(holdout.size());
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    log_truth[i] = truth.is_discrete() ? truth.log_pmf(holdout[i]) : truth.log_density(holdout[i]);
    if (!std::isfinite(log_truth[i])) {
      fail(ErrorCode::TrueDensityZero, "true law has zero density at " + std::to_string(holdout[i]));
    }
  }
  std::vector<double> terms;
  if (imputer.is_discrete()) {
    terms.resize(holdout.size());
    for (std::size_t i = 0; i < holdout.size(); ++i) terms[i] = imputer.log_predictive_pmf(holdout[i]);
  } else {
    terms = imputer.log_predictive_density(holdout);
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == -std::numeric_limits<double>::infinity()) return 1.0;
    terms[i] -= log_truth[i];
  }
  std::sort(terms.begin(), terms.end());
  return std::abs(std::expm1(compensated_sum(terms)));
}

double missing_rate(std::size_t n_total, double rate, double anchor) {
  return anchor * std::pow(static_cast<double>(n_total) / 100.0, -rate);
}

std::size_t observed_count(std::size_t n_total, double rate, double anchor) {
  const double r = std::clamp(missing_rate(n_total, rate, anchor), 0.0, 1.0);
  return static_cast<std::size_t>(std::llround(static_cast<double>(n_total) * (1.0 - r)));
}

std::vector<LrCurvePoint> lr_expectation_curve(VerifyScenario scenario, std::span<const std::size_t> n_grid,
                                               double rate, std::size_t reps, std::uint64_t seed, unsigned threads,
                                               double anchor) {
  if (reps < 1) fail(ErrorCode::InvalidArgument, "reps must be at least 1");
  const Law truth = verify_truth(scenario);
  const ImputerSpec spec = verify_imputer(scenario);
  std::vector<LrCurvePoint> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    const std::size_t n1 = observed_count(n, rate, anchor);
    if (n1 < 2) fail(ErrorCode::InvalidArgument, "N=" + std::to_string(n) + " leaves fewer than 2 observed values");
    const std::uint64_t key = Rng::derive(seed, Stream::Dataset, g);
    std::vector<double> dev(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
      Rng rng = Rng::substream(key, Stream::Replicate, rep);
      std::vector<double> x(n);
      for (double& v : x) v = truth.sample(rng);
      const std::span<const double> all(x);
      const Imputer imputer = Imputer::fit(spec, all.first(n1));
      dev[rep] = lr_product(truth, imputer, all.subspan(n1));
    });
    const double mean = compensated_sum(dev) / static_cast<double>(reps);
    double ss = 0.0;
    for (double d : dev) ss += (d - mean) * (d - mean);
    const double sd = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
    out.push_back({to_string(scenario), n, rate, n1, mean, sd / std::sqrt(static_cast<double>(reps)), reps});
  }
  return out;
}

}  // namespace irt
