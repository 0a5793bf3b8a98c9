#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irt/distributions.hpp"
#include "irt/imputation.hpp"

namespace irt {

enum class VerifyScenario { NigNormal, KernelNormal, BetaBinomial, EmpiricalBinomial };

std::string to_string(VerifyScenario scenario);
/// Accepts nig_normal, kernel_normal, beta_binomial, empirical_binomial.
VerifyScenario parse_verify_scenario(const std::string& name);

/// True law of theta: N(0,1) for the normal scenarios, Binomial(100, 0.1) for
/// the binomial ones.
Law verify_truth(VerifyScenario scenario);
ImputerSpec verify_imputer(VerifyScenario scenario);

struct LrCurvePoint {
  std::string scenario;
  std::size_t n_total = 0;
  double rate = 0.0;
  std::size_t n1 = 0;
  double mean_abs_dev = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// |prod_i ghat(x_i) / g(x_i) - 1| over the holdout, summed in log space.
/// Densities are used for continuous laws and pmfs for discrete ones. A zero
/// predictive value gives exactly 1. Throws TrueDensityZero when g(x_i) = 0.
double lr_product(const Law& truth, const Imputer& imputer, std::span<const double> holdout);

/// r_N = anchor * (N / 100)^(-rate).
double missing_rate(std::size_t n_total, double rate, double anchor = 0.5);
/// round(N * (1 - r_N)).
std::size_t observed_count(std::size_t n_total, double rate, double anchor = 0.5);

/// One point per N in the grid. Replicate draws depend on (seed, N index,
/// replicate) only, so curves at different rates share their samples.
std::vector<LrCurvePoint> lr_expectation_curve(VerifyScenario scenario, std::span<const std::size_t> n_grid,
                                               double rate, std::size_t reps, std::uint64_t seed,
                                               unsigned threads = 1, double anchor = 0.5);

}  // namespace irt
