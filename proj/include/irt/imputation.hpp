#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "irt/distributions.hpp"
#include "irt/rng.hpp"
#include "irt/teststat.hpp"

namespace irt {

// ---------------------------------------------------------------------------
// Imputation model specifications. Defaults follow the usual weak priors:
// alpha0 = beta0 = kappa0 = 1, mu0 = 0 and Beta(1, 1) for counts.

/// Known marginal g; missing entries are drawn from it directly.
struct OracleSpec {
  Law law = Law::normal(0.0, 1.0);
};

/// Resample the observed values uniformly with replacement.
struct EmpiricalSpec {};

/// Gaussian-kernel smoothed empirical distribution. The bandwidth is
/// constant * sd * N1^(-1/5) unless `bandwidth` pins it.
struct KernelSpec {
  double constant = 1.06;
  std::optional<double> bandwidth;
};

/// Normal likelihood with known variance and a normal prior on the mean.
struct NormalKnownVarSpec {
  double sigma2 = 1.0;
  double mu0 = 0.0;
  double sigma0_2 = 1.0;
};

/// Normal likelihood with Normal-Inverse-Gamma prior on (mu, sigma^2).
struct NigSpec {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double kappa0 = 1.0;
  double mu0 = 0.0;
};

/// Binomial(m, q) likelihood with Beta(alpha, beta) prior on q.
struct BetaBinomialSpec {
  int m = 1;
  double alpha = 1.0;
  double beta = 1.0;
};

using ImputerSpec = std::variant<OracleSpec, EmpiricalSpec, KernelSpec, NormalKnownVarSpec, NigSpec, BetaBinomialSpec>;

enum class ImputerKind { Oracle, Empirical, Kernel, NormalKnownVar, Nig, BetaBinomial };

std::string to_string(ImputerKind kind);

/// Posterior summaries of the conjugate kinds. Fields that do not apply to
/// the fitted kind are zero.
struct ConjugatePosterior {
  double mean = 0.0;        // mu_N1 (normal kinds)
  double variance = 0.0;    // sigma^2_N1: posterior var of mu (known-var) or t scale^2 (NIG)
  double predictive_variance = 0.0;  // known-var only: sigma^2_N1 + sigma^2
  double alpha = 0.0;       // alpha_N1 (NIG, beta-binomial)
  double beta = 0.0;        // beta_N1 (NIG, beta-binomial)
  double kappa = 0.0;       // kappa_N1 (NIG)
  double dof = 0.0;         // 2 alpha_N1 (NIG)
  int trials = 0;           // m (beta-binomial)
};

/// h_N = 1.06 * sd * N1^(-1/5) with the sample standard deviation. Throws
/// DegenerateSample when N1 < 2 or sd == 0.
double kernel_bandwidth(std::span<const double> observed, double constant = 1.06);

/// A fitted imputation distribution: i.i.d. predictive draws for the missing
/// entries, Dirac mass on the observed ones. Immutable once fitted.
class Imputer {
 public:
  /// Throws EmptyObserved (empirical/kernel with no data),
  /// InvalidHyperparameter, or OutOfSupport (beta-binomial data not in 0..m).
  /// A kernel fit on a degenerate sample falls back to the empirical kind and
  /// records a warning.
  static Imputer fit(const ImputerSpec& spec, std::span<const double> observed);
  static Imputer fit(const ImputerSpec& spec, const PartialTheta& partial);

  /// Effective kind after any fallback.
  ImputerKind kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept;
  const std::optional<std::string>& warning() const noexcept { return warning_; }
  std::size_t observed_count() const noexcept { return values_.size(); }
  double bandwidth() const noexcept { return bandwidth_; }
  const ConjugatePosterior& posterior() const noexcept { return post_; }
  const std::optional<Law>& oracle_law() const noexcept { return law_; }

  /// One draw from the predictive g-hat.
  double sample(Rng& rng) const;

  /// Full theta^imp: observed entries copied, missing ones i.i.d. g-hat.
  std::vector<double> draw(const PartialTheta& partial, Rng& rng) const;
  /// In-place variant: overwrites out[i] for every i in `missing` and leaves
  /// other entries untouched.
  void draw_missing(std::span<const std::size_t> missing, Rng& rng, std::span<double> out) const;

  /// Continuous kinds only (DiscreteKind otherwise).
  double predictive_density(double x) const;
  double log_predictive_density(double x) const;
  /// Batch log-density. For large kernel fits the kernel sum is evaluated on
  /// a grid, each node carrying Hermite moments of its points (relative
  /// error below 1e-6).
  std::vector<double> log_predictive_density(std::span<const double> xs) const;

  /// Discrete kinds only (ContinuousKind otherwise). Beta-binomial throws
  /// OutOfSupport outside 0..m; the empirical pmf is 0 off the data.
  double predictive_pmf(double x) const;
  double log_predictive_pmf(double x) const;

 private:
  Imputer() = default;

  double kernel_log_density_exact(double x) const;
  std::vector<double> kernel_log_density_binned(std::span<const double> xs) const;
  double kernel_nearest(double x) const;

  ImputerKind kind_ = ImputerKind::Empirical;
  std::vector<double> values_;  // sorted observed values (empirical, kernel)
  std::optional<Law> law_;
  ConjugatePosterior post_;
  double bandwidth_ = 0.0;
  std::vector<double> log_pmf_;  // beta-binomial log pmf over 0..m
  std::optional<std::string> warning_;
};

}  // namespace irt
