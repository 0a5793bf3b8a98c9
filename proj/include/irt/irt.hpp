#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "irt/designs.hpp"
#include "irt/imputation.hpp"
#include "irt/network.hpp"
#include "irt/rng.hpp"
#include "irt/teststat.hpp"

namespace irt {

inline constexpr std::size_t kDefaultDraws = 2000;

/// Redraws of undefined-statistic assignments allowed per Monte Carlo draw.
inline constexpr std::size_t kResampleBudgetFactor = 100;

struct IrtResult {
  double p_hat = 0.0;
  std::size_t k = 0;
  std::size_t extreme_count = 0;
  std::size_t undefined_resamples = 0;
  std::uint64_t seed = 0;
};

/// Exposure mapping plus the contrast (a, b) the statistic compares.
class StatisticContext {
 public:
  /// Throws SameLabels or UnknownLabel.
  StatisticContext(const ExposureMapping& mapping, int a, int b);

  const ExposureMapping& mapping() const noexcept { return *mapping_; }
  int a() const noexcept { return a_; }
  int b() const noexcept { return b_; }

  std::optional<double> evaluate(const Assignment& z, std::span<const double> theta) const;

 private:
  const ExposureMapping* mapping_;
  int a_;
  int b_;
};

/// Comparisons count T(z) >= T_obs - tol with tol = kTieTolerance * max|theta|,
/// so values that differ only by summation rounding are ties.
inline constexpr double kTieTolerance = 1e-10;

struct ExactPValue {
  double p = 0.0;
  /// Set when the design enumerates with integer weights.
  std::optional<std::uint64_t> numerator;
  std::optional<std::uint64_t> denominator;
};

/// Sum of prob(z) over the support with T(z) >= T(z_obs), renormalised over
/// the assignments where T is defined. Throws SupportTooLarge or
/// UndefinedObservedStatistic.
ExactPValue exact_frt_pvalue(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                             const Assignment& z_obs, std::size_t cap = kDefaultEnumerationCap);

/// Monte Carlo FRT with k draws from the design. Draw l uses the
/// randomization substream l of `seed`.
IrtResult frt_pvalue_mc(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                        const Assignment& z_obs, std::size_t k, std::uint64_t seed, unsigned threads = 1);
IrtResult frt_pvalue_mc(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                        const Assignment& z_obs, std::size_t k, Rng& rng, unsigned threads = 1);

/// Paired mode: one fresh imputation and one fresh assignment per iteration.
IrtResult irt_pvalue(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                     const Imputer& imputer, const Assignment& z_obs, std::size_t k, std::uint64_t seed,
                     unsigned threads = 1);
IrtResult irt_pvalue(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                     const Imputer& imputer, const Assignment& z_obs, std::size_t k, Rng& rng,
                     unsigned threads = 1);

/// k_outer imputations, each scored against k_inner assignments. With
/// k_inner = 1 this is exactly irt_pvalue; result.k = k_outer * k_inner.
IrtResult irt_pvalue_nested(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                            const Imputer& imputer, const Assignment& z_obs, std::size_t k_outer,
                            std::size_t k_inner, std::uint64_t seed, unsigned threads = 1);
IrtResult irt_pvalue_nested(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                            const Imputer& imputer, const Assignment& z_obs, std::size_t k_outer,
                            std::size_t k_inner, Rng& rng, unsigned threads = 1);

}  // namespace irt
