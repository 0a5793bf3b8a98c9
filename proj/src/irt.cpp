#include "irt/irt.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "irt/error.hpp"
#include "irt/parallel.hpp"

namespace irt {

namespace {

// Outer iterations handed to a worker at a time.
constexpr std::size_t kBlock = 32;

double max_abs(std::span<const double> theta) {
  double out = 0.0;
  for (double v : theta) out = std::max(out, std::abs(v));
  return out;
}

bool is_extreme(double t, double t_obs, double scale) { return t >= t_obs - kTieTolerance * scale; }

void check_sizes(const Design& design, const StatisticContext& ctx, std::size_t theta_size, const Assignment& z_obs) {
  const std::size_t n = ctx.mapping().size();
  if (design.size() != n || theta_size != n || z_obs.size() != n) {
    fail(ErrorCode::LengthMismatch, "design, mapping, theta and z_obs must all have " + std::to_string(n) + " units");
  }
}

void check_draws(std::size_t k, const char* what) {
  if (k < 1) fail(ErrorCode::InvalidArgument, std::string(what) + " must be at least 1");
}

// Shared Monte Carlo engine. Outer iteration j fills theta (identity for the
// plain FRT, an imputation otherwise); it is then scored against k_inner
// assignments drawn from randomization substreams j*k_inner + l.
template <typename Fill>
IrtResult run(const Design& design, const StatisticContext& ctx, double t_obs, std::size_t k_outer,
              std::size_t k_inner, std::uint64_t seed, unsigned threads, Fill&& fill) {
  const std::size_t total = k_outer * k_inner;
  const std::size_t budget = kResampleBudgetFactor * total;
  const std::size_t blocks = (k_outer + kBlock - 1) / kBlock;
  std::vector<std::size_t> extreme(blocks, 0);
  std::vector<std::size_t> undefined(blocks, 0);

  parallel_for(blocks, threads, [&](std::size_t block) {
    Assignment z;
    std::vector<int> exposures;
    std::vector<double> theta;
    const std::size_t end = std::min(k_outer, (block + 1) * kBlock);
    for (std::size_t j = block * kBlock; j < end; ++j) {
      const std::span<const double> values = fill(j, theta);
      const double scale = max_abs(values);
      for (std::size_t l = 0; l < k_inner; ++l) {
        Rng rng = Rng::substream(seed, Stream::Randomization, j * k_inner + l);
        std::size_t retries = 0;
        for (;;) {
          design.sample_into(rng, z);
          ctx.mapping().apply_unchecked(z, exposures);
          const auto t = diff_in_means(std::span<const int>(exposures), values, ctx.a(), ctx.b());
          if (t) {
            if (is_extreme(*t, t_obs, scale)) ++extreme[block];
            break;
          }
          ++undefined[block];
          if (++retries > budget) {
            fail(ErrorCode::ResampleBudgetExceeded,
                 "no assignment with both focal groups non-empty after " + std::to_string(budget) + " redraws");
          }
        }
      }
    }
  });

  IrtResult out;
  out.k = total;
  out.seed = seed;
  for (std::size_t b = 0; b < blocks; ++b) {
    out.extreme_count += extreme[b];
    out.undefined_resamples += undefined[b];
  }
  if (out.undefined_resamples > budget) {
    fail(ErrorCode::ResampleBudgetExceeded,
         std::to_string(out.undefined_resamples) + " undefined draws exceed the budget of " + std::to_string(budget));
  }
  out.p_hat = static_cast<double>(out.extreme_count) / static_cast<double>(total);
  return out;
}

double observed_statistic(const StatisticContext& ctx, const Assignment& z_obs, std::span<const double> theta) {
  const auto t = ctx.evaluate(z_obs, theta);
  if (!t) fail(ErrorCode::UndefinedObservedStatistic, "a focal group is empty under the observed assignment");
  return *t;
}

}  // namespace

StatisticContext::StatisticContext(const ExposureMapping& mapping, int a, int b) : mapping_(&mapping), a_(a), b_(b) {
  if (a == b) fail(ErrorCode::SameLabels, "contrast needs two distinct exposures");
  const auto& set = mapping.exposure_set();
  if (!set.contains(a)) fail(ErrorCode::UnknownLabel, "exposure " + std::to_string(a));
  if (!set.contains(b)) fail(ErrorCode::UnknownLabel, "exposure " + std::to_string(b));
}

std::optional<double> StatisticContext::evaluate(const Assignment& z, std::span<const double> theta) const {
  const ExposureVector e = (*mapping_)(z);
  return diff_in_means(e, theta, a_, b_);
}

ExactPValue exact_frt_pvalue(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                             const Assignment& z_obs, std::size_t cap) {
  check_sizes(design, ctx, theta.size(), z_obs);
  const double t_obs = observed_statistic(ctx, z_obs, theta);
  const double scale = max_abs(theta);
  const Enumeration support = design.enumerate(cap);

  std::vector<int> exposures;
  double mass_defined = 0.0;
  double mass_extreme = 0.0;
  std::uint64_t weight_defined = 0;
  std::uint64_t weight_extreme = 0;
  for (const SupportPoint& point : support.points) {
    ctx.mapping().apply_unchecked(point.z, exposures);
    const auto t = diff_in_means(std::span<const int>(exposures), theta, ctx.a(), ctx.b());
    if (!t) continue;
    mass_defined += point.probability;
    weight_defined += point.weight;
    if (is_extreme(*t, t_obs, scale)) {
      mass_extreme += point.probability;
      weight_extreme += point.weight;
    }
  }

  ExactPValue out;
  if (support.denominator) {
    out.numerator = weight_extreme;
    out.denominator = weight_defined;
    out.p = static_cast<double>(weight_extreme) / static_cast<double>(weight_defined);
  } else {
    out.p = mass_extreme / mass_defined;
  }
  return out;
}

IrtResult frt_pvalue_mc(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                        const Assignment& z_obs, std::size_t k, std::uint64_t seed, unsigned threads) {
  check_draws(k, "k");
  check_sizes(design, ctx, theta.size(), z_obs);
  for (double v : theta) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "theta must be finite");
  }
  const double t_obs = observed_statistic(ctx, z_obs, theta);
  return run(design, ctx, t_obs, 1, k, seed, threads,
             [&](std::size_t, std::vector<double>&) { return theta; });
}

IrtResult frt_pvalue_mc(const Design& design, const StatisticContext& ctx, std::span<const double> theta,
                        const Assignment& z_obs, std::size_t k, Rng& rng, unsigned threads) {
  return frt_pvalue_mc(design, ctx, theta, z_obs, k, rng(), threads);
}

IrtResult irt_pvalue_nested(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                            const Imputer& imputer, const Assignment& z_obs, std::size_t k_outer,
                            std::size_t k_inner, std::uint64_t seed, unsigned threads) {
  check_draws(k_outer, "k_outer");
  check_draws(k_inner, "k_inner");
  check_sizes(design, ctx, partial.size(), z_obs);
  if (partial.observed.size() != partial.size()) fail(ErrorCode::LengthMismatch, "observed mask length");

  // Only focal units at z_obs enter T(z_obs, .), and imputation never touches
  // observed entries, so the observed statistic is the same for every draw.
  const ExposureVector e_obs = ctx.mapping()(z_obs);
  for (std::size_t i = 0; i < partial.size(); ++i) {
    if ((e_obs[i] == ctx.a() || e_obs[i] == ctx.b()) && !partial.observed[i]) {
      fail(ErrorCode::ValidationError, "focal unit " + std::to_string(i) + " is not observed");
    }
  }
  const auto t = diff_in_means(e_obs, partial.values, ctx.a(), ctx.b());
  if (!t) fail(ErrorCode::UndefinedObservedStatistic, "a focal group is empty under the observed assignment");

  const std::vector<std::size_t> missing = partial.missing_units();
  return run(design, ctx, *t, k_outer, k_inner, seed, threads,
             [&](std::size_t j, std::vector<double>& theta) -> std::span<const double> {
               theta = partial.values;
               Rng rng = Rng::substream(seed, Stream::Imputation, j);
               imputer.draw_missing(missing, rng, theta);
               return theta;
             });
}

IrtResult irt_pvalue_nested(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                            const Imputer& imputer, const Assignment& z_obs, std::size_t k_outer,
                            std::size_t k_inner, Rng& rng, unsigned threads) {
  return irt_pvalue_nested(design, ctx, partial, imputer, z_obs, k_outer, k_inner, rng(), threads);
}

IrtResult irt_pvalue(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                     const Imputer& imputer, const Assignment& z_obs, std::size_t k, std::uint64_t seed,
                     unsigned threads) {
  return irt_pvalue_nested(design, ctx, partial, imputer, z_obs, k, 1, seed, threads);
}

IrtResult irt_pvalue(const Design& design, const StatisticContext& ctx, const PartialTheta& partial,
                     const Imputer& imputer, const Assignment& z_obs, std::size_t k, Rng& rng,
                     unsigned threads) {
  return irt_pvalue(design, ctx, partial, imputer, z_obs, k, rng(), threads);
}

}  // namespace irt
