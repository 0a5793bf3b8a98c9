#include "irt/teststat.hpp"

#include <cmath>
#include <string>

#include "irt/error.hpp"

namespace irt {

FocalSets focal_sets(const ExposureVector& exposures, int a, int b, const ExposureSet& set) {
  if (a == b) fail(ErrorCode::SameLabels, "contrast needs two distinct exposures");
  if (!set.contains(a)) fail(ErrorCode::UnknownLabel, "exposure " + std::to_string(a));
  if (!set.contains(b)) fail(ErrorCode::UnknownLabel, "exposure " + std::to_string(b));
  FocalSets out;
  for (std::size_t i = 0; i < exposures.size(); ++i) {
    if (exposures[i] == a) out.units_a.push_back(i);
    else if (exposures[i] == b) out.units_b.push_back(i);
  }
  return out;
}

std::optional<double> diff_in_means(std::span<const int> exposures, std::span<const double> theta, int a, int b) {
  if (exposures.size() != theta.size()) {
    fail(ErrorCode::LengthMismatch, "theta has length " + std::to_string(theta.size()) + ", exposures " +
                                        std::to_string(exposures.size()));
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  for (std::size_t i = 0; i < exposures.size(); ++i) {
    if (exposures[i] == a) {
      sum_a += theta[i];
      ++n_a;
    } else if (exposures[i] == b) {
      sum_b += theta[i];
      ++n_b;
    }
  }
  if (n_a == 0 || n_b == 0) return std::nullopt;
  return std::abs(sum_b / static_cast<double>(n_b) - sum_a / static_cast<double>(n_a));
}

std::optional<double> diff_in_means(const ExposureVector& exposures, std::span<const double> theta, int a, int b) {
  return diff_in_means(std::span<const int>(exposures.labels), theta, a, b);
}

std::size_t PartialTheta::observed_count() const noexcept {
  std::size_t count = 0;
  for (char o : observed) count += o ? 1 : 0;
  return count;
}

double PartialTheta::missing_rate() const noexcept {
  if (values.empty()) return 0.0;
  return 1.0 - static_cast<double>(observed_count()) / static_cast<double>(values.size());
}

std::vector<double> PartialTheta::observed_values() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (observed[i]) out.push_back(values[i]);
  }
  return out;
}

std::vector<std::size_t> PartialTheta::missing_units() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!observed[i]) out.push_back(i);
  }
  return out;
}

PartialTheta observed_theta(const ExposureVector& exposures_at_zobs, std::span<const double> y_obs, int a, int b) {
  const std::size_t n = exposures_at_zobs.size();
  if (y_obs.size() != n) {
    fail(ErrorCode::LengthMismatch,
         "outcomes have length " + std::to_string(y_obs.size()) + ", exposures " + std::to_string(n));
  }
  PartialTheta out;
  out.values.assign(n, std::nan(""));
  out.observed.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int e = exposures_at_zobs[i];
    if (e != a && e != b) continue;
    if (std::isnan(y_obs[i])) {
      fail(ErrorCode::ValidationError, "focal unit " + std::to_string(i) + " has a missing outcome");
    }
    out.values[i] = y_obs[i];
    out.observed[i] = 1;
  }
  return out;
}

}  // namespace irt
