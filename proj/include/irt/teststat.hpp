#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "irt/network.hpp"

namespace irt {

/// Units receiving exposure a and exposure b under one assignment.
struct FocalSets {
  std::vector<std::size_t> units_a;
  std::vector<std::size_t> units_b;

  std::size_t count_a() const noexcept { return units_a.size(); }
  std::size_t count_b() const noexcept { return units_b.size(); }
};

/// Throws SameLabels when a == b and UnknownLabel when either is outside `set`.
FocalSets focal_sets(const ExposureVector& exposures, int a, int b, const ExposureSet& set);

/// |mean over U_b - mean over U_a|; nullopt when either group is empty.
std::optional<double> diff_in_means(std::span<const int> exposures, std::span<const double> theta, int a, int b);
std::optional<double> diff_in_means(const ExposureVector& exposures, std::span<const double> theta, int a, int b);

/// theta under the contrast null with an observed mask. Values at
/// unobserved units are NaN and must never be read.
struct PartialTheta {
  std::vector<double> values;
  std::vector<char> observed;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t observed_count() const noexcept;
  /// 1 - N_obs / N.
  double missing_rate() const noexcept;
  /// The observed entries in unit order.
  std::vector<double> observed_values() const;
  std::vector<std::size_t> missing_units() const;
};

/// Copies y where the exposure is a or b; masks everything else. y may hold
/// NaN for non-focal units. Throws LengthMismatch, or ValidationError if a
/// focal unit's outcome is missing.
PartialTheta observed_theta(const ExposureVector& exposures_at_zobs, std::span<const double> y_obs, int a, int b);

}  // namespace irt
