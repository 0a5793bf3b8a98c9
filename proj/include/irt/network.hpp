#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace irt {

/// A realised treatment vector. Binary designs use {0,1}; multi-arm designs
/// use arbitrary integer arm labels.
struct Assignment {
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  int operator[](std::size_t i) const noexcept { return labels[i]; }
  auto operator<=>(const Assignment&) const = default;
};

/// Undirected interference graph stored as sorted adjacency lists (CSR).
class InterferenceNetwork {
 public:
  InterferenceNetwork() = default;

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }
  bool connected(std::size_t i, std::size_t j) const;

  /// Each undirected edge once, as (min, max), in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend InterferenceNetwork build_network(std::size_t n,
                                           std::span<const std::pair<std::size_t, std::size_t>> edges);

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> adjacency_;
};

/// Symmetric closure of `edges`; duplicates collapse. Throws IndexOutOfRange
/// or SelfLoop.
InterferenceNetwork build_network(std::size_t n,
                                  std::span<const std::pair<std::size_t, std::size_t>> edges);

/// Complete graph inside each cluster, no edges across clusters.
InterferenceNetwork cluster_network(std::span<const int> memberships);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// i ~ j iff the Euclidean distance is at most `radius` (inclusive).
InterferenceNetwork spatial_network(std::span<const Point2> coords, double radius);

// ---------------------------------------------------------------------------
// Exposure mappings

/// Per-unit exposure codes. The owning mapping's ExposureSet gives the names.
struct ExposureVector {
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  int operator[](std::size_t i) const noexcept { return labels[i]; }
  bool operator==(const ExposureVector&) const = default;
};

/// The declared exposure set E: codes plus printable names.
class ExposureSet {
 public:
  ExposureSet() = default;
  explicit ExposureSet(std::vector<std::pair<int, std::string>> entries);

  bool contains(int code) const;
  const std::string& name(int code) const;
  /// Accepts either a name ("3w") or a decimal code ("1").
  std::optional<int> parse(const std::string& text) const;
  const std::vector<std::pair<int, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<int, std::string>> entries_;
};

/// Three-level mapping: 2 treated, 1 untreated with a treated neighbour,
/// 0 untreated with no treated neighbour.
ExposureVector exposure_three_level(const InterferenceNetwork& net, const Assignment& z);

enum class Round { First, Second };
enum class Intensity { Simple, Intensive };
enum class PriorInfo { None = 0, Weak = 1, Strong = 2 };

/// Encodes (treatment t >= 1, prior-information level) as 3*(t-1) + level.
constexpr int two_round_code(int treatment, PriorInfo level) noexcept {
  return 3 * (treatment - 1) + static_cast<int>(level);
}

struct TwoRoundLayout {
  std::vector<Round> round_of;            // per unit
  std::map<int, Intensity> intensity_of;  // per treatment label
};

/// One-way first-to-second-round mapping. A second-round unit gets Strong if
/// any first-round neighbour had an intensive introduction, Weak if only
/// simple ones, None otherwise; first-round units are always None.
ExposureVector exposure_two_round(const InterferenceNetwork& net, const Assignment& treatments,
                                  const TwoRoundLayout& layout);

/// A network plus the rule turning assignments into exposures. Immutable.
class ExposureMapping {
 public:
  enum class Kind { ThreeLevel, TwoRound };

  static ExposureMapping three_level(InterferenceNetwork net);
  static ExposureMapping two_round(InterferenceNetwork net, TwoRoundLayout layout);

  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return net_.size(); }
  const InterferenceNetwork& network() const noexcept { return net_; }
  const ExposureSet& exposure_set() const noexcept { return set_; }
  const TwoRoundLayout& layout() const noexcept { return layout_; }

  ExposureVector operator()(const Assignment& z) const;

  /// Allocation-free variant for Monte Carlo loops. Skips validation; `z`
  /// must already satisfy the mapping's preconditions.
  void apply_unchecked(const Assignment& z, std::vector<int>& out) const;

 private:
  ExposureMapping(Kind kind, InterferenceNetwork net, TwoRoundLayout layout, ExposureSet set);

  Kind kind_ = Kind::ThreeLevel;
  InterferenceNetwork net_;
  TwoRoundLayout layout_;
  ExposureSet set_;
};

}  // namespace irt
