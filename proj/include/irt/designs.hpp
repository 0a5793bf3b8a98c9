#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "irt/network.hpp"
#include "irt/rng.hpp"

namespace irt {

struct SupportPoint {
  Assignment z;
  double probability = 0.0;
  /// Integer numerator of the probability over Enumeration::denominator.
  /// Only meaningful when the denominator is present.
  std::uint64_t weight = 0;
};

/// Exhaustive support of a design in lexicographic order of the assignment.
struct Enumeration {
  std::vector<SupportPoint> points;
  /// Set when every probability is an exact ratio weight/denominator of
  /// 64-bit integers; enables tolerance-free validity checks.
  std::optional<std::uint64_t> denominator;
};

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// The randomization distribution F_Z over assignments. Immutable.
class Design {
 public:
  enum class Kind { Bernoulli, Complete, TwoStage, Stratified };

  /// Independent Z_i ~ Bernoulli(p).
  static Design bernoulli(std::size_t n, double p);
  /// Exactly m of n units treated, uniformly.
  static Design complete(std::size_t n, std::size_t m);
  /// floor(K/2) clusters drawn uniformly, then one uniform unit treated in
  /// each drawn cluster. Cluster ids must cover 0..K-1.
  static Design two_stage(std::vector<int> memberships);
  /// Complete randomization within strata: each stratum keeps the multiset
  /// of arm labels it has in `arms`, permuted uniformly.
  static Design stratified(std::vector<int> strata, Assignment arms);

  Kind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return n_; }
  double p() const noexcept { return p_; }
  std::size_t treated() const noexcept { return m_; }
  const std::vector<int>& memberships() const noexcept { return memberships_; }
  std::size_t cluster_count() const noexcept { return groups_.size(); }

  Assignment sample(Rng& rng) const;
  /// Reuses `out`'s storage.
  void sample_into(Rng& rng, Assignment& out) const;

  /// Number of assignments with positive probability.
  long double support_size() const;
  Enumeration enumerate(std::size_t cap = kDefaultEnumerationCap) const;

 private:
  Design() = default;

  Kind kind_ = Kind::Bernoulli;
  std::size_t n_ = 0;
  double p_ = 0.5;
  std::size_t m_ = 0;
  std::vector<int> memberships_;
  // Units per cluster (two-stage) or per stratum (stratified).
  std::vector<std::vector<std::size_t>> groups_;
  // Per-stratum sorted arm labels (stratified).
  std::vector<std::vector<int>> stratum_arms_;
};

/// Convenience wrapper: one draw from the two-stage design.
Assignment sample_two_stage(std::span<const int> memberships, Rng& rng);

}  // namespace irt
