#include "irt/designs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "irt/error.hpp"

namespace irt {

namespace {

long double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  long double out = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<long double>(n - k + i) / i;
  return std::round(out);
}

std::optional<std::uint64_t> checked_mul(std::optional<std::uint64_t> a, std::uint64_t b) {
  if (!a) return std::nullopt;
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(*a, b, &out)) return std::nullopt;
  return out;
}

std::optional<std::uint64_t> exact_binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::optional<std::uint64_t> out = 1;
  for (std::size_t i = 1; i <= k && out; ++i) {
    out = checked_mul(out, n - k + i);
    if (out) *out /= i;
  }
  return out;
}

// Selection sampling (Knuth's Algorithm S): marks exactly `pick` of `total`
// positions, each subset equally likely, in one ordered pass.
template <typename Mark>
void select_subset(Rng& rng, std::size_t total, std::size_t pick, Mark&& mark) {
  std::size_t remaining = pick;
  for (std::size_t i = 0; i < total && remaining > 0; ++i) {
    if (rng.below(total - i) < remaining) {
      mark(i);
      --remaining;
    }
  }
}

void check_support(long double size, std::size_t cap) {
  if (size > static_cast<long double>(cap)) {
    fail(ErrorCode::SupportTooLarge,
         "support has " + std::to_string(static_cast<double>(size)) + " points, cap is " + std::to_string(cap));
  }
}

void sort_points(std::vector<SupportPoint>& points) {
  std::sort(points.begin(), points.end(), [](const SupportPoint& a, const SupportPoint& b) { return a.z < b.z; });
}

}  // namespace

Design Design::bernoulli(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "bernoulli p=" + std::to_string(p));
  Design d;
  d.kind_ = Kind::Bernoulli;
  d.n_ = n;
  d.p_ = p;
  return d;
}

Design Design::complete(std::size_t n, std::size_t m) {
  if (m > n) fail(ErrorCode::InvalidArgument, "complete design with m > n");
  Design d;
  d.kind_ = Kind::Complete;
  d.n_ = n;
  d.m_ = m;
  return d;
}

Design Design::two_stage(std::vector<int> memberships) {
  int max_id = -1;
  for (int c : memberships) {
    if (c < 0) fail(ErrorCode::InvalidArgument, "negative cluster id");
    max_id = std::max(max_id, c);
  }
  const auto k = static_cast<std::size_t>(max_id + 1);
  if (k < 2) fail(ErrorCode::TooFewClusters, "two-stage design needs at least 2 clusters, got " + std::to_string(k));
  Design d;
  d.kind_ = Kind::TwoStage;
  d.n_ = memberships.size();
  d.groups_.resize(k);
  for (std::size_t i = 0; i < memberships.size(); ++i) {
    d.groups_[static_cast<std::size_t>(memberships[i])].push_back(i);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (d.groups_[c].empty()) fail(ErrorCode::EmptyCluster, "cluster " + std::to_string(c) + " has no units");
  }
  d.m_ = k / 2;
  d.memberships_ = std::move(memberships);
  return d;
}

Design Design::stratified(std::vector<int> strata, Assignment arms) {
  if (strata.size() != arms.size()) fail(ErrorCode::LengthMismatch, "strata and arm vectors differ in length");
  std::map<int, std::size_t> index;
  Design d;
  d.kind_ = Kind::Stratified;
  d.n_ = strata.size();
  for (std::size_t i = 0; i < strata.size(); ++i) {
    auto [it, inserted] = index.emplace(strata[i], d.groups_.size());
    if (inserted) {
      d.groups_.emplace_back();
      d.stratum_arms_.emplace_back();
    }
    d.groups_[it->second].push_back(i);
    d.stratum_arms_[it->second].push_back(arms.labels[i]);
  }
  for (auto& a : d.stratum_arms_) std::sort(a.begin(), a.end());
  d.memberships_ = std::move(strata);
  return d;
}

Assignment Design::sample(Rng& rng) const {
  Assignment z;
  sample_into(rng, z);
  return z;
}

void Design::sample_into(Rng& rng, Assignment& out) const {
  auto& z = out.labels;
  switch (kind_) {
    case Kind::Bernoulli:
      z.resize(n_);
      for (auto& v : z) v = rng.uniform() < p_ ? 1 : 0;
      return;
    case Kind::Complete:
      z.assign(n_, 0);
      select_subset(rng, n_, m_, [&](std::size_t i) { z[i] = 1; });
      return;
    case Kind::TwoStage:
      z.assign(n_, 0);
      select_subset(rng, groups_.size(), m_, [&](std::size_t c) {
        const auto& units = groups_[c];
        z[units[rng.below(units.size())]] = 1;
      });
      return;
    case Kind::Stratified:
      z.resize(n_);
      for (std::size_t s = 0; s < groups_.size(); ++s) {
        std::vector<int> arms = stratum_arms_[s];
        for (std::size_t i = arms.size(); i > 1; --i) std::swap(arms[i - 1], arms[rng.below(i)]);
        for (std::size_t u = 0; u < arms.size(); ++u) z[groups_[s][u]] = arms[u];
      }
      return;
  }
}

long double Design::support_size() const {
  switch (kind_) {
    case Kind::Bernoulli:
      return (p_ > 0.0 && p_ < 1.0) ? std::pow(2.0L, static_cast<long double>(n_)) : 1.0L;
    case Kind::Complete:
      return binomial(n_, m_);
    case Kind::TwoStage: {
      // Elementary symmetric polynomial e_m of the cluster sizes.
      std::vector<long double> e(m_ + 1, 0.0L);
      e[0] = 1.0L;
      for (const auto& g : groups_) {
        for (std::size_t j = m_; j >= 1; --j) e[j] += e[j - 1] * static_cast<long double>(g.size());
      }
      return e[m_];
    }
    case Kind::Stratified: {
      long double total = 1.0L;
      for (const auto& arms : stratum_arms_) {
        std::size_t left = arms.size();
        for (std::size_t i = 0; i < arms.size();) {
          std::size_t j = i;
          while (j < arms.size() && arms[j] == arms[i]) ++j;
          total *= binomial(left, j - i);
          left -= j - i;
          i = j;
        }
      }
      return total;
    }
  }
  return 0.0L;
}

Enumeration Design::enumerate(std::size_t cap) const {
  check_support(support_size(), cap);
  Enumeration out;
  switch (kind_) {
    case Kind::Bernoulli: {
      if (p_ == 0.0 || p_ == 1.0) {
        out.points.push_back({Assignment{std::vector<int>(n_, p_ == 1.0 ? 1 : 0)}, 1.0, 1});
        out.denominator = 1;
        return out;
      }
      const std::uint64_t total = std::uint64_t{1} << n_;
      out.points.reserve(total);
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        Assignment z{std::vector<int>(n_)};
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n_; ++i) {
          z.labels[i] = static_cast<int>((mask >> (n_ - 1 - i)) & 1U);
          ones += static_cast<std::size_t>(z.labels[i]);
        }
        const double prob = std::pow(p_, static_cast<double>(ones)) * std::pow(1.0 - p_, static_cast<double>(n_ - ones));
        out.points.push_back({std::move(z), prob, 1});
      }
      if (p_ == 0.5) out.denominator = total;
      return out;
    }
    case Kind::Complete: {
      std::vector<int> z(n_, 0);
      std::fill(z.end() - static_cast<std::ptrdiff_t>(m_), z.end(), 1);
      const auto count = static_cast<double>(support_size());
      do {
        out.points.push_back({Assignment{z}, 1.0 / count, 1});
      } while (std::next_permutation(z.begin(), z.end()));
      out.denominator = static_cast<std::uint64_t>(count);
      return out;
    }
    case Kind::TwoStage: {
      const std::size_t k = groups_.size();
      std::optional<std::uint64_t> denom = exact_binomial(k, m_);
      for (const auto& g : groups_) denom = checked_mul(denom, g.size());
      const long double subsets = binomial(k, m_);
      std::vector<char> chosen(k, 0);
      std::fill(chosen.end() - static_cast<std::ptrdiff_t>(m_), chosen.end(), 1);
      do {
        std::vector<std::size_t> picked;
        long double prob = 1.0L / subsets;
        std::uint64_t weight = 1;
        for (std::size_t c = 0; c < k; ++c) {
          if (chosen[c]) {
            picked.push_back(c);
            prob /= static_cast<long double>(groups_[c].size());
          } else {
            weight *= groups_[c].size();
          }
        }
        // Odometer over one unit per picked cluster.
        std::vector<std::size_t> digit(picked.size(), 0);
        for (;;) {
          Assignment z{std::vector<int>(n_, 0)};
          for (std::size_t t = 0; t < picked.size(); ++t) z.labels[groups_[picked[t]][digit[t]]] = 1;
          out.points.push_back({std::move(z), static_cast<double>(prob), weight});
          std::size_t t = 0;
          for (; t < picked.size(); ++t) {
            if (++digit[t] < groups_[picked[t]].size()) break;
            digit[t] = 0;
          }
          if (t == picked.size()) break;
        }
      } while (std::next_permutation(chosen.begin(), chosen.end()));
      sort_points(out.points);
      out.denominator = denom;
      return out;
    }
    case Kind::Stratified: {
      const auto count = support_size();
      std::vector<std::vector<int>> current = stratum_arms_;
      for (;;) {
        Assignment z{std::vector<int>(n_)};
        for (std::size_t s = 0; s < groups_.size(); ++s) {
          for (std::size_t u = 0; u < groups_[s].size(); ++u) z.labels[groups_[s][u]] = current[s][u];
        }
        out.points.push_back({std::move(z), static_cast<double>(1.0L / count), 1});
        std::size_t s = 0;
        for (; s < current.size(); ++s) {
          if (std::next_permutation(current[s].begin(), current[s].end())) break;
        }
        if (s == current.size()) break;
      }
      sort_points(out.points);
      out.denominator = static_cast<std::uint64_t>(count);
      return out;
    }
  }
  return out;
}

Assignment sample_two_stage(std::span<const int> memberships, Rng& rng) {
  return Design::two_stage(std::vector<int>(memberships.begin(), memberships.end())).sample(rng);
}

}  // namespace irt
