#include "irt/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "irt/error.hpp"

namespace irt {

bool InterferenceNetwork::connected(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<std::size_t, std::size_t>> InterferenceNetwork::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

InterferenceNetwork build_network(std::size_t n,
                                  std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::vector<std::size_t>> lists(n);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      fail(ErrorCode::IndexOutOfRange, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                           ") with n=" + std::to_string(n));
    }
    if (u == v) fail(ErrorCode::SelfLoop, "unit " + std::to_string(u));
    lists[u].push_back(v);
    lists[v].push_back(u);
  }
  InterferenceNetwork net;
  net.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = lists[i];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    net.offsets_[i + 1] = net.offsets_[i] + l.size();
  }
  net.adjacency_.reserve(net.offsets_[n]);
  for (const auto& l : lists) net.adjacency_.insert(net.adjacency_.end(), l.begin(), l.end());
  return net;
}

InterferenceNetwork cluster_network(std::span<const int> memberships) {
  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < memberships.size(); ++i) clusters[memberships[i]].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [id, units] : clusters) {
    for (std::size_t a = 0; a < units.size(); ++a) {
      for (std::size_t b = a + 1; b < units.size(); ++b) edges.emplace_back(units[a], units[b]);
    }
  }
  return build_network(memberships.size(), edges);
}

InterferenceNetwork spatial_network(std::span<const Point2> coords, double radius) {
  if (!(radius >= 0.0)) fail(ErrorCode::NegativeRadius, "radius " + std::to_string(radius));
  const std::size_t n = coords.size();
  // Sweep along x so only candidates within the radius band are compared.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coords[a].x < coords[b].x || (coords[a].x == coords[b].x && a < b);
  });
  const double r2 = radius * radius;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t p = 0; p < n; ++p) {
    const Point2& a = coords[order[p]];
    for (std::size_t q = p + 1; q < n; ++q) {
      const Point2& b = coords[order[q]];
      const double dx = b.x - a.x;
      if (dx > radius) break;
      const double dy = b.y - a.y;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(order[p], order[q]);
    }
  }
  return build_network(n, edges);
}

// ---------------------------------------------------------------------------

ExposureSet::ExposureSet(std::vector<std::pair<int, std::string>> entries) : entries_(std::move(entries)) {}

bool ExposureSet::contains(int code) const {
  return std::any_of(entries_.begin(), entries_.end(), [code](const auto& e) { return e.first == code; });
}

const std::string& ExposureSet::name(int code) const {
  for (const auto& e : entries_) {
    if (e.first == code) return e.second;
  }
  fail(ErrorCode::UnknownLabel, "exposure code " + std::to_string(code));
}

std::optional<int> ExposureSet::parse(const std::string& text) const {
  for (const auto& e : entries_) {
    if (e.second == text) return e.first;
  }
  try {
    std::size_t used = 0;
    const int code = std::stoi(text, &used);
    if (used == text.size() && contains(code)) return code;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

namespace {

void check_length(std::size_t n, std::size_t got, const char* what) {
  if (n != got) {
    fail(ErrorCode::LengthMismatch,
         std::string(what) + " has length " + std::to_string(got) + ", expected " + std::to_string(n));
  }
}

void three_level_into(const InterferenceNetwork& net, const Assignment& z, std::vector<int>& out) {
  const std::size_t n = net.size();
  out.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (z.labels[i] != 1) continue;
    out[i] = 2;
    for (std::size_t j : net.neighbors(i)) {
      if (z.labels[j] == 0) out[j] = 1;
    }
  }
}

void two_round_into(const InterferenceNetwork& net, const Assignment& z, const TwoRoundLayout& layout,
                    std::vector<int>& out) {
  const std::size_t n = net.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    PriorInfo level = PriorInfo::None;
    if (layout.round_of[i] == Round::Second) {
      for (std::size_t j : net.neighbors(i)) {
        if (layout.round_of[j] != Round::First) continue;
        if (layout.intensity_of.at(z.labels[j]) == Intensity::Intensive) {
          level = PriorInfo::Strong;
          break;
        }
        level = PriorInfo::Weak;
      }
    }
    out[i] = two_round_code(z.labels[i], level);
  }
}

ExposureSet three_level_set() { return ExposureSet({{0, "0"}, {1, "1"}, {2, "2"}}); }

ExposureSet two_round_set(const TwoRoundLayout& layout) {
  std::vector<std::pair<int, std::string>> entries;
  constexpr std::array<std::pair<PriorInfo, char>, 3> levels{
      {{PriorInfo::None, 'n'}, {PriorInfo::Weak, 'w'}, {PriorInfo::Strong, 's'}}};
  for (const auto& [t, intensity] : layout.intensity_of) {
    for (const auto& [level, tag] : levels) {
      entries.emplace_back(two_round_code(t, level), std::to_string(t) + tag);
    }
  }
  return ExposureSet(std::move(entries));
}

void validate_two_round(const InterferenceNetwork& net, const Assignment& z, const TwoRoundLayout& layout) {
  check_length(net.size(), z.size(), "treatment vector");
  check_length(net.size(), layout.round_of.size(), "round vector");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.labels[i] < 1 || !layout.intensity_of.contains(z.labels[i])) {
      fail(ErrorCode::UnknownTreatment,
           "unit " + std::to_string(i) + " has treatment " + std::to_string(z.labels[i]));
    }
  }
}

}  // namespace

ExposureVector exposure_three_level(const InterferenceNetwork& net, const Assignment& z) {
  check_length(net.size(), z.size(), "assignment");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.labels[i] != 0 && z.labels[i] != 1) {
      fail(ErrorCode::NonBinaryAssignment,
           "unit " + std::to_string(i) + " has label " + std::to_string(z.labels[i]));
    }
  }
  ExposureVector out;
  three_level_into(net, z, out.labels);
  return out;
}

ExposureVector exposure_two_round(const InterferenceNetwork& net, const Assignment& treatments,
                                  const TwoRoundLayout& layout) {
  validate_two_round(net, treatments, layout);
  ExposureVector out;
  two_round_into(net, treatments, layout, out.labels);
  return out;
}

ExposureMapping::ExposureMapping(Kind kind, InterferenceNetwork net, TwoRoundLayout layout, ExposureSet set)
    : kind_(kind), net_(std::move(net)), layout_(std::move(layout)), set_(std::move(set)) {}

ExposureMapping ExposureMapping::three_level(InterferenceNetwork net) {
  return ExposureMapping(Kind::ThreeLevel, std::move(net), {}, three_level_set());
}

ExposureMapping ExposureMapping::two_round(InterferenceNetwork net, TwoRoundLayout layout) {
  check_length(net.size(), layout.round_of.size(), "round vector");
  auto set = two_round_set(layout);
  return ExposureMapping(Kind::TwoRound, std::move(net), std::move(layout), std::move(set));
}

ExposureVector ExposureMapping::operator()(const Assignment& z) const {
  return kind_ == Kind::ThreeLevel ? exposure_three_level(net_, z) : exposure_two_round(net_, z, layout_);
}

void ExposureMapping::apply_unchecked(const Assignment& z, std::vector<int>& out) const {
  if (kind_ == Kind::ThreeLevel) {
    three_level_into(net_, z, out);
  } else {
    two_round_into(net_, z, layout_, out);
  }
}

}  // namespace irt
