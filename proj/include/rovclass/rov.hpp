#pragma once

// Three-state route origin validation.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "rovclass/core_model.hpp"
#include "rovclass/prefix_forest.hpp"

namespace rovclass {

struct ValidationOutcome {
  ValidationState state = ValidationState::Unknown;
  std::vector<RoaRecord> covering;
  std::vector<RoaRecord> matching;  // subset of covering that authorizes the route
};

inline ValidationOutcome validate_origin(const IpPrefix& prefix, Asn origin, const RoaIndex& index) {
  ValidationOutcome out;
  index.for_each_covering(prefix, [&](const RoaRecord& r) {
    out.covering.push_back(r);
    if (prefix.length() <= r.max_length && r.asn == origin) out.matching.push_back(r);
  });
  if (out.covering.empty()) {
    out.state = ValidationState::Unknown;
  } else {
    out.state = out.matching.empty() ? ValidationState::Invalid : ValidationState::Valid;
  }
  return out;
}

/// Valid when any covering ROA authorizes the origin at this length, Invalid
/// when covered but none does, Unknown when nothing covers the prefix.
/// Routes ending in an AS_SET have no single origin and are rejected.
inline ValidationOutcome validate(const RouteEntry& route, const RoaIndex& index) {
  if (route.path.contains_set()) throw ContractError("validate: route " + route.prefix.to_string() + " ends in an AS_SET");
  return validate_origin(route.prefix, route.path.origin(), index);
}

/// Percentage of count/total scaled to `decimals` places, rounded half up.
/// An empty total yields 0.
inline double rounded_percent(std::uint64_t count, std::uint64_t total, int decimals) {
  if (total == 0) return 0.0;
  std::uint64_t scale = 100;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const std::uint64_t units = (2 * count * scale + total) / (2 * total);
  double divisor = 1.0;
  for (int i = 0; i < decimals; ++i) divisor *= 10.0;
  return static_cast<double>(units) / divisor;
}

enum class CountMode { Distinct, Raw };

inline std::string_view to_string(CountMode m) { return m == CountMode::Distinct ? "distinct" : "raw"; }

struct ValidationSummary {
  CountMode mode = CountMode::Distinct;
  std::uint64_t unknown = 0;
  std::uint64_t valid = 0;
  std::uint64_t invalid = 0;
  std::uint64_t as_set_excluded = 0;

  std::uint64_t total() const { return unknown + valid + invalid; }
  std::uint64_t count(ValidationState s) const {
    switch (s) {
      case ValidationState::Unknown: return unknown;
      case ValidationState::Valid: return valid;
      case ValidationState::Invalid: return invalid;
    }
    return 0;
  }
  double percent(ValidationState s) const { return rounded_percent(count(s), total(), 2); }

  friend bool operator==(const ValidationSummary&, const ValidationSummary&) = default;
};

struct PairKey {
  IpPrefix prefix;
  Asn origin = 0;

  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct PairOutcome {
  PairKey pair;
  std::uint64_t occurrences = 0;  // RIB lines carrying this (prefix, origin)
  ValidationOutcome outcome;
};

struct ValidationTable {
  ValidationSummary summary;
  std::vector<PairOutcome> outcomes;  // one per distinct pair, sorted by pair
};

/// Validates every route. Outcomes are per distinct (prefix, origin); the
/// summary counts distinct pairs or raw lines depending on `mode`. AS_SET
/// routes are left out of both and tallied in `as_set_excluded`.
inline ValidationTable validate_table(std::span<const RouteEntry> routes, const RoaIndex& index,
                                      CountMode mode = CountMode::Distinct) {
  ValidationTable table;
  table.summary.mode = mode;
  std::vector<PairKey> keys;
  keys.reserve(routes.size());
  for (const auto& r : routes) {
    if (r.path.contains_set()) {
      ++table.summary.as_set_excluded;
      continue;
    }
    keys.push_back(PairKey{r.prefix, r.path.origin()});
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    PairOutcome po{keys[i], j - i, validate_origin(keys[i].prefix, keys[i].origin, index)};
    const std::uint64_t weight = mode == CountMode::Distinct ? 1 : po.occurrences;
    switch (po.outcome.state) {
      case ValidationState::Unknown: table.summary.unknown += weight; break;
      case ValidationState::Valid: table.summary.valid += weight; break;
      case ValidationState::Invalid: table.summary.invalid += weight; break;
    }
    table.outcomes.push_back(std::move(po));
    i = j;
  }
  return table;
}

}  // namespace rovclass
