#pragma once

// Rule-table classification of Invalid (prefix, origin) pairs into the six
// false-alarm classes, with "other" for pairs no rule row matches.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rovclass/core_model.hpp"
#include "rovclass/prefix_forest.hpp"
#include "rovclass/relgraph.hpp"
#include "rovclass/rov.hpp"

namespace rovclass {

enum class Tri : std::uint8_t { False, True, NotEvaluated };

inline Tri tri(bool b) { return b ? Tri::True : Tri::False; }

inline std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::False: return "false";
    case Tri::True: return "true";
    case Tri::NotEvaluated: return "not-evaluated";
  }
  return "not-evaluated";
}

struct PredicateVector {
  Tri roa_asn_is_origin = Tri::NotEvaluated;           // p1
  Tri roa_asn_provider_of_origin = Tri::NotEvaluated;  // p2
  Tri origin_provider_of_roa_asn = Tri::NotEvaluated;  // p3
  Tri multiple_providers = Tri::NotEvaluated;          // p4
  Tri relative_with_diff_path = Tri::NotEvaluated;     // p5
  Tri relative_with_same_path = Tri::NotEvaluated;     // p6

  std::array<Tri, 6> as_array() const {
    return {roa_asn_is_origin,       roa_asn_provider_of_origin, origin_provider_of_roa_asn,
            multiple_providers,      relative_with_diff_path,    relative_with_same_path};
  }
  static PredicateVector from_array(const std::array<Tri, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }

  friend bool operator==(const PredicateVector&, const PredicateVector&) = default;
};

enum class ProbeStatus { Confirmed, Unconfirmed, Skipped };

inline std::string_view to_string(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::Confirmed: return "confirmed";
    case ProbeStatus::Unconfirmed: return "unconfirmed";
    case ProbeStatus::Skipped: return "skip";
  }
  return "skip";
}

/// Active-measurement hook consulted for transfer candidates. The default
/// (empty) hook reports every transfer as unconfirmed.
using ProbeHook = std::function<ProbeStatus(const IpPrefix&, Asn)>;

struct ClassifiedInvalid {
  IpPrefix prefix;
  Asn origin = 0;
  PredicateVector vector;
  InvalidClass cls = InvalidClass::Other;
  std::vector<RoaRecord> covering_roas;
  std::optional<int> matched_rule_row;  // 1..6; absent exactly when cls == Other
  bool relgraph_miss = false;
  ProbeStatus probe = ProbeStatus::Skipped;
};

namespace detail {

inline bool same_collapsed(const AsPath& a, const AsPath& b) {
  return a.as_set == b.as_set && collapse_prepending(a.hops) == collapse_prepending(b.hops);
}

}  // namespace detail

/// Evaluates the six rule predicates for one Invalid pair.
///
/// ROA-side predicates are existential over all covering ROAs with priority
/// p1 > p2 > p3: a higher one holding forces the lower ones false. The path
/// predicates compare this pair's paths against every path on the forest
/// parent and its other children, after removing prepending.
inline PredicateVector eval_predicates(const PairKey& pair, const ValidationOutcome& outcome,
                                       const Forest& forest, const RelGraph& graph) {
  if (outcome.state != ValidationState::Invalid) {
    throw ContractError("eval_predicates: " + pair.prefix.to_string() + " AS" + std::to_string(pair.origin) +
                        " is not Invalid");
  }
  PredicateVector v;
  bool p1 = false, p2 = false, p3 = false;
  for (const auto& r : outcome.covering) p1 = p1 || r.asn == pair.origin;
  if (!p1) {
    for (const auto& r : outcome.covering) p2 = p2 || graph.is_provider(r.asn, pair.origin);
  }
  if (!p1 && !p2) {
    for (const auto& r : outcome.covering) p3 = p3 || graph.is_provider(pair.origin, r.asn);
  }
  v.roa_asn_is_origin = tri(p1);
  v.roa_asn_provider_of_origin = tri(p2);
  v.origin_provider_of_roa_asn = tri(p3);
  v.multiple_providers = tri(graph.provider_count(pair.origin) >= 2);

  auto rel = parent_and_siblings(forest, pair.prefix);
  const auto& own = forest.node(*forest.find(pair.prefix)).paths;
  bool diff = false, same = false;
  auto compare = [&](const ForestNode* relative) {
    for (const auto& mine : own) {
      if (mine.contains_set() || mine.origin() != pair.origin) continue;
      for (const auto& theirs : relative->paths) {
        if (detail::same_collapsed(mine, theirs)) {
          same = true;
        } else {
          diff = true;
        }
      }
    }
  };
  if (rel.parent) compare(rel.parent);
  for (const auto* s : rel.siblings) compare(s);
  v.relative_with_diff_path = tri(diff);
  v.relative_with_same_path = tri(same);
  return v;
}

namespace detail {

enum class Cell : std::uint8_t { Yes, No, Any };

struct RuleRow {
  InvalidClass cls;
  std::array<Cell, 6> cells;
};

inline constexpr Cell Y = Cell::Yes;
inline constexpr Cell N = Cell::No;
inline constexpr Cell A = Cell::Any;

inline constexpr std::array<RuleRow, 6> rule_rows{{
    {InvalidClass::LoadBalancing, {Y, N, N, A, Y, A}},
    {InvalidClass::FailingToAggregate, {Y, N, N, A, N, Y}},
    {InvalidClass::Multihoming, {N, Y, N, Y, Y, A}},
    {InvalidClass::Singlehoming, {N, Y, N, N, Y, A}},
    {InvalidClass::Provider, {N, N, Y, A, A, A}},
    {InvalidClass::Transfer, {N, N, N, A, A, A}},
}};

inline bool cell_matches(Cell c, Tri t) {
  switch (c) {
    case Cell::Yes: return t == Tri::True;
    case Cell::No: return t == Tri::False;
    case Cell::Any: return true;
  }
  return false;
}

}  // namespace detail

struct Classification {
  InvalidClass cls = InvalidClass::Other;
  std::optional<int> row;
};

/// First matching rule row in table order; don't-care cells are ignored and a
/// not-evaluated value never satisfies a Yes/No cell.
inline Classification classify_with_row(const PredicateVector& v) {
  const auto values = v.as_array();
  for (std::size_t r = 0; r < detail::rule_rows.size(); ++r) {
    const auto& row = detail::rule_rows[r];
    bool ok = true;
    for (std::size_t i = 0; i < 6 && ok; ++i) ok = detail::cell_matches(row.cells[i], values[i]);
    if (ok) return {row.cls, static_cast<int>(r + 1)};
  }
  return {};
}

inline InvalidClass classify(const PredicateVector& v) { return classify_with_row(v).cls; }

struct ClassifyOptions {
  ProbeHook probe;
};

struct ClassificationResult {
  std::vector<ClassifiedInvalid> pairs;  // sorted by (prefix, origin)
  std::array<std::uint64_t, 7> counts{};

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  std::uint64_t count(InvalidClass c) const { return counts[class_index(c)]; }
  double percent(InvalidClass c) const { return rounded_percent(count(c), total(), 1); }
};

inline ClassifiedInvalid classify_pair(const PairOutcome& po, const Forest& forest, const RelGraph& graph,
                                       const ClassifyOptions& options = {}) {
  ClassifiedInvalid ci;
  ci.prefix = po.pair.prefix;
  ci.origin = po.pair.origin;
  ci.vector = eval_predicates(po.pair, po.outcome, forest, graph);
  auto c = classify_with_row(ci.vector);
  ci.cls = c.cls;
  ci.matched_rule_row = c.row;
  ci.covering_roas = po.outcome.covering;
  ci.relgraph_miss = !graph.contains(po.pair.origin);
  if (ci.cls == InvalidClass::Transfer) {
    ci.probe = options.probe ? options.probe(ci.prefix, ci.origin) : ProbeStatus::Unconfirmed;
  }
  return ci;
}

/// Classifies every Invalid pair of an already validated table.
inline ClassificationResult classify_all(const ValidationTable& table, const Forest& forest,
                                         const RelGraph& graph, const ClassifyOptions& options = {}) {
  ClassificationResult out;
  for (const auto& po : table.outcomes) {
    if (po.outcome.state != ValidationState::Invalid) continue;
    auto ci = classify_pair(po, forest, graph, options);
    ++out.counts[class_index(ci.cls)];
    out.pairs.push_back(std::move(ci));
  }
  return out;
}

/// Everything one snapshot produces: validation, forest and classification.
struct SnapshotAnalysis {
  ValidationTable validation;
  Forest forest;
  ClassificationResult classification;
};

inline SnapshotAnalysis analyze(std::span<const RouteEntry> routes, const RoaIndex& index,
                                const RelGraph& graph, CountMode mode = CountMode::Distinct,
                                const ClassifyOptions& options = {}) {
  SnapshotAnalysis a;
  a.validation = validate_table(routes, index, mode);
  a.forest = build_forest(routes);
  a.classification = classify_all(a.validation, a.forest, graph, options);
  return a;
}

}  // namespace rovclass
