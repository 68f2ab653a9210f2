#pragma once

// Presence of Invalid (prefix, origin) pairs across a dated snapshot series.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rovclass/classifier.hpp"
#include "rovclass/ingest.hpp"

namespace rovclass {

struct PairTimeline {
  IpPrefix prefix;
  Asn origin = 0;
  std::vector<bool> present;                        // one slot per snapshot
  std::vector<std::optional<InvalidClass>> classes;  // set where present

  std::size_t present_count() const {
    std::size_t n = 0;
    for (bool b : present) n += b ? 1 : 0;
    return n;
  }
  bool present_in_final() const { return !present.empty() && present.back(); }

  /// Class in the most recent snapshot where the pair was Invalid.
  std::optional<InvalidClass> reported_class() const {
    for (auto it = classes.rbegin(); it != classes.rend(); ++it) {
      if (*it) return *it;
    }
    return std::nullopt;
  }
};

struct SnapshotClassification {
  Date date;
  ClassificationResult result;
};

/// One timeline per pair that is Invalid in at least one snapshot. Presence
/// marks snapshots where the pair was Invalid, not merely announced.
inline std::vector<PairTimeline> build_timelines(std::span<const SnapshotClassification> snapshots) {
  std::map<PairKey, PairTimeline> by_pair;
  const std::size_t n = snapshots.size();
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& ci : snapshots[s].result.pairs) {
      auto [it, fresh] = by_pair.try_emplace(PairKey{ci.prefix, ci.origin});
      auto& t = it->second;
      if (fresh) {
        t.prefix = ci.prefix;
        t.origin = ci.origin;
        t.present.assign(n, false);
        t.classes.assign(n, std::nullopt);
      }
      t.present[s] = true;
      t.classes[s] = ci.cls;
    }
  }
  std::vector<PairTimeline> out;
  out.reserve(by_pair.size());
  for (auto& [key, t] : by_pair) out.push_back(std::move(t));
  return out;
}

using SnapshotPipeline = std::function<ClassificationResult(const SnapshotRef&)>;

/// Runs `pipeline` on each snapshot in date order, then merges.
inline std::vector<PairTimeline> build_timelines(const SnapshotSeries& series, const SnapshotPipeline& pipeline) {
  if (series.snapshots.empty()) throw ContractError("build_timelines: empty series");
  std::vector<SnapshotClassification> runs;
  runs.reserve(series.snapshots.size());
  for (const auto& ref : series.snapshots) runs.push_back({ref.date, pipeline(ref)});
  return build_timelines(runs);
}

inline void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ContractError("stability threshold must be in (0, 1], got " + std::to_string(threshold));
  }
}

/// True when the pair was Invalid in at least `threshold` of the snapshots.
/// The default 1.0 requires presence in every snapshot.
inline bool long_lived(const PairTimeline& t, double threshold = 1.0) {
  check_threshold(threshold);
  if (t.present.empty()) return false;
  return static_cast<double>(t.present_count()) / static_cast<double>(t.present.size()) >= threshold;
}

struct ClassStability {
  std::uint64_t total = 0;
  std::uint64_t long_lived = 0;
  double long_lived_pct = 0.0;  // 1 decimal

  friend bool operator==(const ClassStability&, const ClassStability&) = default;
};

struct StabilityReport {
  double threshold = 1.0;
  std::size_t snapshots = 0;
  std::array<ClassStability, 7> per_class{};

  const ClassStability& at(InvalidClass c) const { return per_class[class_index(c)]; }
  friend bool operator==(const StabilityReport&, const StabilityReport&) = default;
};

/// Per-class long-lived share over the pairs Invalid in the final snapshot,
/// grouped by their final-snapshot class. Totals therefore equal the final
/// snapshot's classification counts.
inline StabilityReport stability_report(std::span<const PairTimeline> timelines, double threshold = 1.0) {
  check_threshold(threshold);
  StabilityReport rep;
  rep.threshold = threshold;
  rep.snapshots = timelines.empty() ? 0 : timelines.front().present.size();
  for (const auto& t : timelines) {
    if (!t.present_in_final()) continue;
    auto& cs = rep.per_class[class_index(*t.classes.back())];
    ++cs.total;
    if (long_lived(t, threshold)) ++cs.long_lived;
  }
  for (auto& cs : rep.per_class) cs.long_lived_pct = rounded_percent(cs.long_lived, cs.total, 1);
  return rep;
}

}  // namespace rovclass
