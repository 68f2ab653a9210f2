#pragma once

#include <algorithm>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rovclass/core_model.hpp"

namespace rovclass {

/// Directed provider->customer edges plus symmetric peer edges. Immutable
/// after construction.
class RelGraph {
 public:
  RelGraph() = default;

  explicit RelGraph(std::span<const Relationship> edges, bool transitive = false)
      : transitive_(transitive) {
    for (const auto& e : edges) {
      if (e.a == e.b) continue;
      if (e.kind == RelationshipKind::ProviderOf) {
        if (provider_edges_.insert(key(e.a, e.b)).second) {
          providers_[e.b].push_back(e.a);
          known_.insert(e.a);
          known_.insert(e.b);
        }
      } else if (peer_edges_.insert(key(e.a, e.b)).second) {
        peer_edges_.insert(key(e.b, e.a));
        known_.insert(e.a);
        known_.insert(e.b);
      }
    }
    for (auto& [asn, list] : providers_) std::sort(list.begin(), list.end());
  }

  /// Direct edge test by default; with transitive mode, true when `a` is
  /// reachable from `b` by following provider edges upward.
  bool is_provider(Asn a, Asn b) const {
    if (provider_edges_.contains(key(a, b))) return true;
    if (!transitive_) return false;
    std::vector<Asn> frontier{b};
    std::unordered_set<Asn> seen{b};
    while (!frontier.empty()) {
      Asn cur = frontier.back();
      frontier.pop_back();
      auto it = providers_.find(cur);
      if (it == providers_.end()) continue;
      for (Asn p : it->second) {
        if (p == a) return true;
        if (seen.insert(p).second) frontier.push_back(p);
      }
    }
    return false;
  }

  bool is_peer(Asn a, Asn b) const { return peer_edges_.contains(key(a, b)); }

  /// Number of distinct direct providers of `a`.
  std::size_t provider_count(Asn a) const {
    auto it = providers_.find(a);
    return it == providers_.end() ? 0 : it->second.size();
  }

  std::span<const Asn> providers_of(Asn a) const {
    auto it = providers_.find(a);
    if (it == providers_.end()) return {};
    return it->second;
  }

  bool contains(Asn a) const { return known_.contains(a); }
  bool transitive() const { return transitive_; }
  std::size_t provider_edge_count() const { return provider_edges_.size(); }
  std::size_t peer_edge_count() const { return peer_edges_.size() / 2; }

 private:
  static std::uint64_t key(Asn a, Asn b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

  bool transitive_ = false;
  std::unordered_set<std::uint64_t> provider_edges_;
  std::unordered_set<std::uint64_t> peer_edges_;
  std::unordered_map<Asn, std::vector<Asn>> providers_;
  std::unordered_set<Asn> known_;
};

}  // namespace rovclass
