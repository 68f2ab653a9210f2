#pragma once

// Prefix aggregation forest over announced prefixes, and a covering index
// over ROAs.

#include <algorithm>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rovclass/core_model.hpp"
#include "rovclass/prefix_trie.hpp"

namespace rovclass {

struct ForestNode {
  IpPrefix prefix;
  std::vector<AsPath> paths;  // distinct, sorted
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

/// Frozen after construction. Node `parent` is the longest announced proper
/// cover; roots are the maximal prefixes. Nodes are ordered by prefix.
class Forest {
 public:
  Forest() = default;

  std::span<const ForestNode> nodes() const { return nodes_; }
  const ForestNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::optional<std::size_t> find(const IpPrefix& p) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), p,
                               [](const ForestNode& n, const IpPrefix& key) { return n.prefix < key; });
    if (it == nodes_.end() || it->prefix != p) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::span<const std::size_t> roots() const { return roots_; }

  friend Forest build_forest(std::span<const RouteEntry> routes);

 private:
  std::vector<ForestNode> nodes_;
  std::vector<std::size_t> roots_;
};

/// Sorts the distinct announced prefixes; in (family, address, length) order
/// every cover precedes what it covers, so one pass with an ancestor stack
/// assigns each node its longest proper cover.
inline Forest build_forest(std::span<const RouteEntry> routes) {
  std::vector<std::pair<IpPrefix, const AsPath*>> items;
  items.reserve(routes.size());
  for (const auto& r : routes) items.emplace_back(r.prefix, &r.path);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return *a.second < *b.second;
  });

  Forest f;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (f.nodes_.empty() || f.nodes_.back().prefix != items[i].first) {
      f.nodes_.push_back(ForestNode{items[i].first, {}, std::nullopt, {}});
    }
    auto& paths = f.nodes_.back().paths;
    if (paths.empty() || paths.back() != *items[i].second) paths.push_back(*items[i].second);
  }

  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < f.nodes_.size(); ++i) {
    auto& n = f.nodes_[i];
    while (!stack.empty() && !covers(f.nodes_[stack.back()].prefix, n.prefix)) stack.pop_back();
    if (stack.empty()) {
      f.roots_.push_back(i);
    } else {
      n.parent = stack.back();
      f.nodes_[stack.back()].children.push_back(i);
    }
    stack.push_back(i);
  }
  return f;
}

inline std::vector<IpPrefix> maximal_prefixes(const Forest& f) {
  std::vector<IpPrefix> out;
  out.reserve(f.roots().size());
  for (auto r : f.roots()) out.push_back(f.node(r).prefix);
  return out;
}

struct Relatives {
  const ForestNode* parent = nullptr;
  std::vector<const ForestNode*> siblings;
};

/// Parent node and the parent's other children. Roots have neither.
/// Throws NotFoundError when `p` is not announced.
inline Relatives parent_and_siblings(const Forest& f, const IpPrefix& p) {
  auto idx = f.find(p);
  if (!idx) throw NotFoundError("prefix " + p.to_string() + " not in forest");
  Relatives out;
  const auto& n = f.node(*idx);
  if (!n.parent) return out;
  out.parent = &f.node(*n.parent);
  for (auto c : out.parent->children) {
    if (c != *idx) out.siblings.push_back(&f.node(c));
  }
  return out;
}

/// ROAs keyed by prefix in a radix tree; covering lookups walk one root path.
class RoaIndex {
 public:
  RoaIndex() = default;
  explicit RoaIndex(std::vector<RoaRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      trie_[records_[i].prefix].push_back(static_cast<std::uint32_t>(i));
    }
  }

  template <typename Fn>
  void for_each_covering(const IpPrefix& p, Fn&& fn) const {
    trie_.visit_covering(p, [&](const IpPrefix&, const std::vector<std::uint32_t>& ids) {
      for (auto id : ids) fn(records_[id]);
    });
  }

  std::span<const RoaRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<RoaRecord> records_;
  PrefixTrie<std::vector<std::uint32_t>> trie_;
};

/// All ROAs whose prefix covers `p`, shortest ROA prefix first.
inline std::vector<RoaRecord> lookup_covering(const RoaIndex& index, const IpPrefix& p) {
  std::vector<RoaRecord> out;
  index.for_each_covering(p, [&](const RoaRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace rovclass
