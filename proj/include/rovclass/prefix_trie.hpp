#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "rovclass/core_model.hpp"

namespace rovclass {

/// Path-compressed binary radix tree keyed by IpPrefix, one root per address
/// family. Nodes live in a flat pool addressed by index; only inserted keys
/// carry a value, the rest are branching (glue) nodes.
template <typename T>
class PrefixTrie {
 public:
  PrefixTrie() {
    nodes_.push_back(Node{IpPrefix::make(Family::V4, 0, 0, 0)});
    nodes_.push_back(Node{IpPrefix::make(Family::V6, 0, 0, 0)});
  }

  /// Returns the value stored under `key`, default-constructing it on first use.
  T& operator[](const IpPrefix& key) {
    std::int32_t cur = root(key.family());
    while (true) {
      Node& n = nodes_[cur];
      if (n.key.length() == key.length()) return value_of(cur);
      const int branch = key.bit(n.key.length());
      std::int32_t child = n.child[branch];
      if (child < 0) {
        auto fresh = add_node(key);
        nodes_[cur].child[branch] = fresh;
        return value_of(fresh);
      }
      const IpPrefix ck = nodes_[child].key;
      if (covers(ck, key)) {
        cur = child;
        continue;
      }
      const int common = common_length(ck, key);
      if (common == key.length()) {
        // key sits between cur and child
        auto fresh = add_node(key);
        nodes_[fresh].child[ck.bit(common)] = child;
        nodes_[cur].child[branch] = fresh;
        return value_of(fresh);
      }
      auto glue = add_node(key.truncated(common));
      auto fresh = add_node(key);
      nodes_[glue].child[ck.bit(common)] = child;
      nodes_[glue].child[key.bit(common)] = fresh;
      nodes_[cur].child[branch] = glue;
      return value_of(fresh);
    }
  }

  const T* find(const IpPrefix& key) const {
    std::int32_t cur = root(key.family());
    while (cur >= 0) {
      const Node& n = nodes_[cur];
      if (!covers(n.key, key)) return nullptr;
      if (n.key.length() == key.length()) return n.value >= 0 ? &values_[n.value] : nullptr;
      cur = n.child[key.bit(n.key.length())];
    }
    return nullptr;
  }

  /// Calls fn(prefix, value) for every stored key covering `key`, shortest first.
  template <typename Fn>
  void visit_covering(const IpPrefix& key, Fn&& fn) const {
    std::int32_t cur = root(key.family());
    while (cur >= 0) {
      const Node& n = nodes_[cur];
      if (!covers(n.key, key)) return;
      if (n.value >= 0) fn(n.key, values_[n.value]);
      if (n.key.length() == key.length()) return;
      cur = n.child[key.bit(n.key.length())];
    }
  }

  std::size_t size() const { return values_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    IpPrefix key;
    std::int32_t child[2] = {-1, -1};
    std::int32_t value = -1;
  };

  static std::int32_t root(Family f) { return f == Family::V4 ? 0 : 1; }

  static int common_length(const IpPrefix& a, const IpPrefix& b) {
    const int limit = std::min(a.length(), b.length());
    const std::uint64_t dh = a.hi() ^ b.hi();
    int same = dh != 0 ? std::countl_zero(dh) : 64 + std::countl_zero(a.lo() ^ b.lo());
    return std::min(same, limit);
  }

  std::int32_t add_node(const IpPrefix& key) {
    nodes_.push_back(Node{key});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  T& value_of(std::int32_t node) {
    if (nodes_[node].value < 0) {
      nodes_[node].value = static_cast<std::int32_t>(values_.size());
      values_.emplace_back();
    }
    return values_[nodes_[node].value];
  }

  std::vector<Node> nodes_;
  std::vector<T> values_;
};

}  // namespace rovclass
