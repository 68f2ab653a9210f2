#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rovclass/prefix_forest.hpp"

namespace rovclass {
namespace {

RouteEntry announce(const char* prefix, std::vector<Asn> hops) {
  return RouteEntry{parse_prefix(prefix), AsPath{std::move(hops), {}}, std::nullopt};
}

TEST(Forest, LoadBalancingTopology) {
  std::vector<RouteEntry> routes{announce("123.121.0.0/24", {4, 2, 1}), announce("123.121.0.0/23", {4, 2, 1}),
                                 announce("123.121.1.0/24", {4, 3, 1})};
  auto f = build_forest(routes);
  ASSERT_EQ(f.size(), 3U);
  ASSERT_EQ(maximal_prefixes(f), (std::vector<IpPrefix>{parse_prefix("123.121.0.0/23")}));
  const auto& root = f.node(f.roots()[0]);
  EXPECT_EQ(root.children.size(), 2U);

  auto rel = parent_and_siblings(f, parse_prefix("123.121.0.0/24"));
  ASSERT_NE(rel.parent, nullptr);
  EXPECT_EQ(rel.parent->prefix, parse_prefix("123.121.0.0/23"));
  ASSERT_EQ(rel.siblings.size(), 1U);
  EXPECT_EQ(rel.siblings[0]->prefix, parse_prefix("123.121.1.0/24"));
}

TEST(Forest, SingleRoute) {
  std::vector<RouteEntry> routes{announce("192.0.2.0/24", {1})};
  auto f = build_forest(routes);
  ASSERT_EQ(f.size(), 1U);
  EXPECT_EQ(f.roots().size(), 1U);
  EXPECT_TRUE(f.node(0).children.empty());
  auto rel = parent_and_siblings(f, parse_prefix("192.0.2.0/24"));
  EXPECT_EQ(rel.parent, nullptr);
  EXPECT_TRUE(rel.siblings.empty());
}

TEST(Forest, ParentIsLongestCover) {
  std::vector<RouteEntry> routes{announce("10.0.0.0/24", {1}), announce("10.0.0.0/8", {1}),
                                 announce("10.0.0.0/16", {1})};
  auto f = build_forest(routes);
  auto n24 = f.node(*f.find(parse_prefix("10.0.0.0/24")));
  ASSERT_TRUE(n24.parent);
  EXPECT_EQ(f.node(*n24.parent).prefix, parse_prefix("10.0.0.0/16"));
  auto n16 = f.node(*f.find(parse_prefix("10.0.0.0/16")));
  EXPECT_EQ(f.node(*n16.parent).prefix, parse_prefix("10.0.0.0/8"));
  EXPECT_EQ(maximal_prefixes(f), (std::vector<IpPrefix>{parse_prefix("10.0.0.0/8")}));

  // only child of a root has no siblings
  auto rel = parent_and_siblings(f, parse_prefix("10.0.0.0/16"));
  ASSERT_NE(rel.parent, nullptr);
  EXPECT_TRUE(rel.siblings.empty());
}

TEST(Forest, DisjointRootsAndEmpty) {
  std::vector<RouteEntry> routes{announce("192.0.2.0/24", {1}), announce("198.51.100.0/24", {2})};
  auto f = build_forest(routes);
  EXPECT_EQ(maximal_prefixes(f).size(), 2U);
  auto empty = build_forest({});
  EXPECT_TRUE(empty.empty());
  EXPECT_TRUE(maximal_prefixes(empty).empty());
}

TEST(Forest, DuplicatePrefixHoldsPathSet) {
  std::vector<RouteEntry> routes{announce("192.0.2.0/24", {5, 1}), announce("192.0.2.0/24", {6, 1}),
                                 announce("192.0.2.0/24", {5, 1})};
  auto f = build_forest(routes);
  ASSERT_EQ(f.size(), 1U);
  EXPECT_EQ(f.node(0).paths.size(), 2U);
}

TEST(Forest, MixedFamiliesStaySeparate) {
  std::vector<RouteEntry> routes{announce("0.0.0.0/0", {1}), announce("2001:db8::/32", {1}),
                                 announce("2001:db8:1::/48", {2})};
  auto f = build_forest(routes);
  EXPECT_EQ(f.roots().size(), 2U);
}

TEST(Forest, UnknownPrefixIsNotFound) {
  std::vector<RouteEntry> routes{announce("192.0.2.0/24", {1})};
  auto f = build_forest(routes);
  EXPECT_THROW(parent_and_siblings(f, parse_prefix("192.0.2.0/25")), NotFoundError);
}

TEST(ForestProperty, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RouteEntry> routes;
    const int n = 1 + static_cast<int>(rng() % 400);
    for (int i = 0; i < n; ++i) {
      routes.push_back(RouteEntry{oracle::random_v4(rng, 8, 24), AsPath{{static_cast<Asn>(rng() % 5 + 1)}, {}},
                                  std::nullopt});
    }
    auto f = build_forest(routes);
    std::vector<IpPrefix> prefixes;
    for (const auto& r : routes) prefixes.push_back(r.prefix);
    std::set<IpPrefix> distinct(prefixes.begin(), prefixes.end());
    ASSERT_EQ(f.size(), distinct.size());
    for (const auto& node : f.nodes()) {
      auto expected = oracle::longest_proper_cover(node.prefix, prefixes);
      ASSERT_EQ(node.parent.has_value(), expected.has_value());
      if (expected) ASSERT_EQ(f.node(*node.parent).prefix, *expected);
    }
    auto roots = maximal_prefixes(f);
    ASSERT_EQ(std::set<IpPrefix>(roots.begin(), roots.end()), oracle::maximal(prefixes));
  }
}

TEST(RoaIndex, LookupCovering) {
  RoaIndex idx({RoaRecord{64496, parse_prefix("123.121.0.0/23"), 23, "TA-A"},
                RoaRecord{64497, parse_prefix("123.0.0.0/8"), 24, "TA-A"},
                RoaRecord{64498, parse_prefix("123.121.1.0/24"), 24, "TA-B"}});
  auto hits = lookup_covering(idx, parse_prefix("123.121.0.0/24"));
  ASSERT_EQ(hits.size(), 2U);
  EXPECT_EQ(hits[0].asn, 64497U);
  EXPECT_EQ(hits[1].asn, 64496U);
  EXPECT_TRUE(lookup_covering(idx, parse_prefix("192.0.2.0/24")).empty());
  EXPECT_TRUE(lookup_covering(idx, parse_prefix("123.0.0.0/7")).empty());
  EXPECT_EQ(lookup_covering(idx, parse_prefix("123.121.1.0/24")).size(), 3U);
}

TEST(RoaIndexProperty, MatchesLinearScan) {
  std::mt19937_64 rng(99);
  std::vector<Asn> asns{1, 2, 3};
  std::vector<RoaRecord> records;
  for (int i = 0; i < 2000; ++i) records.push_back(oracle::random_roa(rng, asns));
  records.push_back(RoaRecord{9, parse_prefix("0.0.0.0/0"), 8, "TA-A"});
  RoaIndex idx(records);
  for (int i = 0; i < 10000; ++i) {
    auto p = oracle::random_route_prefix(rng, records);
    auto got = lookup_covering(idx, p);
    std::multiset<RoaRecord> want;
    for (const auto& r : records) {
      if (oracle::covers(r.prefix, p)) want.insert(r);
    }
    ASSERT_EQ(std::multiset<RoaRecord>(got.begin(), got.end()), want) << p.to_string();
  }
}

TEST(PrefixTrie, GlueNodesCarryNoValue) {
  PrefixTrie<int> t;
  t[parse_prefix("10.0.0.0/24")] = 1;
  t[parse_prefix("10.0.1.0/24")] = 2;  // forces a /23 glue node
  t[parse_prefix("10.0.0.0/16")] = 3;  // lands above the glue
  EXPECT_EQ(t.size(), 3U);
  EXPECT_EQ(t.find(parse_prefix("10.0.0.0/23")), nullptr);
  ASSERT_NE(t.find(parse_prefix("10.0.0.0/16")), nullptr);
  EXPECT_EQ(*t.find(parse_prefix("10.0.1.0/24")), 2);
  std::vector<int> seen;
  t.visit_covering(parse_prefix("10.0.1.128/25"), [&](const IpPrefix&, int v) { seen.push_back(v); });
  EXPECT_EQ(seen, (std::vector<int>{3, 2}));
}

}  // namespace
}  // namespace rovclass
