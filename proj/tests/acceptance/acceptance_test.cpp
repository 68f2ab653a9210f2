// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixture_pipeline.hpp"
#include "oracles.hpp"
#include "rovclass/report_server.hpp"
#include "rovclass/stability.hpp"
#include "worlds.hpp"

namespace {

using namespace rovclass;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome scenario_golden_suite() {
  const auto t0 = Clock::now();
  int matched = 0, total = 0;
  std::string first_miss;
  for (int k = 0; k < 6; ++k) {
    const auto name = to_string(static_cast<ScenarioKind>(k));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ++total;
      testing::ScratchDir dir("acc-golden");
      generate({std::string(name), seed}, dir.path());
      const auto got = testing::labels_of(testing::analyze_dir(dir.path()).classification);
      if (got == testing::read_expected(dir.path())) {
        ++matched;
      } else if (first_miss.empty()) {
        first_miss = std::string(name) + "/" + std::to_string(seed);
      }
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(matched) + "/" + std::to_string(total) + " fixtures in " + fmt(secs, 2) + " s";
  if (!first_miss.empty()) detail += "; first mismatch " + first_miss;
  return {matched == total && secs < 10.0, detail};
}

// Distinct (prefix, origin) pairs: `valid` and `invalid` /24s under one /8 ROA,
// `unknown` /24s outside it.
std::vector<RouteEntry> partitioned_rib(std::uint32_t unknown, std::uint32_t valid, std::uint32_t invalid) {
  std::vector<RouteEntry> routes;
  routes.reserve(unknown + valid + invalid);
  const auto add = [&](std::uint32_t addr, Asn origin) {
    routes.push_back(RouteEntry{IpPrefix::v4(addr, 24), AsPath{{65000, origin}, {}}, std::nullopt});
  };
  for (std::uint32_t i = 0; i < valid; ++i) add(0x0A000000U + (i << 8), 64500);
  for (std::uint32_t i = 0; i < invalid; ++i) add(0x0A000000U + ((valid + i) << 8), 64501);
  for (std::uint32_t i = 0; i < unknown; ++i) add(0x20000000U + (i << 8), 64502);
  return routes;
}

Outcome table_one() {
  const RoaIndex index({RoaRecord{64500, IpPrefix::v4(0x0A000000U, 8), 24, "TA"}});
  const auto full = validate_table(partitioned_rib(635412, 58931, 4949), index).summary;
  const auto scaled = validate_table(partitioned_rib(6354, 589, 49), index).summary;

  const bool counts = full.unknown == 635412 && full.valid == 58931 && full.invalid == 4949 &&
                      scaled.unknown == 6354 && scaled.valid == 589 && scaled.invalid == 49;
  const bool exact = full.percent(ValidationState::Unknown) == 90.87 && full.percent(ValidationState::Valid) == 8.43 &&
                     full.percent(ValidationState::Invalid) == 0.71;
  const auto near = [&](ValidationState s, double want) { return std::abs(scaled.percent(s) - want) <= 0.15; };
  const bool close =
      near(ValidationState::Unknown, 90.87) && near(ValidationState::Valid, 8.43) && near(ValidationState::Invalid, 0.71);
  std::string detail = "full " + fmt(full.percent(ValidationState::Unknown), 2) + "/" +
                       fmt(full.percent(ValidationState::Valid), 2) + "/" +
                       fmt(full.percent(ValidationState::Invalid), 2) + ", scaled " +
                       fmt(scaled.percent(ValidationState::Unknown), 2) + "/" +
                       fmt(scaled.percent(ValidationState::Valid), 2) + "/" +
                       fmt(scaled.percent(ValidationState::Invalid), 2);
  return {counts && exact && close, detail};
}

Outcome table_three() {
  const std::array<std::size_t, 7> counts{923, 703, 378, 204, 186, 737, 1818};
  const std::array<std::size_t, 7> persistent{770, 684, 355, 177, 147, 658, 1695};
  const std::array<double, 7> share{18.7, 14.2, 7.6, 4.1, 3.8, 14.9, 36.7};
  const std::array<double, 7> lived{83.4, 97.3, 93.9, 86.8, 79.0, 89.3, 93.2};

  const Fixture final_day = generate_mix(counts);
  // The first snapshot lacks each class's short-lived pairs; mix instances
  // are laid out class by class with one pair each.
  Fixture first_day = final_day;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < 7; ++c) {
    for (std::size_t i = 0; i < counts[c] - persistent[c]; ++i) first_day.instances[offset + i].routes.clear();
    offset += counts[c];
  }

  std::vector<SnapshotClassification> runs;
  const char* dates[] = {"2018-02-28", "2018-04-01", "2018-05-16"};
  for (int d = 0; d < 3; ++d) {
    const Fixture& f = d == 0 ? first_day : final_day;
    const auto routes = f.routes();
    auto a = analyze(routes, RoaIndex(f.roas()), RelGraph(f.edges()));
    runs.push_back({*parse_date(dates[d]), std::move(a.classification)});
  }
  const auto& result = runs.back().result;
  const auto timelines = build_timelines(runs);
  const auto report = stability_report(timelines);

  bool ok = result.total() == 4949;
  std::string got_share, got_lived;
  for (std::size_t c = 0; c < 7; ++c) {
    const auto cls = all_classes[c];
    ok = ok && result.count(cls) == counts[c] && result.percent(cls) == share[c];
    ok = ok && report.at(cls).total == counts[c] && report.at(cls).long_lived_pct == lived[c];
    got_share += (c ? "/" : "") + fmt(result.percent(cls), 1);
    got_lived += (c ? "/" : "") + fmt(report.at(cls).long_lived_pct, 1);
  }
  return {ok, "shares " + got_share + "; long-lived " + got_lived};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(0xACCE55);
  const std::vector<Asn> asns{64500, 64501, 64502, 64503};
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<RoaRecord> roas;
    const int n = static_cast<int>(rng() % 51);
    for (int i = 0; i < n; ++i) roas.push_back(oracle::random_roa(rng, asns));
    const RoaIndex index(roas);
    const auto prefix = oracle::random_route_prefix(rng, roas);
    const Asn origin = asns[rng() % asns.size()];

    const auto got = validate(RouteEntry{prefix, AsPath{{origin}, {}}, std::nullopt}, index);
    const auto want = oracle::validate(prefix, origin, roas);
    const auto covering = lookup_covering(index, prefix);
    const bool same = got.state == want.state &&
                      std::multiset<RoaRecord>(got.covering.begin(), got.covering.end()) == want.covering &&
                      std::multiset<RoaRecord>(got.matching.begin(), got.matching.end()) == want.matching &&
                      std::multiset<RoaRecord>(covering.begin(), covering.end()) == want.covering;
    mismatches += !same;
  }
  return {mismatches == 0, "10000 instances, " + std::to_string(mismatches) + " mismatches"};
}

Outcome rov_trichotomy() {
  std::mt19937_64 rng(0x7121);
  const std::vector<Asn> asns{64500, 64501, 64502};
  std::vector<RoaRecord> roas;
  for (int i = 0; i < 200; ++i) roas.push_back(oracle::random_roa(rng, asns));
  const RoaIndex index(roas);

  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto prefix = oracle::random_route_prefix(rng, roas);
    const auto out = validate_origin(prefix, asns[rng() % asns.size()], index);
    const bool any_cover = std::any_of(roas.begin(), roas.end(), [&](const auto& r) { return oracle::covers(r.prefix, prefix); });
    violations += (out.state == ValidationState::Unknown) != !any_cover;
    violations += (out.state == ValidationState::Valid) != !out.matching.empty();
    violations += (out.state == ValidationState::Invalid) != (any_cover && out.matching.empty());
  }

  int monotone_breaks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<RoaRecord> base;
    for (int i = 0; i < 20; ++i) base.push_back(oracle::random_roa(rng, asns));
    const auto prefix = oracle::random_route_prefix(rng, base);
    const Asn origin = asns[rng() % asns.size()];
    const auto before = validate_origin(prefix, origin, RoaIndex(base)).state;

    auto added = base;
    added.push_back(oracle::random_roa(rng, asns));
    const auto after_add = validate_origin(prefix, origin, RoaIndex(added)).state;
    if (before == ValidationState::Valid && after_add != ValidationState::Valid) ++monotone_breaks;

    auto removed = base;
    removed.erase(removed.begin() + static_cast<std::ptrdiff_t>(rng() % removed.size()));
    const auto after_remove = validate_origin(prefix, origin, RoaIndex(removed)).state;
    if (before == ValidationState::Unknown && after_remove != ValidationState::Unknown) ++monotone_breaks;
  }
  return {violations == 0 && monotone_breaks == 0,
          "10000 routes, " + std::to_string(violations) + " violations; 1000 add/remove trials, " +
              std::to_string(monotone_breaks) + " monotonicity breaks"};
}

Outcome forest_properties() {
  std::mt19937_64 rng(0xF0E57);
  int violations = 0;
  std::size_t largest = 0;
  const std::vector<int> sizes{1, 2, 17, 250, 1000, 2500, 4000, 5000};
  for (int n : sizes) {
    std::vector<RouteEntry> routes;
    for (int i = 0; i < n; ++i) {
      const auto p = rng() % 8 ? oracle::random_v4(rng, 8, 28) : oracle::random_prefix(rng);
      routes.push_back(RouteEntry{p, AsPath{{static_cast<Asn>(64500 + rng() % 4)}, {}}, std::nullopt});
    }
    const auto forest = build_forest(routes);

    // brute force over distinct prefixes with precomputed bit strings
    std::set<IpPrefix> distinct;
    for (const auto& r : routes) distinct.insert(r.prefix);
    std::vector<IpPrefix> all(distinct.begin(), distinct.end());
    std::vector<std::string> bits;
    for (const auto& p : all) bits.push_back(oracle::bit_string(p));
    const auto covers = [&](std::size_t a, std::size_t b) {
      return all[a].family() == all[b].family() && bits[a].size() <= bits[b].size() &&
             bits[b].compare(0, bits[a].size(), bits[a]) == 0;
    };
    std::set<IpPrefix> roots;
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::optional<std::size_t> best;
      for (std::size_t j = 0; j < all.size(); ++j) {
        if (j != i && covers(j, i) && (!best || all[j].length() > all[*best].length())) best = j;
      }
      if (!best) roots.insert(all[i]);
      const auto node = forest.find(all[i]);
      if (!node) {
        ++violations;
        continue;
      }
      const auto& parent = forest.node(*node).parent;
      if (parent.has_value() != best.has_value() || (best && forest.node(*parent).prefix != all[*best])) ++violations;
    }
    const auto got_roots = maximal_prefixes(forest);
    violations += std::set<IpPrefix>(got_roots.begin(), got_roots.end()) != roots;
    violations += forest.size() != all.size();
    largest = std::max(largest, routes.size());
  }
  return {violations == 0, std::to_string(sizes.size()) + " prefix sets up to " + std::to_string(largest) + ", " +
                               std::to_string(violations) + " violations"};
}

Outcome classifier_partition() {
  std::mt19937_64 rng(0xC1A55);
  int violations = 0;
  std::uint64_t pairs = 0;
  std::array<std::uint64_t, 7> seen{};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w = testing::random_world(rng);
    const RoaIndex index(w.roas);
    const RelGraph graph(w.edges);
    const auto a = analyze(w.routes, index, graph);

    std::set<PairKey> keys;
    for (const auto& ci : a.classification.pairs) {
      keys.insert({ci.prefix, ci.origin});
      ++seen[class_index(ci.cls)];
    }
    std::uint64_t invalid = 0;
    for (const auto& o : a.validation.outcomes) invalid += o.outcome.state == ValidationState::Invalid;
    violations += keys.size() != a.classification.pairs.size() || keys.size() != invalid ||
                  a.classification.total() != invalid;
    pairs += invalid;

    auto prepended = w.routes;
    for (auto& r : prepended) {
      const auto at = rng() % r.path.hops.size();
      const Asn dup = r.path.hops[at];
      r.path.hops.insert(r.path.hops.begin() + static_cast<std::ptrdiff_t>(at), 1 + rng() % 3, dup);
    }
    const auto b = analyze(prepended, index, graph);
    if (b.classification.pairs.size() != a.classification.pairs.size()) {
      ++violations;
      continue;
    }
    for (std::size_t i = 0; i < a.classification.pairs.size(); ++i) {
      violations += a.classification.pairs[i].cls != b.classification.pairs[i].cls;
    }
  }
  const auto rows_hit = std::count_if(seen.begin(), seen.end(), [](auto n) { return n > 0; });
  return {violations == 0, "1000 trials, " + std::to_string(pairs) + " Invalid pairs, " + std::to_string(rows_hit) +
                               "/7 classes exercised, " + std::to_string(violations) + " violations"};
}

Outcome throughput() {
  std::mt19937_64 rng(0x7490);
  const auto random_block = [&](int len) {
    const std::uint32_t addr = (1U + static_cast<std::uint32_t>(rng() % 222)) << 24 | (static_cast<std::uint32_t>(rng()) & 0xFFFFFFU);
    return IpPrefix::v4(addr, len);
  };
  const auto asn = [&] { return static_cast<Asn>(64512 + rng() % 60000); };

  std::vector<RoaRecord> roas;
  std::ostringstream roa_text;
  roa_text << "ASN,IP Prefix,Max Length,Trust Anchor\n";
  for (int i = 0; i < 100000; ++i) {
    const int len = 12 + static_cast<int>(rng() % 11);
    RoaRecord r{asn(), random_block(len), len + static_cast<int>(rng() % 3), "TA"};
    roa_text << format_roa_line(r) << '\n';
    roas.push_back(r);
  }
  std::ostringstream rel_text;
  for (int i = 0; i < 100000; ++i) {
    rel_text << format_relationship_line({asn(), asn(), rng() % 5 ? RelationshipKind::ProviderOf : RelationshipKind::PeerWith})
             << '\n';
  }
  std::ostringstream rib_text;
  for (int i = 0; i < 1000000; ++i) {
    RouteEntry r;
    if (rng() % 3) {
      const auto& roa = roas[rng() % roas.size()];
      const int len = roa.prefix.length() + static_cast<int>(rng() % (25 - roa.prefix.length()));
      const std::uint32_t keep = ~std::uint32_t{0} << (32 - roa.prefix.length());
      r.prefix = IpPrefix::v4((roa.prefix.v4_address() & keep) | (static_cast<std::uint32_t>(rng()) & ~keep), len);
      r.path.hops = {asn(), asn(), rng() % 2 ? roa.asn : asn()};
    } else {
      r.prefix = random_block(16 + static_cast<int>(rng() % 9));
      r.path.hops = {asn(), asn(), asn()};
    }
    r.peer = r.path.hops.front();
    rib_text << format_rib_line(r) << '\n';
  }
  const std::string rib = rib_text.str(), roa_csv = roa_text.str(), rels = rel_text.str();

  const auto t0 = Clock::now();
  std::istringstream rib_in(rib), roa_in(roa_csv), rel_in(rels);
  const auto routes = parse_rib(rib_in).routes;
  const RoaIndex index(parse_roas(roa_in).records);
  const RelGraph graph(parse_relationships(rel_in).edges);
  const auto a = analyze(routes, index, graph);
  const auto report = make_report(a, std::nullopt);
  testing::ScratchDir out("acc-throughput");
  emit(report, ReportFormat::Json, out.path() / "report.json");
  const double secs = seconds_since(t0);

  return {routes.size() == 1000000 && a.classification.total() == a.validation.summary.invalid && secs < 60.0,
          std::to_string(routes.size()) + " routes x 100000 ROAs in " + fmt(secs, 2) + " s on " +
              std::to_string(std::max(1U, std::thread::hardware_concurrency())) + " core(s), " +
              std::to_string(a.classification.total()) + " Invalid pairs classified"};
}

Outcome query_service() {
  const Fixture f = generate_mix({2, 1, 1, 1, 1, 1, 3});
  const auto routes = f.routes();
  ReportStore store(make_report(analyze(routes, RoaIndex(f.roas()), RelGraph(f.edges())), parse_date("2018-05-16")));
  ReportServer server(store);
  const int port = server.start("127.0.0.1", 0);

  httplib::Client client("127.0.0.1", port);
  const auto target = store.current()->pairs.front().prefix.to_string();
  const auto found = client.Get("/v1/prefix/" + target);
  const auto empty = client.Get("/v1/prefix/192.0.2.0/24");
  const auto bad = client.Get("/v1/prefix/300.1.2.0/24");

  bool ok = found && empty && bad && found->status == 200 && empty->status == 200 && bad->status == 400;
  if (ok) {
    const auto fj = nlohmann::json::parse(found->body);
    const auto ej = nlohmann::json::parse(empty->body);
    const auto bj = nlohmann::json::parse(bad->body);
    ok = fj["pairs"].size() == 1 && fj["pairs"][0]["prefix"] == target && ej["pairs"].empty() &&
         bj["error"]["code"] == "malformed-prefix";
  }

  std::vector<std::future<std::string>> bodies;
  for (int i = 0; i < 100; ++i) {
    bodies.push_back(std::async(std::launch::async, [port] {
      httplib::Client c("127.0.0.1", port);
      auto res = c.Get("/v1/prefix/10.0.0.0/8");
      return res && res->status == 200 ? res->body : std::string("<failed>");
    }));
  }
  std::set<std::string> distinct;
  for (auto& b : bodies) distinct.insert(b.get());
  server.stop();
  const bool same = distinct.size() == 1 && *distinct.begin() != "<failed>";
  return {ok && same, std::string("found/empty/400 ") + (ok ? "as specified" : "wrong") + "; 100 concurrent queries, " +
                          std::to_string(distinct.size()) + " distinct body"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"scenario golden suite", scenario_golden_suite},
      {"validation table arithmetic", table_one},
      {"class share and stability arithmetic", table_three},
      {"oracle equivalence", oracle_equivalence},
      {"ROV trichotomy and monotonicity", rov_trichotomy},
      {"forest properties", forest_properties},
      {"classifier partition and prepend invariance", classifier_partition},
      {"throughput", throughput},
      {"query service contract", query_service},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.ok;
    std::printf("%s  %-44s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
