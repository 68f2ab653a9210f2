#pragma once

// Synthetic fixtures for each false-alarm scenario plus negative controls.
// Every fixture is a (RIB, ROA, relationship) triple in the ingest formats
// together with the class each Invalid pair is expected to receive.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rovclass/core_model.hpp"
#include "rovclass/ingest.hpp"

namespace rovclass {

struct ExpectedLabel {
  IpPrefix prefix;
  Asn origin = 0;
  InvalidClass cls = InvalidClass::Other;

  friend bool operator==(const ExpectedLabel&, const ExpectedLabel&) = default;
  friend auto operator<=>(const ExpectedLabel& a, const ExpectedLabel& b) {
    if (auto c = a.prefix <=> b.prefix; c != 0) return c;
    if (auto c = a.origin <=> b.origin; c != 0) return c;
    return class_index(a.cls) <=> class_index(b.cls);
  }
};

struct FixtureInstance {
  std::vector<RouteEntry> routes;
  std::vector<RoaRecord> roas;
  std::vector<Relationship> edges;
  std::vector<ExpectedLabel> expected;
};

/// A set of scenario instances laid out in disjoint address and AS space.
struct Fixture {
  std::vector<FixtureInstance> instances;

  std::vector<RouteEntry> routes() const {
    std::vector<RouteEntry> out;
    for (const auto& i : instances) out.insert(out.end(), i.routes.begin(), i.routes.end());
    return out;
  }
  std::vector<RoaRecord> roas() const {
    std::vector<RoaRecord> out;
    for (const auto& i : instances) out.insert(out.end(), i.roas.begin(), i.roas.end());
    return out;
  }
  std::vector<Relationship> edges() const {
    std::vector<Relationship> out;
    for (const auto& i : instances) out.insert(out.end(), i.edges.begin(), i.edges.end());
    return out;
  }
  std::vector<ExpectedLabel> expected() const {
    std::vector<ExpectedLabel> out;
    for (const auto& i : instances) out.insert(out.end(), i.expected.begin(), i.expected.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string rib_text() const {
    std::string s;
    for (const auto& r : routes()) s += format_rib_line(r) + '\n';
    return s;
  }
  std::string roas_text() const {
    std::string s = std::string(roa_csv_header) + '\n';
    for (const auto& r : roas()) s += format_roa_line(r) + '\n';
    return s;
  }
  std::string relationships_text() const {
    std::string s = "# provider|customer|-1 and peer|peer|0\n";
    for (const auto& e : edges()) s += format_relationship_line(e) + '\n';
    return s;
  }
};

enum class ScenarioKind {
  LoadBalancing,
  FailingToAggregate,
  Multihoming,
  Singlehoming,
  Provider,
  Transfer,
  ValidControl,
  UnknownControl,
  HijackControl,
};

inline constexpr std::array<std::pair<ScenarioKind, std::string_view>, 9> scenario_names{{
    {ScenarioKind::LoadBalancing, "load-balancing"},
    {ScenarioKind::FailingToAggregate, "failing-to-aggregate"},
    {ScenarioKind::Multihoming, "multihoming"},
    {ScenarioKind::Singlehoming, "singlehoming"},
    {ScenarioKind::Provider, "provider"},
    {ScenarioKind::Transfer, "transfer"},
    {ScenarioKind::ValidControl, "valid-control"},
    {ScenarioKind::UnknownControl, "unknown-control"},
    {ScenarioKind::HijackControl, "hijack-control"},
}};

inline std::optional<ScenarioKind> parse_scenario(std::string_view name) {
  for (const auto& [k, n] : scenario_names) {
    if (n == name) return k;
  }
  return std::nullopt;
}

inline std::string_view to_string(ScenarioKind k) {
  for (const auto& [kind, n] : scenario_names) {
    if (kind == k) return n;
  }
  return "unknown";
}

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 0;
};

/// The labels a scenario is drawn with: five ASNs (as[0] is the origin-side AS1)
/// and the /23 the scenario lives in.
struct Cast {
  std::array<Asn, 5> as{};
  std::uint32_t block = 0;  // network address of a /23
};

namespace detail {

// 198.18.0.0/15 (benchmarking) holds the scenario /23s; 203.0.113.0/24
// (documentation) is the unrelated ROA of the unknown control.
inline constexpr std::uint32_t scenario_space = 0xC6120000;
inline constexpr std::uint32_t unrelated_block = 0xCB007100;

inline RouteEntry route(std::uint32_t addr, int len, std::vector<Asn> hops) {
  RouteEntry r{IpPrefix::v4(addr, len), AsPath{std::move(hops), {}}, std::nullopt};
  r.peer = r.path.hops.front();
  return r;
}

inline RoaRecord roa(Asn asn, std::uint32_t addr, int len, int max_len) {
  return RoaRecord{asn, IpPrefix::v4(addr, len), max_len, "TA-TEST"};
}

inline Relationship provider(Asn p, Asn c) { return {p, c, RelationshipKind::ProviderOf}; }
inline Relationship peer(Asn a, Asn b) {
  return {std::min(a, b), std::max(a, b), RelationshipKind::PeerWith};
}

inline std::uint64_t mix_name(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) h = (h ^ c) * 0x100000001b3ULL;
  return h ^ (seed * 0x9e3779b97f4a7c15ULL);
}

}  // namespace detail

/// Seeded relabeling: distinct ASNs from 64512-65534 and one /23 from
/// 198.18.0.0/15. Only raw engine output is used, so results are identical
/// across standard libraries.
inline Cast draw_cast(const ScenarioSpec& spec) {
  std::mt19937_64 rng(detail::mix_name(spec.seed, spec.name));
  Cast c;
  for (std::size_t i = 0; i < c.as.size(); ++i) {
    while (true) {
      Asn a = 64512 + static_cast<Asn>(rng() % 1023);
      if (std::find(c.as.begin(), c.as.begin() + static_cast<std::ptrdiff_t>(i), a) ==
          c.as.begin() + static_cast<std::ptrdiff_t>(i)) {
        c.as[i] = a;
        break;
      }
    }
  }
  c.block = detail::scenario_space + static_cast<std::uint32_t>(rng() % 256) * 512;
  return c;
}

/// Builds one scenario instance with the given labels. With `single_pair`
/// the load-balancing instance announces only the upper /24, so every kind
/// yields at most one Invalid pair.
inline FixtureInstance build_instance(ScenarioKind kind, const Cast& c, bool single_pair = false) {
  using detail::peer;
  using detail::provider;
  using detail::roa;
  using detail::route;
  const Asn as1 = c.as[0], as2 = c.as[1], as3 = c.as[2], as4 = c.as[3], as5 = c.as[4];
  const std::uint32_t lo = c.block, hi = c.block + 256;
  FixtureInstance f;
  auto expect = [&](std::uint32_t addr, Asn origin, InvalidClass cls) {
    f.expected.push_back({IpPrefix::v4(addr, 24), origin, cls});
  };
  switch (kind) {
    case ScenarioKind::LoadBalancing:
      // AS1 deaggregates its /23 and sends each half through a different provider.
      f.edges = {provider(as2, as1), provider(as3, as1), peer(as2, as4), peer(as3, as4)};
      f.roas = {roa(as1, lo, 23, 23)};
      f.routes = {route(lo, 23, {as4, as2, as1}), route(hi, 24, {as4, as3, as1})};
      expect(hi, as1, InvalidClass::LoadBalancing);
      if (!single_pair) {
        f.routes.push_back(route(lo, 24, {as4, as2, as1}));
        expect(lo, as1, InvalidClass::LoadBalancing);
      }
      break;
    case ScenarioKind::FailingToAggregate:
      // The more-specific rides the exact same path as its /23.
      f.edges = {provider(as2, as1), peer(as2, as4)};
      f.roas = {roa(as1, lo, 23, 23)};
      f.routes = {route(lo, 23, {as4, as2, as1}), route(lo, 24, {as4, as2, as2, as1, as1})};
      expect(lo, as1, InvalidClass::FailingToAggregate);
      break;
    case ScenarioKind::Multihoming:
      // AS1 holds a /24 of provider AS2's ROA-covered /23 and also uses AS3.
      f.edges = {provider(as2, as1), provider(as3, as1), peer(as2, as4), peer(as3, as4)};
      f.roas = {roa(as2, lo, 23, 24)};
      f.routes = {route(lo, 23, {as4, as2}), route(lo, 24, {as4, as3, as1})};
      expect(lo, as1, InvalidClass::Multihoming);
      break;
    case ScenarioKind::Singlehoming:
      // Single provider AS2 passes its customer's /24 on without aggregating.
      f.edges = {provider(as2, as1), peer(as2, as3)};
      f.roas = {roa(as2, lo, 23, 24)};
      f.routes = {route(lo, 23, {as3, as2}), route(lo, 24, {as3, as2, as1})};
      expect(lo, as1, InvalidClass::Singlehoming);
      break;
    case ScenarioKind::Provider:
      // Provider AS2 originates its customer's ROA-covered /24 itself.
      f.edges = {provider(as2, as1), peer(as2, as3)};
      f.roas = {roa(as1, lo, 24, 24)};
      f.routes = {route(lo, 24, {as3, as2})};
      expect(lo, as2, InvalidClass::Provider);
      break;
    case ScenarioKind::Transfer:
      // The /24 moved to AS5 while AS2's ROA for the /23 stayed in place.
      f.edges = {provider(as3, as5), provider(as3, as2)};
      f.roas = {roa(as2, lo, 23, 24)};
      f.routes = {route(lo, 24, {as3, as5})};
      expect(lo, as5, InvalidClass::Transfer);
      break;
    case ScenarioKind::ValidControl:
      f.edges = {provider(as2, as1)};
      f.roas = {roa(as1, lo, 23, 24)};
      f.routes = {route(lo, 23, {as2, as1})};
      break;
    case ScenarioKind::UnknownControl:
      f.edges = {provider(as2, as1)};
      f.roas = {roa(as1, detail::unrelated_block, 24, 24)};
      f.routes = {route(lo, 23, {as2, as1})};
      break;
    case ScenarioKind::HijackControl:
      // An unrelated AS4 announces a more-specific of AS1's space. The rules
      // cannot tell this from a transfer.
      f.edges = {provider(as2, as1), peer(as2, as3), provider(as3, as4)};
      f.roas = {roa(as1, lo, 23, 23)};
      f.routes = {route(lo, 23, {as3, as2, as1}), route(lo, 24, {as3, as4})};
      expect(lo, as4, InvalidClass::Transfer);
      break;
  }
  return f;
}

/// An Invalid pair no rule row matches: the ROA holder announces a lone /24
/// beyond its max length with no parent or sibling announced.
inline FixtureInstance build_other_instance(const Cast& c) {
  using detail::provider;
  FixtureInstance f;
  f.edges = {provider(c.as[1], c.as[0]), detail::peer(c.as[1], c.as[3])};
  f.roas = {detail::roa(c.as[0], c.block, 23, 23)};
  f.routes = {detail::route(c.block, 24, {c.as[3], c.as[1], c.as[0]})};
  f.expected = {{IpPrefix::v4(c.block, 24), c.as[0], InvalidClass::Other}};
  return f;
}

inline Fixture generate_fixture(const ScenarioSpec& spec) {
  auto kind = parse_scenario(spec.name);
  if (!kind) throw ConfigError("unknown scenario '" + spec.name + "'");
  return Fixture{{build_instance(*kind, draw_cast(spec))}};
}

/// Cast number `slot` of a bulk fixture: ASNs from the 32-bit private range
/// and the slot-th /23 of 10.0.0.0/8.
inline Cast bulk_cast(std::size_t slot) {
  if (slot >= 32768) throw ContractError("bulk_cast: slot out of range");
  Cast c;
  for (std::size_t j = 0; j < c.as.size(); ++j) c.as[j] = 4200000000U + static_cast<Asn>(slot * 8 + j);
  c.block = 0x0A000000U + static_cast<std::uint32_t>(slot) * 512;
  return c;
}

/// Bulk fixture holding counts[class] single-pair instances of every class,
/// in class order. Each instance yields exactly one Invalid pair.
inline Fixture generate_mix(const std::array<std::size_t, 7>& counts) {
  Fixture f;
  std::size_t slot = 0;
  for (auto cls : all_classes) {
    for (std::size_t i = 0; i < counts[class_index(cls)]; ++i) {
      const Cast c = bulk_cast(slot++);
      if (cls == InvalidClass::Other) {
        f.instances.push_back(build_other_instance(c));
      } else {
        f.instances.push_back(build_instance(static_cast<ScenarioKind>(class_index(cls)), c, true));
      }
    }
  }
  return f;
}

inline nlohmann::ordered_json expected_to_json(const std::vector<ExpectedLabel>& labels) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : labels) {
    arr.push_back({{"prefix", l.prefix.to_string()}, {"origin", l.origin}, {"class", to_string(l.cls)}});
  }
  return arr;
}

inline std::vector<ExpectedLabel> expected_from_json(const nlohmann::json& j) {
  std::vector<ExpectedLabel> out;
  for (const auto& e : j) {
    auto cls = parse_class(e.at("class").get<std::string>());
    if (!cls) throw FormatError("expected.json: unknown class " + e.at("class").dump());
    out.push_back({parse_prefix(e.at("prefix").get<std::string>()), e.at("origin").get<Asn>(), *cls});
  }
  return out;
}

struct ScenarioManifest {
  std::vector<std::filesystem::path> files;
  std::vector<ExpectedLabel> expected;
};

/// Writes rib.txt, roas.csv, as-rel.txt and expected.json into `out`.
/// Same (name, seed) always produces byte-identical files.
inline ScenarioManifest write_fixture(const Fixture& fixture, const std::filesystem::path& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create '" + out.string() + "': " + ec.message());
  ScenarioManifest m;
  m.expected = fixture.expected();
  auto write = [&](const char* name, const std::string& body) {
    auto path = out / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write '" + path.string() + "'");
    os << body;
    if (!os) throw IoError("write failed for '" + path.string() + "'");
    m.files.push_back(path);
  };
  write("rib.txt", fixture.rib_text());
  write("roas.csv", fixture.roas_text());
  write("as-rel.txt", fixture.relationships_text());
  write("expected.json", expected_to_json(m.expected).dump(2) + '\n');
  return m;
}

inline ScenarioManifest generate(const ScenarioSpec& spec, const std::filesystem::path& out) {
  return write_fixture(generate_fixture(spec), out);
}

}  // namespace rovclass
