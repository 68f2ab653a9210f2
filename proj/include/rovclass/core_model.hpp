#pragma once

// Shared vocabulary: prefixes, AS paths, routes, ROAs and the enumerations
// every later stage speaks in. No I/O lives here.

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rovclass {

using Asn = std::uint32_t;

/// Raised for malformed textual input (prefixes, files, headers).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family : std::uint8_t { V4 = 4, V6 = 6 };

constexpr int max_length(Family f) { return f == Family::V4 ? 32 : 128; }

/// Network address plus length. Address bits are stored left-aligned in a
/// 128-bit field (hi holds the first 64 bits), so v4 lives in the top 32 bits
/// of hi. Bits beyond `length` are always zero.
class IpPrefix {
 public:
  IpPrefix() = default;

  /// Builds a prefix, masking any host bits. Throws FormatError when the
  /// length is out of range for the family.
  static IpPrefix make(Family family, std::uint64_t hi, std::uint64_t lo, int length) {
    if (length < 0 || length > max_length(family)) {
      throw FormatError("prefix length " + std::to_string(length) + " out of range");
    }
    IpPrefix p;
    p.family_ = family;
    p.length_ = static_cast<std::uint8_t>(length);
    p.hi_ = hi & mask_hi(length);
    p.lo_ = lo & mask_lo(length);
    return p;
  }

  static IpPrefix v4(std::uint32_t addr, int length) {
    return make(Family::V4, static_cast<std::uint64_t>(addr) << 32, 0, length);
  }

  Family family() const { return family_; }
  int length() const { return length_; }
  std::uint64_t hi() const { return hi_; }
  std::uint64_t lo() const { return lo_; }

  /// Bit `i` of the address, counting from the most significant bit.
  bool bit(int i) const {
    return i < 64 ? ((hi_ >> (63 - i)) & 1U) != 0 : ((lo_ >> (127 - i)) & 1U) != 0;
  }

  /// The first `len` bits of this prefix (len <= length()).
  IpPrefix truncated(int len) const { return make(family_, hi_, lo_, len); }

  std::uint32_t v4_address() const { return static_cast<std::uint32_t>(hi_ >> 32); }

  friend bool operator==(const IpPrefix&, const IpPrefix&) = default;
  friend auto operator<=>(const IpPrefix& a, const IpPrefix& b) {
    return std::tie(a.family_, a.hi_, a.lo_, a.length_) <=>
           std::tie(b.family_, b.hi_, b.lo_, b.length_);
  }

  std::string to_string() const;

  static constexpr std::uint64_t mask_hi(int length) {
    if (length <= 0) return 0;
    if (length >= 64) return ~std::uint64_t{0};
    return ~std::uint64_t{0} << (64 - length);
  }
  static constexpr std::uint64_t mask_lo(int length) {
    if (length <= 64) return 0;
    if (length >= 128) return ~std::uint64_t{0};
    return ~std::uint64_t{0} << (128 - length);
  }

 private:
  Family family_ = Family::V4;
  std::uint8_t length_ = 0;
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

/// True iff `a` covers `b`: same family, a is no longer than b, and b's first
/// a.length() bits equal a's. Cross-family pairs are never covering.
inline bool covers(const IpPrefix& a, const IpPrefix& b) {
  if (a.family() != b.family() || a.length() > b.length()) return false;
  const int len = a.length();
  return (b.hi() & IpPrefix::mask_hi(len)) == a.hi() && (b.lo() & IpPrefix::mask_lo(len)) == a.lo();
}

struct ParsedPrefix {
  IpPrefix prefix;
  bool had_host_bits = false;
};

namespace detail {

inline std::optional<unsigned> parse_uint(std::string_view s, unsigned max, int base = 10) {
  if (s.empty()) return std::nullopt;
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v > max) return std::nullopt;
  return v;
}

inline std::optional<std::uint32_t> parse_v4_address(std::string_view s) {
  std::uint32_t addr = 0;
  for (int octet = 0; octet < 4; ++octet) {
    auto dot = s.find('.');
    if ((octet < 3) == (dot == std::string_view::npos)) return std::nullopt;
    auto part = octet < 3 ? s.substr(0, dot) : s;
    if (part.size() > 3) return std::nullopt;
    auto v = parse_uint(part, 255);
    if (!v) return std::nullopt;
    addr = (addr << 8) | *v;
    if (octet < 3) s.remove_prefix(dot + 1);
  }
  return addr;
}

inline std::optional<std::array<std::uint16_t, 8>> parse_v6_address(std::string_view s) {
  std::array<std::uint16_t, 8> groups{};
  std::vector<std::uint16_t> head, tail;
  auto split = s.find("::");
  auto parse_groups = [](std::string_view part, std::vector<std::uint16_t>& out) {
    if (part.empty()) return true;
    while (true) {
      auto colon = part.find(':');
      auto g = part.substr(0, colon);
      if (g.size() > 4) return false;
      auto v = parse_uint(g, 0xffff, 16);
      if (!v) return false;
      out.push_back(static_cast<std::uint16_t>(*v));
      if (colon == std::string_view::npos) return true;
      part.remove_prefix(colon + 1);
    }
  };
  if (split == std::string_view::npos) {
    if (!parse_groups(s, head) || head.size() != 8) return std::nullopt;
  } else {
    if (s.find("::", split + 1) != std::string_view::npos) return std::nullopt;
    if (!parse_groups(s.substr(0, split), head) || !parse_groups(s.substr(split + 2), tail)) {
      return std::nullopt;
    }
    if (head.size() + tail.size() > 7) return std::nullopt;
  }
  std::size_t i = 0;
  for (auto g : head) groups[i++] = g;
  i = 8 - tail.size();
  for (auto g : tail) groups[i++] = g;
  return groups;
}

}  // namespace detail

/// Parses "a.b.c.d/len" or "x:y::z/len". Host bits are masked and reported.
inline std::optional<ParsedPrefix> try_parse_prefix(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto addr = text.substr(0, slash);
  auto len_text = text.substr(slash + 1);
  if (len_text.size() > 3) return std::nullopt;
  if (addr.find(':') == std::string_view::npos) {
    auto a = detail::parse_v4_address(addr);
    auto len = detail::parse_uint(len_text, 32);
    if (!a || !len) return std::nullopt;
    auto p = IpPrefix::v4(*a, static_cast<int>(*len));
    return ParsedPrefix{p, p.v4_address() != *a};
  }
  auto g = detail::parse_v6_address(addr);
  auto len = detail::parse_uint(len_text, 128);
  if (!g || !len) return std::nullopt;
  std::uint64_t hi = 0, lo = 0;
  for (int i = 0; i < 4; ++i) hi = (hi << 16) | (*g)[i];
  for (int i = 4; i < 8; ++i) lo = (lo << 16) | (*g)[i];
  auto p = IpPrefix::make(Family::V6, hi, lo, static_cast<int>(*len));
  return ParsedPrefix{p, p.hi() != hi || p.lo() != lo};
}

inline IpPrefix parse_prefix(std::string_view text) {
  auto p = try_parse_prefix(text);
  if (!p) throw FormatError("malformed prefix '" + std::string(text) + "'");
  return p->prefix;
}

inline std::string IpPrefix::to_string() const {
  std::string out;
  if (family_ == Family::V4) {
    auto a = v4_address();
    out = std::to_string(a >> 24) + '.' + std::to_string((a >> 16) & 0xff) + '.' +
          std::to_string((a >> 8) & 0xff) + '.' + std::to_string(a & 0xff);
  } else {
    std::array<std::uint16_t, 8> g{};
    for (int i = 0; i < 4; ++i) g[i] = static_cast<std::uint16_t>(hi_ >> (48 - 16 * i));
    for (int i = 0; i < 4; ++i) g[4 + i] = static_cast<std::uint16_t>(lo_ >> (48 - 16 * i));
    // longest run of zero groups (length >= 2) collapses to "::"
    int best = -1, best_len = 0;
    for (int i = 0; i < 8;) {
      if (g[i] != 0) { ++i; continue; }
      int j = i;
      while (j < 8 && g[j] == 0) ++j;
      if (j - i > best_len && j - i >= 2) { best = i; best_len = j - i; }
      i = j;
    }
    auto hex = [](std::uint16_t v) {
      char buf[8];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
      return std::string(buf, ptr);
    };
    for (int i = 0; i < 8; ++i) {
      if (i == best) {
        out += "::";
        i += best_len - 1;
        continue;
      }
      if (!out.empty() && out.back() != ':') out += ':';
      out += hex(g[i]);
    }
  }
  return out + '/' + std::to_string(length_);
}

struct IpPrefixHash {
  std::size_t operator()(const IpPrefix& p) const noexcept {
    std::uint64_t h = p.hi() * 0x9e3779b97f4a7c15ULL;
    h ^= p.lo() + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(p.length()) << 1 | (p.family() == Family::V6 ? 1 : 0);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

/// AS path. `hops` is the AS_SEQUENCE part; a trailing AS_SET, when present,
/// lands in `as_set` and the route has no single origin.
struct AsPath {
  std::vector<Asn> hops;
  std::vector<Asn> as_set;

  bool contains_set() const { return !as_set.empty(); }
  Asn origin() const {
    if (contains_set() || hops.empty()) throw ContractError("AS path has no single origin");
    return hops.back();
  }

  friend bool operator==(const AsPath&, const AsPath&) = default;
  friend auto operator<=>(const AsPath&, const AsPath&) = default;

  std::string to_string() const {
    std::string out;
    for (auto h : hops) {
      if (!out.empty()) out += ' ';
      out += std::to_string(h);
    }
    if (contains_set()) {
      if (!out.empty()) out += ' ';
      out += '{';
      for (std::size_t i = 0; i < as_set.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(as_set[i]);
      }
      out += '}';
    }
    return out;
  }
};

/// Path with consecutive duplicate hops removed.
inline std::vector<Asn> collapse_prepending(const std::vector<Asn>& hops) {
  std::vector<Asn> out;
  out.reserve(hops.size());
  for (auto h : hops) {
    if (out.empty() || out.back() != h) out.push_back(h);
  }
  return out;
}

struct RouteEntry {
  IpPrefix prefix;
  AsPath path;
  std::optional<Asn> peer;

  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

struct RoaRecord {
  Asn asn = 0;
  IpPrefix prefix;
  int max_length = 0;
  std::string trust_anchor;

  friend bool operator==(const RoaRecord&, const RoaRecord&) = default;
  friend auto operator<=>(const RoaRecord&, const RoaRecord&) = default;
};

enum class ValidationState { Unknown, Valid, Invalid };

inline std::string_view to_string(ValidationState s) {
  switch (s) {
    case ValidationState::Unknown: return "unknown";
    case ValidationState::Valid: return "valid";
    case ValidationState::Invalid: return "invalid";
  }
  return "unknown";
}

enum class InvalidClass {
  LoadBalancing,
  FailingToAggregate,
  Multihoming,
  Singlehoming,
  Provider,
  Transfer,
  Other,
};

inline constexpr std::array<InvalidClass, 7> all_classes{
    InvalidClass::LoadBalancing, InvalidClass::FailingToAggregate, InvalidClass::Multihoming,
    InvalidClass::Singlehoming,  InvalidClass::Provider,           InvalidClass::Transfer,
    InvalidClass::Other,
};

inline constexpr std::size_t class_index(InvalidClass c) { return static_cast<std::size_t>(c); }

/// Stable kebab-case identifier; this is the wire name in reports and the API.
inline std::string_view to_string(InvalidClass c) {
  switch (c) {
    case InvalidClass::LoadBalancing: return "load-balancing";
    case InvalidClass::FailingToAggregate: return "failing-to-aggregate";
    case InvalidClass::Multihoming: return "multihoming";
    case InvalidClass::Singlehoming: return "singlehoming";
    case InvalidClass::Provider: return "provider";
    case InvalidClass::Transfer: return "transfer";
    case InvalidClass::Other: return "other";
  }
  return "other";
}

inline std::optional<InvalidClass> parse_class(std::string_view name) {
  for (auto c : all_classes) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

enum class RelationshipKind { ProviderOf, PeerWith };

struct Relationship {
  Asn a = 0;
  Asn b = 0;
  RelationshipKind kind = RelationshipKind::ProviderOf;

  friend bool operator==(const Relationship&, const Relationship&) = default;
  friend auto operator<=>(const Relationship&, const Relationship&) = default;
};

}  // namespace rovclass

template <>
struct std::hash<rovclass::IpPrefix> : rovclass::IpPrefixHash {};
