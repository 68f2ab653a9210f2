#pragma once

// Text-format readers for the three input corpora (RIB dumps, validated ROA
// exports, AS relationships) and the dated snapshot directory layout.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rovclass/core_model.hpp"

namespace rovclass {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line counters. Blank lines and `#` comments are not counted as read.
struct IngestStats {
  std::size_t lines_read = 0;
  std::size_t lines_parsed = 0;
  std::size_t lines_skipped = 0;
  std::size_t canonicalization_warnings = 0;

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct RibParseResult {
  std::vector<RouteEntry> routes;
  IngestStats stats;
};

struct RoaParseResult {
  std::vector<RoaRecord> records;
  IngestStats stats;
};

struct RelParseResult {
  std::vector<Relationship> edges;
  IngestStats stats;
};

inline constexpr std::string_view roa_csv_header = "ASN,IP Prefix,Max Length,Trust Anchor";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

/// Splits on `sep` without allocating; at most `max_fields` leading fields are
/// returned, the rest of the line is ignored.
inline std::size_t split_fields(std::string_view line, char sep, std::string_view* out,
                                std::size_t max_fields) {
  std::size_t n = 0;
  while (n < max_fields) {
    auto pos = line.find(sep);
    out[n++] = line.substr(0, pos);
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return n;
}

inline std::optional<Asn> parse_asn(std::string_view s) {
  s = trim(s);
  if (s.size() > 2 && (s[0] == 'A' || s[0] == 'a') && (s[1] == 'S' || s[1] == 's')) s.remove_prefix(2);
  if (s.empty()) return std::nullopt;
  Asn v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<AsPath> parse_as_path(std::string_view text) {
  AsPath path;
  text = trim(text);
  while (!text.empty()) {
    auto sp = text.find(' ');
    auto tok = text.substr(0, sp);
    text = sp == std::string_view::npos ? std::string_view{} : trim(text.substr(sp + 1));
    if (tok.empty()) continue;
    if (path.contains_set()) return std::nullopt;  // only a trailing AS_SET is accepted
    if (tok.front() == '{') {
      if (tok.size() < 3 || tok.back() != '}') return std::nullopt;
      auto body = tok.substr(1, tok.size() - 2);
      while (true) {
        auto comma = body.find(',');
        auto asn = parse_asn(body.substr(0, comma));
        if (!asn) return std::nullopt;
        path.as_set.push_back(*asn);
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      continue;
    }
    auto asn = parse_asn(tok);
    if (!asn) return std::nullopt;
    path.hops.push_back(*asn);
  }
  if (path.hops.empty() && path.as_set.empty()) return std::nullopt;
  return path;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (first && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    first = false;
    fn(trim(view));
  }
  if (in.bad()) throw IoError("read error on input stream");
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace detail

/// Parses a pipe-delimited one-line RIB dump
/// (marker|timestamp|type|peer-ip|peer-asn|prefix|as-path|...).
/// Malformed lines are counted and skipped, never fatal.
inline RibParseResult parse_rib(std::istream& in) {
  RibParseResult out;
  detail::for_each_line(in, [&](std::string_view line) {
    if (line.empty()) return;
    ++out.stats.lines_read;
    std::string_view f[7];
    auto n = detail::split_fields(line, '|', f, 7);
    auto skip = [&] { ++out.stats.lines_skipped; };
    if (n < 7) return skip();
    auto parsed = try_parse_prefix(detail::trim(f[5]));
    if (!parsed) return skip();
    auto path = detail::parse_as_path(f[6]);
    if (!path) return skip();
    std::optional<Asn> peer;
    if (!detail::trim(f[4]).empty()) {
      peer = detail::parse_asn(f[4]);
      if (!peer) return skip();
    }
    if (parsed->had_host_bits) ++out.stats.canonicalization_warnings;
    out.routes.push_back(RouteEntry{parsed->prefix, std::move(*path), peer});
    ++out.stats.lines_parsed;
  });
  return out;
}

/// Inverse of parse_rib for a single entry.
inline std::string format_rib_line(const RouteEntry& r) {
  return "TABLE_DUMP2|0|B|0.0.0.0|" + (r.peer ? std::to_string(*r.peer) : std::string{}) + '|' +
         r.prefix.to_string() + '|' + r.path.to_string() + "|IGP";
}

/// Parses a validated-ROA CSV export. Throws FormatError when the header is
/// missing; rows that do not parse or break prefix <= max length <= family
/// maximum are skipped.
inline RoaParseResult parse_roas(std::istream& in) {
  RoaParseResult out;
  bool header_seen = false;
  detail::for_each_line(in, [&](std::string_view line) {
    if (line.empty()) return;
    if (!header_seen) {
      if (line != roa_csv_header) {
        throw FormatError("ROA file: expected header '" + std::string(roa_csv_header) + "', got '" +
                          std::string(line) + "'");
      }
      header_seen = true;
      return;
    }
    ++out.stats.lines_read;
    std::string_view f[5];
    auto n = detail::split_fields(line, ',', f, 5);
    auto skip = [&] { ++out.stats.lines_skipped; };
    if (n != 4) return skip();
    auto asn = detail::parse_asn(f[0]);
    auto parsed = try_parse_prefix(detail::trim(f[1]));
    auto maxlen = detail::parse_uint(detail::trim(f[2]), 128);
    if (!asn || !parsed || !maxlen) return skip();
    const int ml = static_cast<int>(*maxlen);
    if (ml < parsed->prefix.length() || ml > max_length(parsed->prefix.family())) return skip();
    if (parsed->had_host_bits) ++out.stats.canonicalization_warnings;
    out.records.push_back(RoaRecord{*asn, parsed->prefix, ml, std::string(detail::trim(f[3]))});
    ++out.stats.lines_parsed;
  });
  if (!header_seen) {
    throw FormatError("ROA file: missing header '" + std::string(roa_csv_header) + "'");
  }
  return out;
}

inline std::string format_roa_line(const RoaRecord& r) {
  return "AS" + std::to_string(r.asn) + ',' + r.prefix.to_string() + ',' + std::to_string(r.max_length) +
         ',' + r.trust_anchor;
}

/// Parses `a|b|-1` (a provides transit to b) and `a|b|0` (peers) lines.
/// Unknown codes and self-edges are skipped; duplicates are dropped.
inline RelParseResult parse_relationships(std::istream& in) {
  RelParseResult out;
  std::set<Relationship> seen;
  detail::for_each_line(in, [&](std::string_view line) {
    if (line.empty() || line.front() == '#') return;
    ++out.stats.lines_read;
    std::string_view f[4];
    auto n = detail::split_fields(line, '|', f, 4);
    auto skip = [&] { ++out.stats.lines_skipped; };
    if (n < 3) return skip();
    auto a = detail::parse_asn(f[0]);
    auto b = detail::parse_asn(f[1]);
    auto code = detail::trim(f[2]);
    if (!a || !b || *a == *b) return skip();
    Relationship rel{*a, *b, RelationshipKind::ProviderOf};
    if (code == "-1") {
      rel.kind = RelationshipKind::ProviderOf;
    } else if (code == "0") {
      rel.kind = RelationshipKind::PeerWith;
      if (rel.a > rel.b) std::swap(rel.a, rel.b);
    } else {
      return skip();
    }
    ++out.stats.lines_parsed;
    if (seen.insert(rel).second) out.edges.push_back(rel);
  });
  return out;
}

inline std::string format_relationship_line(const Relationship& r) {
  return std::to_string(r.a) + '|' + std::to_string(r.b) + '|' +
         (r.kind == RelationshipKind::ProviderOf ? "-1" : "0");
}

inline RibParseResult parse_rib_file(const std::filesystem::path& p) {
  auto in = detail::open_input(p);
  return parse_rib(in);
}

inline RoaParseResult parse_roas_file(const std::filesystem::path& p) {
  auto in = detail::open_input(p);
  return parse_roas(in);
}

inline RelParseResult parse_relationships_file(const std::filesystem::path& p) {
  auto in = detail::open_input(p);
  return parse_relationships(in);
}

// ---------------------------------------------------------------------------
// Snapshot series

using Date = std::chrono::year_month_day;

inline std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = detail::parse_uint(s.substr(0, 4), 9999);
  auto m = detail::parse_uint(s.substr(5, 2), 12);
  auto d = detail::parse_uint(s.substr(8, 2), 31);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{static_cast<int>(*y)}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

struct SnapshotRef {
  Date date;
  std::filesystem::path rib_path;
  std::filesystem::path roa_path;
};

struct SnapshotSeries {
  std::vector<SnapshotRef> snapshots;  // strictly increasing dates
  std::filesystem::path relationships;  // <root>/as-rel.txt; may not exist
  std::vector<std::string> warnings;
};

/// Loads `<root>/<YYYY-MM-DD>/{rib.txt,roas.csv}`. Dated directories missing
/// either file are excluded with a warning. Throws ConfigError when no usable
/// snapshot remains.
inline SnapshotSeries load_series(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw ConfigError("series root '" + root.string() + "' is not a directory");
  SnapshotSeries series;
  series.relationships = root / "as-rel.txt";
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto date = parse_date(entry.path().filename().string());
    if (!date) continue;
    SnapshotRef ref{*date, entry.path() / "rib.txt", entry.path() / "roas.csv"};
    if (!fs::is_regular_file(ref.rib_path) || !fs::is_regular_file(ref.roa_path)) {
      series.warnings.push_back("snapshot " + format_date(*date) + " excluded: missing " +
                                (fs::is_regular_file(ref.rib_path) ? "roas.csv" : "rib.txt"));
      continue;
    }
    series.snapshots.push_back(std::move(ref));
  }
  if (series.snapshots.empty()) {
    throw ConfigError("no usable snapshots under '" + root.string() + "'");
  }
  std::sort(series.snapshots.begin(), series.snapshots.end(),
            [](const SnapshotRef& a, const SnapshotRef& b) { return a.date < b.date; });
  return series;
}

}  // namespace rovclass
