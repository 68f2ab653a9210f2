#pragma once

// Classification reports: assembly from pipeline results, JSON/CSV emission
// and JSON parsing.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rovclass/classifier.hpp"
#include "rovclass/ingest.hpp"
#include "rovclass/stability.hpp"

namespace rovclass {

/// The reported view of one ClassifiedInvalid.
struct PairRecord {
  IpPrefix prefix;
  Asn origin = 0;
  InvalidClass cls = InvalidClass::Other;
  std::optional<int> rule_row;
  PredicateVector predicates;
  std::vector<RoaRecord> covering_roas;
  bool relgraph_miss = false;
  ProbeStatus probe = ProbeStatus::Skipped;
  std::optional<bool> long_lived;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct ClassificationReport {
  std::optional<Date> date;
  ValidationSummary validation;
  std::array<std::uint64_t, 7> per_class{};
  std::vector<PairRecord> pairs;  // sorted by (prefix, origin)
  std::optional<StabilityReport> stability;

  std::uint64_t invalid_classified() const {
    std::uint64_t t = 0;
    for (auto c : per_class) t += c;
    return t;
  }
  double class_percent(InvalidClass c) const {
    return rounded_percent(per_class[class_index(c)], invalid_classified(), 1);
  }

  friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

inline PairRecord to_record(const ClassifiedInvalid& ci) {
  return PairRecord{ci.prefix,        ci.origin,        ci.cls,   ci.matched_rule_row, ci.vector,
                    ci.covering_roas, ci.relgraph_miss, ci.probe, std::nullopt};
}

inline ClassificationReport make_report(const SnapshotAnalysis& analysis, std::optional<Date> date = std::nullopt) {
  ClassificationReport r;
  r.date = date;
  r.validation = analysis.validation.summary;
  r.per_class = analysis.classification.counts;
  r.pairs.reserve(analysis.classification.pairs.size());
  for (const auto& ci : analysis.classification.pairs) r.pairs.push_back(to_record(ci));
  return r;
}

/// Adds the stability section and marks each reported pair long-lived or not.
inline void attach_stability(ClassificationReport& r, std::span<const PairTimeline> timelines, double threshold,
                             std::size_t snapshots) {
  r.stability = stability_report(timelines, threshold);
  r.stability->snapshots = snapshots;
  std::map<PairKey, const PairTimeline*> index;
  for (const auto& t : timelines) index.emplace(PairKey{t.prefix, t.origin}, &t);
  for (auto& p : r.pairs) {
    auto it = index.find(PairKey{p.prefix, p.origin});
    p.long_lived = it != index.end() && long_lived(*it->second, threshold);
  }
}

// ---------------------------------------------------------------------------
// JSON

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson tri_json(Tri t) {
  if (t == Tri::NotEvaluated) return nullptr;
  return t == Tri::True;
}

inline Tri tri_from(const nlohmann::json& j) {
  if (j.is_null()) return Tri::NotEvaluated;
  return tri(j.get<bool>());
}

inline constexpr std::array<const char*, 6> predicate_keys{
    "roa_asn_is_origin",       "roa_asn_provider_of_origin", "origin_provider_of_roa_asn",
    "multiple_providers",      "relative_with_diff_path",    "relative_with_same_path",
};

inline ProbeStatus probe_from(std::string_view s) {
  if (s == "confirmed") return ProbeStatus::Confirmed;
  if (s == "unconfirmed") return ProbeStatus::Unconfirmed;
  if (s == "skip") return ProbeStatus::Skipped;
  throw FormatError("report: unknown probe status '" + std::string(s) + "'");
}

inline InvalidClass class_from(const nlohmann::json& j) {
  auto c = parse_class(j.get<std::string>());
  if (!c) throw FormatError("report: unknown class " + j.dump());
  return *c;
}

}  // namespace detail

inline ojson roa_json(const RoaRecord& r) {
  return {{"asn", r.asn}, {"prefix", r.prefix.to_string()}, {"max_length", r.max_length},
          {"trust_anchor", r.trust_anchor}};
}

inline ojson pair_json(const PairRecord& p) {
  ojson preds = ojson::object();
  const auto values = p.predicates.as_array();
  for (std::size_t i = 0; i < 6; ++i) preds[detail::predicate_keys[i]] = detail::tri_json(values[i]);
  ojson roas = ojson::array();
  for (const auto& r : p.covering_roas) roas.push_back(roa_json(r));
  ojson j;
  j["prefix"] = p.prefix.to_string();
  j["origin"] = p.origin;
  j["class"] = to_string(p.cls);
  j["rule_row"] = p.rule_row ? ojson(*p.rule_row) : ojson(nullptr);
  j["predicates"] = std::move(preds);
  j["covering_roas"] = std::move(roas);
  j["relgraph_miss"] = p.relgraph_miss;
  j["probe_status"] = to_string(p.probe);
  j["long_lived"] = p.long_lived ? ojson(*p.long_lived) : ojson(nullptr);
  return j;
}

inline ojson summary_json(const ValidationSummary& s) {
  return {{"mode", to_string(s.mode)},
          {"total", s.total()},
          {"unknown", s.unknown},
          {"valid", s.valid},
          {"invalid", s.invalid},
          {"unknown_pct", s.percent(ValidationState::Unknown)},
          {"valid_pct", s.percent(ValidationState::Valid)},
          {"invalid_pct", s.percent(ValidationState::Invalid)},
          {"as_set_excluded", s.as_set_excluded}};
}

inline ojson per_class_json(const ClassificationReport& r) {
  ojson j = ojson::object();
  for (auto c : all_classes) {
    j[std::string(to_string(c))] = {{"count", r.per_class[class_index(c)]}, {"pct", r.class_percent(c)}};
  }
  return j;
}

inline ojson stability_json(const std::optional<StabilityReport>& s) {
  if (!s) return nullptr;
  ojson per = ojson::object();
  for (auto c : all_classes) {
    const auto& cs = s->at(c);
    per[std::string(to_string(c))] = {
        {"total", cs.total}, {"long_lived", cs.long_lived}, {"long_lived_pct", cs.long_lived_pct}};
  }
  return {{"threshold", s->threshold}, {"snapshots", s->snapshots}, {"per_class", std::move(per)}};
}

/// Summary section: everything except the pair list.
inline ojson report_summary_json(const ClassificationReport& r) {
  ojson j;
  j["date"] = r.date ? ojson(format_date(*r.date)) : ojson(nullptr);
  j["validation_summary"] = summary_json(r.validation);
  j["per_class"] = per_class_json(r);
  j["stability"] = stability_json(r.stability);
  return j;
}

inline ojson report_to_json(const ClassificationReport& r) {
  ojson j = report_summary_json(r);
  ojson pairs = ojson::array();
  for (const auto& p : r.pairs) pairs.push_back(pair_json(p));
  // keep "pairs" ahead of "stability" for readability
  ojson out;
  out["date"] = std::move(j["date"]);
  out["validation_summary"] = std::move(j["validation_summary"]);
  out["per_class"] = std::move(j["per_class"]);
  out["pairs"] = std::move(pairs);
  out["stability"] = std::move(j["stability"]);
  return out;
}

inline RoaRecord roa_from_json(const nlohmann::json& j) {
  return RoaRecord{j.at("asn").get<Asn>(), parse_prefix(j.at("prefix").get<std::string>()),
                   j.at("max_length").get<int>(), j.at("trust_anchor").get<std::string>()};
}

inline PairRecord pair_from_json(const nlohmann::json& j) {
  PairRecord p;
  p.prefix = parse_prefix(j.at("prefix").get<std::string>());
  p.origin = j.at("origin").get<Asn>();
  p.cls = detail::class_from(j.at("class"));
  if (!j.at("rule_row").is_null()) p.rule_row = j.at("rule_row").get<int>();
  std::array<Tri, 6> values{};
  for (std::size_t i = 0; i < 6; ++i) values[i] = detail::tri_from(j.at("predicates").at(detail::predicate_keys[i]));
  p.predicates = PredicateVector::from_array(values);
  for (const auto& r : j.at("covering_roas")) p.covering_roas.push_back(roa_from_json(r));
  p.relgraph_miss = j.at("relgraph_miss").get<bool>();
  p.probe = detail::probe_from(j.at("probe_status").get<std::string>());
  if (!j.at("long_lived").is_null()) p.long_lived = j.at("long_lived").get<bool>();
  return p;
}

/// Parses a report emitted by report_to_json. Throws FormatError on schema
/// violations.
inline ClassificationReport report_from_json(const nlohmann::json& j) {
  try {
    ClassificationReport r;
    if (!j.at("date").is_null()) {
      auto d = parse_date(j.at("date").get<std::string>());
      if (!d) throw FormatError("report: malformed date " + j.at("date").dump());
      r.date = *d;
    }
    const auto& s = j.at("validation_summary");
    auto mode = s.at("mode").get<std::string>();
    if (mode != "distinct" && mode != "raw") throw FormatError("report: unknown mode '" + mode + "'");
    r.validation.mode = mode == "raw" ? CountMode::Raw : CountMode::Distinct;
    r.validation.unknown = s.at("unknown").get<std::uint64_t>();
    r.validation.valid = s.at("valid").get<std::uint64_t>();
    r.validation.invalid = s.at("invalid").get<std::uint64_t>();
    r.validation.as_set_excluded = s.at("as_set_excluded").get<std::uint64_t>();
    for (auto c : all_classes) {
      r.per_class[class_index(c)] = j.at("per_class").at(std::string(to_string(c))).at("count").get<std::uint64_t>();
    }
    for (const auto& p : j.at("pairs")) r.pairs.push_back(pair_from_json(p));
    if (!j.at("stability").is_null()) {
      const auto& st = j.at("stability");
      StabilityReport sr;
      sr.threshold = st.at("threshold").get<double>();
      sr.snapshots = st.at("snapshots").get<std::size_t>();
      for (auto c : all_classes) {
        const auto& cs = st.at("per_class").at(std::string(to_string(c)));
        auto& out = sr.per_class[class_index(c)];
        out.total = cs.at("total").get<std::uint64_t>();
        out.long_lived = cs.at("long_lived").get<std::uint64_t>();
        out.long_lived_pct = cs.at("long_lived_pct").get<double>();
      }
      r.stability = sr;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

inline ClassificationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("report '" + path.string() + "': " + e.what());
  }
  return report_from_json(j);
}

// ---------------------------------------------------------------------------
// Emission

enum class ReportFormat { Json, Csv };

inline constexpr std::string_view csv_report_header =
    "prefix,origin_asn,class,matched_roas,long_lived,relgraph_miss,probe_status";

namespace detail {

inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

/// "AS<asn> <prefix>-<maxlen> <trust anchor>" joined with ';'.
inline std::string format_roa_list(const std::vector<RoaRecord>& roas) {
  std::string out;
  for (const auto& r : roas) {
    if (!out.empty()) out += ';';
    out += "AS" + std::to_string(r.asn) + ' ' + r.prefix.to_string() + '-' + std::to_string(r.max_length) + ' ' +
           r.trust_anchor;
  }
  return out;
}

namespace detail {

// Writes `j.dump(2)` as if nested `depth` levels deep.
inline void write_indented(std::ostream& out, const ojson& j, int depth) {
  const std::string text = j.dump(2);
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  std::size_t start = 0;
  for (std::size_t nl; (nl = text.find('\n', start)) != std::string::npos; start = nl + 1) {
    out.write(text.data() + start, static_cast<std::streamsize>(nl + 1 - start));
    out << pad;
  }
  out.write(text.data() + start, static_cast<std::streamsize>(text.size() - start));
}

}  // namespace detail

namespace detail {

// Hand-rolled equivalent of `pair_json(p).dump(2)` nested `depth` levels
// deep; building the tree per pair dominates emit time on large reports.
inline void append_pair_json(std::string& buf, const PairRecord& p, int depth) {
  const std::string in1(static_cast<std::size_t>(2 * depth + 2), ' ');
  const std::string in2 = in1 + "  ", in3 = in2 + "  ";
  const auto tri_text = [](Tri t) { return t == Tri::NotEvaluated ? "null" : t == Tri::True ? "true" : "false"; };
  buf += "{\n";
  buf += in1 + "\"prefix\": \"" + p.prefix.to_string() + "\",\n";
  buf += in1 + "\"origin\": " + std::to_string(p.origin) + ",\n";
  buf += in1 + "\"class\": \"" + std::string(to_string(p.cls)) + "\",\n";
  buf += in1 + "\"rule_row\": " + (p.rule_row ? std::to_string(*p.rule_row) : "null") + ",\n";
  buf += in1 + "\"predicates\": {\n";
  const auto values = p.predicates.as_array();
  for (std::size_t i = 0; i < 6; ++i) {
    buf += in2 + "\"" + predicate_keys[i] + "\": " + tri_text(values[i]) + (i < 5 ? ",\n" : "\n");
  }
  buf += in1 + "},\n";
  buf += in1 + "\"covering_roas\": ";
  if (p.covering_roas.empty()) {
    buf += "[],\n";
  } else {
    buf += "[\n";
    for (std::size_t i = 0; i < p.covering_roas.size(); ++i) {
      const auto& r = p.covering_roas[i];
      buf += in2 + "{\n";
      buf += in3 + "\"asn\": " + std::to_string(r.asn) + ",\n";
      buf += in3 + "\"prefix\": \"" + r.prefix.to_string() + "\",\n";
      buf += in3 + "\"max_length\": " + std::to_string(r.max_length) + ",\n";
      buf += in3 + "\"trust_anchor\": " + ojson(r.trust_anchor).dump() + "\n";
      buf += in2 + (i + 1 < p.covering_roas.size() ? "},\n" : "}\n");
    }
    buf += in1 + "],\n";
  }
  buf += in1 + "\"relgraph_miss\": " + (p.relgraph_miss ? "true" : "false") + ",\n";
  buf += in1 + "\"probe_status\": \"" + std::string(to_string(p.probe)) + "\",\n";
  buf += in1 + "\"long_lived\": " + (p.long_lived ? (*p.long_lived ? "true" : "false") : "null") + "\n";
  buf += in1.substr(2) + "}";
}

}  // namespace detail

/// Streams the report as JSON. Byte-identical to `report_to_json(r).dump(2)`
/// but never holds more than one pair's JSON tree at a time.
inline void write_json(const ClassificationReport& r, std::ostream& out) {
  ojson head = report_summary_json(r);
  const auto field = [&](const char* key, const ojson& value) {
    out << "  \"" << key << "\": ";
    detail::write_indented(out, value, 1);
  };
  out << "{\n";
  field("date", head["date"]);
  out << ",\n";
  field("validation_summary", head["validation_summary"]);
  out << ",\n";
  field("per_class", head["per_class"]);
  out << ",\n  \"pairs\": ";
  if (r.pairs.empty()) {
    out << "[]";
  } else {
    out << "[\n";
    std::string buf;
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
      buf = "    ";
      detail::append_pair_json(buf, r.pairs[i], 2);
      buf += i + 1 < r.pairs.size() ? ",\n" : "\n";
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    out << "  ]";
  }
  out << ",\n";
  field("stability", head["stability"]);
  out << "\n}\n";
}

inline void emit(const ClassificationReport& r, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Json) {
    write_json(r, out);
  } else {
    out << csv_report_header << '\n';
    for (const auto& p : r.pairs) {
      out << p.prefix.to_string() << ',' << p.origin << ',' << to_string(p.cls) << ','
          << detail::csv_field(format_roa_list(p.covering_roas)) << ','
          << (p.long_lived ? (*p.long_lived ? "true" : "false") : "") << ','
          << (p.relgraph_miss ? "true" : "false") << ',' << to_string(p.probe) << '\n';
    }
  }
  if (!out) throw IoError("report write failed");
}

inline void emit(const ClassificationReport& r, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  emit(r, format, os);
}

}  // namespace rovclass
