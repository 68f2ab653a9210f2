#pragma once

// Command-line front end: validate, classify, stability, scenario, serve.
// Exit codes: 0 success, 1 usage error, 2 input-format or I/O error.

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rovclass/classifier.hpp"
#include "rovclass/ingest.hpp"
#include "rovclass/report.hpp"
#include "rovclass/report_server.hpp"
#include "rovclass/scenarios.hpp"
#include "rovclass/stability.hpp"

namespace rovclass::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_input = 2;

struct RunConfig {
  std::string subcommand;
  std::string rib;
  std::string roas;
  std::string rel;
  std::string series;
  std::string out;
  std::string format = "json";
  std::string date;
  std::string mode = "distinct";
  double threshold = 1.0;
  bool transitive = false;
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<std::string> reports;
  std::string bind = "127.0.0.1:8080";
};

namespace detail {

inline void log_stats(std::ostream& err, std::string_view what, const IngestStats& s) {
  err << "[rovclass] " << what << ": " << s.lines_read << " lines read, " << s.lines_parsed << " parsed, "
      << s.lines_skipped << " skipped";
  if (s.canonicalization_warnings) err << ", " << s.canonicalization_warnings << " host-bit prefixes masked";
  err << '\n';
}

inline CountMode count_mode(const RunConfig& c) { return c.mode == "raw" ? CountMode::Raw : CountMode::Distinct; }

inline RoaIndex load_roas(const std::string& path, std::ostream& err) {
  auto parsed = parse_roas_file(path);
  log_stats(err, path, parsed.stats);
  return RoaIndex(std::move(parsed.records));
}

inline std::vector<RouteEntry> load_rib(const std::string& path, std::ostream& err) {
  auto parsed = parse_rib_file(path);
  log_stats(err, path, parsed.stats);
  return std::move(parsed.routes);
}

inline RelGraph load_graph(const std::string& path, bool transitive, std::ostream& err) {
  auto parsed = parse_relationships_file(path);
  log_stats(err, path, parsed.stats);
  return RelGraph(parsed.edges, transitive);
}

inline void write_report(const ClassificationReport& r, const RunConfig& c, std::ostream& out) {
  auto fmt = c.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  if (c.out.empty()) {
    emit(r, fmt, out);
  } else {
    emit(r, fmt, std::filesystem::path(c.out));
  }
}

inline std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v << '%';
  return os.str();
}

inline int run_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto routes = load_rib(c.rib, err);
  auto index = load_roas(c.roas, err);
  auto table = validate_table(routes, index, count_mode(c));
  const auto& s = table.summary;
  out << std::left << std::setw(20) << "Validation Result" << std::setw(26) << "Number of Routing Items"
      << "Ratio\n";
  for (auto st : {ValidationState::Unknown, ValidationState::Valid, ValidationState::Invalid}) {
    std::string name(to_string(st));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    out << std::setw(20) << name << std::setw(26) << s.count(st) << pct(s.percent(st)) << '\n';
  }
  err << "[rovclass] counting mode " << to_string(s.mode) << ", " << s.as_set_excluded
      << " AS_SET routes excluded\n";
  if (!c.out.empty()) {
    std::ofstream os(c.out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write '" + c.out + "'");
    os << "prefix,origin_asn,state,occurrences,covering_roas\n";
    for (const auto& po : table.outcomes) {
      os << po.pair.prefix.to_string() << ',' << po.pair.origin << ',' << to_string(po.outcome.state) << ','
         << po.occurrences << ',' << rovclass::detail::csv_field(format_roa_list(po.outcome.covering)) << '\n';
    }
    if (!os) throw IoError("write failed for '" + c.out + "'");
  }
  return exit_ok;
}

inline std::optional<Date> config_date(const RunConfig& c) {
  if (c.date.empty()) return std::nullopt;
  auto d = parse_date(c.date);
  if (!d) throw CLI::ValidationError("--date", "expected YYYY-MM-DD, got '" + c.date + "'");
  return d;
}

inline int run_classify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto date = config_date(c);
  auto routes = load_rib(c.rib, err);
  auto index = load_roas(c.roas, err);
  auto graph = load_graph(c.rel, c.transitive, err);
  auto analysis = analyze(routes, index, graph, count_mode(c));
  write_report(make_report(analysis, date), c, out);
  return exit_ok;
}

inline int run_stability(const RunConfig& c, std::ostream& out, std::ostream& err) {
  check_threshold(c.threshold);
  auto series = load_series(c.series);
  for (const auto& w : series.warnings) err << "[rovclass] warning: " << w << '\n';
  auto graph = load_graph(c.rel.empty() ? series.relationships.string() : c.rel, c.transitive, err);
  std::optional<SnapshotAnalysis> last;
  auto pipeline = [&](const SnapshotRef& ref) {
    auto routes = load_rib(ref.rib_path.string(), err);
    auto index = load_roas(ref.roa_path.string(), err);
    last = analyze(routes, index, graph, count_mode(c));
    return last->classification;
  };
  auto timelines = build_timelines(series, pipeline);
  auto report = make_report(*last, series.snapshots.back().date);
  attach_stability(report, timelines, c.threshold, series.snapshots.size());
  write_report(report, c, out);
  return exit_ok;
}

inline int run_scenario(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto manifest = generate(ScenarioSpec{c.scenario, c.seed}, c.out);
  for (const auto& f : manifest.files) out << f.string() << '\n';
  return exit_ok;
}

inline std::pair<std::string, int> split_bind(const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--bind", "expected HOST:PORT, got '" + bind + "'");
  auto port = rovclass::detail::parse_uint(std::string_view(bind).substr(colon + 1), 65535);
  if (!port) throw CLI::ValidationError("--bind", "bad port in '" + bind + "'");
  return {bind.substr(0, colon), static_cast<int>(*port)};
}

inline int run_serve(const RunConfig& c, std::ostream&, std::ostream& err) {
  auto [host, port] = split_bind(c.bind);
  std::optional<ClassificationReport> latest;
  for (const auto& path : c.reports) {
    auto r = load_report(path);
    if (!latest || r.date >= latest->date) latest = std::move(r);
  }
  ReportStore store(std::move(*latest));
  ReportServer server(store);
  err << "[rovclass] serving " << c.reports.size() << " report(s) on " << host << ':' << port << '\n';
  server.listen(host, port);
  return exit_ok;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Classify RPKI-invalid BGP routes into likely false-alarm categories", "rovclass"};
  app.require_subcommand(1);

  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", c.mode, "count distinct (prefix, origin) pairs or raw RIB lines")
        ->check(CLI::IsMember({"distinct", "raw"}));
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "output file (default: standard output)");
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* validate = app.add_subcommand("validate", "route origin validation summary");
  validate->add_option("--rib", c.rib, "RIB dump")->required();
  validate->add_option("--roas", c.roas, "validated ROA CSV")->required();
  validate->add_option("--out", c.out, "per-pair outcome CSV");
  add_mode(validate);

  auto* classify = app.add_subcommand("classify", "classify Invalid pairs of one snapshot");
  classify->add_option("--rib", c.rib, "RIB dump")->required();
  classify->add_option("--roas", c.roas, "validated ROA CSV")->required();
  classify->add_option("--rel", c.rel, "AS relationship file")->required();
  classify->add_option("--date", c.date, "snapshot date YYYY-MM-DD recorded in the report");
  classify->add_flag("--transitive", c.transitive, "treat indirect providers as providers");
  add_mode(classify);
  add_output(classify);

  auto* stability = app.add_subcommand("stability", "classify a dated series and measure pair stability");
  stability->add_option("--series", c.series, "series root with YYYY-MM-DD/ directories")->required();
  stability->add_option("--rel", c.rel, "AS relationship file (default: <series>/as-rel.txt)");
  stability->add_option("--threshold", c.threshold, "fraction of snapshots a long-lived pair must be Invalid in")
      ->check(CLI::Range(0.0, 1.0));
  stability->add_flag("--transitive", c.transitive, "treat indirect providers as providers");
  add_mode(stability);
  add_output(stability);

  std::vector<std::string> names;
  for (const auto& [k, n] : scenario_names) names.emplace_back(n);
  auto* scenario = app.add_subcommand("scenario", "write a synthetic scenario fixture");
  scenario->add_option("--name", c.scenario, "scenario name")->required()->check(CLI::IsMember(names));
  scenario->add_option("--seed", c.seed, "relabeling seed")->required();
  scenario->add_option("--out", c.out, "output directory")->required();

  auto* serve = app.add_subcommand("serve", "serve reports over a read-only JSON API");
  serve->add_option("--report", c.reports, "report JSON file (repeatable; latest date is served)")->required();
  serve->add_option("--bind", c.bind, "HOST:PORT");

  std::vector<const char*> argv{"rovclass"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (stability->parsed() && !(c.threshold > 0.0)) {
      throw CLI::ValidationError("--threshold", "must be in (0, 1]");
    }
    if (validate->parsed()) return detail::run_validate(c, out, err);
    if (classify->parsed()) return detail::run_classify(c, out, err);
    if (stability->parsed()) return detail::run_stability(c, out, err);
    if (scenario->parsed()) return detail::run_scenario(c, out, err);
    if (serve->parsed()) return detail::run_serve(c, out, err);
    return exit_usage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  } catch (const FormatError& e) {
    err << "[rovclass] input format error: " << e.what() << '\n';
    return exit_input;
  } catch (const IoError& e) {
    err << "[rovclass] I/O error: " << e.what() << '\n';
    return exit_input;
  } catch (const ConfigError& e) {
    err << "[rovclass] input error: " << e.what() << '\n';
    return exit_input;
  }
}

}  // namespace rovclass::cli
