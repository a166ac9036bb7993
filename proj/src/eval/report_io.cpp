#include "glucolab/eval/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab {

namespace {

constexpr std::string_view kHeader =
    "scenario,parameter,algorithm,group,n_rollouts,reward_mean,reward_se,tir_pct_mean,tir_pct_se,"
    "tbr_pct_mean,tbr_pct_se,cv_pct_mean,cv_pct_se,failure_pct_mean,failure_pct_se";
constexpr std::size_t kColumns = 15;

template <typename Report>
ReportRow make_row(const std::string& scenario, double parameter, const std::string& algorithm,
                   const std::string& group, const Report& r) {
  ReportRow row;
  row.scenario = scenario;
  row.parameter = parameter;
  row.algorithm = algorithm;
  row.group = group;
  row.n_rollouts = r.n_rollouts;
  row.reward_sum = r.reward_sum;
  row.tir_pct = r.tir_pct;
  row.tbr_pct = r.tbr_pct;
  row.cv_pct = r.cv_pct;
  row.failure_pct = r.failure_pct;
  return row;
}

double parse_number(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("report: bad number '" + std::string(text) + "'");
  }
  return value;
}

std::filesystem::path meta_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta");
}

}  // namespace

std::vector<ReportRow> report_rows(const std::string& scenario, double parameter,
                                   const std::string& algorithm, const GlycemicReport& report) {
  std::vector<ReportRow> rows{make_row(scenario, parameter, algorithm, "all", report)};
  for (const auto& g : report.by_age_group) {
    rows.push_back(make_row(scenario, parameter, algorithm, std::string(to_string(g.age_group)), g));
  }
  return rows;
}

std::vector<ReportRow> report_rows(const ScenarioResult& result) {
  std::vector<ReportRow> rows;
  const double parameter =
      result.scenario.kind == ScenarioKind::standard ? 0.0 : result.scenario.parameter;
  for (const auto& p : result.points) {
    auto r = report_rows(to_string(result.scenario.kind), parameter, to_string(p.algorithm),
                         p.report);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.scenario + ',' + format_double(r.parameter) + ',' + r.algorithm + ',' + r.group + ',' +
           std::to_string(r.n_rollouts);
    for (const MeanSe* m : {&r.reward_sum, &r.tir_pct, &r.tbr_pct, &r.cv_pct, &r.failure_pct}) {
      out += ',' + format_double(m->mean) + ',' + format_double(m->se);
    }
    out += '\n';
  }
  return out;
}

std::vector<ReportRow> report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw FormatError("report: unexpected header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != kColumns) throw FormatError("report: wrong column count");
    ReportRow r;
    r.scenario = f[0];
    r.parameter = parse_number(f[1]);
    r.algorithm = f[2];
    r.group = f[3];
    r.n_rollouts = static_cast<std::size_t>(parse_number(f[4]));
    MeanSe* fields[] = {&r.reward_sum, &r.tir_pct, &r.tbr_pct, &r.cv_pct, &r.failure_pct};
    for (std::size_t k = 0; k < 5; ++k) {
      fields[k]->mean = parse_number(f[5 + 2 * k]);
      fields[k]->se = parse_number(f[6 + 2 * k]);
    }
    rows.push_back(r);
  }
  return rows;
}

void save_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  const std::string csv = report_to_csv(rows);
  KeyValueDoc meta;
  meta.set("format_version", kReportFormatVersion);
  meta.set("kind", "report");
  meta.set("rows", rows.size());
  meta.set("sha256", sha256_hex(csv));
  write_file_atomic(path, csv);
  meta.save(meta_path(path));
}

std::vector<ReportRow> load_report(const std::filesystem::path& path) {
  const auto meta = KeyValueDoc::load(meta_path(path));
  if (meta.get_int("format_version") != kReportFormatVersion || meta.get_string("kind") != "report") {
    throw FormatError("report: unsupported format version or kind in '" + path.string() + ".meta'");
  }
  const std::string csv = read_file(path);
  if (sha256_hex(csv) != meta.get_string("sha256")) {
    throw ChecksumError("report: checksum mismatch for '" + path.string() + "'");
  }
  return report_from_csv(csv);
}

std::string figure_file_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::sample_size: return "fig1a.csv";
    case ScenarioKind::bolus_overestimate: return "fig1b.csv";
    case ScenarioKind::suboptimal_pid: return "fig2a.csv";
    case ScenarioKind::irregular_meals: return "fig2b.csv";
    case ScenarioKind::standard: return "standard.csv";
  }
  return "report.csv";
}

std::string format_summary(const std::vector<ReportRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %10s %-6s %-10s %4s %22s %16s %14s %14s %14s\n", "scenario",
                "parameter", "algo", "group", "n", "reward", "TIR %", "TBR %", "CV %", "failure %");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-18s %10g %-6s %-10s %4zu %11.1f +- %7.1f %6.2f +- %5.2f %5.2f +- %4.2f "
                  "%5.2f +- %4.2f %5.2f +- %4.2f\n",
                  r.scenario.c_str(), r.parameter, r.algorithm.c_str(), r.group.c_str(), r.n_rollouts,
                  r.reward_sum.mean, r.reward_sum.se, r.tir_pct.mean, r.tir_pct.se, r.tbr_pct.mean,
                  r.tbr_pct.se, r.cv_pct.mean, r.cv_pct.se, r.failure_pct.mean, r.failure_pct.se);
    out += buf;
  }
  out += "\nclinical targets (pooled rows): TIR > 70, TBR < 4, CV < 36, failure = 0\n";
  for (const auto& r : rows) {
    if (r.group != "all") continue;
    GlycemicReport g;
    g.tir_pct = r.tir_pct;
    g.tbr_pct = r.tbr_pct;
    g.cv_pct = r.cv_pct;
    g.failure_pct = r.failure_pct;
    const auto f = clinical_flags(g);
    std::snprintf(buf, sizeof buf, "%-18s %10g %-6s TIR %s  TBR %s  CV %s  failure %s\n",
                  r.scenario.c_str(), r.parameter, r.algorithm.c_str(), f.tir_ok ? "ok" : "--",
                  f.tbr_ok ? "ok" : "--", f.cv_ok ? "ok" : "--", f.failure_ok ? "ok" : "--");
    out += buf;
  }
  return out;
}

}  // namespace glucolab
