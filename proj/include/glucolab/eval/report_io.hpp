#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glucolab/eval/scenario.hpp"

namespace glucolab {

inline constexpr int kReportFormatVersion = 1;

/// One line of a report table: an algorithm at a scenario point, pooled over
/// all patients ("all") or restricted to one age group.
struct ReportRow {
  std::string scenario;
  double parameter = 0.0;
  std::string algorithm;
  std::string group;
  std::size_t n_rollouts = 0;
  MeanSe reward_sum, tir_pct, tbr_pct, cv_pct, failure_pct;
};

std::vector<ReportRow> report_rows(const ScenarioResult& result);
std::vector<ReportRow> report_rows(const std::string& scenario, double parameter,
                                   const std::string& algorithm, const GlycemicReport& report);

std::string report_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_from_csv(const std::string& csv);

/// CSV plus a `.meta` sidecar with format version and checksum.
void save_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> load_report(const std::filesystem::path& path);

/// fig1a.csv, fig1b.csv, fig2a.csv, fig2b.csv; standard.csv for the standard scenario.
std::string figure_file_name(ScenarioKind kind);

/// Human-readable table with clinical-target flags.
std::string format_summary(const std::vector<ReportRow>& rows);

}  // namespace glucolab
