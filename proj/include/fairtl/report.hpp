#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fairtl {

/// One aggregated grid cell group: a method at one (bias, perc) point,
/// averaged over seeds.
struct ReportRow {
    std::string method;
    double perc = 0.0;
    std::string bias_id;
    std::size_t seeds = 0;
    double fd_mean = 0.0;
    double fd_std = 0.0;  // only meaningful when seeds >= 2
    double frechet_mean = 0.0;
    double frechet_std = 0.0;
    double runtime_s = 0.0;
};

inline constexpr const char* kReportCsvHeader =
    "method,perc,bias_id,seeds,fd_mean,fd_std,frechet_mean,frechet_std,runtime_s";

/// Full-precision decimal (17 significant digits). std fields are left
/// empty when fewer than two seeds were aggregated.
std::string render_report_csv(const std::vector<ReportRow>& rows);

std::vector<ReportRow> parse_report_csv(const std::string& csv);

/// Line plots of a metric against perc, one polyline per (method, bias).
/// Pure functions of the rows: regenerating from a parsed CSV is
/// byte-identical. runtime_s never appears in a plot.
std::string render_fd_svg(const std::vector<ReportRow>& rows);
std::string render_frechet_svg(const std::vector<ReportRow>& rows);

/// Writes report.csv, fd_vs_perc.svg and frechet_vs_perc.svg.
void emit_reports(const std::vector<ReportRow>& rows, const std::filesystem::path& out_dir);

}  // namespace fairtl
