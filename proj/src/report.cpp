#include "fairtl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairtl {

namespace {

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::string render_report_csv(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("render_report_csv: no rows");
    std::string out = kReportCsvHeader;
    out += "\n";
    for (const auto& r : rows) {
        out += r.method;
        out += "," + fmt_full(r.perc);
        out += "," + r.bias_id;
        out += "," + std::to_string(r.seeds);
        out += "," + fmt_full(r.fd_mean);
        out += ",";
        if (r.seeds >= 2) out += fmt_full(r.fd_std);
        out += "," + fmt_full(r.frechet_mean);
        out += ",";
        if (r.seeds >= 2) out += fmt_full(r.frechet_std);
        out += "," + fmt_full(r.runtime_s);
        out += "\n";
    }
    return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kReportCsvHeader) {
        throw std::runtime_error("report CSV: unexpected header");
    }
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) throw std::runtime_error("report CSV: bad field count");
        ReportRow r;
        r.method = f[0];
        r.perc = std::strtod(f[1].c_str(), nullptr);
        r.bias_id = f[2];
        r.seeds = std::strtoull(f[3].c_str(), nullptr, 10);
        r.fd_mean = std::strtod(f[4].c_str(), nullptr);
        r.fd_std = f[5].empty() ? 0.0 : std::strtod(f[5].c_str(), nullptr);
        r.frechet_mean = std::strtod(f[6].c_str(), nullptr);
        r.frechet_std = f[7].empty() ? 0.0 : std::strtod(f[7].c_str(), nullptr);
        r.runtime_s = std::strtod(f[8].c_str(), nullptr);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("report CSV: no data rows");
    return rows;
}

namespace {

std::string render_metric_svg(const std::vector<ReportRow>& rows, bool use_fd,
                              const std::string& title) {
    if (rows.empty()) throw std::invalid_argument("render svg: no rows");

    const int width = 640, height = 440;
    const double left = 70, right = 610, top = 50, bottom = 390;

    std::set<double> percs;
    std::map<std::string, std::vector<const ReportRow*>> series;  // key: method/bias
    double y_max = 0.0;
    for (const auto& r : rows) {
        percs.insert(r.perc);
        series[r.method + " " + r.bias_id].push_back(&r);
        y_max = std::max(y_max, use_fd ? r.fd_mean : r.frechet_mean);
    }
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.1;
    const double x_min = *percs.begin(), x_max = *percs.rbegin();

    auto x_of = [&](double perc) {
        if (x_max == x_min) return 0.5 * (left + right);
        // perc grids are geometric; plot on a log axis
        const double t = (std::log(perc) - std::log(x_min)) / (std::log(x_max) - std::log(x_min));
        return left + t * (right - left);
    };
    auto y_of = [&](double v) { return bottom - (v / y_max) * (bottom - top); };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";
    svg += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(bottom) + "\" x2=\"" +
           fmt_coord(right) + "\" y2=\"" + fmt_coord(bottom) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(top) + "\" x2=\"" +
           fmt_coord(left) + "\" y2=\"" + fmt_coord(bottom) + "\" stroke=\"black\"/>\n";

    for (double p : percs) {
        const double x = x_of(p);
        svg += "<line x1=\"" + fmt_coord(x) + "\" y1=\"" + fmt_coord(bottom) + "\" x2=\"" +
               fmt_coord(x) + "\" y2=\"" + fmt_coord(bottom + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt_coord(x) + "\" y=\"" + fmt_coord(bottom + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt_tick(p) + "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = y_max * i / 4.0;
        const double y = y_of(v);
        svg += "<line x1=\"" + fmt_coord(left - 5) + "\" y1=\"" + fmt_coord(y) + "\" x2=\"" +
               fmt_coord(left) + "\" y2=\"" + fmt_coord(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt_coord(left - 8) + "\" y=\"" + fmt_coord(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt_tick(v) + "</text>\n";
    }
    svg += "<text x=\"340\" y=\"425\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">perc = |D_ref| / |D_bias|</text>\n";

    int color_idx = 0;
    int legend_y = 60;
    for (auto& [name, points] : series) {
        std::vector<const ReportRow*> pts = points;
        std::sort(pts.begin(), pts.end(),
                  [](const ReportRow* a, const ReportRow* b) { return a->perc < b->perc; });
        const char* color = kColors[color_idx % 6];
        std::string poly = "<polyline fill=\"none\" stroke=\"";
        poly += color;
        poly += "\" stroke-width=\"2\" points=\"";
        for (const ReportRow* p : pts) {
            const double v = use_fd ? p->fd_mean : p->frechet_mean;
            poly += fmt_coord(x_of(p->perc)) + "," + fmt_coord(y_of(v)) + " ";
        }
        poly += "\"/>\n";
        svg += poly;
        for (const ReportRow* p : pts) {
            const double v = use_fd ? p->fd_mean : p->frechet_mean;
            svg += "<circle cx=\"" + fmt_coord(x_of(p->perc)) + "\" cy=\"" +
                   fmt_coord(y_of(v)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        svg += "<rect x=\"490\" y=\"" + std::to_string(legend_y - 9) +
               "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"505\" y=\"" + std::to_string(legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + name + "</text>\n";
        legend_y += 18;
        ++color_idx;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::string render_fd_svg(const std::vector<ReportRow>& rows) {
    return render_metric_svg(rows, true, "Fairness Discrepancy vs perc");
}

std::string render_frechet_svg(const std::vector<ReportRow>& rows) {
    return render_metric_svg(rows, false, "Squared Frechet distance vs perc");
}

void emit_reports(const std::vector<ReportRow>& rows, const std::filesystem::path& out_dir) {
    if (rows.empty()) throw std::invalid_argument("emit_reports: no rows");
    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::filesystem::path& p, const std::string& content) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << content;
        if (!f) throw std::runtime_error("write failed: " + p.string());
    };
    write(out_dir / "report.csv", render_report_csv(rows));
    write(out_dir / "fd_vs_perc.svg", render_fd_svg(rows));
    write(out_dir / "frechet_vs_perc.svg", render_frechet_svg(rows));
}

}  // namespace fairtl
