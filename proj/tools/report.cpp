#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wardwatt::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 50.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

nlohmann::ordered_json to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["config"] = r.config;
    j["split"] = r.split.is_null() ? nlohmann::ordered_json::object() : r.split;
    auto& models = j["models"] = nlohmann::ordered_json::array();
    for (const auto& m : r.models) {
        models.push_back({{"model", m.model}, {"mae", m.mae}, {"rmse", m.rmse}, {"origins", m.origins}});
    }
    auto& balance = j["balance"] = nlohmann::ordered_json::array();
    for (const auto& b : r.balance) {
        balance.push_back({{"model", b.model},
                           {"strategy", b.strategy},
                           {"genes", b.allocation.size()},
                           {"best_fitness", b.best_fitness},
                           {"initial_best_fitness", b.initial_best_fitness},
                           {"mean_abs_deviation_kw", b.mean_abs_deviation},
                           {"max_abs_deviation_kw", b.max_abs_deviation},
                           {"allocation", b.allocation}});
    }
    auto& shap = j["shap"] = nlohmann::ordered_json::array();
    for (const auto& s : r.shap) shap.push_back({{"model", s.model}, {"report", s.report}});
    auto& charts = j["charts"] = nlohmann::ordered_json::array();
    for (const auto& c : r.charts) charts.push_back(c.file);
    // Named in the pipeline overview but without a defined formula.
    j["unreported_metrics"] = {"energy_savings", "cost_reduction"};
    return j;
}

std::string render_svg(const Chart& chart) {
    double lo = INFINITY, hi = -INFINITY;
    std::size_t n = 0;
    for (const auto& s : chart.series) {
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        n = std::max(n, s.values.size());
    }
    if (n == 0) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 1.0, hi += 1.0;
    const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
    auto px = [&](std::size_t i) { return kMargin + (n > 1 ? plot_w * static_cast<double>(i) / (n - 1) : 0.0); };
    auto py = [&](double v) { return kHeight - kMargin - plot_h * (v - lo) / (hi - lo); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << chart.title
      << "</text>\n";
    o << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">" << fmt("%.1f", hi)
      << "</text>\n";
    o << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">" << fmt("%.1f", lo)
      << "</text>\n";
    o << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"end\">hour "
      << (n > 0 ? n - 1 : 0) << "</text>\n";
    o << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">hour 0</text>\n";
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kColors[k % 4];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i) o << ' ';
            o << fmt("%.2f", px(i)) << ',' << fmt("%.2f", py(s.values[i]));
        }
        o << "\"/>\n";
        const double ly = kMargin + 14.0 * static_cast<double>(k);
        o << "<line x1=\"" << kWidth - kMargin - 120 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kMargin - 100
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << kWidth - kMargin - 95 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<ManifestEntry> emit_report(const RunReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::string> files;
    write_file(out_dir / "report.json", to_json(report).dump(2) + "\n");
    files.emplace_back("report.json");

    std::string csv = "model,mae,rmse\n";
    for (const auto& m : report.models) {
        csv += m.model + "," + fmt("%.17g", m.mae) + "," + fmt("%.17g", m.rmse) + "\n";
    }
    write_file(out_dir / "comparison.csv", csv);
    files.emplace_back("comparison.csv");

    for (const auto& chart : report.charts) {
        write_file(out_dir / chart.file, render_svg(chart));
        files.push_back(chart.file);
    }

    std::vector<ManifestEntry> manifest;
    for (const auto& f : files) manifest.push_back({f, std::filesystem::file_size(out_dir / f)});
    nlohmann::ordered_json m;
    auto& list = m["files"] = nlohmann::ordered_json::array();
    for (const auto& e : manifest) list.push_back({{"file", e.file}, {"bytes", e.bytes}});
    auto& timings = m["timings_seconds"] = nlohmann::ordered_json::object();
    for (const auto& t : report.timings) timings[t.stage] = t.seconds;
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
    return manifest;
}

}  // namespace wardwatt::cli
