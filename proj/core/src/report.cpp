#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aki/csv.hpp"
#include "aki/errors.hpp"
#include "aki/models.hpp"
#include "aki/pipeline.hpp"

namespace fs = std::filesystem;

namespace aki {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

double lerp(double lo, double hi, double t) { return lo + (hi - lo) * t; }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// Minimal line chart: axes, frame, per-series polyline, legend.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const auto px = [&](double x) {
        return lerp(kMargin, kWidth - kMargin, (x - xmin) / (xmax - xmin));
    };
    const auto py = [&](double y) {
        return lerp(kHeight - kMargin, kMargin, (y - ymin) / (ymax - ymin));
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "' font-family='sans-serif' font-size='12'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    svg << "<rect x='" << kMargin << "' y='" << kMargin << "' width='" << kWidth - 2 * kMargin
        << "' height='" << kHeight - 2 * kMargin << "' fill='none' stroke='#333'/>\n";

    for (int t = 0; t <= 4; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 4.0;
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        svg << "<text x='" << px(fx) << "' y='" << kHeight - kMargin + 18
            << "' text-anchor='middle'>" << fmt(fx) << "</text>\n";
        svg << "<text x='" << kMargin - 8 << "' y='" << py(fy) + 4
            << "' text-anchor='end'>" << fmt(fy) << "</text>\n";
    }
    svg << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12 << "' text-anchor='middle'>"
        << x_label << "</text>\n";
    svg << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
        << kHeight / 2 << ")'>" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            svg << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        svg << "'/>\n";
        if (!series[s].label.empty()) {
            const double ly = kMargin + 16.0 + 16.0 * static_cast<double>(s);
            svg << "<line x1='" << kWidth - kMargin - 120 << "' y1='" << ly << "' x2='"
                << kWidth - kMargin - 96 << "' y2='" << ly << "' stroke='" << color
                << "' stroke-width='2'/>\n";
            svg << "<text x='" << kWidth - kMargin - 90 << "' y='" << ly + 4 << "'>"
                << series[s].label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::pair<std::string, double>>& bars) {
    double ymin = 0.0, ymax = 0.0;
    for (const auto& [_, v] : bars) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    if (ymax == ymin) ymax = ymin + 1.0;

    const auto py = [&](double y) {
        return lerp(kHeight - kMargin, kMargin, (y - ymin) / (ymax - ymin));
    };
    const double span = kWidth - 2 * kMargin;
    const double slot = span / std::max<std::size_t>(bars.size(), 1);

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "' font-family='sans-serif' font-size='11'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    svg << "<line x1='" << kMargin << "' y1='" << py(0.0) << "' x2='" << kWidth - kMargin
        << "' y2='" << py(0.0) << "' stroke='#333'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        svg << "<text x='" << kMargin - 8 << "' y='" << py(fy) + 4 << "' text-anchor='end'>"
            << fmt(fy) << "</text>\n";
    }
    svg << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
        << kHeight / 2 << ")'>" << y_label << "</text>\n";

    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double x0 = kMargin + slot * static_cast<double>(i) + slot * 0.15;
        const double v = bars[i].second;
        const double top = py(std::max(v, 0.0));
        const double bot = py(std::min(v, 0.0));
        svg << "<rect x='" << x0 << "' y='" << top << "' width='" << slot * 0.7 << "' height='"
            << std::max(bot - top, 0.5) << "' fill='" << (v >= 0 ? "#1f77b4" : "#d62728")
            << "'/>\n";
        const double lx = x0 + slot * 0.35;
        svg << "<text x='" << lx << "' y='" << kHeight - kMargin + 14
            << "' text-anchor='end' transform='rotate(-45 " << lx << ' ' << kHeight - kMargin + 14
            << ")'>" << bars[i].first << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

csv::Table read_csv(const fs::path& path) { return csv::read_file(path.string()); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write artifact: " + path.string());
    out << text;
}

} // namespace

void stage_report(const PipelineConfig& cfg) {
    const fs::path dir(cfg.out_dir);

    // ROC overlay across model families
    std::vector<Series> roc_series;
    for (const auto family : cfg.models.families) {
        const std::string fname = family_name(family);
        const fs::path roc = dir / ("roc_" + fname + ".csv");
        if (!fs::exists(roc)) continue;
        csv::Table t = read_csv(roc);
        Series s;
        s.label = fname;
        const auto fpr = t.column("fpr"), tpr = t.column("tpr");
        for (const auto& row : t.rows) {
            s.x.push_back(std::stod(row[fpr]));
            s.y.push_back(std::stod(row[tpr]));
        }
        roc_series.push_back(std::move(s));
    }
    if (!roc_series.empty()) {
        Series diag{"", {0.0, 1.0}, {0.0, 1.0}};
        roc_series.push_back(diag);
        write_text(dir / "roc.svg",
                   line_chart("ROC curves (test split)", "false positive rate",
                              "true positive rate", roc_series));
    }

    // Ablation deltas as a bar chart
    const fs::path ab = dir / "ablation.csv";
    if (fs::exists(ab)) {
        csv::Table t = read_csv(ab);
        const auto feat = t.column("feature"), delta = t.column("delta_auc");
        std::vector<std::pair<std::string, double>> bars;
        for (const auto& row : t.rows)
            bars.emplace_back(row[feat], row[delta].empty() ? 0.0 : std::stod(row[delta]));
        std::sort(bars.begin(), bars.end(),
                  [](const auto& a, const auto& b) { return a.second > b.second; });
        write_text(dir / "ablation.svg",
                   bar_chart("Feature ablation: AUROC drop when removed", "delta AUROC", bars));
    }

    // One ALE plot per emitted curve
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("ale_", 0) != 0 || entry.path().extension() != ".csv") continue;
        const std::string feature = name.substr(4, name.size() - 8);
        csv::Table t = read_csv(entry.path());
        Series s;
        const auto edge = t.column("edge"), effect = t.column("effect");
        for (const auto& row : t.rows) {
            s.x.push_back(std::stod(row[edge]));
            s.y.push_back(std::stod(row[effect]));
        }
        write_text(dir / ("ale_" + feature + ".svg"),
                   line_chart("ALE: " + feature, feature + " (standardized)",
                              "accumulated local effect", {s}));
    }
}

} // namespace aki
