#include "semnav/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semnav/errors.hpp"

namespace semnav {

BandSeries aggregate_metric(const std::vector<std::vector<MetricsRow>>& runs,
                            const std::string& metric) {
    if (runs.empty()) throw ContractError("aggregate_metric: no runs");
    auto pick = [&metric](const MetricsRow& r) {
        if (metric == "success_rate") return r.success_rate;
        if (metric == "spl") return r.spl;
        if (metric == "mean_reward") return r.mean_reward;
        throw ValueError("aggregate_metric: unknown metric '" + metric + "'");
    };

    BandSeries series;
    series.metric = metric;
    for (const MetricsRow& r : runs[0]) series.frames.push_back(r.frame);
    for (const auto& run : runs) {
        if (run.size() != runs[0].size())
            throw ContractError("aggregate_metric: runs disagree on cadence row count");
        for (size_t i = 0; i < run.size(); ++i)
            if (run[i].frame != series.frames[i])
                throw ContractError("aggregate_metric: runs disagree on cadence frames");
    }
    const double n = static_cast<double>(runs.size());
    for (size_t i = 0; i < series.frames.size(); ++i) {
        double mean = 0.0;
        for (const auto& run : runs) mean += pick(run[i]);
        mean /= n;
        double var = 0.0;
        for (const auto& run : runs) {
            double d = pick(run[i]) - mean;
            var += d * d;
        }
        var /= n;  // population: the seeds are the whole experiment
        series.mean.push_back(mean);
        series.std_dev.push_back(std::sqrt(var));
    }
    return series;
}

std::string band_to_csv(const BandSeries& series) {
    std::ostringstream out;
    out << "frame,mean,std\n";
    char buf[80];
    for (size_t i = 0; i < series.frames.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g",
                      static_cast<long long>(series.frames[i]), series.mean[i], series.std_dev[i]);
        out << buf << '\n';
    }
    return out.str();
}

std::string band_to_svg(const BandSeries& series, const std::string& title) {
    if (series.frames.empty()) throw ContractError("band_to_svg: empty series");
    const double width = 640.0, height = 400.0;
    const double left = 64.0, right = 20.0, top = 36.0, bottom = 44.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double x_max = static_cast<double>(series.frames.back());
    if (x_max <= 0.0) x_max = 1.0;
    double y_min = 0.0, y_max = 0.0;
    for (size_t i = 0; i < series.mean.size(); ++i) {
        y_min = std::min(y_min, series.mean[i] - series.std_dev[i]);
        y_max = std::max(y_max, series.mean[i] + series.std_dev[i]);
    }
    if (y_max <= y_min) y_max = y_min + 1.0;
    double pad = 0.05 * (y_max - y_min);
    y_max += pad;
    if (y_min < 0.0) y_min -= pad;

    auto sx = [&](double f) { return left + plot_w * (f / x_max); };
    auto sy = [&](double v) { return top + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
    char buf[160];
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // band polygon: upper edge left-to-right, lower edge back
    svg << "<polygon fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (size_t i = 0; i < series.frames.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(static_cast<double>(series.frames[i])),
                      sy(series.mean[i] + series.std_dev[i]));
        svg << buf;
    }
    for (size_t i = series.frames.size(); i-- > 0;) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(static_cast<double>(series.frames[i])),
                      sy(series.mean[i] - series.std_dev[i]));
        svg << buf;
    }
    svg << "\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f5fA8\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < series.frames.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(static_cast<double>(series.frames[i])),
                      sy(series.mean[i]));
        svg << buf;
    }
    svg << "\"/>\n";

    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  left, top + plot_h, left + plot_w, top + plot_h);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  left, top, left, top + plot_h);
    svg << buf;
    for (int t = 0; t <= 5; ++t) {
        double fx = x_max * t / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\""
                      " font-size=\"11\">%lld</text>\n",
                      sx(fx), top + plot_h + 16.0, static_cast<long long>(fx));
        svg << buf;
        double vy = y_min + (y_max - y_min) * t / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\""
                      " font-size=\"11\">%.2f</text>\n",
                      left - 6.0, sy(vy) + 4.0, vy);
        svg << buf;
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frames</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void export_plots(const std::vector<std::string>& metrics_csv_paths, const std::string& out_dir) {
    if (metrics_csv_paths.empty()) throw ContractError("export_plots: no input CSVs");
    std::vector<std::vector<MetricsRow>> runs;
    for (const std::string& path : metrics_csv_paths) runs.push_back(metrics_from_csv(path));
    std::filesystem::create_directories(out_dir);
    for (const char* metric : {"success_rate", "spl"}) {
        BandSeries series = aggregate_metric(runs, metric);
        std::ofstream csv(out_dir + "/" + metric + ".csv");
        if (!csv) throw LoadError("cannot write plot csv under '" + out_dir + "'");
        csv << band_to_csv(series);
        std::ofstream svg(out_dir + "/" + metric + ".svg");
        if (!svg) throw LoadError("cannot write plot svg under '" + out_dir + "'");
        svg << band_to_svg(series, std::string(metric) + " (validation)");
    }
}

}  // namespace semnav
