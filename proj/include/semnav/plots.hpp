#pragma once

#include <string>
#include <vector>

#include "semnav/trainer.hpp"

namespace semnav {

// One training metric aggregated across seeds at shared cadence marks.
struct BandSeries {
    std::string metric;
    std::vector<long long> frames;
    std::vector<double> mean;
    std::vector<double> std_dev;  // population std across seeds
};

// All runs must share the exact frame column (same cadence); metric is one of
// success_rate, spl, mean_reward.
BandSeries aggregate_metric(const std::vector<std::vector<MetricsRow>>& runs,
                            const std::string& metric);

std::string band_to_csv(const BandSeries& series);

// Line chart with a shaded +-1 std band; plain inline SVG, no external
// renderer or fonts beyond generic sans-serif.
std::string band_to_svg(const BandSeries& series, const std::string& title);

// Reads metrics CSVs (one per seed), writes <metric>.csv and <metric>.svg for
// success_rate and spl under out_dir.
void export_plots(const std::vector<std::string>& metrics_csv_paths, const std::string& out_dir);

}  // namespace semnav
