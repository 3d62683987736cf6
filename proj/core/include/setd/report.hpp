#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setd/experiment.hpp"

namespace setd {

// Across-seed statistics of one (algorithm, step). Diverged seeds are
// excluded from the moments; when every seed diverged the row is a
// sentinel and the moments are not meaningful.
struct AggregateRow {
  std::string algorithm;
  long step = 0;
  int n_seeds = 0;
  int n_diverged = 0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;  // population standard deviation
  double rmspbe_mean = 0.0;
  double rmspbe_std = 0.0;

  bool all_diverged() const { return n_seeds > 0 && n_diverged == n_seeds; }
};

// Throws ConfigError on duplicate (algorithm, seed, step) rows.
std::vector<AggregateRow> aggregate(const LearningCurve& curve);

inline constexpr std::string_view kReportHeader =
    "algorithm,step,n_seeds,n_diverged,rmse_mean,rmse_std,rmspbe_mean,rmspbe_std";

// All-diverged rows print NA in the four statistic columns.
void write_report_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

enum class CurveMetric { kRmse, kRmspbe };
CurveMetric parse_curve_metric(std::string_view text);
std::string_view to_string(CurveMetric metric);

struct ConvergenceStat {
  std::string algorithm;
  CurveMetric metric = CurveMetric::kRmse;
  double threshold = 0.0;
  std::optional<long> first_step;  // first step whose mean is below threshold
};

std::vector<ConvergenceStat> convergence_speed(const std::vector<AggregateRow>& rows,
                                               CurveMetric metric, double threshold);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceStat>& stats);

// Two-column "step mean" files, one per (algorithm, metric), for plotting.
void write_plot_files(const std::filesystem::path& dir, const std::vector<AggregateRow>& rows);

}  // namespace setd
