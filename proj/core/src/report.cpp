#include "setd/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "setd/csv.hpp"
#include "setd/errors.hpp"

namespace setd {
namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double stddev() const {
    if (n == 0) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / n - m * m));
  }
};

std::string sanitize(std::string name) {
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return name;
}

}  // namespace

std::vector<AggregateRow> aggregate(const LearningCurve& curve) {
  // Algorithms keep first-seen order; steps are ascending within each.
  std::vector<std::string> order;
  std::map<std::string, std::map<long, std::vector<const CurveRow*>>> groups;
  std::set<std::tuple<std::string, std::uint64_t, long>> seen;
  for (const auto& row : curve) {
    if (!seen.emplace(row.algorithm, row.seed, row.step).second) {
      throw ConfigError("duplicate row for " + row.algorithm + " seed " + std::to_string(row.seed) +
                        " step " + std::to_string(row.step));
    }
    if (!groups.count(row.algorithm)) order.push_back(row.algorithm);
    groups[row.algorithm][row.step].push_back(&row);
  }

  std::vector<AggregateRow> out;
  for (const auto& algorithm : order) {
    for (const auto& [step, rows] : groups.at(algorithm)) {
      AggregateRow agg;
      agg.algorithm = algorithm;
      agg.step = step;
      Moments rmse_m, rmspbe_m;
      for (const CurveRow* r : rows) {
        ++agg.n_seeds;
        if (r->diverged || !std::isfinite(r->rmse) || !std::isfinite(r->rmspbe)) {
          ++agg.n_diverged;
          continue;
        }
        rmse_m.add(r->rmse);
        rmspbe_m.add(r->rmspbe);
      }
      agg.rmse_mean = rmse_m.mean();
      agg.rmse_std = rmse_m.stddev();
      agg.rmspbe_mean = rmspbe_m.mean();
      agg.rmspbe_std = rmspbe_m.stddev();
      out.push_back(std::move(agg));
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.step << ',' << r.n_seeds << ',' << r.n_diverged << ',';
    if (r.all_diverged()) {
      out << "NA,NA,NA,NA\n";
      continue;
    }
    out << csv::format_double(r.rmse_mean) << ',' << csv::format_double(r.rmse_std) << ','
        << csv::format_double(r.rmspbe_mean) << ',' << csv::format_double(r.rmspbe_std) << '\n';
  }
}

CurveMetric parse_curve_metric(std::string_view text) {
  if (text == "rmse") return CurveMetric::kRmse;
  if (text == "rmspbe") return CurveMetric::kRmspbe;
  throw ConfigError("unknown metric '" + std::string(text) + "' (expected rmse or rmspbe)");
}

std::string_view to_string(CurveMetric metric) {
  return metric == CurveMetric::kRmse ? "rmse" : "rmspbe";
}

std::vector<ConvergenceStat> convergence_speed(const std::vector<AggregateRow>& rows,
                                               CurveMetric metric, double threshold) {
  std::vector<ConvergenceStat> stats;
  for (const auto& r : rows) {
    if (stats.empty() || stats.back().algorithm != r.algorithm) {
      stats.push_back({r.algorithm, metric, threshold, std::nullopt});
    }
    ConvergenceStat& s = stats.back();
    if (s.first_step || r.all_diverged()) continue;
    const double value = metric == CurveMetric::kRmse ? r.rmse_mean : r.rmspbe_mean;
    if (value < threshold) s.first_step = r.step;
  }
  return stats;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceStat>& stats) {
  out << "algorithm,metric,threshold,first_step\n";
  for (const auto& s : stats) {
    out << s.algorithm << ',' << to_string(s.metric) << ',' << csv::format_double(s.threshold) << ',';
    if (s.first_step) {
      out << *s.first_step;
    } else {
      out << "never";
    }
    out << '\n';
  }
}

void write_plot_files(const std::filesystem::path& dir, const std::vector<AggregateRow>& rows) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::pair<std::ofstream, std::ofstream>> files;
  for (const auto& r : rows) {
    auto it = files.find(r.algorithm);
    if (it == files.end()) {
      const std::string base = sanitize(r.algorithm);
      std::ofstream a(dir / (base + "_rmse.dat"));
      std::ofstream b(dir / (base + "_rmspbe.dat"));
      if (!a || !b) throw ConfigError("cannot write plot files in " + dir.string());
      it = files.emplace(r.algorithm, std::make_pair(std::move(a), std::move(b))).first;
    }
    if (r.all_diverged()) continue;
    it->second.first << r.step << ' ' << csv::format_double(r.rmse_mean) << '\n';
    it->second.second << r.step << ' ' << csv::format_double(r.rmspbe_mean) << '\n';
  }
}

}  // namespace setd
