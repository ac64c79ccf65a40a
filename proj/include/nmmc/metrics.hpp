#pragma once

// Convergence diagnostics (total variation distance, NRMSE over repeated
// runs, log-log decay slope) and the metrics CSV shared by every runner.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nmmc/error.hpp"

namespace nmmc {

namespace detail {

inline void check_normalised(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument(std::string(name) + " has a negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument(std::string(name) + " does not sum to 1");
}

}  // namespace detail

/// Total variation distance, half the l1 distance.
inline double tvd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("tvd: length mismatch");
  detail::check_normalised(p, "tvd: first argument");
  detail::check_normalised(q, "tvd: second argument");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * sum);
}

/**
 * Normalised root mean square error over R >= 2 runs:
 * mean over nodes i of sqrt(mean_r (est_r(i) - truth(i))^2) / truth(i).
 */
inline double nrmse(std::span<const std::vector<double>> estimates, std::span<const double> truth) {
  if (estimates.size() < 2) throw InvalidArgument("nrmse needs at least two runs");
  for (double t : truth)
    if (!(t > 0.0)) throw InvalidArgument("nrmse: truth has a zero entry");
  for (const auto& e : estimates)
    if (e.size() != truth.size()) throw InvalidArgument("nrmse: length mismatch");
  const double runs = static_cast<double>(estimates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double sq = 0.0;
    for (const auto& e : estimates) sq += (e[i] - truth[i]) * (e[i] - truth[i]);
    total += std::sqrt(sq / runs) / truth[i];
  }
  return total / static_cast<double>(truth.size());
}

struct MetricsRow {
  std::uint64_t step = 0;
  double tvd = 0.0;
  std::optional<double> nrmse;
  double unique_queries = 0.0;  ///< query cost (fractional for runners with jump costs)
  double unique_query_pct = 0.0;
  double c_max = 0.0;
  std::uint64_t absorptions = 0;

  bool operator==(const MetricsRow&) const = default;
};

/// Time series of convergence metrics with the provenance of the run.
struct MetricsLog {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;

  bool operator==(const MetricsLog&) const = default;
};

inline constexpr const char* metrics_csv_header = "step,tvd,nrmse,unique_queries,unique_query_pct,c_t_max,absorptions";

inline void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
  out << "# config_hash=" << log.config_hash << '\n' << "# seed=" << log.seed << '\n';
  out << metrics_csv_header << '\n';
  out.precision(17);
  for (const auto& r : log.rows) {
    out << r.step << ',' << r.tvd << ',';
    if (r.nrmse) out << *r.nrmse;
    out << ',' << r.unique_queries << ',' << r.unique_query_pct << ',' << r.c_max << ',' << r.absorptions << '\n';
  }
}

inline MetricsLog read_metrics_csv(std::istream& in) {
  MetricsLog log;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# config_hash=", 0) == 0) log.config_hash = line.substr(14);
      if (line.rfind("# seed=", 0) == 0) log.seed = std::stoull(line.substr(7));
      continue;
    }
    if (!header) {
      if (line != metrics_csv_header) throw IoError("unexpected metrics header: " + line);
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 7) throw IoError("metrics line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) + " fields");
    try {
      MetricsRow r;
      r.step = std::stoull(fields[0]);
      r.tvd = std::stod(fields[1]);
      if (!fields[2].empty()) r.nrmse = std::stod(fields[2]);
      r.unique_queries = std::stod(fields[3]);
      r.unique_query_pct = std::stod(fields[4]);
      r.c_max = std::stod(fields[5]);
      r.absorptions = std::stoull(fields[6]);
      log.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("malformed metrics line " + std::to_string(line_no));
    }
  }
  if (!header) throw IoError("metrics file has no header");
  return log;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  std::size_t clamped = 0;  ///< zero TVD values raised to the clamp before taking logs
};

inline constexpr double tvd_log_clamp = 1e-15;

/// Least-squares slope of log(tvd) against log(step) over the last `tail_fraction` of the rows.
inline SlopeFit loglog_slope(const MetricsLog& log, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("tail fraction must lie in (0, 1]");
  const std::size_t total = log.rows.size();
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(total)));
  if (count < 10) throw InvalidArgument("loglog_slope needs at least 10 checkpoints in the tail, got " + std::to_string(count));

  SlopeFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const std::uint64_t first_step = log.rows[total - count].step;
  bool distinct = false;
  for (std::size_t k = total - count; k < total; ++k) {
    const auto& r = log.rows[k];
    if (r.step == 0) throw InvalidArgument("loglog_slope: step 0 has no logarithm");
    distinct = distinct || r.step != first_step;
    double t = r.tvd;
    if (t < tvd_log_clamp) {
      t = tvd_log_clamp;
      ++fit.clamped;
    }
    const double x = std::log(static_cast<double>(r.step)), y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(count);
  const double denom = m * sxx - sx * sx;
  if (!distinct || !(denom > 0.0)) throw InvalidArgument("loglog_slope: checkpoints share a single step");
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.points = count;
  return fit;
}

}  // namespace nmmc
