#include "wormbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wormbench/errors.hpp"

namespace wormbench {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw AnalysisError("least squares needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw AnalysisError("least squares: all x values equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // A perfectly flat response is fitted exactly.
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::vector<std::size_t> default_levels(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t m = 1; m * 10 <= n; m *= 2) out.push_back(m);
  if (out.size() < 4) throw AnalysisError("series of " + std::to_string(n) + " bins is too short for 4 aggregation levels");
  return out;
}

HurstEstimate estimate_hurst(const std::vector<double>& series, const std::vector<std::size_t>& levels) {
  if (levels.size() < 4) throw AnalysisError("Hurst estimate needs at least 4 aggregation levels");
  const std::size_t max_level = *std::max_element(levels.begin(), levels.end());
  if (*std::min_element(levels.begin(), levels.end()) == 0) {
    throw AnalysisError("aggregation levels must be positive");
  }
  if (series.size() < 10 * max_level) {
    throw AnalysisError("series of " + std::to_string(series.size()) + " bins is shorter than 10x the largest level");
  }
  double mean = 0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  const bool constant = std::all_of(series.begin(), series.end(), [&](double v) { return v == series.front(); });
  if (constant || mean == 0) throw AnalysisError("Hurst estimate undefined for a constant series");

  HurstEstimate est;
  std::vector<double> lx, ly;
  for (std::size_t m : levels) {
    const std::size_t blocks = series.size() / m;
    double s = 0, s2 = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      double acc = 0;
      for (std::size_t i = b * m; i < (b + 1) * m; ++i) acc += series[i] / mean;
      acc /= static_cast<double>(m);
      s += acc;
      s2 += acc * acc;
    }
    const double k = static_cast<double>(blocks);
    const double var = (s2 - s * s / k) / (k - 1);
    if (!(var > 0)) throw AnalysisError("zero variance at aggregation level " + std::to_string(m));
    est.levels.push_back(m);
    est.variances.push_back(var);
    lx.push_back(std::log10(static_cast<double>(m)));
    ly.push_back(std::log10(var));
  }
  const LinearFit fit = least_squares(lx, ly);
  est.beta = -fit.slope;
  est.h = 1.0 - est.beta / 2.0;
  est.r2 = fit.r2;
  return est;
}

HurstEstimate estimate_hurst(const std::vector<double>& series) {
  return estimate_hurst(series, default_levels(series.size()));
}

PowerLawFit degree_powerlaw_fit(const std::vector<std::uint32_t>& degrees, std::optional<std::uint32_t> min_degree) {
  if (degrees.size() < 50) throw AnalysisError("degree fit needs at least 50 nodes");
  std::vector<std::uint32_t> d = degrees;
  std::sort(d.begin(), d.end());
  if (d.front() == 0) throw AnalysisError("degree fit: isolated node");
  PowerLawFit fit;
  fit.min_degree = min_degree ? *min_degree : d[d.size() / 2];
  const double n = static_cast<double>(d.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < d.size();) {
    std::size_t j = i;
    while (j < d.size() && d[j] == d[i]) ++j;
    if (d[i] >= fit.min_degree) {
      // Fraction of nodes with degree >= d[i].
      lx.push_back(std::log10(static_cast<double>(d[i])));
      ly.push_back(std::log10(static_cast<double>(d.size() - i) / n));
    }
    i = j;
  }
  fit.points = lx.size();
  if (fit.points < 3) {
    fit.degenerate = true;
    return fit;
  }
  const LinearFit lf = least_squares(lx, ly);
  fit.exponent = -lf.slope;
  fit.r2 = lf.r2;
  return fit;
}

TimeSeries infection_curve(const std::vector<InfectionRecord>& records, SimTime start, SimTime bin, SimTime end) {
  if (bin <= SimTime{}) throw AnalysisError("infection curve bin must be positive");
  if (end < start) throw AnalysisError("infection curve ends before it starts");
  // First infection time of each distinct victim.
  std::vector<std::pair<SimTime, std::uint32_t>> sorted;
  for (const auto& r : records) sorted.emplace_back(r.time, r.victim.value);
  std::sort(sorted.begin(), sorted.end());
  std::vector<SimTime> firsts;
  std::set<std::uint32_t> seen;
  for (const auto& [t, v] : sorted)
    if (seen.insert(v).second) firsts.push_back(t);

  TimeSeries ts;
  ts.bin = bin;
  std::size_t k = 0;
  for (SimTime t = start; t <= end; t += bin) {
    while (k < firsts.size() && firsts[k] <= t) ++k;
    ts.values.push_back(1.0 + static_cast<double>(k));
  }
  return ts;
}

TimeSeries infection_curve(std::istream& ground_truth, SimTime start, SimTime bin, SimTime end) {
  return infection_curve(read_ground_truth(ground_truth), start, bin, end);
}

TimeSeries goodput(const std::vector<FlowRecord>& flows, const FlowSelector& select, SimTime window, SimTime end) {
  if (window <= SimTime{}) throw AnalysisError("goodput window must be positive");
  const auto nbins = static_cast<std::size_t>((end.ns() + window.ns() - 1) / window.ns());
  TimeSeries ts;
  ts.bin = window;
  ts.values.assign(nbins, 0.0);
  for (const auto& f : flows) {
    if (!select(f) || f.delivered_bytes == 0) continue;
    const std::int64_t s = f.start.ns();
    const std::int64_t e = std::min(f.end == SimTime::max() ? end.ns() : f.end.ns(), end.ns());
    const double bits = static_cast<double>(f.delivered_bytes) * 8.0;
    if (e <= s) {
      const auto b = static_cast<std::size_t>(s / window.ns());
      if (b < nbins) ts.values[b] += bits;
      continue;
    }
    const double rate = bits / static_cast<double>(e - s);  // bits per ns
    for (auto b = static_cast<std::size_t>(s / window.ns()); b < nbins; ++b) {
      const std::int64_t lo = std::max<std::int64_t>(s, static_cast<std::int64_t>(b) * window.ns());
      const std::int64_t hi = std::min<std::int64_t>(e, static_cast<std::int64_t>(b + 1) * window.ns());
      if (hi <= lo) break;
      ts.values[b] += rate * static_cast<double>(hi - lo);
    }
  }
  for (auto& v : ts.values) v /= window.seconds();
  return ts;
}

std::optional<double> mean_flow_goodput(const std::vector<FlowRecord>& flows, const FlowSelector& select) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& f : flows) {
    if (!f.completed || !select(f) || f.end <= f.start) continue;
    sum += f.goodput_bps();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace wormbench
