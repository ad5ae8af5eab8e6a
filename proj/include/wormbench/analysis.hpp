#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wormbench/network.hpp"
#include "wormbench/worm.hpp"

namespace wormbench {

struct TimeSeries {
  SimTime bin;
  std::vector<double> values;
};

struct HurstEstimate {
  double h = 0.0;
  double beta = 0.0;  // slope of log variance against log level
  double r2 = 0.0;
  std::vector<std::size_t> levels;
  std::vector<double> variances;
  std::string method = "aggregated-variance";
  bool meaningful() const { return r2 >= 0.9; }
};

// Aggregation levels 1, 2, 4, ... up to n/10, at least 4 of them.
// Throws AnalysisError when the series is too short for four levels.
std::vector<std::size_t> default_levels(std::size_t n);

// Aggregated-variance Hurst estimate. Each level m averages non-overlapping
// blocks of m bins of the mean-normalized series; H = 1 - beta/2 where beta
// is the negated least-squares slope of log variance on log m.
// Throws AnalysisError: fewer than 4 levels, series shorter than 10x the
// largest level, or a constant series.
HurstEstimate estimate_hurst(const std::vector<double>& series, const std::vector<std::size_t>& levels);
HurstEstimate estimate_hurst(const std::vector<double>& series);

struct PowerLawFit {
  double exponent = 0.0;  // magnitude of the CCDF slope
  double r2 = 0.0;
  std::uint32_t min_degree = 0;
  std::size_t points = 0;  // distinct degrees in the fit
  bool degenerate = false;  // fewer than 3 distinct degrees in the fit range
};

// Least-squares line through log10 CCDF(d) against log10 d, over distinct
// degrees d >= min_degree (default: the median degree). Throws AnalysisError
// for fewer than 50 nodes or zero degrees.
PowerLawFit degree_powerlaw_fit(const std::vector<std::uint32_t>& degrees,
                                std::optional<std::uint32_t> min_degree = std::nullopt);

// Cumulative infected hosts sampled at start, start + bin, ... up to end:
// the origin from `start` plus each distinct victim from its record time.
TimeSeries infection_curve(const std::vector<InfectionRecord>& records, SimTime start, SimTime bin, SimTime end);
// Same from a ground-truth CSV; AnalysisError carries the bad line number.
TimeSeries infection_curve(std::istream& ground_truth, SimTime start, SimTime bin, SimTime end);

// Background goodput in bits/s per window over [0, end). Each selected
// flow's delivered bytes are spread evenly over its lifetime; unfinished
// flows count up to `end`.
using FlowSelector = std::function<bool(const FlowRecord&)>;
TimeSeries goodput(const std::vector<FlowRecord>& flows, const FlowSelector& select, SimTime window, SimTime end);
// Mean per-flow goodput of the selected completed flows; nullopt when none.
std::optional<double> mean_flow_goodput(const std::vector<FlowRecord>& flows, const FlowSelector& select);

// Simple least squares y = a + b x with coefficient of determination.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wormbench
