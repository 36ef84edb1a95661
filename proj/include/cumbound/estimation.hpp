#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cumbound/simulators.hpp"

namespace cumbound {

inline constexpr int kMaxSummaryOrder = 12;

/// Moments of one sample. Vectors indexed by order - 1.
struct SampleSummary {
  std::int64_t count = 0;
  int max_order = 0;
  double mean = 0.0;
  std::vector<double> raw_moments;       // E X^r, r = 1..K
  std::vector<double> central_moments;   // E (X - mean)^r, r = 1..K
  std::vector<double> plugin_cumulants;  // from the empirical moments
  std::vector<double> k_statistics;      // unbiased k_1..k_4, as far as count allows
  std::vector<double> std_errors;        // batch-means SE of the standardized moments, r = 1..K

  /// Sample origin and E (X - shift)^r for r = 0..2K, kept so that the
  /// sample can be standardized against externally supplied mean and sd.
  double shift = 0.0;
  std::vector<double> shifted_moments;
};

/// Moments up to order K (2..12). Power sums are accumulated about the first
/// value. Standard errors come from floor(sqrt(count)) contiguous batches and
/// are NaN when fewer than two batches exist.
SampleSummary summarize(std::span<const double> values, int max_order);
SampleSummary summarize(const SampleBatch& batch, int max_order);

/// Standardization either by the sample's own mean and sd or by exact values.
struct CenterScale {
  enum class Mode { Empirical, Exact };
  Mode mode = Mode::Empirical;
  double mean = 0.0;
  double sd = 1.0;

  static CenterScale empirical() { return {}; }
  static CenterScale exact(double mean, double sd) { return {Mode::Exact, mean, sd}; }
};

struct MomentEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// Estimate of E Z^k. In exact mode the SE is the i.i.d. value
/// sqrt((E Z^{2k} - (E Z^k)^2) / count); otherwise it is the batch SE.
MomentEstimate standardized_moment(const SampleSummary& summary, int k, const CenterScale& center_scale);

/// |E Z^k - E N^k| with its standard error.
MomentEstimate standardized_gap(const SampleSummary& summary, int k, const CenterScale& center_scale);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Least squares of log gap on log x over at least three points with x > 0
/// and gap > 0.
DecayFit decay_fit(std::span<const std::pair<double, double>> points);

}  // namespace cumbound
