#include "cumbound/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cumbound/combinatorics.hpp"
#include "cumbound/specfun.hpp"

namespace cumbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double binom(int n, int r) { return static_cast<double>(binomial(n, r)); }

// E (X - target)^k from moments about `shift`, where moments[i] = E (X - shift)^i.
double recenter(std::span<const double> moments, double shift, double target, int k) {
  const double d = shift - target;
  double total = 0.0;
  double power = 1.0;  // d^{k-i}, built from i = k downwards
  for (int i = k; i >= 0; --i) {
    total += binom(k, i) * moments[i] * power;
    power *= d;
  }
  return total;
}

// Empirically standardized moments of orders 1..K of one contiguous block.
std::vector<double> block_standardized(std::span<const double> values, int max_order) {
  const double origin = values.front();
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(max_order) + 1);
  for (double x : values) {
    const double y = x - origin;
    double power = 1.0;
    for (int r = 0; r <= max_order; ++r) {
      sums[r].add(power);
      power *= y;
    }
  }
  const double n = static_cast<double>(values.size());
  std::vector<double> shifted(static_cast<std::size_t>(max_order) + 1);
  for (int r = 0; r <= max_order; ++r) shifted[r] = sums[r].value() / n;
  const double mean = origin + shifted[1];
  const double variance = recenter(shifted, origin, mean, 2);
  std::vector<double> out(static_cast<std::size_t>(max_order), kNaN);
  if (!(variance > 0.0)) return out;
  const double sd = std::sqrt(variance);
  for (int r = 1; r <= max_order; ++r) out[r - 1] = recenter(shifted, origin, mean, r) / std::pow(sd, r);
  return out;
}

}  // namespace

SampleSummary summarize(std::span<const double> values, int max_order) {
  if (max_order < 2 || max_order > kMaxSummaryOrder) throw std::invalid_argument("summarize: K must lie in 2..12");
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least two values");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("summarize: non-finite value");

  SampleSummary s;
  s.count = static_cast<std::int64_t>(values.size());
  s.max_order = max_order;
  s.shift = values.front();

  const int top = 2 * max_order;
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(top) + 1);
  for (double x : values) {
    const double y = x - s.shift;
    double power = 1.0;
    for (int r = 0; r <= top; ++r) {
      sums[r].add(power);
      power *= y;
    }
  }
  const double n = static_cast<double>(s.count);
  s.shifted_moments.resize(static_cast<std::size_t>(top) + 1);
  for (int r = 0; r <= top; ++r) s.shifted_moments[r] = sums[r].value() / n;

  s.mean = s.shift + s.shifted_moments[1];
  for (int r = 1; r <= max_order; ++r) {
    s.raw_moments.push_back(recenter(s.shifted_moments, s.shift, 0.0, r));
    s.central_moments.push_back(r == 1 ? 0.0 : recenter(s.shifted_moments, s.shift, s.mean, r));
  }

  // cumulants of order >= 2 are shift invariant, so work from central moments
  std::vector<double> centered = s.central_moments;
  const auto cumulants = cumulants_from_moments(MomentSequence(std::move(centered)));
  s.plugin_cumulants.assign(cumulants.values().begin(), cumulants.values().end());
  s.plugin_cumulants[0] = s.mean;

  const double m2 = s.central_moments[1];
  s.k_statistics.push_back(s.mean);
  s.k_statistics.push_back(n / (n - 1.0) * m2);
  if (s.count >= 3 && max_order >= 3)
    s.k_statistics.push_back(n * n / ((n - 1.0) * (n - 2.0)) * s.central_moments[2]);
  if (s.count >= 4 && max_order >= 4)
    s.k_statistics.push_back(n * n * ((n + 1.0) * s.central_moments[3] - 3.0 * (n - 1.0) * m2 * m2) /
                             ((n - 1.0) * (n - 2.0) * (n - 3.0)));

  const auto batches = static_cast<std::int64_t>(std::floor(std::sqrt(n)));
  s.std_errors.assign(static_cast<std::size_t>(max_order), kNaN);
  if (batches >= 2) {
    std::vector<CompensatedSum> first(static_cast<std::size_t>(max_order));
    std::vector<CompensatedSum> second(static_cast<std::size_t>(max_order));
    std::vector<bool> valid(static_cast<std::size_t>(max_order), true);
    for (std::int64_t b = 0; b < batches; ++b) {
      const std::int64_t lo = s.count * b / batches;
      const std::int64_t hi = s.count * (b + 1) / batches;
      const auto block = block_standardized(values.subspan(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo)), max_order);
      for (int r = 0; r < max_order; ++r) {
        if (std::isnan(block[r])) valid[r] = false;
        first[r].add(block[r]);
        second[r].add(block[r] * block[r]);
      }
    }
    const double bd = static_cast<double>(batches);
    for (int r = 0; r < max_order; ++r) {
      if (!valid[r]) continue;
      const double mean = first[r].value() / bd;
      const double var = std::max(0.0, (second[r].value() - bd * mean * mean) / (bd - 1.0));
      s.std_errors[r] = std::sqrt(var / bd);
    }
  }
  return s;
}

SampleSummary summarize(const SampleBatch& batch, int max_order) { return summarize(batch.values, max_order); }

MomentEstimate standardized_moment(const SampleSummary& summary, int k, const CenterScale& center_scale) {
  if (k < 1 || k > summary.max_order) throw std::invalid_argument("standardized_moment: k exceeds the summary order");
  if (center_scale.mode == CenterScale::Mode::Empirical) {
    const double variance = summary.central_moments[1];
    if (!(variance > 0.0)) throw std::domain_error("standardized_moment: zero sample variance");
    return {summary.central_moments[k - 1] / std::pow(variance, 0.5 * k), summary.std_errors[k - 1]};
  }
  if (!(center_scale.sd > 0.0)) throw std::domain_error("standardized_moment: sd must be > 0");
  const double zk = recenter(summary.shifted_moments, summary.shift, center_scale.mean, k) / std::pow(center_scale.sd, k);
  const double z2k =
      recenter(summary.shifted_moments, summary.shift, center_scale.mean, 2 * k) / std::pow(center_scale.sd, 2 * k);
  const double var = std::max(0.0, z2k - zk * zk);
  return {zk, std::sqrt(var / static_cast<double>(summary.count))};
}

MomentEstimate standardized_gap(const SampleSummary& summary, int k, const CenterScale& center_scale) {
  const auto m = standardized_moment(summary, k, center_scale);
  return {std::fabs(m.value - gaussian_moment(k)), m.se};
}

DecayFit decay_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("decay_fit: need at least three points");
  for (auto [x, gap] : points) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("decay_fit: x must be positive");
    if (!(gap > 0.0) || !std::isfinite(gap)) throw std::invalid_argument("decay_fit: gaps must be positive");
  }
  const double count = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (auto [x, gap] : points) {
    mx += std::log(x);
    my += std::log(gap);
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [x, gap] : points) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(gap) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay_fit: x values must not all coincide");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.points.assign(points.begin(), points.end());
  return fit;
}

}  // namespace cumbound
