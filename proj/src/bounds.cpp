#include "cumbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cumbound/combinatorics.hpp"

namespace cumbound {

GrowthSpec GrowthSpec::uniform(double delta, double value, int max_order, double gamma, ConstantForm form) {
  GrowthSpec spec;
  spec.gamma = gamma;
  spec.delta = delta;
  spec.form = form;
  spec.constants.assign(static_cast<std::size_t>(std::max(max_order - 1, 0)), value);
  spec.validate();
  return spec;
}

double GrowthSpec::constant(int order) const {
  if (order < 2 || order > max_order())
    throw std::out_of_range("GrowthSpec: no constant for order " + std::to_string(order));
  return constants[static_cast<std::size_t>(order - 2)];
}

void GrowthSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("GrowthSpec: delta must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("GrowthSpec: gamma must be >= 0");
  for (double c : constants)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("GrowthSpec: constants must be positive");
}

void DnaSpec::validate() const {
  if (!(n_count > 0.0)) throw std::invalid_argument("DnaSpec: N must be > 0");
  if (!(degree >= 1.0)) throw std::invalid_argument("DnaSpec: D must be >= 1");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("DnaSpec: A must be >= 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("DnaSpec: sigma^2 must be > 0");
}

double coefficient_A(int j, int k, const GrowthSpec& spec) {
  if (j < 1) throw std::invalid_argument("coefficient_A: j must be >= 1");
  if (2 * j > k) throw std::invalid_argument("coefficient_A: requires 2j <= k");
  detail::check_order(k);
  spec.validate();

  double sum = 0.0;
  for (const Composition& c : compositions_min2(k, j)) {
    double product = static_cast<double>(multinomial(k, c.parts));
    for (int part : c.parts) product *= spec.constant(part);
    sum += product;
  }
  sum /= static_cast<double>(factorial(j));
  if (spec.form == ConstantForm::Factorial)
    sum *= std::pow(static_cast<double>(factorial(k)), 1.0 + spec.gamma);
  return sum;
}

double moment_gap_bound(int k, const GrowthSpec& spec) {
  if (k < 3) throw std::invalid_argument("moment_gap_bound: k must be >= 3");
  const int j_max = (k - 1) / 2;  // ceil(k/2 - 1)
  double bound = 0.0;
  for (int j = 1; j <= j_max; ++j) bound += coefficient_A(j, k, spec) * std::pow(spec.delta, -(k - 2 * j));
  return bound;
}

LeadingBound leading_bound(int k, const GrowthSpec& spec) {
  if (k < 3) throw std::invalid_argument("leading_bound: k must be >= 3");
  LeadingBound out;
  out.rate_exponent = (k % 2 == 0) ? 2 : 1;
  for (int j = 1; j <= (k - 1) / 2; ++j) out.constant += coefficient_A(j, k, spec);
  return out;
}

double bernstein_delta(double big_k, std::span<const double> sigmas) {
  if (!(big_k > 0.0)) throw std::invalid_argument("bernstein_delta: K must be > 0");
  if (sigmas.empty()) throw std::invalid_argument("bernstein_delta: empty sigma list");
  double sum_sq = 0.0;
  double max_sigma = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw std::invalid_argument("bernstein_delta: sigmas must be > 0");
    sum_sq += s * s;
    max_sigma = std::max(max_sigma, s);
  }
  return std::sqrt(sum_sq) / (2.0 * std::max(big_k, max_sigma));
}

double dna_constant(int j) {
  if (j < 1) throw std::invalid_argument("dna_constant: j must be >= 1");
  return std::pow(2.0, j - 1) * std::pow(static_cast<double>(j), j - 2);
}

double dna_cumulant_bound(int j, const DnaSpec& spec) {
  if (j < 3 || j > kMaxExactOrder) throw std::invalid_argument("dna_cumulant_bound: j must lie in 3..20");
  spec.validate();
  return dna_constant(j) * spec.n_count * std::pow(spec.degree, j - 1) * std::pow(spec.amplitude, j) /
         std::pow(spec.sigma2, 0.5 * j);
}

}  // namespace cumbound
