#include "cumbound/specfun.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cumbound {

namespace {

// B_2, B_4, ..., B_30
constexpr std::array<double, 15> kBernoulliEven = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
};

double factorial_double(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double digamma_asymptotic(double z) {
  const double inv2 = 1.0 / (z * z);
  double power = inv2;
  double series = 0.0;
  for (std::size_t k = 1; k <= kBernoulliEven.size(); ++k) {
    const double term = kBernoulliEven[k - 1] / (2.0 * static_cast<double>(k)) * power;
    series += term;
    if (std::fabs(term) < 1e-18 * std::fabs(series)) break;
    power *= inv2;
  }
  return std::log(z) - 0.5 / z - series;
}

// (-1)^{j+1} (j-1)! z^{-j} [1 + j/(2z) + sum_k B_2k C(2k+j-1, 2k) z^{-2k}]
double polygamma_asymptotic(int j, double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double bracket = 1.0 + 0.5 * j * inv;
  double coeff = 0.5 * j * (j + 1);  // C(j+1, 2)
  double power = inv2;
  for (std::size_t k = 1; k <= kBernoulliEven.size(); ++k) {
    const double term = kBernoulliEven[k - 1] * coeff * power;
    bracket += term;
    if (std::fabs(term) < 1e-18 * std::fabs(bracket)) break;
    const double kk = 2.0 * static_cast<double>(k);
    coeff *= (kk + j) * (kk + j + 1) / ((kk + 1) * (kk + 2));
    power *= inv2;
  }
  const double sign = (j % 2 == 1) ? 1.0 : -1.0;
  return sign * factorial_double(j - 1) * std::pow(z, -j) * bracket;
}

}  // namespace

double polygamma(int order, double z) {
  if (order < 0 || order > kMaxPolygammaOrder)
    throw std::out_of_range("polygamma: order " + std::to_string(order) + " outside 0..30");
  if (!(z > 0.0)) throw std::domain_error("polygamma: argument must be positive");

  const double threshold = 10.0 + order;
  if (order == 0) {
    double shift = 0.0;
    while (z < threshold) {
      shift += 1.0 / z;
      z += 1.0;
    }
    return digamma_asymptotic(z) - shift;
  }

  // psi^{(j)}(z) = psi^{(j)}(z+m) - (-1)^j j! sum_{i<m} (z+i)^{-(j+1)}; both
  // pieces carry the sign (-1)^{j+1}, so magnitudes simply add.
  double shift = 0.0;
  while (z < threshold) {
    shift += std::pow(z, -(order + 1));
    z += 1.0;
  }
  const double sign = (order % 2 == 1) ? 1.0 : -1.0;
  return polygamma_asymptotic(order, z) + sign * factorial_double(order) * shift;
}

double polygamma_bound(int order, double z) {
  if (order < 1) throw std::invalid_argument("polygamma_bound: order must be >= 1");
  if (!(z > 0.0)) throw std::domain_error("polygamma_bound: argument must be positive");
  return factorial_double(order - 1) * std::pow(z, -order) + factorial_double(order) * std::pow(z, -(order + 1));
}

double polygamma_half_sum(std::int64_t n, int order) {
  if (n < 1) throw std::invalid_argument("polygamma_half_sum: n must be >= 1");
  CompensatedSum sum;
  for (std::int64_t k = 1; k <= n; ++k) sum.add(polygamma(order, 0.5 * static_cast<double>(k)));
  return sum.value();
}

}  // namespace cumbound
