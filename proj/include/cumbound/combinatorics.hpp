#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace cumbound {

using uint128 = unsigned __int128;

/// Largest order for which factorials and multinomials are kept exact.
inline constexpr int kMaxExactOrder = 20;

/// An ordered tuple of positive parts summing to `total`.
struct Composition {
  std::vector<int> parts;
  int total = 0;

  friend bool operator==(const Composition&, const Composition&) = default;
};

/// Every composition of k into exactly j parts, each part >= 2, in
/// lexicographic order. Empty when 2j > k.
std::vector<Composition> compositions_min2(int k, int j);

/// Exact k! for 0 <= k <= 34.
uint128 factorial(int k);

/// k! / (k_1! ... k_j!) computed exactly. Requires sum(parts) == k <= 20.
uint128 multinomial(int k, std::span<const int> parts);
uint128 binomial(int n, int r);

/// E N^k for a standard normal N: (k-1)!! for even k, 0 for odd k.
double gaussian_moment(int k);

std::string to_string(uint128 value);

/// One-based sequence of per-order quantities (cumulants or raw moments).
template <typename Tag, typename Real = double>
class OrderSequence {
 public:
  OrderSequence() = default;
  explicit OrderSequence(std::vector<Real> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("sequence must hold at least order 1");
    if constexpr (std::is_floating_point_v<Real>) {
      for (const Real& v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("sequence entries must be finite");
    }
  }

  int max_order() const { return static_cast<int>(values_.size()); }
  const Real& operator[](int order) const { return values_.at(static_cast<std::size_t>(order - 1)); }
  std::span<const Real> values() const { return values_; }

  friend bool operator==(const OrderSequence&, const OrderSequence&) = default;

 private:
  std::vector<Real> values_;
};

struct CumulantTag {};
struct MomentTag {};

template <typename Real = double>
using BasicCumulantSequence = OrderSequence<CumulantTag, Real>;
template <typename Real = double>
using BasicMomentSequence = OrderSequence<MomentTag, Real>;

using CumulantSequence = BasicCumulantSequence<double>;
using MomentSequence = BasicMomentSequence<double>;

namespace detail {

inline void check_order(int order) {
  if (order > kMaxExactOrder)
    throw std::overflow_error("order " + std::to_string(order) + " exceeds exact range (20)");
}

template <typename Real>
Real real_factorial(int k) {
  Real f = 1;
  for (int i = 2; i <= k; ++i) f *= Real(i);
  return f;
}

}  // namespace detail

/// Raw moments E X^1..E X^K from cumulants by the Leonov-Shiryaev sum over
/// compositions with parts >= 1. The composition sum is evaluated by dynamic
/// programming on (number of parts, partial total), which visits every
/// composition's product exactly once in aggregate.
template <typename Real>
BasicMomentSequence<Real> moments_from_cumulants(const BasicCumulantSequence<Real>& cumulants) {
  const int order = cumulants.max_order();
  detail::check_order(order);

  // scaled[r] = Gamma_r / r!
  std::vector<Real> scaled(order + 1, Real(0));
  for (int r = 1; r <= order; ++r) scaled[r] = cumulants[r] / detail::real_factorial<Real>(r);

  // parts_sum[s] holds sum over compositions of s into j parts of prod scaled[k_i]
  std::vector<Real> parts_sum(order + 1, Real(0));
  std::vector<Real> next(order + 1, Real(0));
  std::vector<Real> acc(order + 1, Real(0));
  parts_sum[0] = Real(1);
  Real inv_j_factorial = Real(1);
  for (int j = 1; j <= order; ++j) {
    inv_j_factorial /= Real(j);
    for (int s = 0; s <= order; ++s) next[s] = Real(0);
    for (int s = j; s <= order; ++s) {
      Real sum = Real(0);
      for (int r = 1; r <= s - (j - 1); ++r) sum += parts_sum[s - r] * scaled[r];
      next[s] = sum;
    }
    parts_sum.swap(next);
    for (int s = j; s <= order; ++s) acc[s] += parts_sum[s] * inv_j_factorial;
  }

  std::vector<Real> moments(order);
  for (int k = 1; k <= order; ++k) moments[k - 1] = detail::real_factorial<Real>(k) * acc[k];
  return BasicMomentSequence<Real>(std::move(moments));
}

/// Inverse of moments_from_cumulants via
/// Gamma_n = m_n - sum_{i<n} C(n-1, i-1) Gamma_i m_{n-i}.
template <typename Real>
BasicCumulantSequence<Real> cumulants_from_moments(const BasicMomentSequence<Real>& moments) {
  const int order = moments.max_order();
  detail::check_order(order);
  std::vector<Real> kappa(order + 1, Real(0));
  for (int n = 1; n <= order; ++n) {
    Real value = moments[n];
    for (int i = 1; i < n; ++i) {
      const auto c = binomial(n - 1, i - 1);
      value -= Real(static_cast<std::uint64_t>(c)) * kappa[i] * moments[n - i];
    }
    kappa[n] = value;
  }
  kappa.erase(kappa.begin());
  return BasicCumulantSequence<Real>(std::move(kappa));
}

}  // namespace cumbound
