#pragma once

#include <cmath>
#include <cstdint>

namespace cumbound {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Highest polygamma order accepted by polygamma().
inline constexpr int kMaxPolygammaOrder = 30;

/// Argument of a polygamma evaluation.
struct PolygammaQuery {
  int order = 0;
  double argument = 1.0;
};

/// psi^{(order)}(z) for real z > 0, relative accuracy about 1e-13 away from
/// the zero of the digamma function. Order 0 is the digamma function.
///
/// Arguments below 10 + order are shifted upward with the recurrence
/// psi^{(j)}(z + 1) = psi^{(j)}(z) + (-1)^j j! / z^{j+1}, then the asymptotic
/// expansion in 1/z with Bernoulli numbers through B_30 is summed.
double polygamma(int order, double z);
inline double polygamma(const PolygammaQuery& q) { return polygamma(q.order, q.argument); }
inline double digamma(double z) { return polygamma(0, z); }

/// Upper bound (j-1)!/z^j + j!/z^{j+1} on |psi^{(j)}(z)|, valid for z > 0, j >= 1.
double polygamma_bound(int order, double z);

/// sum_{k=1}^{n} psi^{(order)}(k / 2).
double polygamma_half_sum(std::int64_t n, int order);

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cumbound
