#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cumbound/combinatorics.hpp"

using namespace cumbound;
using quad = boost::multiprecision::cpp_bin_float_quad;

namespace {

// m_n = sum_{i=1}^{n} C(n-1, i-1) kappa_i m_{n-i}, m_0 = 1
std::vector<double> moments_by_recursion(const std::vector<double>& kappa) {
  const int order = static_cast<int>(kappa.size());
  std::vector<double> m(order + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= order; ++n)
    for (int i = 1; i <= n; ++i) m[n] += static_cast<double>(binomial(n - 1, i - 1)) * kappa[i - 1] * m[n - i];
  return {m.begin() + 1, m.end()};
}

// Sum over all set partitions of {0..n-1} of the product of block cumulants.
double moment_by_set_partitions(int n, const std::vector<double>& kappa) {
  std::vector<int> block_sizes;
  std::function<double(int)> visit = [&](int element) -> double {
    if (element == n) {
      double product = 1.0;
      for (int s : block_sizes) product *= kappa[s - 1];
      return product;
    }
    double total = 0.0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
      ++block_sizes[b];
      total += visit(element + 1);
      --block_sizes[b];
    }
    block_sizes.push_back(1);
    total += visit(element + 1);
    block_sizes.pop_back();
    return total;
  };
  return visit(0);
}

double stirling2(int n, int k) {
  std::vector<std::vector<double>> s(n + 1, std::vector<double>(n + 1, 0.0));
  s[0][0] = 1.0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  return s[n][k];
}

}  // namespace

TEST_CASE("composition counts match C(k-j-1, j-1)") {
  for (int k = 2; k <= 20; ++k) {
    for (int j = 1; 2 * j <= k; ++j) {
      const auto comps = compositions_min2(k, j);
      CHECK(comps.size() == static_cast<std::size_t>(binomial(k - j - 1, j - 1)));
      std::set<std::vector<int>> distinct;
      for (const auto& c : comps) {
        CHECK(c.total == k);
        CHECK(static_cast<int>(c.parts.size()) == j);
        int sum = 0;
        for (int part : c.parts) {
          CHECK(part >= 2);
          sum += part;
        }
        CHECK(sum == k);
        distinct.insert(c.parts);
      }
      CHECK(distinct.size() == comps.size());
      CHECK(std::is_sorted(comps.begin(), comps.end(),
                           [](const Composition& a, const Composition& b) { return a.parts < b.parts; }));
    }
  }
}

TEST_CASE("compositions edge cases") {
  CHECK(compositions_min2(5, 3).empty());
  CHECK(compositions_min2(4, 2) == std::vector<Composition>{{{2, 2}, 4}});
  CHECK(compositions_min2(6, 2).size() == 3);
  CHECK_THROWS_AS(compositions_min2(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(compositions_min2(4, 0), std::invalid_argument);
}

TEST_CASE("exact integer helpers") {
  CHECK(to_string(factorial(0)) == "1");
  CHECK(to_string(factorial(20)) == "2432902008176640000");
  CHECK(to_string(factorial(25)) == "15511210043330985984000000");
  CHECK(to_string(factorial(34)) == "295232799039604140847618609643520000000");
  CHECK_THROWS_AS(factorial(35), std::overflow_error);
  const std::vector<int> parts{2, 3, 4};
  CHECK(multinomial(9, parts) == factorial(9) / (factorial(2) * factorial(3) * factorial(4)));
  CHECK_THROWS(multinomial(10, parts));
  for (int n = 1; n <= 30; ++n)
    for (int r = 1; r < n; ++r) CHECK(binomial(n, r) == binomial(n - 1, r - 1) + binomial(n - 1, r));
  CHECK(binomial(5, 7) == 0);
}

TEST_CASE("gaussian moments are double factorials") {
  CHECK(gaussian_moment(1) == 0.0);
  CHECK(gaussian_moment(2) == 1.0);
  CHECK(gaussian_moment(4) == 3.0);
  CHECK(gaussian_moment(6) == 15.0);
  CHECK(gaussian_moment(7) == 0.0);
  CHECK(gaussian_moment(12) == 10395.0);
}

TEST_CASE("Gaussian cumulants map to double factorials exactly") {
  std::vector<double> kappa(12, 0.0);
  kappa[1] = 1.0;
  const auto m = moments_from_cumulants(CumulantSequence(kappa));
  for (int k = 1; k <= 12; ++k) CHECK(m[k] == gaussian_moment(k));
}

TEST_CASE("moments agree with the set-partition expansion") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> kappa(8);
    for (double& x : kappa) x = u(gen);
    const auto m = moments_from_cumulants(CumulantSequence(kappa));
    for (int n = 1; n <= 8; ++n) {
      const double oracle = moment_by_set_partitions(n, kappa);
      CHECK(m[n] == doctest::Approx(oracle).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("moments agree with the recursion oracle") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int order = 1 + trial % 12;
    std::vector<double> kappa(order);
    for (double& x : kappa) x = u(gen);
    const auto m = moments_from_cumulants(CumulantSequence(kappa));
    const auto oracle = moments_by_recursion(kappa);
    double scale = 1.0;
    for (double v : oracle) scale = std::max(scale, std::fabs(v));
    for (int n = 1; n <= order; ++n) CHECK(std::fabs(m[n] - oracle[n - 1]) <= 1e-12 * scale);
  }
}

TEST_CASE("Poisson cumulants give Touchard polynomials") {
  for (double lambda : {0.3, 1.0, 2.5}) {
    const auto m = moments_from_cumulants(CumulantSequence(std::vector<double>(10, lambda)));
    for (int n = 1; n <= 10; ++n) {
      double touchard = 0.0;
      for (int k = 1; k <= n; ++k) touchard += stirling2(n, k) * std::pow(lambda, k);
      CHECK(m[n] == doctest::Approx(touchard).epsilon(1e-12));
    }
  }
}

TEST_CASE("round trip in quad precision is exact to 1e-25") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<quad> kappa(10);
    for (auto& x : kappa) x = u(gen);
    const auto back = cumulants_from_moments(moments_from_cumulants(BasicCumulantSequence<quad>(kappa)));
    for (int j = 1; j <= 10; ++j) {
      const quad err = abs(back[j] - kappa[j - 1]) / std::max(quad(1), abs(kappa[j - 1]));
      CHECK(static_cast<double>(err) < 1e-20);
    }
  }
}

TEST_CASE("round trip in double precision relative to the moment scale") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> kappa(10);
    for (double& x : kappa) x = u(gen);
    const auto m = moments_from_cumulants(CumulantSequence(kappa));
    const auto back = cumulants_from_moments(m);
    // A priori error bound: forward errors from the transform of |kappa|,
    // then propagated through kappa_j = m_j - sum C(j-1,i-1) kappa_i m_{j-i}.
    std::vector<double> abs_kappa(10);
    for (int j = 0; j < 10; ++j) abs_kappa[j] = std::fabs(kappa[j]);
    const auto abs_m = moments_from_cumulants(CumulantSequence(abs_kappa));
    const double eps = 0x1.0p-52;
    std::vector<double> dm(11), dk(11);
    for (int j = 1; j <= 10; ++j) {
      dm[j] = 4 * j * eps * abs_m[j];
      double err = dm[j] + 4 * j * eps * std::fabs(m[j]);
      for (int i = 1; i < j; ++i) {
        const double c = static_cast<double>(binomial(j - 1, i - 1));
        err += c * (4 * j * eps * std::fabs(kappa[i - 1] * m[j - i]) + dk[i] * std::fabs(m[j - i]) +
                    std::fabs(kappa[i - 1]) * dm[j - i]);
      }
      dk[j] = err;
      CHECK(std::fabs(back[j] - kappa[j - 1]) <= dk[j]);
    }
  }
}

TEST_CASE("cumulants of a point mass") {
  const auto k = cumulants_from_moments(MomentSequence({2.0, 4.0, 8.0, 16.0}));
  CHECK(k[1] == 2.0);
  CHECK(k[2] == 0.0);
  CHECK(k[3] == 0.0);
  CHECK(k[4] == 0.0);
}

TEST_CASE("sequence validation") {
  CHECK_THROWS_AS(CumulantSequence(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(CumulantSequence({1.0, NAN}), std::invalid_argument);
  CHECK_THROWS_AS(moments_from_cumulants(CumulantSequence(std::vector<double>(21, 0.0))), std::overflow_error);
  CHECK_THROWS_AS(cumulants_from_moments(MomentSequence(std::vector<double>(21, 1.0))), std::overflow_error);
}
