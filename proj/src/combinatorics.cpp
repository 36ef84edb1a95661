#include "cumbound/combinatorics.hpp"

#include <algorithm>
#include <numeric>

namespace cumbound {

namespace {

void extend(int remaining, int slots, std::vector<int>& prefix, int total,
            std::vector<Composition>& out) {
  if (slots == 0) {
    if (remaining == 0) out.push_back(Composition{prefix, total});
    return;
  }
  // each of the remaining slots needs at least 2
  const int max_part = remaining - 2 * (slots - 1);
  for (int part = 2; part <= max_part; ++part) {
    prefix.push_back(part);
    extend(remaining - part, slots - 1, prefix, total, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Composition> compositions_min2(int k, int j) {
  if (k < 2) throw std::invalid_argument("compositions_min2: k must be >= 2");
  if (j < 1) throw std::invalid_argument("compositions_min2: j must be >= 1");
  std::vector<Composition> out;
  if (2 * j > k) return out;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(j));
  extend(k, j, prefix, k, out);
  return out;
}

uint128 factorial(int k) {
  if (k < 0) throw std::invalid_argument("factorial of negative number");
  if (k > 34) throw std::overflow_error("factorial: k! exceeds 128 bits for k > 34");
  uint128 f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<uint128>(i);
  return f;
}

uint128 multinomial(int k, std::span<const int> parts) {
  detail::check_order(k);
  int sum = 0;
  for (int part : parts) {
    if (part < 0) throw std::invalid_argument("multinomial: negative part");
    sum += part;
  }
  if (sum != k) throw std::invalid_argument("multinomial: parts do not sum to k");
  uint128 denom = 1;
  for (int part : parts) denom *= factorial(part);
  return factorial(k) / denom;
}

uint128 binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  uint128 value = 1;
  for (int i = 1; i <= r; ++i) value = value * static_cast<uint128>(n - r + i) / static_cast<uint128>(i);
  return value;
}

double gaussian_moment(int k) {
  if (k < 0) throw std::invalid_argument("gaussian_moment: negative order");
  if (k % 2 == 1) return 0.0;
  double value = 1.0;
  for (int i = k - 1; i > 1; i -= 2) value *= static_cast<double>(i);
  return value;
}

std::string to_string(uint128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

}  // namespace cumbound
