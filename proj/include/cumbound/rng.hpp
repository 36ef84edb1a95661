#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace cumbound {

/// Philox4x64-10 block function.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const auto [hi0, lo0] = mulhilo(kMul0, ctr[0]);
      const auto [hi1, lo1] = mulhilo(kMul1, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  struct HiLo {
    std::uint64_t hi;
    std::uint64_t lo;
  };
  static HiLo mulhilo(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(product >> 64), static_cast<std::uint64_t>(product)};
  }
};

/// A deterministic random stream identified by (seed, stream, substream).
///
/// The key is (seed, stream); the counter is (block, 0, substream, 0). Every
/// Monte Carlo replicate draws from its own substream.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_{seed, stream}, counter_{0, 0, substream, 0} {}

  std::uint64_t next_u64() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), Lemire's multiply-and-reject method.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double exponential() { return -std::log(uniform_pos()); }

  /// log of a Gamma(shape, 1) draw. Marsaglia-Tsang for shape >= 1; smaller
  /// shapes use Gamma(shape) = Gamma(shape + 1) * U^{1/shape}, kept in log
  /// space because the draw can underflow.
  double log_gamma_variate(double shape) {
    if (shape < 1.0) return log_gamma_variate(shape + 1.0) + std::log(uniform_pos()) / shape;
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
  }

  double gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

  /// log of a chi-square draw with `dof` degrees of freedom.
  double log_chi_square(double dof) { return std::log(2.0) + log_gamma_variate(0.5 * dof); }

 private:
  void refill() {
    buffer_ = Philox4x64::block(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];
    index_ = 0;
  }

  Philox4x64::Key key_;
  Philox4x64::Counter counter_;
  Philox4x64::Counter buffer_{};
  int index_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cumbound
