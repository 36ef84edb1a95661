#pragma once

#include <span>
#include <vector>

namespace cumbound {

/// How GrowthSpec::constants are to be read.
enum class ConstantForm {
  /// constants hold C_{j,gamma} directly: |Gamma_j(Z)| <= C_{j,gamma} / delta^{j-2}.
  Explicit,
  /// constants hold C~_j with |Gamma_j(Z)| <= (j!)^{1+gamma} C~_j / delta^{j-2}.
  Factorial,
};

/// Cumulant growth condition for a standardized variable Z.
///
/// constants[j - 2] belongs to order j, starting at j = 2. The order-2 entry
/// multiplies every part equal to 2 in a composition; for a unit-variance Z
/// an explicit value of 1 is exact.
struct GrowthSpec {
  double gamma = 0.0;
  double delta = 1.0;
  ConstantForm form = ConstantForm::Explicit;
  std::vector<double> constants;

  /// Every constant equal to `value` for orders 2..max_order.
  static GrowthSpec uniform(double delta, double value, int max_order, double gamma = 0.0,
                            ConstantForm form = ConstantForm::Explicit);

  double constant(int order) const;
  int max_order() const { return static_cast<int>(constants.size()) + 1; }
  void validate() const;
};

/// Dependency-graph parameters: count N_n, degree D_n, amplitude A, and the
/// variance sigma_n^2 of Y_n.
struct DnaSpec {
  double n_count = 1.0;
  double degree = 1.0;
  double amplitude = 1.0;
  double sigma2 = 1.0;

  void validate() const;
};

/// A_{j,k}: (1/j!) sum over compositions k_1+..+k_j = k (parts >= 2) of
/// C_{k_1}...C_{k_j} k!/(k_1!...k_j!). In factorial form the value is
/// (k!)^{1+gamma} times the same sum over the C~ constants.
double coefficient_A(int j, int k, const GrowthSpec& spec);

/// sum_{1 <= j <= ceil(k/2 - 1)} A_{j,k} delta^{-(k - 2j)}, an upper bound on
/// |E Z^k - E N^k|.
double moment_gap_bound(int k, const GrowthSpec& spec);

struct LeadingBound {
  int rate_exponent = 0;
  double constant = 0.0;
};

/// Rate exponent (2 for even k, 1 for odd k) and the constant sum_j A_{j,k},
/// so that the gap is at most constant / delta^exponent whenever delta >= 1.
LeadingBound leading_bound(int k, const GrowthSpec& spec);

/// delta_n = sqrt(sum sigma_i^2) / (2 max{K, max sigma_i}) for independent
/// summands under a Bernstein-type moment condition with constant K.
double bernstein_delta(double big_k, std::span<const double> sigmas);

/// C_j = 2^{j-1} j^{j-2}.
double dna_constant(int j);

/// C_j N D^{j-1} A^j / sigma^j, a bound on |Gamma_j(Y_n / sigma_n)|.
double dna_cumulant_bound(int j, const DnaSpec& spec);

}  // namespace cumbound
