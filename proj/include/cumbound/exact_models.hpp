#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cumbound/bounds.hpp"

namespace cumbound {

enum class ModelKind {
  CBE,
  LaguerreLogDet,
  JacobiLogDet,
  GinibreLogDet,
  ParallelotopeLogVol,
  SimplexLogVol,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// One exact model. `p` is ignored for CBE and Ginibre; `n2` is used by
/// Jacobi only, where `n` plays the role of n1.
struct ModelSpec {
  ModelKind kind = ModelKind::CBE;
  std::int64_t n = 1;
  std::int64_t p = 1;
  std::int64_t n2 = 1;
  double beta = 1.0;

  void validate() const;
};

enum class RegimeTag { SmallP, Proportional, FullRank };

std::string_view to_string(RegimeTag tag);
RegimeTag parse_regime(std::string_view name);

struct LaguerreRegime {
  RegimeTag tag = RegimeTag::FullRank;
  double c = 0.0;  // Proportional only
};

/// Largest p accepted by L_derivative.
inline constexpr std::int64_t kMaxLSumTerms = 100'000'000;

/// d^j/dz^j at z = 0 of L(p, l, alpha; z) = sum_k log Gamma(alpha(k+l)+z) - log Gamma(alpha(k+l)),
/// i.e. sum_{k=1}^{p} psi^{(j-1)}(alpha (k + l)).
double L_derivative(std::int64_t p, std::int64_t l, double alpha, int j);

/// Gamma_j of the model's scalar statistic.
double model_cumulant(const ModelSpec& model, int j);

/// Gamma_1..Gamma_max_order.
std::vector<double> model_cumulants(const ModelSpec& model, int max_order);

/// E Z^k for the standardized statistic, exact up to rounding.
double standardized_moment_exact(const ModelSpec& model, int k);

/// Bound on |Gamma_j(Z)| for the standardized statistic (j >= 3).
///
/// Supported: Laguerre with beta = 1 in any regime, CBE with beta in {1,2,4}.
/// Parallelotope and simplex log-volumes have the standardized cumulants of
/// the beta = 1 Laguerre log-determinant, and the beta = 1 Ginibre
/// log-determinant those of the square Laguerre case, so they reuse its bounds.
double model_cumulant_bound(const ModelSpec& model, const LaguerreRegime& regime, int j);

/// The constant d with (n - p + 1)/2 > n/d used by the SmallP/Proportional bounds.
double laguerre_d_constant(const LaguerreRegime& regime);

/// Growth condition matching model_cumulant_bound: constants[j-2] * delta^{-(j-2)}
/// equals the bound for every j in 3..max_order, and the order-2 constant is 1.
GrowthSpec model_growth_spec(const ModelSpec& model, const LaguerreRegime& regime, int max_order);

/// Whether model_cumulant_bound supports this model.
bool has_cumulant_bound(const ModelSpec& model);

/// Regime of a single (n, p) pair and the matching asymptotic variance of
/// the beta = 1 log-determinant.
std::pair<LaguerreRegime, double> laguerre_variance_regime(std::int64_t n, std::int64_t p);

/// Asymptotic variance for an explicitly declared regime.
double laguerre_asymptotic_variance(std::int64_t n, std::int64_t p, const LaguerreRegime& regime);

}  // namespace cumbound
