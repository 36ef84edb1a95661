#include "cumbound/exact_models.hpp"

#include <math.h>

#include <cmath>
#include <stdexcept>

#include "cumbound/combinatorics.hpp"
#include "cumbound/specfun.hpp"

namespace cumbound {

namespace {

bool is_supported_beta(double beta) { return beta == 1.0 || beta == 2.0 || beta == 4.0; }

double factorial_double(int k) { return static_cast<double>(factorial(k)); }

// lgamma_r leaves no global sign state behind, unlike std::lgamma.
double log_factorial(std::int64_t p) {
  int sign = 0;
  return ::lgamma_r(static_cast<double>(p) + 1.0, &sign);
}

// (n, p) of the beta = 1 Laguerre model whose standardized cumulants coincide
// with the given model's.
std::pair<std::int64_t, std::int64_t> laguerre_equivalent(const ModelSpec& model) {
  if (model.kind == ModelKind::GinibreLogDet) return {model.n, model.n};
  return {model.n, model.p};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::CBE: return "CBE";
    case ModelKind::LaguerreLogDet: return "LaguerreLogDet";
    case ModelKind::JacobiLogDet: return "JacobiLogDet";
    case ModelKind::GinibreLogDet: return "GinibreLogDet";
    case ModelKind::ParallelotopeLogVol: return "ParallelotopeLogVol";
    case ModelKind::SimplexLogVol: return "SimplexLogVol";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind kind : {ModelKind::CBE, ModelKind::LaguerreLogDet, ModelKind::JacobiLogDet,
                         ModelKind::GinibreLogDet, ModelKind::ParallelotopeLogVol, ModelKind::SimplexLogVol})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::SmallP: return "SmallP";
    case RegimeTag::Proportional: return "Proportional";
    case RegimeTag::FullRank: return "FullRank";
  }
  return "?";
}

RegimeTag parse_regime(std::string_view name) {
  for (RegimeTag tag : {RegimeTag::SmallP, RegimeTag::Proportional, RegimeTag::FullRank})
    if (to_string(tag) == name) return tag;
  throw std::invalid_argument("unknown regime '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (n < 1) throw std::invalid_argument("ModelSpec: n must be >= 1");
  if (!is_supported_beta(beta)) throw std::invalid_argument("ModelSpec: beta must be 1, 2 or 4");
  switch (kind) {
    case ModelKind::CBE:
    case ModelKind::GinibreLogDet:
      break;
    case ModelKind::JacobiLogDet:
      if (n2 < 1) throw std::invalid_argument("ModelSpec: Jacobi needs n2 >= 1");
      [[fallthrough]];
    case ModelKind::LaguerreLogDet:
    case ModelKind::ParallelotopeLogVol:
    case ModelKind::SimplexLogVol:
      if (p < 1 || p > n) throw std::invalid_argument("ModelSpec: requires 1 <= p <= n");
      break;
  }
  if (n > kMaxLSumTerms || n2 > kMaxLSumTerms) throw std::invalid_argument("ModelSpec: size exceeds 1e8");
}

double L_derivative(std::int64_t p, std::int64_t l, double alpha, int j) {
  if (p < 1) throw std::invalid_argument("L_derivative: p must be >= 1");
  if (p > kMaxLSumTerms) throw std::invalid_argument("L_derivative: p exceeds 1e8");
  if (l < 0) throw std::invalid_argument("L_derivative: l must be >= 0");
  if (j < 1) throw std::invalid_argument("L_derivative: j must be >= 1");
  if (!(alpha * static_cast<double>(1 + l) > 0.0)) throw std::domain_error("L_derivative: alpha(1+l) must be > 0");
  CompensatedSum sum;
  for (std::int64_t k = 1; k <= p; ++k) sum.add(polygamma(j - 1, alpha * static_cast<double>(k + l)));
  return sum.value();
}

double model_cumulant(const ModelSpec& model, int j) {
  model.validate();
  if (j < 1) throw std::invalid_argument("model_cumulant: j must be >= 1");
  const double half_beta = 0.5 * model.beta;
  const double first = (j == 1) ? 1.0 : 0.0;
  switch (model.kind) {
    case ModelKind::LaguerreLogDet:
      return L_derivative(model.p, model.n - model.p, half_beta, j) +
             first * static_cast<double>(model.p) * std::log(2.0);
    case ModelKind::JacobiLogDet:
      return L_derivative(model.p, model.n - model.p, half_beta, j) -
             L_derivative(model.p, model.n + model.n2 - model.p, half_beta, j);
    case ModelKind::GinibreLogDet:
      return L_derivative(model.n, 0, half_beta, j) +
             first * 0.5 * static_cast<double>(model.n) * std::log(2.0 / model.beta);
    case ModelKind::CBE: {
      if (j == 1) return 0.0;
      const double scale = std::ldexp(1.0, j - 1);
      CompensatedSum sum;
      for (std::int64_t k = 0; k < model.n; ++k) sum.add(polygamma(j - 1, 1.0 + static_cast<double>(k) * half_beta));
      return (scale - 1.0) / scale * sum.value();
    }
    case ModelKind::ParallelotopeLogVol:
    case ModelKind::SimplexLogVol: {
      double value = std::ldexp(L_derivative(model.p, model.n - model.p, 0.5, j), -j);
      if (j == 1) {
        value += 0.5 * static_cast<double>(model.p) * std::log(2.0);
        if (model.kind == ModelKind::SimplexLogVol)
          value += 0.5 * std::log(static_cast<double>(model.p) + 1.0) - log_factorial(model.p);
      }
      return value;
    }
  }
  throw std::logic_error("model_cumulant: unhandled model");
}

std::vector<double> model_cumulants(const ModelSpec& model, int max_order) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_order));
  for (int j = 1; j <= max_order; ++j) out.push_back(model_cumulant(model, j));
  return out;
}

double standardized_moment_exact(const ModelSpec& model, int k) {
  if (k < 3 || k > kMaxExactOrder) throw std::invalid_argument("standardized_moment_exact: k must lie in 3..20");
  const double variance = model_cumulant(model, 2);
  if (!(variance > 0.0)) throw std::domain_error("standardized_moment_exact: degenerate variance");
  std::vector<double> standardized(static_cast<std::size_t>(k), 0.0);
  standardized[1] = 1.0;
  for (int j = 3; j <= k; ++j) standardized[j - 1] = model_cumulant(model, j) / std::pow(variance, 0.5 * j);
  return moments_from_cumulants(CumulantSequence(std::move(standardized)))[k];
}

double laguerre_d_constant(const LaguerreRegime& regime) {
  switch (regime.tag) {
    case RegimeTag::SmallP: return 4.0;
    case RegimeTag::Proportional:
      if (!(regime.c > 0.0 && regime.c < 1.0)) throw std::invalid_argument("Proportional regime needs c in (0,1)");
      return 2.0 / (1.0 - regime.c) + 1.0;
    case RegimeTag::FullRank: break;
  }
  throw std::invalid_argument("laguerre_d_constant: FullRank regime has no d constant");
}

bool has_cumulant_bound(const ModelSpec& model) {
  switch (model.kind) {
    case ModelKind::CBE: return true;
    case ModelKind::LaguerreLogDet:
    case ModelKind::GinibreLogDet: return model.beta == 1.0;
    case ModelKind::ParallelotopeLogVol:
    case ModelKind::SimplexLogVol: return true;
    case ModelKind::JacobiLogDet: return false;
  }
  return false;
}

namespace {

struct ScaleAndConstant {
  double delta;
  double constant;  // bound = constant / delta^{j-2}
};

ScaleAndConstant cumulant_bound_parts(const ModelSpec& model, const LaguerreRegime& regime, int j) {
  model.validate();
  if (j < 3) throw std::invalid_argument("model_cumulant_bound: j must be >= 3");
  if (!has_cumulant_bound(model))
    throw std::invalid_argument("model_cumulant_bound: no bound for " + std::string(to_string(model.kind)) +
                                " with beta " + std::to_string(model.beta));

  if (model.kind == ModelKind::CBE) {
    const double sigma = std::sqrt(model_cumulant(model, 2));
    double c_beta = 0.0;
    if (model.beta == 1.0) c_beta = std::ldexp(1.0, j) * kPi * kPi / 3.0;
    else if (model.beta == 2.0) c_beta = 4.0 * kPi * kPi / 6.0;
    else c_beta = 8.0 * kPi * kPi / 6.0;
    return {sigma, factorial_double(j) * c_beta};
  }

  const auto [n, p] = laguerre_equivalent(model);
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double fact = factorial_double(j - 1);
  if (regime.tag == RegimeTag::FullRank) {
    if (p < 2) throw std::domain_error("FullRank bound needs p >= 2");
    const double ell2 = std::log(nd / (nd - pd + 1.0));
    const double c2 = std::pow(2.0, 0.5 * j + 1.0);
    // C_2(j) (j-1)! / ell^j = [C_2(j) (j-1)! / ell^2] / ell^{j-2}
    return {std::sqrt(ell2), c2 * fact / ell2};
  }

  const double d = laguerre_d_constant(regime);
  const double z0 = 0.5 * (nd - pd + 1.0);
  if (!(z0 > nd / d)) throw std::domain_error("Laguerre bound: (n-p+1)/2 > n/d fails for this (n, p, regime)");
  if (!(z0 >= 1.0)) throw std::domain_error("Laguerre bound: needs p <= n - 1 outside FullRank");
  const double c1 = std::pow(2.0, 0.5 * j) * std::pow(d, j - 1);
  return {std::sqrt(pd * nd), c1 * fact};
}

}  // namespace

double model_cumulant_bound(const ModelSpec& model, const LaguerreRegime& regime, int j) {
  const auto parts = cumulant_bound_parts(model, regime, j);
  return parts.constant / std::pow(parts.delta, j - 2);
}

GrowthSpec model_growth_spec(const ModelSpec& model, const LaguerreRegime& regime, int max_order) {
  if (max_order < 3) throw std::invalid_argument("model_growth_spec: max_order must be >= 3");
  GrowthSpec spec;
  spec.gamma = 0.0;
  spec.form = ConstantForm::Explicit;
  spec.constants.push_back(1.0);
  for (int j = 3; j <= max_order; ++j) {
    const auto parts = cumulant_bound_parts(model, regime, j);
    spec.delta = parts.delta;
    spec.constants.push_back(parts.constant);
  }
  spec.validate();
  return spec;
}

std::pair<LaguerreRegime, double> laguerre_variance_regime(std::int64_t n, std::int64_t p) {
  if (p < 1 || p > n) throw std::invalid_argument("laguerre_variance_regime: requires 1 <= p <= n");
  const double root = std::sqrt(static_cast<double>(n));
  LaguerreRegime regime;
  if (static_cast<double>(n - p) <= root) regime.tag = RegimeTag::FullRank;
  else if (static_cast<double>(p) <= root) regime.tag = RegimeTag::SmallP;
  else {
    regime.tag = RegimeTag::Proportional;
    regime.c = static_cast<double>(p) / static_cast<double>(n);
  }
  return {regime, laguerre_asymptotic_variance(n, p, regime)};
}

double laguerre_asymptotic_variance(std::int64_t n, std::int64_t p, const LaguerreRegime& regime) {
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  switch (regime.tag) {
    case RegimeTag::FullRank: return 2.0 * std::log(nd / (nd - pd + 1.0));
    case RegimeTag::SmallP: return 2.0 * pd / nd;
    case RegimeTag::Proportional: return 2.0 * std::log(1.0 / (1.0 - regime.c));
  }
  return 0.0;
}

}  // namespace cumbound
