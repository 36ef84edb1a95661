#include "cumbound/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cumbound/bounds.hpp"
#include "cumbound/combinatorics.hpp"
#include "cumbound/parallel.hpp"

namespace cumbound {

using nlohmann::json;

// ------------------------------------------------------------------ config

std::string_view to_string(ReportFormat format) { return format == ReportFormat::CSV ? "csv" : "json"; }

ReportFormat parse_format(std::string_view name) {
  if (name == "csv" || name == "CSV") return ReportFormat::CSV;
  if (name == "json" || name == "JSON") return ReportFormat::JSON;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

std::int64_t as_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return value.get<std::int64_t>();
}

double as_double(const json& value, const std::string& where) {
  if (!value.is_number()) throw ConfigError(where + ": expected a number");
  return value.get<double>();
}

std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw ConfigError(where + ": expected a string");
  return value.get<std::string>();
}

template <typename T, typename F>
std::vector<T> scalar_or_list(const json& value, const std::string& where, F convert) {
  std::vector<T> out;
  if (value.is_array()) {
    for (const auto& item : value) out.push_back(convert(item, where));
    if (out.empty()) throw ConfigError(where + ": empty list");
  } else {
    out.push_back(convert(value, where));
  }
  return out;
}

std::vector<std::int64_t> int_list(const json& value, const std::string& where) {
  return scalar_or_list<std::int64_t>(value, where, as_int);
}

std::vector<double> double_list(const json& value, const std::string& where) {
  return scalar_or_list<double>(value, where, as_double);
}

std::int64_t ceil_sqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

// p given as an integer, a list, "sqrt", "n", {"ratio": c} or {"n_minus": d}
std::vector<std::int64_t> resolve_p(const json& value, std::int64_t n, const std::string& where) {
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "sqrt") return {ceil_sqrt(n)};
    if (s == "n") return {n};
    throw ConfigError(where + ": unknown p rule '" + s + "'");
  }
  if (value.is_object()) {
    check_keys(value, {"ratio", "n_minus"}, where);
    if (value.size() != 1) throw ConfigError(where + ": p rule needs exactly one of ratio, n_minus");
    if (value.contains("ratio")) {
      const double c = as_double(value["ratio"], where + ".ratio");
      if (!(c > 0.0 && c <= 1.0)) throw ConfigError(where + ".ratio: must lie in (0, 1]");
      return {std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(c * static_cast<double>(n))))};
    }
    return {n - as_int(value["n_minus"], where + ".n_minus")};
  }
  return int_list(value, where);
}

std::optional<LaguerreRegime> parse_regime_field(const json& entry, const std::string& where) {
  if (!entry.contains("regime")) return std::nullopt;
  const auto name = as_string(entry["regime"], where + ".regime");
  if (name == "auto") return std::nullopt;
  LaguerreRegime regime;
  try {
    regime.tag = parse_regime(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return regime;
}

std::uint64_t hash_text(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Stream id from a canonical description, so a grid point keeps its random
// numbers when other entries are added or reordered.
std::uint64_t stream_of(const SimSpec& s) {
  std::ostringstream key;
  key << to_string(s.kind) << '|' << s.n << '|' << format_double(s.p) << '|' << s.m << '|' << s.dim << '|'
      << s.pattern.name() << '|' << to_string(s.kernel) << '|' << to_string(s.dist) << '|' << s.replicates;
  for (double sigma : s.sigmas) key << '|' << format_double(sigma);
  return hash_text(key.str());
}

void parse_exact_entry(const json& entry, int group, const std::string& where, ExperimentConfig& config) {
  check_keys(entry, {"model", "n", "p", "n2", "beta", "regime"}, where);
  ModelKind kind;
  try {
    kind = parse_model_kind(as_string(require(entry, "model", where), where + ".model"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  const bool uses_p = kind != ModelKind::CBE && kind != ModelKind::GinibreLogDet;
  if (!uses_p && entry.contains("p")) throw ConfigError(where + ": key 'p' does not apply to this model");
  if (kind != ModelKind::JacobiLogDet && entry.contains("n2"))
    throw ConfigError(where + ": key 'n2' applies to JacobiLogDet only");
  const bool fixed_beta = kind == ModelKind::ParallelotopeLogVol || kind == ModelKind::SimplexLogVol;
  if (fixed_beta && entry.contains("beta")) throw ConfigError(where + ": key 'beta' does not apply to this model");

  const auto ns = int_list(require(entry, "n", where), where + ".n");
  const auto betas = entry.contains("beta") ? double_list(entry["beta"], where + ".beta") : std::vector<double>{1.0};
  const auto n2s = kind == ModelKind::JacobiLogDet ? int_list(require(entry, "n2", where), where + ".n2")
                                                   : std::vector<std::int64_t>{1};
  const auto regime = parse_regime_field(entry, where);

  for (double beta : betas)
    for (std::int64_t n : ns)
      for (std::int64_t n2 : n2s) {
        const auto ps = uses_p ? resolve_p(require(entry, "p", where), n, where + ".p") : std::vector<std::int64_t>{n};
        for (std::int64_t p : ps) {
          ExactPoint point;
          point.model = {kind, n, p, n2, beta};
          point.group = group;
          point.regime = regime;
          if (regime && regime->tag == RegimeTag::Proportional)
            point.regime->c = static_cast<double>(p) / static_cast<double>(n);
          try {
            point.model.validate();
          } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
          }
          config.exact.push_back(point);
        }
      }
}

void parse_sim_entry(const json& entry, int group, const std::string& where, ExperimentConfig& config) {
  SimKind kind;
  try {
    kind = parse_sim_kind(as_string(require(entry, "kind", where), where + ".kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  switch (kind) {
    case SimKind::GnpSubgraph: check_keys(entry, {"kind", "n", "replicates", "p", "pattern"}, where); break;
    case SimKind::GnmSubgraph: check_keys(entry, {"kind", "n", "replicates", "m", "density", "pattern"}, where); break;
    case SimKind::Crossings: check_keys(entry, {"kind", "n", "replicates"}, where); break;
    case SimKind::WishartLogDet: check_keys(entry, {"kind", "n", "replicates", "p", "regime"}, where); break;
    case SimKind::UStatistic: check_keys(entry, {"kind", "n", "replicates", "kernel"}, where); break;
    case SimKind::IndependentSum: check_keys(entry, {"kind", "n", "replicates", "dist", "sigmas"}, where); break;
  }

  const auto ns = int_list(require(entry, "n", where), where + ".n");
  const auto replicates = as_int(require(entry, "replicates", where), where + ".replicates");

  SimSpec base;
  base.kind = kind;
  base.replicates = replicates;
  try {
    if (entry.contains("pattern")) base.pattern = PatternGraph::parse(as_string(entry["pattern"], where + ".pattern"));
    if (entry.contains("kernel")) base.kernel = parse_kernel(as_string(entry["kernel"], where + ".kernel"));
    if (entry.contains("dist")) base.dist = parse_summand_dist(as_string(entry["dist"], where + ".dist"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (entry.contains("sigmas")) base.sigmas = double_list(entry["sigmas"], where + ".sigmas");
  if (kind == SimKind::GnmSubgraph && entry.contains("m") == entry.contains("density"))
    throw ConfigError(where + ": GnmSubgraph needs exactly one of m, density");
  const auto regime = parse_regime_field(entry, where);

  for (std::int64_t n : ns) {
    std::vector<SimSpec> specs;
    SimSpec spec = base;
    spec.n = n;
    switch (kind) {
      case SimKind::GnpSubgraph:
        for (double p : double_list(require(entry, "p", where), where + ".p")) {
          spec.p = p;
          specs.push_back(spec);
        }
        break;
      case SimKind::GnmSubgraph:
        if (entry.contains("m")) {
          for (std::int64_t m : int_list(entry["m"], where + ".m")) {
            spec.m = m;
            specs.push_back(spec);
          }
        } else {
          for (double density : double_list(entry["density"], where + ".density")) {
            if (!(density >= 0.0 && density <= 1.0)) throw ConfigError(where + ".density: must lie in [0, 1]");
            spec.m = std::llround(density * static_cast<double>(n * (n - 1) / 2));
            specs.push_back(spec);
          }
        }
        break;
      case SimKind::WishartLogDet:
        for (std::int64_t p : resolve_p(require(entry, "p", where), n, where + ".p")) {
          spec.dim = p;
          specs.push_back(spec);
        }
        break;
      case SimKind::IndependentSum:
        if (!spec.sigmas.empty() && ns.size() > 1) throw ConfigError(where + ": explicit sigmas need a single n");
        if (!spec.sigmas.empty() && static_cast<std::int64_t>(spec.sigmas.size()) != n)
          throw ConfigError(where + ": sigmas must have n entries");
        specs.push_back(spec);
        break;
      case SimKind::Crossings:
        if (n < 2) throw ConfigError(where + ": Crossings needs n >= 2");
        specs.push_back(spec);
        break;
      case SimKind::UStatistic:
        specs.push_back(spec);
        break;
    }
    for (auto& s : specs) {
      try {
        s.validate();
        if ((s.kind == SimKind::GnpSubgraph || s.kind == SimKind::GnmSubgraph) && s.n > 100000)
          throw std::invalid_argument("graph size exceeds 1e5");
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
      }
      s.stream = stream_of(s);
      SimPoint point;
      point.spec = s;
      point.group = group;
      point.regime = regime;
      if (regime && regime->tag == RegimeTag::Proportional)
        point.regime->c = static_cast<double>(s.dim) / static_cast<double>(s.n);
      config.simulate.push_back(point);
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (exact.empty() && simulate.empty()) throw ConfigError("config: empty grid");
  if (orders.empty()) throw ConfigError("config: no orders");
  for (int k : orders)
    if (k < 3 || k > kMaxSummaryOrder) throw ConfigError("config: orders must lie in 3..12");
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(root, {"experiment", "seed", "orders", "exact", "simulate", "output"}, "config");

  ExperimentConfig config;
  if (root.contains("experiment")) config.id = as_string(root["experiment"], "config.experiment");
  const json& seed = require(root, "seed", "config");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    throw ConfigError("config.seed: expected a non-negative integer");
  config.seed = seed.get<std::uint64_t>();

  for (std::int64_t k : int_list(require(root, "orders", "config"), "config.orders")) {
    if (k < 3 || k > kMaxSummaryOrder) throw ConfigError("config.orders: orders must lie in 3..12");
    config.orders.push_back(static_cast<int>(k));
  }
  std::sort(config.orders.begin(), config.orders.end());
  config.orders.erase(std::unique(config.orders.begin(), config.orders.end()), config.orders.end());

  int group = 0;
  if (root.contains("exact")) {
    if (!root["exact"].is_array()) throw ConfigError("config.exact: expected a list");
    for (std::size_t i = 0; i < root["exact"].size(); ++i)
      parse_exact_entry(root["exact"][i], group++, "config.exact[" + std::to_string(i) + "]", config);
  }
  if (root.contains("simulate")) {
    if (!root["simulate"].is_array()) throw ConfigError("config.simulate: expected a list");
    for (std::size_t i = 0; i < root["simulate"].size(); ++i)
      parse_sim_entry(root["simulate"][i], group++, "config.simulate[" + std::to_string(i) + "]", config);
  }
  for (auto& point : config.simulate) point.spec.seed = config.seed;

  if (root.contains("output")) {
    const json& output = root["output"];
    check_keys(output, {"path", "format"}, "config.output");
    if (output.contains("path")) config.output_path = as_string(output["path"], "config.output.path");
    if (output.contains("format")) config.format = parse_format(as_string(output["format"], "config.output.format"));
  }
  config.echo = root.dump();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void reseed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  for (auto& point : config.simulate) point.spec.seed = seed;
}

// --------------------------------------------------------------------- run

std::int64_t ExperimentResult::soundness_violations() const {
  return std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.exact && !r.satisfied; });
}

namespace {

std::string model_id(const ModelSpec& model) {
  std::string id(to_string(model.kind));
  if (model.kind == ModelKind::JacobiLogDet) id += "[n2=" + std::to_string(model.n2) + "]";
  return id;
}

std::string model_id(const SimSpec& spec) {
  std::string id(to_string(spec.kind));
  switch (spec.kind) {
    case SimKind::GnpSubgraph:
    case SimKind::GnmSubgraph: {
      std::string pattern = spec.pattern.name();
      std::replace(pattern.begin(), pattern.end(), ',', ';');
      id += "[" + pattern + "]";
      break;
    }
    case SimKind::UStatistic: id += "[" + std::string(to_string(spec.kernel)) + "]"; break;
    case SimKind::IndependentSum: id += "[" + std::string(to_string(spec.dist)) + "]"; break;
    default: break;
  }
  return id;
}

LaguerreRegime resolve_regime(const std::optional<LaguerreRegime>& chosen, std::int64_t n, std::int64_t p) {
  if (chosen) return *chosen;
  return laguerre_variance_regime(n, p).first;
}

std::vector<ReportRow> evaluate_exact(const ExactPoint& point, const std::vector<int>& orders) {
  const ModelSpec& model = point.model;
  const int top = orders.back();
  const auto cumulants = model_cumulants(model, top);
  const double variance = cumulants[1];
  if (!(variance > 0.0)) throw std::domain_error("degenerate variance");
  std::vector<double> standardized(static_cast<std::size_t>(top), 0.0);
  standardized[1] = 1.0;
  for (int j = 3; j <= top; ++j) standardized[j - 1] = cumulants[j - 1] / std::pow(variance, 0.5 * j);
  const auto moments = moments_from_cumulants(CumulantSequence(std::move(standardized)));

  std::optional<GrowthSpec> growth;
  if (has_cumulant_bound(model)) {
    const std::int64_t p_eq = model.kind == ModelKind::GinibreLogDet ? model.n : model.p;
    growth = model_growth_spec(model, resolve_regime(point.regime, model.n, p_eq), top);
  }

  const bool uses_p = model.kind != ModelKind::CBE && model.kind != ModelKind::GinibreLogDet;
  const bool uses_beta = model.kind != ModelKind::ParallelotopeLogVol && model.kind != ModelKind::SimplexLogVol;
  std::vector<ReportRow> rows;
  for (int k : orders) {
    ReportRow row;
    row.model = model_id(model);
    row.n = model.n;
    if (uses_p) row.p = static_cast<double>(model.p);
    if (uses_beta) row.beta = model.beta;
    row.k = k;
    row.gap = std::fabs(moments[k] - gaussian_moment(k));
    if (growth) {
      row.bound = moment_gap_bound(k, *growth);
      row.delta = growth->delta;
      row.satisfied = row.gap <= *row.bound;
    }
    row.exact = true;
    row.group = point.group;
    rows.push_back(row);
  }
  return rows;
}

std::optional<GrowthSpec> simulation_growth(const SimPoint& point, int top) {
  const SimSpec& s = point.spec;
  if (s.kind == SimKind::IndependentSum) {
    const auto sigmas = s.effective_sigmas();
    GrowthSpec g;
    g.delta = bernstein_delta(bernstein_constant(s.dist, sigmas), sigmas);
    g.constants.push_back(1.0);
    for (int j = 3; j <= top; ++j) g.constants.push_back(static_cast<double>(factorial(j)));
    return g;
  }
  if (s.kind == SimKind::GnpSubgraph && s.pattern == PatternGraph::triangle() && s.n >= 4) {
    const auto exact = gnp_triangle_moments_exact(static_cast<int>(s.n), s.p);
    const double nd = static_cast<double>(s.n);
    DnaSpec dna;
    dna.n_count = nd * (nd - 1) * (nd - 2) / 6.0;
    dna.degree = 3.0 * (nd - 3.0) + 1.0;
    const double p3 = s.p * s.p * s.p;
    dna.amplitude = std::max(p3, 1.0 - p3);
    dna.sigma2 = exact.variance;
    GrowthSpec g;
    g.delta = std::sqrt(dna.n_count / dna.degree);
    g.constants.push_back(1.0);
    for (int j = 3; j <= top; ++j) g.constants.push_back(dna_cumulant_bound(j, dna) * std::pow(g.delta, j - 2));
    return g;
  }
  if (s.kind == SimKind::WishartLogDet) {
    const ModelSpec model{ModelKind::LaguerreLogDet, s.n, s.dim, 1, 1.0};
    return model_growth_spec(model, resolve_regime(point.regime, s.n, s.dim), top);
  }
  return std::nullopt;
}

double nominal_delta(const SimSpec& s) {
  const double nd = static_cast<double>(s.n);
  switch (s.kind) {
    case SimKind::Crossings:
    case SimKind::UStatistic: return std::sqrt(nd);
    case SimKind::GnmSubgraph: return std::pow(nd, 1.5);
    default: return nd;
  }
}

CenterScale simulation_center(const SimSpec& s) {
  switch (s.kind) {
    case SimKind::GnpSubgraph:
      if (s.pattern == PatternGraph::triangle() && s.n >= 3) {
        const auto mv = gnp_triangle_moments_exact(static_cast<int>(s.n), s.p);
        return CenterScale::exact(mv.mean, std::sqrt(mv.variance));
      }
      break;
    case SimKind::Crossings: {
      const auto mv = crossings_moments_exact(static_cast<int>(s.n));
      return CenterScale::exact(mv.mean, std::sqrt(mv.variance));
    }
    case SimKind::WishartLogDet: {
      const ModelSpec model{ModelKind::LaguerreLogDet, s.n, s.dim, 1, 1.0};
      return CenterScale::exact(model_cumulant(model, 1), std::sqrt(model_cumulant(model, 2)));
    }
    case SimKind::UStatistic: {
      const auto km = kernel_moments(s.kernel);
      return CenterScale::exact(km.mean, std::sqrt(ustat_variance(s.n, km.sigma1sq, km.sigma2sq)));
    }
    case SimKind::IndependentSum: return CenterScale::exact(0.0, 1.0);
    case SimKind::GnmSubgraph: break;
  }
  return CenterScale::empirical();
}

std::vector<ReportRow> evaluate_simulation(const SimPoint& point, const std::vector<int>& orders, int threads) {
  const SimSpec& s = point.spec;
  const int top = orders.back();
  const auto batch = run_batch(s, threads);
  const auto summary = summarize(batch, top);
  const auto center = simulation_center(s);
  const auto growth = simulation_growth(point, top);

  std::vector<ReportRow> rows;
  for (int k : orders) {
    const auto est = standardized_gap(summary, k, center);
    ReportRow row;
    row.model = model_id(s);
    row.n = s.n;
    if (s.kind == SimKind::GnpSubgraph) row.p = s.p;
    if (s.kind == SimKind::GnmSubgraph) row.p = static_cast<double>(s.m);
    if (s.kind == SimKind::WishartLogDet) {
      row.p = static_cast<double>(s.dim);
      row.beta = 1.0;
    }
    row.k = k;
    row.gap = est.value;
    row.se = est.se;
    if (growth) {
      row.bound = moment_gap_bound(k, *growth);
      row.delta = growth->delta;
      // sampling noise: consistent with the bound within three standard errors
      row.satisfied = row.gap <= *row.bound + 3.0 * (std::isfinite(est.se) ? est.se : 0.0);
    } else {
      row.delta = nominal_delta(s);
    }
    row.exact = false;
    row.group = point.group;
    rows.push_back(row);
  }
  return rows;
}

std::string describe(const ModelSpec& m) {
  std::ostringstream out;
  out << to_string(m.kind) << " n=" << m.n << " p=" << m.p << " beta=" << format_double(m.beta);
  return out.str();
}

std::string describe(const SimSpec& s) {
  std::ostringstream out;
  out << to_string(s.kind) << " n=" << s.n;
  return out.str();
}

auto row_key(const ReportRow& r) { return std::tie(r.group, r.model, r.n, r.p, r.beta, r.k, r.exact); }

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  const std::size_t exact_count = options.run_exact ? config.exact.size() : 0;
  const std::size_t sim_count = options.run_simulations ? config.simulate.size() : 0;
  std::vector<std::vector<ReportRow>> rows(exact_count + sim_count);
  std::vector<std::string> errors(exact_count + sim_count);

  parallel_for(static_cast<std::int64_t>(exact_count), options.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      try {
        rows[i] = evaluate_exact(config.exact[i], config.orders);
      } catch (const std::exception& e) {
        errors[i] = describe(config.exact[i].model) + ": " + e.what();
      }
    }
  });
  for (std::size_t i = 0; i < sim_count; ++i) {
    try {
      rows[exact_count + i] = evaluate_simulation(config.simulate[i], config.orders, options.threads);
    } catch (const std::exception& e) {
      errors[exact_count + i] = describe(config.simulate[i].spec) + ": " + e.what();
    }
  }

  for (auto& block : rows) result.rows.insert(result.rows.end(), block.begin(), block.end());
  for (auto& e : errors)
    if (!e.empty()) result.errors.push_back(e);
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return row_key(a) < row_key(b); });
  result.fits = fit_groups(result.rows);
  return result;
}

std::vector<FitSummary> fit_groups(const std::vector<ReportRow>& rows) {
  using Key = std::tuple<int, std::string, std::optional<double>, int>;
  std::map<Key, std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) groups[Key{r.group, r.model, r.beta, r.k}].push_back(&r);

  std::vector<FitSummary> out;
  for (auto& [key, members] : groups) {
    if (members.size() < 3) continue;
    FitSummary summary;
    summary.model = members.front()->model;
    summary.group = std::get<0>(key);
    summary.beta = std::get<2>(key);
    summary.k = std::get<3>(key);
    const bool by_delta = std::all_of(members.begin(), members.end(), [](const ReportRow* r) { return r->delta.has_value(); });
    summary.x_name = by_delta ? "delta" : "n";
    std::vector<std::pair<double, double>> kept;
    for (const ReportRow* r : members) {
      const double x = by_delta ? *r->delta : static_cast<double>(r->n);
      const bool above_noise = r->exact || !r->se || !(r->gap < 3.0 * *r->se);
      if (r->gap > 0.0 && std::isfinite(r->gap) && x > 0.0 && above_noise)
        kept.emplace_back(x, r->gap);
      else
        summary.dropped.emplace_back(x, r->gap);
    }
    std::sort(kept.begin(), kept.end());
    std::set<double> distinct;
    for (auto [x, gap] : kept) distinct.insert(x);
    if (kept.size() >= 3 && distinct.size() >= 2) summary.fit = decay_fit(kept);
    out.push_back(std::move(summary));
  }
  return out;
}

// ------------------------------------------------------------------ output

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

namespace {

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); }

std::string json_optional(const std::optional<double>& v) { return v ? json_number(*v) : std::string("null"); }

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "model,n,p,beta,k,gap,se,bound,delta,satisfied\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.n << ',' << csv_optional(r.p) << ',' << csv_optional(r.beta) << ',' << r.k << ','
        << format_double(r.gap) << ',' << csv_optional(r.se) << ',' << csv_optional(r.bound) << ','
        << csv_optional(r.delta) << ',' << (r.satisfied ? "true" : "false") << '\n';
  }
}

void write_fits_csv(std::ostream& out, const std::vector<FitSummary>& fits) {
  out << "model,group,beta,k,x,slope,intercept,r_squared,points,dropped\n";
  for (const auto& f : fits) {
    out << f.model << ',' << f.group << ',' << csv_optional(f.beta) << ',' << f.k << ',' << f.x_name << ',';
    if (f.fit)
      out << format_double(f.fit->slope) << ',' << format_double(f.fit->intercept) << ','
          << format_double(f.fit->r_squared) << ',' << f.fit->points.size();
    else
      out << ",,,0";
    out << ',' << f.dropped.size() << '\n';
  }
}

void write_json(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result) {
  out << "{\n  \"experiment\": " << json_string(config.id) << ",\n  \"version\": " << json_string(kLibraryVersion)
      << ",\n  \"config\": " << config.echo << ",\n  \"rows\": [";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    out << (i ? ",\n    " : "\n    ") << "{\"model\": " << json_string(r.model) << ", \"n\": " << r.n
        << ", \"p\": " << json_optional(r.p) << ", \"beta\": " << json_optional(r.beta) << ", \"k\": " << r.k
        << ", \"gap\": " << json_number(r.gap) << ", \"se\": " << json_optional(r.se)
        << ", \"bound\": " << json_optional(r.bound) << ", \"delta\": " << json_optional(r.delta)
        << ", \"satisfied\": " << (r.satisfied ? "true" : "false") << ", \"source\": \""
        << (r.exact ? "exact" : "simulated") << "\", \"group\": " << r.group << "}";
  }
  out << (result.rows.empty() ? "],\n" : "\n  ],\n") << "  \"fits\": [";
  for (std::size_t i = 0; i < result.fits.size(); ++i) {
    const auto& f = result.fits[i];
    out << (i ? ",\n    " : "\n    ") << "{\"model\": " << json_string(f.model) << ", \"group\": " << f.group
        << ", \"beta\": " << json_optional(f.beta) << ", \"k\": " << f.k << ", \"x\": " << json_string(f.x_name);
    if (f.fit)
      out << ", \"slope\": " << json_number(f.fit->slope) << ", \"intercept\": " << json_number(f.fit->intercept)
          << ", \"r_squared\": " << json_number(f.fit->r_squared) << ", \"points\": " << f.fit->points.size();
    else
      out << ", \"slope\": null, \"intercept\": null, \"r_squared\": null, \"points\": 0";
    out << ", \"dropped\": [";
    for (std::size_t d = 0; d < f.dropped.size(); ++d)
      out << (d ? ", " : "") << '[' << json_number(f.dropped[d].first) << ", " << json_number(f.dropped[d].second)
          << ']';
    out << "]}";
  }
  out << (result.fits.empty() ? "],\n" : "\n  ],\n") << "  \"errors\": [";
  for (std::size_t i = 0; i < result.errors.size(); ++i) out << (i ? ", " : "") << json_string(result.errors[i]);
  out << "]\n}\n";
}

void emit_report(const ExperimentConfig& config, const ExperimentResult& result, ReportFormat format,
                 const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("emit_report: no rows to write");
  auto open = [](const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report to '" + file + "'");
    return out;
  };
  auto finish = [](std::ofstream& out, const std::string& file) {
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + file + "'");
  };
  std::ofstream out = open(path);
  if (format == ReportFormat::CSV) {
    write_csv(out, result.rows);
    finish(out, path);
    if (!result.fits.empty()) {
      const std::string fits_path = path + ".fits.csv";
      std::ofstream fits = open(fits_path);
      write_fits_csv(fits, result.fits);
      finish(fits, fits_path);
    }
  } else {
    write_json(out, config, result);
    finish(out, path);
  }
}

std::vector<ReportRow> rows_from_json(std::string_view text) {
  const json root = json::parse(text);
  auto optional_number = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  std::vector<ReportRow> rows;
  for (const auto& item : root.at("rows")) {
    ReportRow r;
    r.model = item.at("model").get<std::string>();
    r.n = item.at("n").get<std::int64_t>();
    r.p = optional_number(item.at("p"));
    r.beta = optional_number(item.at("beta"));
    r.k = item.at("k").get<int>();
    r.gap = item.at("gap").get<double>();
    r.se = optional_number(item.at("se"));
    r.bound = optional_number(item.at("bound"));
    r.delta = optional_number(item.at("delta"));
    r.satisfied = item.at("satisfied").get<bool>();
    r.exact = item.at("source").get<std::string>() == "exact";
    r.group = item.at("group").get<int>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cumbound
