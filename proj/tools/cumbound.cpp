// Command-line front end: exact tables, bound evaluation, simulations,
// full reports and small-case enumeration.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cumbound/combinatorics.hpp"
#include "cumbound/estimation.hpp"
#include "cumbound/exact_models.hpp"
#include "cumbound/harness.hpp"
#include "cumbound/simulators.hpp"

using namespace cumbound;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the master seed");
  cmd->add_option("--out", flags.out, "output file (default: stdout)");
  cmd->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonFlags& flags) {
  auto config = load_config(flags.config);
  if (flags.seed) reseed(config, *flags.seed);
  return config;
}

template <typename Writer>
void with_output(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

void report_errors(const ExperimentResult& result) {
  for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
}

int finish_rows(const ExperimentConfig& config, const ExperimentResult& result, const CommonFlags& flags,
                bool format_given) {
  report_errors(result);
  if (result.rows.empty()) {
    std::cerr << "no rows produced\n";
    return 1;
  }
  std::string path = flags.out;
  if (path.empty() && config.output_path) path = *config.output_path;
  const ReportFormat format = format_given ? parse_format(flags.format) : config.format;
  if (path.empty()) {
    if (format == ReportFormat::CSV) {
      write_csv(std::cout, result.rows);
      if (!result.fits.empty()) {
        std::cout << '\n';
        write_fits_csv(std::cout, result.fits);
      }
    } else {
      write_json(std::cout, config, result);
    }
  } else {
    emit_report(config, result, format, path);
  }
  const auto violations = result.soundness_violations();
  if (violations > 0) {
    std::cerr << "soundness violation: " << violations << " exact row(s) exceed the bound\n";
    return 2;
  }
  return 0;
}

void write_exact_table(std::ostream& out, const ExperimentConfig& config) {
  const int top = config.orders.back();
  out << "model,n,p,n2,beta,j,cumulant,standardized_moment\n";
  for (const auto& point : config.exact) {
    const auto& m = point.model;
    const auto cumulants = model_cumulants(m, top);
    for (int j = 1; j <= top; ++j) {
      out << to_string(m.kind) << ',' << m.n << ',' << m.p << ',' << m.n2 << ',' << format_double(m.beta) << ','
          << j << ',' << format_double(cumulants[j - 1]) << ',';
      if (j >= 3) out << format_double(standardized_moment_exact(m, j));
      out << '\n';
    }
  }
}

void write_simulation_table(std::ostream& out, const ExperimentConfig& config, int threads) {
  out << "kind,n,p,m,dim,replicates,seed,stream,digest,mean,variance,skewness,kurtosis\n";
  for (const auto& point : config.simulate) {
    const auto batch = run_batch(point.spec, threads);
    const auto s = summarize(batch, 4);
    const auto& spec = point.spec;
    const double var = s.central_moments[1];
    out << to_string(spec.kind) << ',' << spec.n << ',' << format_double(spec.p) << ',' << spec.m << ','
        << spec.dim << ',' << spec.replicates << ',' << spec.seed << ',' << spec.stream << ',' << batch.digest << ','
        << format_double(s.mean) << ',' << format_double(var) << ',';
    if (var > 0.0)
      out << format_double(s.central_moments[2] / std::pow(var, 1.5)) << ','
          << format_double(s.central_moments[3] / (var * var));
    else
      out << ',';
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment gaps and cumulant bounds for exact and simulated models"};
  app.require_subcommand(1);

  CommonFlags exact_flags, bound_flags, sim_flags, report_flags, enum_flags;
  auto* exact_cmd = app.add_subcommand("exact", "cumulant and standardized moment tables for the exact grid");
  add_common(exact_cmd, exact_flags, true);
  auto* bound_cmd = app.add_subcommand("bound", "exact gaps against the moment-gap bound");
  add_common(bound_cmd, bound_flags, true);
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo batch summaries");
  add_common(sim_cmd, sim_flags, true);
  auto* report_cmd = app.add_subcommand("report", "full pipeline report");
  add_common(report_cmd, report_flags, true);
  auto* enum_cmd = app.add_subcommand("enumerate", "exact crossing distribution of all pair partitions");
  add_common(enum_cmd, enum_flags, false);
  int enum_n = 4;
  enum_cmd->add_option("-n,--n", enum_n, "number of pairs (1..8)")->check(CLI::Range(1, 8));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exact_cmd) {
      const auto config = load(exact_flags);
      with_output(exact_flags.out, [&](std::ostream& out) { write_exact_table(out, config); });
      return 0;
    }
    if (*bound_cmd) {
      const auto config = load(bound_flags);
      RunOptions options;
      options.threads = bound_flags.threads;
      options.run_simulations = false;
      const auto result = run_experiment(config, options);
      return finish_rows(config, result, bound_flags, bound_cmd->count("--format") > 0);
    }
    if (*sim_cmd) {
      const auto config = load(sim_flags);
      with_output(sim_flags.out, [&](std::ostream& out) { write_simulation_table(out, config, sim_flags.threads); });
      return 0;
    }
    if (*report_cmd) {
      const auto config = load(report_flags);
      RunOptions options;
      options.threads = report_flags.threads;
      const auto result = run_experiment(config, options);
      return finish_rows(config, result, report_flags, report_cmd->count("--format") > 0);
    }
    if (*enum_cmd) {
      const auto dist = enumerate_pair_partitions_crossings(enum_n);
      with_output(enum_flags.out, [&](std::ostream& out) {
        out << "crossings,count\n";
        for (auto [value, count] : dist) out << value << ',' << count << '\n';
      });
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
