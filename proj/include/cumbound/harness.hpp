#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cumbound/estimation.hpp"
#include "cumbound/exact_models.hpp"
#include "cumbound/simulators.hpp"

namespace cumbound {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

/// Error in a configuration file or its values (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactPoint {
  ModelSpec model;
  std::optional<LaguerreRegime> regime;  // unset: chosen from (n, p)
  int group = 0;                         // index of the config entry
};

struct SimPoint {
  SimSpec spec;
  std::optional<LaguerreRegime> regime;  // WishartLogDet only
  int group = 0;
};

enum class ReportFormat { CSV, JSON };

std::string_view to_string(ReportFormat format);
ReportFormat parse_format(std::string_view name);

struct ExperimentConfig {
  std::string id = "experiment";
  std::uint64_t seed = 0;
  std::vector<int> orders;
  std::vector<ExactPoint> exact;
  std::vector<SimPoint> simulate;
  std::optional<std::string> output_path;
  ReportFormat format = ReportFormat::CSV;
  std::string echo;  // the parsed config, re-serialized

  void validate() const;
};

/// Parses a JSON config (schema in README). Unknown keys, missing required
/// keys and out-of-range values raise ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Replaces the master seed; simulation streams are unaffected.
void reseed(ExperimentConfig& config, std::uint64_t seed);

struct ReportRow {
  std::string model;
  std::int64_t n = 0;
  std::optional<double> p;
  std::optional<double> beta;
  int k = 0;
  double gap = 0.0;
  std::optional<double> se;
  std::optional<double> bound;
  std::optional<double> delta;
  bool satisfied = true;
  bool exact = true;
  int group = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct FitSummary {
  std::string model;
  int group = 0;
  std::optional<double> beta;
  int k = 0;
  std::string x_name;  // "delta" or "n"
  std::optional<DecayFit> fit;
  std::vector<std::pair<double, double>> dropped;
};

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::vector<FitSummary> fits;
  std::vector<std::string> errors;

  /// Exact rows with satisfied == false.
  std::int64_t soundness_violations() const;
};

struct RunOptions {
  int threads = 1;
  bool run_exact = true;
  bool run_simulations = true;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Decay fits for every (config entry, model, beta, k) with at least three rows.
std::vector<FitSummary> fit_groups(const std::vector<ReportRow>& rows);

/// Decimal text with 17 significant digits, independent of the locale.
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_fits_csv(std::ostream& out, const std::vector<FitSummary>& fits);
void write_json(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);

/// Writes the report to `path`. CSV reports with fits also get `path.fits.csv`.
void emit_report(const ExperimentConfig& config, const ExperimentResult& result, ReportFormat format,
                 const std::string& path);

/// Rows of a JSON report produced by write_json.
std::vector<ReportRow> rows_from_json(std::string_view text);

}  // namespace cumbound
