#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kex/fairness.hpp"
#include "kex/simulation.hpp"

namespace kex {

enum class SchemeKind { Myopic, Kpd, Learned };
enum class SweepAxis { None, W, C, P, NdadRate };
/// Reference scores for the scaled fairness measures: none, a KPD run
/// (W = 0) on the same seeds and settings, or fixed numbers.
enum class BaselineMode { None, Kpd, Explicit };

std::string to_string(SchemeKind k);
std::string to_string(SweepAxis a);
std::string to_string(BaselineMode b);
SchemeKind parse_scheme_kind(const std::string& s);
SweepAxis parse_sweep_axis(const std::string& s);
BaselineMode parse_baseline_mode(const std::string& s);

struct ExperimentConfig {
  std::string label;                 // row name; empty means derived from the scheme
  SchemeKind scheme = SchemeKind::Myopic;
  std::string weights_file;          // required for Learned
  std::optional<double> W;           // altruist penalty; Learned falls back to the file's value
  EnumerationLimits limits;
  PoolConfig pool;
  int replications = 50;
  std::uint64_t seed = 1;
  int threads = 0;                   // 0 = hardware concurrency
  double timeout_seconds = 60.0;     // per matching round
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;
  BaselineMode baseline = BaselineMode::Kpd;
  WelfareScores baseline_scores;     // used when baseline == Explicit
  std::string out_dir = "out";

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
  /// Scheme with its penalty, loading the weight file when needed.
  Scheme make_scheme() const;
  std::string row_label() const;
  double penalty() const;
};

/// Reads a JSON object whose keys mirror the fields above (see README);
/// keys that are absent keep the values already in `cfg`.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
void apply_config_json(ExperimentConfig& cfg, const std::string& json_text);

/// Per-replication numbers, or their means across replications.
struct Metrics {
  double patients = 0.0;
  double ndads = 0.0;
  double participants = 0.0;
  double matches = 0.0;
  double match_pct = 0.0;
  double wait_recipients = 0.0;
  double wait_all = 0.0;
  double ndads_used = 0.0;
  double altruist_usage_pct = 0.0;
  double paths = 0.0;
  std::array<double, 4> paths_by_length{};
  std::array<double, 4> cycles_by_length{};   // lengths 2, 3, 4, 5
  double patients_in_paths = 0.0;
  double path_match_pct = 0.0;
  BandVector queue_by_band{};
  double patients_waiting = 0.0;
  double ndads_waiting = 0.0;
  /// Welfare of the end-of-run queue; for an aggregate, the mean of the
  /// per-replication scores. Absent when no patient ever arrived.
  std::optional<WelfareScores> welfare;

  bool operator==(const Metrics&) const = default;
};

Metrics metrics_of(const ReplicationResult& r, bool* floored = nullptr);

struct ReplicationSummary {
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;   // set when the replication aborted
  Metrics metrics;

  bool operator==(const ReplicationSummary&) const = default;
};

struct RunReport {
  std::string label;
  std::string scheme;
  double W = 0.0;
  int C = 0;
  int P = 0;
  double pair_rate = 0.0;
  double ndad_rate = 0.0;
  int periods = 0;
  std::uint64_t seed = 0;
  std::vector<ReplicationSummary> replications;
  bool complete = true;
  Metrics mean;                                   // over completed replications
  std::optional<WelfareScores> welfare_of_mean_queue;
  std::optional<WelfareScores> baseline;          // scores the measures divide by
  std::optional<WelfareScores> measures;          // welfare_of_mean_queue / baseline
  std::optional<WelfareScores> measures_of_mean;  // mean.welfare / baseline (mean of scores)
  std::optional<double> matches_per_altruist;     // altruist-rate sweeps, rows after the first
  std::optional<double> donors_per_altruist;      // altruist-rate sweeps
  std::vector<std::string> warnings;

  bool operator==(const RunReport&) const = default;
};

/// Seed of replication `index`; shared by every run with the same base seed.
std::uint64_t replication_seed(std::uint64_t base, int index);

/// Runs the replications (in parallel) and aggregates in index order. An
/// aborted replication is recorded with its error and excluded from means.
RunReport run_experiment(const ExperimentConfig& cfg);

/// One report per value of cfg.axis, all on the same replication seeds.
std::vector<RunReport> sweep(const ExperimentConfig& cfg);

enum class ReportFormat { Csv, Json, Both };
ReportFormat parse_report_format(const std::string& s);

/// Writes the table mirrors (main, paths, cycles, altruist_weights, prices,
/// altruist_rate, queues, fairness, replications) as CSV with two decimals
/// and/or report.json with full precision into `dir`.
void emit_report(const std::vector<RunReport>& reports, ReportFormat format, const std::filesystem::path& dir);

/// Individual table mirrors, for callers that want one in memory.
std::string table_csv(const std::vector<RunReport>& reports, const std::string& table);
const std::vector<std::string>& table_names();

std::string reports_to_json(const std::vector<RunReport>& reports);
std::vector<RunReport> reports_from_json(const std::string& text);

}  // namespace kex
