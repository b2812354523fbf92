#pragma once

// Runs schedulers on scenarios and reports the results: single runs,
// baseline comparisons, user-count sweeps and the reproductions of the
// published tables, emitted as CSV or aligned text.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehpf/convex.hpp"
#include "ehpf/heuristics.hpp"
#include "ehpf/model.hpp"
#include "ehpf/scenario.hpp"

namespace ehpf {

enum class Algorithm { kSgTdma, kPtf, kPronto, kBcd, kOracle2x2 };

/// "sg-tdma", "ptf", "pronto", "bcd", "oracle2x2".
const char* to_string(Algorithm alg);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// The comparison set in report order; the baseline comes first.
const std::vector<Algorithm>& default_algorithms();

struct RunOptions {
  SolverConfig solver;
  TdmaMode tdma = TdmaMode::kRoundRobin;
  PtfOptions ptf;
  /// Record wall time per run. Off gives byte-identical reports.
  bool measure_time = true;
  /// Worker threads for batches of independent scenarios.
  int jobs = 1;
};

enum class RunStatus { kOk, kNotConverged, kError };

const char* to_string(RunStatus status);

struct RunRecord {
  std::string scenario;
  std::string case_name;
  int users = 0;
  std::string algorithm;
  RunStatus status = RunStatus::kOk;
  /// Error text or solver warnings.
  std::string message;
  std::optional<Schedule> schedule;
  std::optional<ScoreReport> report;
  /// Relative to SG+TDMA on the same scenario; empty when undefined.
  std::optional<double> utility_improvement_pct;
  std::optional<double> throughput_improvement_pct;
  double wall_ms = 0.0;
};

/// Runs one algorithm. Solver errors end up in the record, never thrown.
///
/// bcd starts from SG+TDMA; oracle2x2 takes the BCD powers sorted to
/// nondecreasing order and the closed-form time allocation for them.
RunRecord run(const Scenario& scenario, Algorithm alg,
              const RunOptions& options = {});

/// Runs the baseline and then each algorithm in `algorithms` (the baseline
/// is added in front when missing).
std::vector<RunRecord> compare(
    const Scenario& scenario, const RunOptions& options = {},
    const std::vector<Algorithm>& algorithms = default_algorithms());

/// compare() on every profile in `profiles` for N = first..last users on
/// the given path-loss ladder. After the rows of each N come rows with
/// scenario "average" holding per-algorithm means over the profiles.
std::vector<RunRecord> sweep_users(
    PathLossCase pathloss_case, int first, int last,
    const RunOptions& options = {},
    const std::vector<Algorithm>& algorithms = default_algorithms(),
    const std::vector<HarvestProfile>& profiles = {
        HarvestProfile::kRegular, HarvestProfile::kBursty,
        HarvestProfile::kVeryBursty});

/// compare() for two users over the low, moderate and high ladders of each
/// profile (utility and throughput improvement against mean path loss).
std::vector<RunRecord> sweep_pathloss(
    const RunOptions& options = {},
    const std::vector<Algorithm>& algorithms = default_algorithms(),
    const std::vector<HarvestProfile>& profiles = {
        HarvestProfile::kRegular, HarvestProfile::kBursty,
        HarvestProfile::kVeryBursty});

enum class Format { kCsv, kTable };

std::optional<Format> parse_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "scenario,case,users,algorithm,utility,total_bits,jain_fi,"
    "utility_improvement_pct,throughput_improvement_pct,wall_ms";

/// Throws InvalidArgument for an empty record list.
std::string emit(const std::vector<RunRecord>& records, Format format);

/// One line of the two-user, two-slot BCD versus closed form comparison.
struct TwoSlotRow {
  double harvest1 = 0.0;
  double harvest2 = 0.0;
  double mean_path_loss_db = 0.0;
  Vector bcd_powers;
  Matrix bcd_shares;
  Matrix optimal_shares;
  double bcd_utility = 0.0;
  double optimal_utility = 0.0;
  int bcd_rounds = 0;
};

/// Harvests [0.5 50], [50 0.5] and [60 20] with path-loss pairs whose means
/// are 20.5/26.5/32.5 dB (2.5/8.5/14.5 dB for the last). BCD output is
/// sorted to nondecreasing power before the closed form is applied.
std::vector<TwoSlotRow> two_slot_table(const RunOptions& options = {});
std::string emit(const std::vector<TwoSlotRow>& rows, Format format);

/// BCD schedules sorted to nondecreasing power, one per user count.
struct ScheduleRow {
  int users = 0;
  Schedule schedule;
  double utility = 0.0;
};

std::vector<ScheduleRow> sorted_bcd_schedules(HarvestProfile profile,
                                              PathLossCase pathloss_case,
                                              int first, int last,
                                              const RunOptions& options = {});
std::string emit(const std::vector<ScheduleRow>& rows, Format format);

/// Jain index per user count, profile and algorithm, taken from sweep
/// records (average rows are skipped).
std::string emit_fairness(const std::vector<RunRecord>& records,
                          Format format);

/// Runs tasks on up to `jobs` threads; results keep the input order.
std::vector<RunRecord> run_batch(
    const std::vector<std::function<std::vector<RunRecord>()>>& tasks,
    int jobs);

}  // namespace ehpf
