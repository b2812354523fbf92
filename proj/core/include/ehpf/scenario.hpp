#pragma once

// Scenario descriptions: built-in harvest profiles and path-loss ladders,
// and a small line-oriented text format.
//
// Format: one `KEY value...` pair per line, `#` starts a comment, later
// keys override earlier ones. Keys:
//
//   W            bandwidth (Hz)
//   N0           noise density (W/Hz)
//   T            slot length (s)
//   HARVESTS     harvest per slot (J), K values
//   PATHLOSS_DB  path loss per user (dB), N values
//   SCENARIO     regular | bursty | very-bursty   (sets HARVESTS)
//   CASE         low | moderate | high            (with USERS, sets PATHLOSS_DB)
//   USERS        number of users on the ladder
//   EPSILON      minimum frame share per user (s)

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehpf/model.hpp"

namespace ehpf {

enum class HarvestProfile { kRegular, kBursty, kVeryBursty };
enum class PathLossCase { kLow, kModerate, kHigh };

const char* to_string(HarvestProfile profile);
const char* to_string(PathLossCase c);
std::optional<HarvestProfile> parse_harvest_profile(std::string_view name);
std::optional<PathLossCase> parse_pathloss_case(std::string_view name);

/// The harvest vectors of the three built-in profiles (J per slot).
const std::vector<double>& harvests(HarvestProfile profile);

/// Path loss of the strongest user: 13, 19 or 25 dB.
double ladder_start_db(PathLossCase c);

/// users values starting at ladder_start_db, each 3 dB above the previous.
std::vector<double> path_loss_ladder(PathLossCase c, int users);

struct Scenario {
  Instance::Params params;
  std::string label = "custom";
  std::optional<HarvestProfile> profile;
  std::optional<PathLossCase> pathloss_case;
  std::optional<int> users;

  Instance instance() const { return Instance(params); }
  /// Case name for reports; "custom" when path losses were given directly.
  std::string case_label() const;

  bool operator==(const Scenario&) const = default;
};

/// Built-in scenario: profile harvests, ladder path losses, default physics.
Scenario make_scenario(HarvestProfile profile, PathLossCase c, int users);

/// Throws ParseError (with the offending line) on unknown keys, malformed
/// numbers, missing HARVESTS or PATHLOSS_DB, or an invalid resulting
/// Instance.
Scenario parse_scenario(std::string_view text);

/// Text that parse_scenario maps back to an equal Scenario. Named profiles
/// and cases are written by name; everything else as explicit values.
std::string format_scenario(const Scenario& scenario);

}  // namespace ehpf
