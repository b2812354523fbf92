// Command line front end: run schedulers on scenarios and reproduce the
// published tables.
//
// Exit codes: 0 success, 1 usage or parse error, 2 when any record failed
// or its solver did not converge.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ehpf/error.hpp"
#include "ehpf/harness.hpp"
#include "ehpf/scenario.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kRecordFailure = 2;

struct CommonArgs {
  std::string out = "table";
  double tol_kkt = ehpf::SolverConfig{}.tol_kkt;
  double tol_utility = ehpf::SolverConfig{}.tol_utility;
  int max_rounds = ehpf::SolverConfig{}.max_bcd_rounds;
  bool min_share = false;
  std::string tdma = "round-robin";
  std::string ptf_beta = "delivered";
  bool no_timing = false;
  int jobs = 1;
  unsigned seed = 0;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
  cmd.add_option("--out", a.out, "Output format")
      ->check(CLI::IsMember({"csv", "table"}));
  cmd.add_option("--tol-kkt", a.tol_kkt, "KKT certificate tolerance")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--tol-utility", a.tol_utility,
                 "BCD stops when a round gains less than this")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--max-rounds", a.max_rounds, "BCD round limit")
      ->check(CLI::PositiveNumber);
  cmd.add_flag("--min-share", a.min_share,
               "Give starved PTF users a minimal share of their best slot");
  cmd.add_option("--tdma", a.tdma, "Baseline time sharing")
      ->check(CLI::IsMember({"round-robin", "equal-share"}));
  cmd.add_option("--ptf-beta", a.ptf_beta, "PTF beta normalization")
      ->check(CLI::IsMember({"delivered", "potential"}));
  cmd.add_flag("--no-timing", a.no_timing,
               "Report wall_ms as 0 so output is reproducible byte for byte");
  cmd.add_option("--jobs", a.jobs, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", a.seed, "Reserved; every algorithm is deterministic");
}

ehpf::RunOptions to_options(const CommonArgs& a) {
  ehpf::RunOptions o;
  o.solver.tol_kkt = a.tol_kkt;
  o.solver.tol_utility = a.tol_utility;
  o.solver.max_bcd_rounds = a.max_rounds;
  o.tdma = a.tdma == "equal-share" ? ehpf::TdmaMode::kEqualShare
                                   : ehpf::TdmaMode::kRoundRobin;
  o.ptf.min_share = a.min_share;
  o.ptf.beta = a.ptf_beta == "potential" ? ehpf::PtfBeta::kPotential
                                         : ehpf::PtfBeta::kDelivered;
  o.measure_time = !a.no_timing;
  o.jobs = a.jobs;
  return o;
}

ehpf::Format to_format(const CommonArgs& a) {
  return *ehpf::parse_format(a.out);
}

struct ScenarioArgs {
  std::string scenario;
  std::string pathloss_case;
  int users = 0;
};

void add_scenario(CLI::App& cmd, ScenarioArgs& s) {
  cmd.add_option("--scenario", s.scenario,
                 "Scenario file, or regular | bursty | very-bursty")
      ->required();
  cmd.add_option("--case", s.pathloss_case, "Path-loss ladder")
      ->check(CLI::IsMember({"low", "moderate", "high"}));
  cmd.add_option("--users", s.users, "Users on the ladder")
      ->check(CLI::PositiveNumber);
}

ehpf::Scenario resolve_scenario(const ScenarioArgs& s) {
  const auto c = ehpf::parse_pathloss_case(
      s.pathloss_case.empty() ? "moderate" : s.pathloss_case);
  const int users = s.users > 0 ? s.users : 2;
  if (const auto profile = ehpf::parse_harvest_profile(s.scenario)) {
    return ehpf::make_scenario(*profile, *c, users);
  }
  std::ifstream in(s.scenario);
  if (!in) {
    throw std::runtime_error("cannot open scenario '" + s.scenario + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  ehpf::Scenario sc = ehpf::parse_scenario(text.str());
  if (!sc.profile) sc.label = std::filesystem::path(s.scenario).stem().string();
  if (!s.pathloss_case.empty() || s.users > 0) {
    sc.pathloss_case = c;
    sc.users = users;
    sc.params.path_loss_db = ehpf::path_loss_ladder(*c, users);
    (void)sc.instance();
  }
  return sc;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw std::runtime_error("bad user range '" + text + "', expected A..B");
  }
}

int report(const std::vector<ehpf::RunRecord>& records, ehpf::Format format) {
  std::cout << ehpf::emit(records, format);
  int code = 0;
  for (const auto& r : records) {
    if (r.status == ehpf::RunStatus::kOk) continue;
    code = kRecordFailure;
    std::cerr << r.scenario << '/' << r.case_name << '/' << r.users << '/'
              << r.algorithm << ": " << ehpf::to_string(r.status);
    if (!r.message.empty()) std::cerr << ": " << r.message;
    std::cerr << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proportionally fair scheduling for an energy-harvesting downlink"};
  app.require_subcommand(1);
  int code = 0;

  CommonArgs run_common;
  ScenarioArgs run_scenario;
  std::string run_alg;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm on a scenario");
  add_scenario(*run_cmd, run_scenario);
  run_cmd->add_option("--alg", run_alg, "Algorithm")
      ->required()
      ->check(CLI::IsMember({"sg-tdma", "ptf", "pronto", "bcd", "oracle2x2"}));
  add_common(*run_cmd, run_common);
  run_cmd->callback([&] {
    const auto sc = resolve_scenario(run_scenario);
    code = report({ehpf::run(sc, *ehpf::parse_algorithm(run_alg),
                             to_options(run_common))},
                  to_format(run_common));
  });

  CommonArgs cmp_common;
  ScenarioArgs cmp_scenario;
  auto* cmp_cmd = app.add_subcommand(
      "compare", "Run the baseline, PTF, ProNTO and BCD on a scenario");
  add_scenario(*cmp_cmd, cmp_scenario);
  add_common(*cmp_cmd, cmp_common);
  cmp_cmd->callback([&] {
    const auto sc = resolve_scenario(cmp_scenario);
    code = report(ehpf::compare(sc, to_options(cmp_common)),
                  to_format(cmp_common));
  });

  CommonArgs sweep_common;
  std::string sweep_users = "2..8";
  std::string sweep_case = "moderate";
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Compare over all harvest profiles for a range of user counts");
  sweep_cmd->add_option("--users", sweep_users, "User range A..B");
  sweep_cmd->add_option("--case", sweep_case, "Path-loss ladder")
      ->check(CLI::IsMember({"low", "moderate", "high"}));
  add_common(*sweep_cmd, sweep_common);
  sweep_cmd->callback([&] {
    const auto [first, last] = parse_range(sweep_users);
    code = report(ehpf::sweep_users(*ehpf::parse_pathloss_case(sweep_case),
                                    first, last, to_options(sweep_common)),
                  to_format(sweep_common));
  });

  CommonArgs pl_common;
  auto* pl_cmd = app.add_subcommand(
      "pathloss", "Two users over the low, moderate and high ladders");
  add_common(*pl_cmd, pl_common);
  pl_cmd->callback([&] {
    code = report(ehpf::sweep_pathloss(to_options(pl_common)),
                  to_format(pl_common));
  });

  CommonArgs t2_common;
  auto* t2_cmd = app.add_subcommand(
      "table2", "BCD versus the closed form for two users and two slots");
  add_common(*t2_cmd, t2_common);
  t2_cmd->callback([&] {
    std::cout << ehpf::emit(ehpf::two_slot_table(to_options(t2_common)),
                            to_format(t2_common));
  });

  CommonArgs t3_common;
  std::string t3_users = "2..8";
  std::string t3_scenario = "bursty";
  std::string t3_case = "moderate";
  auto* t3_cmd = app.add_subcommand(
      "table3", "BCD schedules sorted to nondecreasing power per user count");
  t3_cmd->add_option("--users", t3_users, "User range A..B");
  t3_cmd->add_option("--scenario", t3_scenario, "Harvest profile")
      ->check(CLI::IsMember({"regular", "bursty", "very-bursty"}));
  t3_cmd->add_option("--case", t3_case, "Path-loss ladder")
      ->check(CLI::IsMember({"low", "moderate", "high"}));
  add_common(*t3_cmd, t3_common);
  t3_cmd->callback([&] {
    const auto [first, last] = parse_range(t3_users);
    std::cout << ehpf::emit(
        ehpf::sorted_bcd_schedules(*ehpf::parse_harvest_profile(t3_scenario),
                                   *ehpf::parse_pathloss_case(t3_case), first,
                                   last, to_options(t3_common)),
        to_format(t3_common));
  });

  CommonArgs t4_common;
  std::string t4_users = "2..8";
  std::string t4_case = "moderate";
  auto* t4_cmd = app.add_subcommand(
      "table4", "Jain index per algorithm, profile and user count");
  t4_cmd->add_option("--users", t4_users, "User range A..B");
  t4_cmd->add_option("--case", t4_case, "Path-loss ladder")
      ->check(CLI::IsMember({"low", "moderate", "high"}));
  add_common(*t4_cmd, t4_common);
  t4_cmd->callback([&] {
    const auto [first, last] = parse_range(t4_users);
    std::cout << ehpf::emit_fairness(
        ehpf::sweep_users(*ehpf::parse_pathloss_case(t4_case), first, last,
                          to_options(t4_common)),
        to_format(t4_common));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  } catch (const ehpf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return code;
}
