#include "ehpf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "ehpf/error.hpp"
#include "ehpf/oracle2x2.hpp"
#include "ehpf/structure.hpp"

namespace ehpf {

namespace {

using Cells = std::vector<std::vector<std::string>>;

std::string fixed6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

std::string fixed6(const std::optional<double>& v) {
  return v ? fixed6(*v) : std::string();
}

std::string render_csv(const std::vector<std::string>& header,
                       const Cells& rows) {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

// First column left-aligned, the rest right-aligned, two spaces apart.
std::string render_table(const std::vector<std::string>& header,
                         const Cells& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&width](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], cells[i].size());
    }
  };
  widen(header);
  for (const auto& r : rows) widen(r);
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text += "  ";
      const std::string pad(width[i] - cells[i].size(), ' ');
      text += i == 0 ? cells[i] + pad : pad + cells[i];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string render(Format format, const std::vector<std::string>& header,
                   const Cells& rows) {
  return format == Format::kCsv ? render_csv(header, rows)
                                : render_table(header, rows);
}

std::optional<double> safe_improvement(double value, double baseline) {
  try {
    return improvement_pct(value, baseline);
  } catch (const UndefinedBaseline&) {
    return std::nullopt;
  }
}

// BCD from the baseline, sorted to nondecreasing power when that keeps the
// schedule feasible.
struct BcdRun {
  BcdResult result;
  Schedule sorted;
};

BcdRun run_bcd(const Instance& inst, const RunOptions& options) {
  BcdResult res = bcd(inst, sg_tdma(inst, options.tdma), options.solver);
  SortedSchedule s = sort_schedule_nondecreasing(inst, res.schedule);
  Schedule sorted = s.feasible ? std::move(s.schedule) : res.schedule;
  return BcdRun{std::move(res), std::move(sorted)};
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace

const char* to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kSgTdma:
      return "sg-tdma";
    case Algorithm::kPtf:
      return "ptf";
    case Algorithm::kPronto:
      return "pronto";
    case Algorithm::kBcd:
      return "bcd";
    case Algorithm::kOracle2x2:
      return "oracle2x2";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kSgTdma, Algorithm::kPtf, Algorithm::kPronto,
                 Algorithm::kBcd, Algorithm::kOracle2x2}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

const std::vector<Algorithm>& default_algorithms() {
  static const std::vector<Algorithm> algs = {
      Algorithm::kSgTdma, Algorithm::kPtf, Algorithm::kPronto,
      Algorithm::kBcd};
  return algs;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kNotConverged:
      return "not-converged";
    case RunStatus::kError:
      return "error";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "table") return Format::kTable;
  return std::nullopt;
}

RunRecord run(const Scenario& scenario, Algorithm alg,
              const RunOptions& options) {
  RunRecord rec;
  rec.scenario = scenario.label;
  rec.case_name = scenario.case_label();
  rec.users = static_cast<int>(scenario.params.path_loss_db.size());
  rec.algorithm = to_string(alg);

  const auto start = std::chrono::steady_clock::now();
  try {
    const Instance inst = scenario.instance();
    std::optional<Schedule> sched;
    switch (alg) {
      case Algorithm::kSgTdma:
        sched = sg_tdma(inst, options.tdma);
        break;
      case Algorithm::kPtf:
        sched = ptf(inst, options.ptf);
        break;
      case Algorithm::kPronto:
        sched = pronto(inst);
        break;
      case Algorithm::kBcd: {
        BcdResult res = bcd(inst, sg_tdma(inst, options.tdma), options.solver);
        if (!res.trace.converged) rec.status = RunStatus::kNotConverged;
        rec.message = join(res.trace.warnings, "; ");
        sched = std::move(res.schedule);
        break;
      }
      case Algorithm::kOracle2x2: {
        BcdRun b = run_bcd(inst, options);
        if (!b.result.trace.converged) rec.status = RunStatus::kNotConverged;
        rec.message = join(b.result.trace.warnings, "; ");
        const TwoByTwoCase c = optimal_2x2(inst, b.sorted.powers());
        sched = Schedule(b.sorted.powers(), c.tau_star);
        break;
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    if (options.measure_time) {
      rec.wall_ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
    }

    rec.report = score(inst, *sched);
    rec.schedule = std::move(sched);
    const ScoreReport base = alg == Algorithm::kSgTdma
                                 ? *rec.report
                                 : score(inst, sg_tdma(inst, options.tdma));
    rec.utility_improvement_pct =
        safe_improvement(rec.report->utility, base.utility);
    rec.throughput_improvement_pct =
        safe_improvement(rec.report->total_bits, base.total_bits);
  } catch (const std::exception& e) {
    rec.status = RunStatus::kError;
    rec.message = e.what();
    rec.report.reset();
    rec.schedule.reset();
  }
  return rec;
}

std::vector<RunRecord> compare(const Scenario& scenario,
                               const RunOptions& options,
                               const std::vector<Algorithm>& algorithms) {
  std::vector<Algorithm> order = {Algorithm::kSgTdma};
  for (Algorithm a : algorithms) {
    if (a != Algorithm::kSgTdma) order.push_back(a);
  }
  std::vector<RunRecord> out;
  for (Algorithm a : order) out.push_back(run(scenario, a, options));
  return out;
}

std::vector<RunRecord> run_batch(
    const std::vector<std::function<std::vector<RunRecord>()>>& tasks,
    int jobs) {
  std::vector<std::vector<RunRecord>> results(tasks.size());
  const std::size_t workers =
      std::min<std::size_t>(tasks.size(), static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          results[i] = tasks[i]();
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<RunRecord> out;
  for (auto& r : results) {
    std::move(r.begin(), r.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<RunRecord> sweep_users(PathLossCase pathloss_case, int first,
                                   int last, const RunOptions& options,
                                   const std::vector<Algorithm>& algorithms,
                                   const std::vector<HarvestProfile>& profiles) {
  if (first < 1 || last < first) {
    throw InvalidArgument("sweep: user range must satisfy 1 <= first <= last");
  }
  std::vector<std::function<std::vector<RunRecord>()>> tasks;
  for (int n = first; n <= last; ++n) {
    for (HarvestProfile p : profiles) {
      tasks.emplace_back([=, &options, &algorithms] {
        return compare(make_scenario(p, pathloss_case, n), options, algorithms);
      });
    }
  }
  std::vector<RunRecord> flat = run_batch(tasks, options.jobs);

  std::vector<RunRecord> out;
  std::size_t pos = 0;
  for (int n = first; n <= last; ++n) {
    const std::size_t begin = pos;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      while (pos < flat.size() && flat[pos].users == n &&
             flat[pos].scenario == to_string(profiles[i])) {
        out.push_back(flat[pos++]);
      }
    }
    // Means over profiles, per algorithm in report order.
    std::vector<std::string> names;
    for (std::size_t i = begin; i < pos; ++i) {
      if (std::find(names.begin(), names.end(), flat[i].algorithm) ==
          names.end()) {
        names.push_back(flat[i].algorithm);
      }
    }
    for (const auto& name : names) {
      RunRecord avg;
      avg.scenario = "average";
      avg.case_name = to_string(pathloss_case);
      avg.users = n;
      avg.algorithm = name;
      ScoreReport rep;
      double u = 0, bits = 0, fi = 0, ui = 0, ti = 0, ms = 0;
      int count = 0;
      bool fi_ok = true, ui_ok = true, ti_ok = true;
      for (std::size_t i = begin; i < pos; ++i) {
        const RunRecord& r = flat[i];
        if (r.algorithm != name) continue;
        if (r.status == RunStatus::kError || !r.report) {
          avg.status = RunStatus::kError;
          avg.message = r.scenario + ": " + r.message;
          break;
        }
        if (r.status == RunStatus::kNotConverged) {
          avg.status = RunStatus::kNotConverged;
        }
        ++count;
        u += r.report->utility;
        bits += r.report->total_bits;
        fi_ok = fi_ok && r.report->jain_fi.has_value();
        if (fi_ok) fi += *r.report->jain_fi;
        ui_ok = ui_ok && r.utility_improvement_pct.has_value();
        if (ui_ok) ui += *r.utility_improvement_pct;
        ti_ok = ti_ok && r.throughput_improvement_pct.has_value();
        if (ti_ok) ti += *r.throughput_improvement_pct;
        ms += r.wall_ms;
      }
      if (avg.status != RunStatus::kError && count > 0) {
        rep.utility = u / count;
        rep.total_bits = bits / count;
        if (fi_ok) rep.jain_fi = fi / count;
        avg.report = rep;
        if (ui_ok) avg.utility_improvement_pct = ui / count;
        if (ti_ok) avg.throughput_improvement_pct = ti / count;
        avg.wall_ms = ms / count;
      }
      out.push_back(std::move(avg));
    }
  }
  return out;
}

std::vector<RunRecord> sweep_pathloss(
    const RunOptions& options, const std::vector<Algorithm>& algorithms,
    const std::vector<HarvestProfile>& profiles) {
  std::vector<std::function<std::vector<RunRecord>()>> tasks;
  for (HarvestProfile p : profiles) {
    for (PathLossCase c :
         {PathLossCase::kLow, PathLossCase::kModerate, PathLossCase::kHigh}) {
      tasks.emplace_back([=, &options, &algorithms] {
        return compare(make_scenario(p, c, 2), options, algorithms);
      });
    }
  }
  return run_batch(tasks, options.jobs);
}

std::string emit(const std::vector<RunRecord>& records, Format format) {
  if (records.empty()) throw InvalidArgument("emit: no records");
  std::vector<std::string> header;
  {
    std::string h(kCsvHeader);
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = h.find(',', pos);
      header.push_back(h.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (format == Format::kTable) header.push_back("status");
  Cells rows;
  for (const RunRecord& r : records) {
    std::vector<std::string> cells = {r.scenario, r.case_name,
                                      std::to_string(r.users), r.algorithm};
    if (r.report) {
      cells.push_back(fixed6(r.report->utility));
      cells.push_back(fixed6(r.report->total_bits));
      cells.push_back(fixed6(r.report->jain_fi));
    } else {
      cells.insert(cells.end(), 3, std::string());
    }
    cells.push_back(fixed6(r.utility_improvement_pct));
    cells.push_back(fixed6(r.throughput_improvement_pct));
    cells.push_back(fixed6(r.wall_ms));
    if (format == Format::kTable) cells.push_back(to_string(r.status));
    rows.push_back(std::move(cells));
  }
  return render(format, header, rows);
}

std::vector<TwoSlotRow> two_slot_table(const RunOptions& options) {
  struct Setup {
    double e1, e2, first_db;
  };
  static const Setup setups[] = {
      {0.5, 50, 19}, {0.5, 50, 25}, {0.5, 50, 31},
      {50, 0.5, 19}, {50, 0.5, 25}, {50, 0.5, 31},
      {60, 20, 1},   {60, 20, 7},   {60, 20, 13},
  };
  std::vector<TwoSlotRow> out;
  for (const Setup& s : setups) {
    Instance::Params params;
    params.harvests = {s.e1, s.e2};
    params.path_loss_db = {s.first_db, s.first_db + 3.0};
    const Instance inst(params);
    BcdRun b = run_bcd(inst, options);
    const TwoByTwoCase c = optimal_2x2(inst, b.sorted.powers());

    TwoSlotRow row;
    row.harvest1 = s.e1;
    row.harvest2 = s.e2;
    row.mean_path_loss_db = s.first_db + 1.5;
    row.bcd_powers = b.sorted.powers();
    row.bcd_shares = b.sorted.shares();
    row.optimal_shares = c.tau_star;
    row.bcd_utility = utility(inst, b.sorted);
    row.optimal_utility = c.utility_star;
    row.bcd_rounds = b.result.trace.rounds_used;
    out.push_back(std::move(row));
  }
  return out;
}

std::string emit(const std::vector<TwoSlotRow>& rows, Format format) {
  const std::vector<std::string> header = {
      "harvests",   "mean_path_loss_db", "p1",         "p2",
      "bcd_tau11",  "bcd_tau12",         "bcd_tau21",  "bcd_tau22",
      "opt_tau11",  "opt_tau12",         "opt_tau21",  "opt_tau22",
      "bcd_utility", "optimal_utility"};
  Cells cells;
  for (const TwoSlotRow& r : rows) {
    std::ostringstream h;
    h << '[' << r.harvest1 << ' ' << r.harvest2 << ']';
    std::vector<std::string> line = {h.str(), fixed6(r.mean_path_loss_db),
                                     fixed6(r.bcd_powers[0]),
                                     fixed6(r.bcd_powers[1])};
    for (const Matrix* m : {&r.bcd_shares, &r.optimal_shares}) {
      line.push_back(fixed6((*m)(0, 0)));
      line.push_back(fixed6((*m)(0, 1)));
      line.push_back(fixed6((*m)(1, 0)));
      line.push_back(fixed6((*m)(1, 1)));
    }
    line.push_back(fixed6(r.bcd_utility));
    line.push_back(fixed6(r.optimal_utility));
    cells.push_back(std::move(line));
  }
  return render(format, header, cells);
}

std::vector<ScheduleRow> sorted_bcd_schedules(HarvestProfile profile,
                                              PathLossCase pathloss_case,
                                              int first, int last,
                                              const RunOptions& options) {
  if (first < 1 || last < first) {
    throw InvalidArgument("user range must satisfy 1 <= first <= last");
  }
  std::vector<ScheduleRow> out;
  for (int n = first; n <= last; ++n) {
    const Instance inst = make_scenario(profile, pathloss_case, n).instance();
    BcdRun b = run_bcd(inst, options);
    const double u = utility(inst, b.sorted);
    out.push_back(ScheduleRow{n, std::move(b.sorted), u});
  }
  return out;
}

std::string emit(const std::vector<ScheduleRow>& rows, Format format) {
  if (rows.empty()) throw InvalidArgument("emit: no rows");
  const Index k = rows.front().schedule.num_slots();
  std::vector<std::string> header = {"users", "row"};
  for (Index t = 0; t < k; ++t) header.push_back("slot" + std::to_string(t + 1));
  Cells cells;
  for (const ScheduleRow& r : rows) {
    const Matrix& tau = r.schedule.shares();
    for (Index n = 0; n < tau.rows(); ++n) {
      std::vector<std::string> line = {std::to_string(r.users),
                                       "tau_user" + std::to_string(n + 1)};
      for (Index t = 0; t < k; ++t) line.push_back(fixed6(tau(n, t)));
      cells.push_back(std::move(line));
    }
    std::vector<std::string> line = {std::to_string(r.users), "power"};
    for (Index t = 0; t < k; ++t) line.push_back(fixed6(r.schedule.powers()[t]));
    cells.push_back(std::move(line));
  }
  return render(format, header, cells);
}

std::string emit_fairness(const std::vector<RunRecord>& records,
                          Format format) {
  if (format == Format::kCsv) {
    Cells cells;
    for (const RunRecord& r : records) {
      if (r.scenario == "average") continue;
      cells.push_back({std::to_string(r.users), r.scenario, r.algorithm,
                       r.report ? fixed6(r.report->jain_fi) : std::string()});
    }
    return render_csv({"users", "scenario", "algorithm", "jain_fi"}, cells);
  }
  // Wide layout: one row per user count, one column per scenario/algorithm.
  std::vector<std::string> columns;
  std::map<int, std::map<std::string, std::string>> grid;
  for (const RunRecord& r : records) {
    if (r.scenario == "average") continue;
    const std::string col = r.scenario + "/" + r.algorithm;
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
      columns.push_back(col);
    }
    grid[r.users][col] = r.report && r.report->jain_fi
                             ? fixed4(*r.report->jain_fi)
                             : "-";
  }
  std::vector<std::string> header = {"users"};
  header.insert(header.end(), columns.begin(), columns.end());
  Cells cells;
  for (const auto& [n, row] : grid) {
    std::vector<std::string> line = {std::to_string(n)};
    for (const auto& c : columns) {
      const auto it = row.find(c);
      line.push_back(it == row.end() ? "-" : it->second);
    }
    cells.push_back(std::move(line));
  }
  return render_table(header, cells);
}

}  // namespace ehpf
