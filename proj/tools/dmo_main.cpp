// Command-line front end: solve a scenario with and without the ramp floor
// and write the comparison reports, or validate a scenario file.
//
// Exit codes: 0 success, 1 usage or schema error, 2 infeasible scenario
// (every hour of a requested case), 3 I/O error.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dmo/aggregate.hpp"
#include "dmo/scenario.hpp"
#include "dmo/scenario_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

bool all_hours_infeasible(const dmo::CaseReport& report) {
  return static_cast<int>(report.infeasible_hours.size()) == report.horizon;
}

void print_case(const dmo::CaseReport& report) {
  std::printf("%s: objective_total=%.6f min_total_ramp=%.6f",
              report.case_label.c_str(), report.objective_total,
              report.min_total_ramp());
  if (!report.infeasible_hours.empty())
    std::printf(" infeasible_hours=%zu", report.infeasible_hours.size());
  std::printf("\n");
  for (const dmo::InfeasibleHourRecord& rec : report.infeasible_hours)
    std::printf("  hour %d infeasible: %s (max ramp %.6f)\n", rec.hour,
                rec.diagnostic.reason.c_str(), rec.diagnostic.max_total_ramp);
}

int run_command(const std::string& scenario_path, const std::string& case_sel,
                bool has_delta, double delta, const std::string& out_dir,
                const std::string& solver_name, unsigned seed) {
  dmo::Scenario scenario;
  if (scenario_path.empty()) {
    scenario = dmo::reference_scenario(seed);
  } else {
    scenario = dmo::parse_scenario(scenario_path);
  }
  if (has_delta)
    scenario.ramp_floor_profile.assign(
        static_cast<std::size_t>(scenario.horizon), delta);

  const dmo::HourSolver solver = solver_name == "enum"
                                     ? dmo::HourSolver::kEnumerate
                                     : dmo::HourSolver::kBranchAndBound;

  if (case_sel == "1" || case_sel == "2") {
    const dmo::CaseReport report =
        dmo::run_case(scenario, case_sel == "2", solver);
    print_case(report);
    dmo::emit_case_summary(report, out_dir);
    return all_hours_infeasible(report) ? kExitInfeasible : kExitOk;
  }

  const dmo::CaseReport case1 = dmo::run_case(scenario, false, solver);
  const dmo::CaseReport case2 = dmo::run_case(scenario, true, solver);
  print_case(case1);
  print_case(case2);
  if (all_hours_infeasible(case1) || all_hours_infeasible(case2)) {
    std::printf("comparison skipped: a case is infeasible in every hour\n");
    dmo::emit_case_summary(all_hours_infeasible(case1) ? case1 : case2,
                           out_dir);
    return kExitInfeasible;
  }
  if (!case1.infeasible_hours.empty() || !case2.infeasible_hours.empty()) {
    std::printf("comparison skipped: some hours are infeasible\n");
    dmo::emit_case_summary(case1.infeasible_hours.empty() ? case2 : case1,
                           out_dir);
    return kExitOk;
  }
  const dmo::CaseComparison cmp = dmo::compare_cases(case1, case2);
  std::printf("objective_delta=%.6f relative_gap=%.6f\n", cmp.objective_delta,
              cmp.relative_gap);
  std::printf("min_ramp case1=%.6f case2=%.6f\n", cmp.min_ramp_case1,
              cmp.min_ramp_case2);
  dmo::emit_reports(cmp, out_dir);
  std::printf("reports written to %s\n", out_dir.c_str());
  return kExitOk;
}

int validate_command(const std::string& scenario_path) {
  const dmo::Scenario scenario = dmo::parse_scenario(scenario_path);
  std::printf("parsed: %zu microgrids, horizon %d\n",
              scenario.microgrids.size(), scenario.horizon);

  int bad_bids = 0;
  for (std::size_t m = 0; m < scenario.microgrids.size(); ++m) {
    const dmo::BidValidation check =
        dmo::validate_bid(scenario.microgrids[m]);
    for (const std::string& v : check.violations) {
      std::printf("bid %s: %s\n", scenario.microgrid_names[m].c_str(),
                  v.c_str());
      ++bad_bids;
    }
  }

  const auto fixed = dmo::total_fixed_load(scenario.microgrids);
  double peak = 0.0;
  for (double v : fixed) peak = std::max(peak, v);
  std::printf("total fixed load peak: %.6f MW\n", peak);

  const bool with_floor = !scenario.ramp_floor_profile.empty();
  int infeasible_hours = 0;
  for (const dmo::HourProblem& problem :
       dmo::hour_problems(scenario, with_floor)) {
    const dmo::FeasibilityReport report = dmo::feasibility_check(problem);
    if (!report.ok()) ++infeasible_hours;
  }
  if (infeasible_hours > 0) {
    const auto problems = dmo::hour_problems(scenario, with_floor);
    for (std::size_t t = 0; t < problems.size(); ++t)
      for (const std::string& issue :
           dmo::feasibility_check(problems[t]).issues)
        std::printf("hour %zu: %s\n", t, issue.c_str());
    std::printf("pre-screen failed for %d hour(s)\n", infeasible_hours);
    return kExitInfeasible;
  }
  if (bad_bids > 0) {
    std::printf("validation failed: %d bid violation(s)\n", bad_bids);
    return kExitUsage;
  }
  std::printf("scenario OK\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution market operator: demand/ramping bid aggregation "
               "and exact award disaggregation"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string case_sel = "both";
  double delta = 0.0;
  std::string out_dir = "out";
  std::string solver_name = "bnb";
  unsigned seed = 42;

  CLI::App* run = app.add_subcommand(
      "run", "Solve a scenario and write comparison reports");
  run->add_option("--scenario", scenario_path,
                  "Scenario file (omit to use the built-in reference "
                  "scenario)");
  run->add_option("--case", case_sel, "Which case to solve")
      ->check(CLI::IsMember({"1", "2", "both"}));
  CLI::Option* delta_opt = run->add_option(
      "--delta", delta, "Override the scenario ramp floor (MW/h)");
  run->add_option("--out", out_dir, "Output directory for report files");
  run->add_option("--solver", solver_name, "Hourly solver")
      ->check(CLI::IsMember({"bnb", "enum"}));
  run->add_option("--seed", seed,
                  "Profile seed for the built-in reference scenario");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand(
      "validate", "Parse a scenario, check the bids and run the "
                  "feasibility pre-screen");
  validate->add_option("--scenario", validate_path, "Scenario file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed())
      return run_command(scenario_path, case_sel, delta_opt->count() > 0,
                         delta, out_dir, solver_name, seed);
    return validate_command(validate_path);
  } catch (const dmo::ReportIoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const dmo::ScenarioFormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
