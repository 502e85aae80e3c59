#pragma once

#include <string>
#include <vector>

#include "dmo/bid.hpp"
#include "dmo/solver.hpp"

namespace dmo {

// A full study instance: the microgrid fleet's bids, the hourly demand award
// handed down from upstream, and the hourly ramp floor the operator promises
// back. Profiles are indexed 0..horizon-1.
struct Scenario {
  int horizon = 24;
  std::vector<MicrogridBid> microgrids;
  std::vector<std::string> microgrid_names;
  std::vector<double> award_profile;       // MW per hour
  std::vector<double> ramp_floor_profile;  // MW/h per hour; empty = none
  double epsilon = 1e-3;
  double big_m = 0.0;  // <= 0 picks 1 + max segment ramp
};

// Structural problems with a scenario, as data. Empty means usable.
std::vector<std::string> validate_scenario(const Scenario& scenario);

// The scenario's hour-by-hour problems; the floor is attached only when
// `with_ramp_floor` is set.
std::vector<HourProblem> hour_problems(const Scenario& scenario,
                                       bool with_ramp_floor);

struct InfeasibleHourRecord {
  int hour = 0;
  InfeasibleHour diagnostic;
};

struct CaseReport {
  std::string case_label;
  int horizon = 0;
  std::vector<std::string> microgrid_names;
  std::vector<double> award_profile;
  std::vector<double> floor_profile;  // empty when the case ran without one

  double objective_total = 0.0;  // $ over feasible hours
  std::vector<double> hourly_objective;   // 0 for infeasible hours
  std::vector<double> hourly_total_ramp;  // 0 for infeasible hours
  std::vector<double> hourly_total_award;
  // [hour][microgrid] total award, fixed plus responsive; 0 when infeasible
  std::vector<std::vector<double>> microgrid_awards;
  std::vector<InfeasibleHourRecord> infeasible_hours;
  std::vector<HourOutcome> outcomes;  // full per-hour detail

  double min_total_ramp() const;  // over feasible hours; 0 if none
};

// Solves every hour of the scenario, with or without the ramp floor, and
// assembles the report. Throws std::invalid_argument on validation failures.
CaseReport run_case(const Scenario& scenario, bool with_ramp_floor,
                    HourSolver solver = HourSolver::kBranchAndBound);

// Side-by-side comparison of a floor-free and a floor-constrained run of the
// same scenario.
struct CaseComparison {
  int horizon = 0;
  std::vector<std::string> microgrid_names;

  bool awards_conserved = false;   // both cases hand out exactly the award
  double max_award_residual = 0.0;

  double objective_case1 = 0.0;
  double objective_case2 = 0.0;
  double objective_delta = 0.0;  // case1 - case2, the cost of the guarantee
  double relative_gap = 0.0;     // delta / case1; 0 when case1 is 0

  double min_ramp_case1 = 0.0;
  double min_ramp_case2 = 0.0;
  std::vector<double> ramp_case1;
  std::vector<double> ramp_case2;
  std::vector<double> floor;

  std::vector<std::vector<double>> awards_case1;  // [hour][microgrid]
  std::vector<std::vector<double>> awards_case2;
  std::vector<std::vector<double>> award_delta;   // case2 - case1
};

// Requires both reports to come from the same scenario and to be feasible in
// every hour; throws std::invalid_argument otherwise.
CaseComparison compare_cases(const CaseReport& case1, const CaseReport& case2);

// The five-microgrid reference fleet used throughout the test suite, four
// dispatchable units each.
std::vector<std::vector<DgUnit>> reference_fleets();

// Reference scenario: the fleet above plus synthetic 24-hour profiles drawn
// from a deterministic generator (see scenario.cpp for the construction).
// The default seed matches the shipped data/tableI_case2.json.
Scenario reference_scenario(unsigned seed = 42);

}  // namespace dmo
