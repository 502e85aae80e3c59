#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmo/bid.hpp"

namespace dmo {

inline constexpr std::uint64_t kDefaultCombinationCap = 1'000'000;

// One microgrid's bid as seen by a single-hour solve.
struct HourBid {
  int microgrid_id = 0;
  double fixed_load = 0.0;  // MW at this hour
  std::vector<BidSegment> segments;
};

// A single hour's award-disaggregation instance. Hours are independent, so
// the whole horizon is a list of these.
struct HourProblem {
  double awarded_demand = 0.0;       // MW handed down for this hour
  std::vector<HourBid> bids;
  std::optional<double> ramp_floor;  // MW/h guaranteed upstream; absent = none
  double epsilon = 1e-3;             // MW; smallest load a selected segment carries
  double big_m = 0.0;                // verifier constant; <= 0 picks 1 + max ramp

  double total_fixed_load() const;
  // awarded_demand minus total fixed load; values within 1e-9 of zero snap
  // to zero so awards that exactly cover the fixed load stay feasible.
  double responsive_demand() const;
  double effective_big_m() const;
};

struct MicrogridAward {
  int microgrid_id = 0;
  std::vector<double> segment_loads;  // MW per segment
  std::vector<bool> selected;         // segment selection flags
  double selected_ramp = 0.0;         // MW/h of the marginal selected segment
  double responsive_load = 0.0;       // MW
  double total_award = 0.0;           // MW, fixed + responsive

  int selected_prefix() const;  // leading run of selected segments
};

struct HourSolution {
  std::vector<MicrogridAward> awards;
  double total_ramp = 0.0;  // MW/h offered upstream this hour
  double objective = 0.0;   // $ demand benefit
};

// Infeasibility is a result, not a failure. The diagnostic reports the best
// ramp reachable while still serving the demand, and the responsive-demand
// window reachable while still meeting the floor.
struct InfeasibleHour {
  std::string reason;
  double max_total_ramp = 0.0;
  double demand_min = 0.0;
  double demand_max = 0.0;
};

struct HourOutcome {
  std::optional<HourSolution> solution;
  std::optional<InfeasibleHour> infeasible;
  bool feasible() const { return solution.has_value(); }
};

struct SolveStats {
  std::uint64_t nodes = 0;   // search states entered, root included
  std::uint64_t leaves = 0;  // full selections evaluated exactly
};

struct InnerFill {
  std::vector<std::vector<double>> segment_loads;  // [microgrid][segment]
  double objective = 0.0;
};

// Optimal load placement for a fixed selection: each microgrid's leading
// `selected_prefixes[m]` segments carry at least epsilon, the remainder goes
// to the selected segments in strictly descending price order (ties by
// microgrid, then segment) up to each capacity. Returns nullopt when the
// demand falls outside the selection's feasible window.
std::optional<InnerFill> inner_fill(const std::vector<int>& selected_prefixes,
                                    double responsive_demand,
                                    const HourProblem& problem);

// Exhaustive reference solver: sequential selection collapses the binaries to
// per-microgrid prefix lengths, so sweeping every prefix combination is
// exact. Ties resolve to the lexicographically smallest prefix vector.
// Throws when the combination count exceeds `max_combinations`.
HourOutcome enumerate_hour(
    const HourProblem& problem,
    std::uint64_t max_combinations = kDefaultCombinationCap);

// Depth-first branch and bound over the same prefix space. The bound relaxes
// the per-segment minimum loads and the ramp pairing: greedy merit-order fill
// of every not-yet-excluded segment, plus each undecided microgrid's best
// reachable ramp. Certified to match enumerate_hour's objective.
HourOutcome solve_hour_bnb(const HourProblem& problem,
                           SolveStats* stats = nullptr);

enum class HourSolver { kBranchAndBound, kEnumerate };

// Independent per-hour solves; an infeasible hour is reported in place
// without aborting the rest.
std::vector<HourOutcome> solve_horizon(
    const std::vector<HourProblem>& problems,
    HourSolver solver = HourSolver::kBranchAndBound);

struct ConstraintViolation {
  std::string constraint;
  std::string detail;
  double residual = 0.0;
};

// Literal re-check of the hour's constraint system against a candidate
// solution, big-M activation forms included, at 1e-9 absolute tolerance.
// An empty list means the solution is feasible.
std::vector<ConstraintViolation> verify_milp_constraints(
    const HourProblem& problem, const HourSolution& solution);

struct FeasibilityReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Necessary-condition pre-screen: award covers the fixed load, responsive
// demand fits the offered capacity, and the ramp floor does not exceed the
// sum of each microgrid's best segment ramp. Passing here does not prove
// feasibility; that is the solver's job.
FeasibilityReport feasibility_check(const HourProblem& problem);

}  // namespace dmo
