#include <doctest.h>

#include <limits>
#include <random>
#include <stdexcept>

#include "dmo/solver.hpp"
#include "test_support.hpp"

using namespace dmo;
using dmo_test::close;
using dmo_test::hour_problem_from_bids;
using dmo_test::random_instance;
using dmo_test::reference_bids;

namespace {

HourProblem single_box_problem() {
  HourProblem problem;
  problem.awarded_demand = 5.0;
  problem.bids.push_back({0, 0.0, {{10.0, 5.0, 2.0}}});
  return problem;
}

// Exhaustive grid search over the two-segment fill at the given resolution;
// the independent check for the greedy inner fill.
double grid_search_two_segments(double p1, double c1, double p2, double c2,
                                double demand, double eps, double step) {
  double best = -1.0;
  for (double x1 = eps; x1 <= c1 + 1e-12; x1 += step) {
    const double x2 = demand - x1;
    if (x2 < eps - 1e-12 || x2 > c2 + 1e-12) continue;
    best = std::max(best, p1 * x1 + p2 * x2);
  }
  return best;
}

}  // namespace

TEST_CASE("inner fill solves the single-box case") {
  const HourProblem problem = single_box_problem();
  const auto fill = inner_fill({1}, 5.0, problem);
  REQUIRE(fill.has_value());
  CHECK(fill->segment_loads[0][0] == 5.0);
  CHECK(fill->objective == 50.0);
}

TEST_CASE("inner fill matches a grid-search oracle on two segments") {
  HourProblem problem;
  problem.awarded_demand = 6.0;
  problem.bids.push_back({0, 0.0, {{60.0, 5.0, 1.0}, {40.0, 5.0, 1.0}}});
  const auto fill = inner_fill({2}, 6.0, problem);
  REQUIRE(fill.has_value());
  CHECK(close(fill->segment_loads[0][0], 5.0));
  CHECK(close(fill->segment_loads[0][1], 1.0));
  CHECK(close(fill->objective, 340.0));

  const double oracle =
      grid_search_two_segments(60.0, 5.0, 40.0, 5.0, 6.0, 1e-3, 1e-3);
  CHECK(fill->objective >= oracle - 1e-6);
  CHECK(close(fill->objective, oracle, 1e-6));
}

TEST_CASE("inner fill rejects demand outside the selection window") {
  HourProblem problem;
  problem.awarded_demand = 0.0;
  problem.bids.push_back({0, 0.0, {{60.0, 5.0, 1.0}, {40.0, 5.0, 1.0}}});
  CHECK(!inner_fill({2}, 1e-4, problem).has_value());  // below 2 * epsilon
  CHECK(!inner_fill({2}, 10.5, problem).has_value());  // above capacity
  CHECK(inner_fill({0}, 0.0, problem).has_value());
  CHECK_THROWS_AS(inner_fill({3}, 1.0, problem), std::invalid_argument);
}

TEST_CASE("enumeration solves the single-microgrid hour") {
  const HourProblem problem = single_box_problem();
  const HourOutcome outcome = enumerate_hour(problem);
  REQUIRE(outcome.feasible());
  CHECK(outcome.solution->objective == 50.0);
  CHECK(outcome.solution->awards[0].selected_prefix() == 1);
  CHECK(outcome.solution->total_ramp == 2.0);
  CHECK(verify_milp_constraints(problem, *outcome.solution).empty());
}

TEST_CASE("an unreachable floor is reported with the best ramp") {
  HourProblem problem = single_box_problem();
  problem.ramp_floor = 3.0;
  const HourOutcome outcome = enumerate_hour(problem);
  REQUIRE(!outcome.feasible());
  CHECK(outcome.infeasible->reason == "ramp floor unreachable");
  CHECK(outcome.infeasible->max_total_ramp == 2.0);
}

TEST_CASE("the combination cap trips on oversized instances") {
  HourProblem problem = single_box_problem();
  CHECK_THROWS_AS(enumerate_hour(problem, 1), std::runtime_error);
}

// Frozen regression: reference fleet, 40 MW responsive demand, 12.5 MW/h
// floor. The value below is the output of the exhaustive sweep on its first
// verified run.
TEST_CASE("reference fleet at 40 MW under a 12.5 floor (frozen)") {
  const HourProblem problem =
      hour_problem_from_bids(reference_bids(), 40.0, 12.5);
  const HourOutcome outcome = enumerate_hour(problem);
  REQUIRE(outcome.feasible());
  CHECK(close(outcome.solution->objective, 2589.7846999999997, 1e-9));
  CHECK(outcome.solution->total_ramp >= 12.5);
  CHECK(verify_milp_constraints(problem, *outcome.solution).empty());

  const HourOutcome bnb = solve_hour_bnb(problem);
  REQUIRE(bnb.feasible());
  CHECK(close(bnb.solution->objective, outcome.solution->objective));
}

TEST_CASE("branch and bound matches the sweep on randomized hours") {
  std::mt19937 rng(2024);
  int feasible_count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const HourProblem problem = random_instance(rng);
    const HourOutcome oracle = enumerate_hour(problem);
    const HourOutcome fast = solve_hour_bnb(problem);
    REQUIRE(oracle.feasible() == fast.feasible());
    if (!oracle.feasible()) continue;
    ++feasible_count;
    CHECK(close(fast.solution->objective, oracle.solution->objective));
    CHECK(verify_milp_constraints(problem, *oracle.solution).empty());
    CHECK(verify_milp_constraints(problem, *fast.solution).empty());

    // demand conservation
    double total = 0.0;
    for (const MicrogridAward& award : fast.solution->awards)
      total += award.total_award;
    CHECK(close(total, problem.awarded_demand));

    // the ramp pairing agrees with the bid curve whenever the marginal
    // selected segment actually carries load past the previous boundary
    for (std::size_t m = 0; m < problem.bids.size(); ++m) {
      const MicrogridAward& award = fast.solution->awards[m];
      const int prefix = award.selected_prefix();
      if (prefix == 0) {
        CHECK(award.selected_ramp == 0.0);
        continue;
      }
      double boundary = 0.0;
      for (int j = 0; j + 1 < prefix; ++j)
        boundary += problem.bids[m].segments[j].max_quantity;
      if (award.responsive_load > boundary + 1e-12) {
        MicrogridBid bid;
        bid.segments = problem.bids[m].segments;
        CHECK(award.selected_ramp ==
              marginal_ramp_at(bid, award.responsive_load));
      }
    }
  }
  CHECK(feasible_count > 10);
}

TEST_CASE("a dominant greedy fill closes the search at the root") {
  SolveStats stats;
  const HourOutcome outcome = solve_hour_bnb(single_box_problem(), &stats);
  REQUIRE(outcome.feasible());
  CHECK(stats.nodes == 1);
}

TEST_CASE("objective is non-increasing in the ramp floor") {
  const auto bids = reference_bids();
  double previous = std::numeric_limits<double>::infinity();
  bool was_feasible = true;
  for (double floor : {0.0, 5.0, 10.0, 12.5, 15.0, 15.5}) {
    const HourProblem problem = hour_problem_from_bids(bids, 30.0, floor);
    const HourOutcome outcome = solve_hour_bnb(problem);
    if (!outcome.feasible()) {
      was_feasible = false;
      continue;
    }
    CHECK(was_feasible);  // feasibility is monotone too
    CHECK(outcome.solution->objective <= previous + 1e-9);
    previous = outcome.solution->objective;
  }
}

TEST_CASE("a zero floor is the same as no floor") {
  const auto bids = reference_bids();
  const HourOutcome without =
      solve_hour_bnb(hour_problem_from_bids(bids, 27.0));
  const HourOutcome with_zero =
      solve_hour_bnb(hour_problem_from_bids(bids, 27.0, 0.0));
  REQUIRE(without.feasible());
  REQUIRE(with_zero.feasible());
  CHECK(without.solution->objective == with_zero.solution->objective);
}

TEST_CASE("horizon solves are independent") {
  const auto bids = reference_bids();
  const HourProblem hour = hour_problem_from_bids(bids, 30.0, 12.5);
  std::vector<HourProblem> horizon(24, hour);
  const auto outcomes = solve_horizon(horizon);
  REQUIRE(outcomes.size() == 24);
  double total = 0.0;
  for (const HourOutcome& o : outcomes) {
    REQUIRE(o.feasible());
    CHECK(o.solution->objective == outcomes.front().solution->objective);
    total += o.solution->objective;
  }
  CHECK(close(total, 24.0 * outcomes.front().solution->objective));

  // one broken hour does not abort the rest
  horizon[7].ramp_floor = 99.0;
  const auto mixed = solve_horizon(horizon);
  int infeasible = 0;
  for (const HourOutcome& o : mixed)
    if (!o.feasible()) ++infeasible;
  CHECK(infeasible == 1);
  CHECK(!mixed[7].feasible());
  CHECK(mixed[7].infeasible->reason == "ramp floor unreachable");
}

TEST_CASE("the constraint verifier catches hand-built violations") {
  HourProblem problem;
  problem.awarded_demand = 3.0;
  problem.bids.push_back({0, 0.0, {{60.0, 5.0, 2.0}, {40.0, 5.0, 1.0}}});

  const HourOutcome good = enumerate_hour(problem);
  REQUIRE(good.feasible());
  CHECK(verify_milp_constraints(problem, *good.solution).empty());

  // selection skipping the first segment
  HourSolution gap = *good.solution;
  gap.awards[0].selected = {false, true};
  gap.awards[0].segment_loads = {0.0, 3.0};
  gap.awards[0].selected_ramp = 1.0;
  gap.total_ramp = 1.0;
  bool found_sequential = false;
  for (const ConstraintViolation& v : verify_milp_constraints(problem, gap))
    found_sequential |= v.constraint == "sequential segment selection";
  CHECK(found_sequential);

  // claimed ramp that is not the marginal segment's
  HourSolution wrong_ramp = *good.solution;
  wrong_ramp.awards[0].selected_ramp = 1.0;
  wrong_ramp.total_ramp = 1.0;
  bool found_pairing = false;
  for (const ConstraintViolation& v :
       verify_milp_constraints(problem, wrong_ramp))
    found_pairing |= v.constraint == "selected ramp pairing";
  CHECK(found_pairing);

  // ramp claimed with nothing selected
  HourSolution phantom = *good.solution;
  phantom.awards[0].selected = {false, false};
  phantom.awards[0].segment_loads = {0.0, 0.0};
  phantom.awards[0].selected_ramp = 2.0;
  bool found_zero = false;
  for (const ConstraintViolation& v :
       verify_milp_constraints(problem, phantom))
    found_zero |= v.constraint == "unselected ramp is zero";
  CHECK(found_zero);
}

TEST_CASE("the feasibility pre-screen checks necessary conditions only") {
  const auto bids = reference_bids();

  HourProblem starved = hour_problem_from_bids(bids, 10.0);
  starved.bids[0].fixed_load = 20.0;
  const FeasibilityReport starved_report = feasibility_check(starved);
  REQUIRE(!starved_report.ok());
  CHECK(starved_report.issues.front() == "fixed load exceeds award");

  HourProblem too_high = hour_problem_from_bids(bids, 30.0, 15.5);
  const FeasibilityReport floor_report = feasibility_check(too_high);
  REQUIRE(!floor_report.ok());
  CHECK(floor_report.issues.front() == "ramp floor unreachable");

  HourProblem overloaded = hour_problem_from_bids(bids, 70.0);
  CHECK(!feasibility_check(overloaded).ok());

  const HourProblem fine = hour_problem_from_bids(bids, 40.0, 12.5);
  CHECK(feasibility_check(fine).ok());
}
