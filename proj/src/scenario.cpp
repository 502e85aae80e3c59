#include "dmo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace dmo {
namespace {

constexpr double kProfileTol = 1e-9;

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& scenario) {
  std::vector<std::string> issues;
  auto flag = [&issues](std::string msg) { issues.push_back(std::move(msg)); };

  if (scenario.horizon <= 0) flag("horizon must be positive");
  if (scenario.microgrids.empty()) flag("no microgrids");
  if (!(scenario.epsilon > 0.0)) flag("epsilon must be positive");
  if (scenario.microgrid_names.size() != scenario.microgrids.size())
    flag("microgrid name count does not match microgrid count");

  const std::size_t horizon = static_cast<std::size_t>(
      std::max(scenario.horizon, 0));
  if (scenario.award_profile.size() != horizon)
    flag("award profile length does not match horizon");
  if (!scenario.ramp_floor_profile.empty() &&
      scenario.ramp_floor_profile.size() != horizon)
    flag("ramp floor profile length does not match horizon");

  for (std::size_t m = 0; m < scenario.microgrids.size(); ++m) {
    const MicrogridBid& bid = scenario.microgrids[m];
    if (bid.fixed_load.size() != horizon)
      flag("microgrid " + std::to_string(m) +
           ": fixed load length does not match horizon");
    for (const std::string& v : validate_bid(bid).violations)
      flag("microgrid " + std::to_string(m) + ": " + v);
  }

  if (scenario.award_profile.size() == horizon) {
    bool lengths_ok = true;
    for (const MicrogridBid& bid : scenario.microgrids)
      lengths_ok = lengths_ok && bid.fixed_load.size() == horizon;
    if (lengths_ok && !scenario.microgrids.empty()) {
      for (std::size_t t = 0; t < horizon; ++t) {
        double fixed = 0.0;
        for (const MicrogridBid& bid : scenario.microgrids)
          fixed += bid.fixed_load[t];
        if (scenario.award_profile[t] < fixed - kProfileTol) {
          flag("award below total fixed load at hour " + std::to_string(t));
          break;
        }
      }
    }
  }
  return issues;
}

std::vector<HourProblem> hour_problems(const Scenario& scenario,
                                       bool with_ramp_floor) {
  std::vector<HourProblem> problems;
  problems.reserve(static_cast<std::size_t>(scenario.horizon));
  for (int t = 0; t < scenario.horizon; ++t) {
    HourProblem problem;
    problem.awarded_demand = scenario.award_profile[t];
    problem.epsilon = scenario.epsilon;
    problem.big_m = scenario.big_m;
    if (with_ramp_floor) problem.ramp_floor = scenario.ramp_floor_profile[t];
    problem.bids.reserve(scenario.microgrids.size());
    for (const MicrogridBid& bid : scenario.microgrids)
      problem.bids.push_back(
          {bid.id, bid.fixed_load[t], bid.segments});
    problems.push_back(std::move(problem));
  }
  return problems;
}

double CaseReport::min_total_ramp() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < outcomes.size(); ++t)
    if (outcomes[t].feasible()) best = std::min(best, hourly_total_ramp[t]);
  return std::isfinite(best) ? best : 0.0;
}

CaseReport run_case(const Scenario& scenario, bool with_ramp_floor,
                    HourSolver solver) {
  const auto issues = validate_scenario(scenario);
  if (!issues.empty())
    throw std::invalid_argument("run_case: invalid scenario: " +
                                issues.front());
  if (with_ramp_floor && scenario.ramp_floor_profile.empty())
    throw std::invalid_argument(
        "run_case: scenario carries no ramp floor profile");

  CaseReport report;
  report.case_label = with_ramp_floor ? "case2" : "case1";
  report.horizon = scenario.horizon;
  report.microgrid_names = scenario.microgrid_names;
  report.award_profile = scenario.award_profile;
  if (with_ramp_floor) report.floor_profile = scenario.ramp_floor_profile;

  report.outcomes = solve_horizon(hour_problems(scenario, with_ramp_floor),
                                  solver);

  const std::size_t horizon = report.outcomes.size();
  const std::size_t m_count = scenario.microgrids.size();
  report.hourly_objective.assign(horizon, 0.0);
  report.hourly_total_ramp.assign(horizon, 0.0);
  report.hourly_total_award.assign(horizon, 0.0);
  report.microgrid_awards.assign(horizon, std::vector<double>(m_count, 0.0));

  for (std::size_t t = 0; t < horizon; ++t) {
    const HourOutcome& outcome = report.outcomes[t];
    if (!outcome.feasible()) {
      report.infeasible_hours.push_back(
          {static_cast<int>(t), *outcome.infeasible});
      continue;
    }
    const HourSolution& sol = *outcome.solution;
    report.hourly_objective[t] = sol.objective;
    report.hourly_total_ramp[t] = sol.total_ramp;
    report.objective_total += sol.objective;
    double total_award = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      report.microgrid_awards[t][m] = sol.awards[m].total_award;
      total_award += sol.awards[m].total_award;
    }
    report.hourly_total_award[t] = total_award;
  }
  return report;
}

CaseComparison compare_cases(const CaseReport& case1,
                             const CaseReport& case2) {
  if (case1.horizon != case2.horizon ||
      case1.microgrid_names != case2.microgrid_names ||
      case1.award_profile != case2.award_profile)
    throw std::invalid_argument(
        "compare_cases: reports come from different scenarios");
  if (!case1.infeasible_hours.empty() || !case2.infeasible_hours.empty())
    throw std::invalid_argument(
        "compare_cases: reports contain infeasible hours");

  CaseComparison cmp;
  cmp.horizon = case1.horizon;
  cmp.microgrid_names = case1.microgrid_names;
  cmp.objective_case1 = case1.objective_total;
  cmp.objective_case2 = case2.objective_total;
  cmp.objective_delta = case1.objective_total - case2.objective_total;
  cmp.relative_gap = case1.objective_total != 0.0
                         ? cmp.objective_delta / case1.objective_total
                         : 0.0;
  cmp.min_ramp_case1 = case1.min_total_ramp();
  cmp.min_ramp_case2 = case2.min_total_ramp();
  cmp.ramp_case1 = case1.hourly_total_ramp;
  cmp.ramp_case2 = case2.hourly_total_ramp;
  cmp.floor = case2.floor_profile;
  cmp.awards_case1 = case1.microgrid_awards;
  cmp.awards_case2 = case2.microgrid_awards;

  const std::size_t horizon = static_cast<std::size_t>(cmp.horizon);
  const std::size_t m_count = cmp.microgrid_names.size();
  cmp.award_delta.assign(horizon, std::vector<double>(m_count, 0.0));
  double max_residual = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t m = 0; m < m_count; ++m)
      cmp.award_delta[t][m] =
          case2.microgrid_awards[t][m] - case1.microgrid_awards[t][m];
    const double award = case1.award_profile[t];
    max_residual = std::max(
        {max_residual, std::abs(case1.hourly_total_award[t] - award),
         std::abs(case2.hourly_total_award[t] - award),
         std::abs(case1.hourly_total_award[t] - case2.hourly_total_award[t])});
  }
  cmp.max_award_residual = max_residual;
  cmp.awards_conserved = max_residual <= 1e-9;
  return cmp;
}

std::vector<std::vector<DgUnit>> reference_fleets() {
  // (marginal cost $/MWh, capacity MW, ramp rate MW/h), four units each.
  return {
      {{71.5, 5, 3.0}, {58.4, 5, 2.0}, {45.2, 3, 3.0}, {23.2, 2, 1.5}},
      {{62.8, 4, 2.5}, {50.5, 4, 2.0}, {33.6, 2, 2.0}, {25.7, 2, 1.0}},
      {{64.5, 5, 3.5}, {59.8, 3, 1.5}, {46.2, 3, 1.5}, {27.4, 1, 0.5}},
      {{69.5, 5, 2.0}, {57.2, 5, 2.0}, {38.4, 4, 3.0}, {27.9, 2, 1.0}},
      {{76.5, 5, 3.0}, {62.4, 4, 1.0}, {40.5, 3, 2.0}, {31.1, 2, 1.0}},
  };
}

namespace {

// Deterministic, platform-independent uniform generator (64-bit LCG,
// Knuth multiplier). std::mt19937 + distributions would tie the shipped
// fixture to one standard library's rounding choices.
struct ProfileRng {
  std::uint64_t state;
  explicit ProfileRng(unsigned seed)
      : state(static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ULL + 1) {}
  double uniform(double lo, double hi) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// Normalized daily load shape: overnight valley, morning rise, evening peak.
constexpr double kDailyShape[24] = {
    0.58, 0.55, 0.53, 0.52, 0.53, 0.57, 0.66, 0.78, 0.86, 0.88, 0.87, 0.86,
    0.85, 0.84, 0.85, 0.88, 0.93, 1.00, 0.99, 0.96, 0.90, 0.80, 0.70, 0.62};

// Responsive-demand shape: shallow overnight, deep rise through the
// afternoon as the net-load ramp builds, easing back late evening.
constexpr double kResponsiveShape[24] = {
    0.30, 0.26, 0.24, 0.22, 0.24, 0.30, 0.42, 0.55, 0.62, 0.68, 0.75, 0.82,
    0.90, 0.95, 1.00, 0.97, 0.92, 0.85, 0.80, 0.74, 0.66, 0.55, 0.44, 0.35};

}  // namespace

// Construction: every microgrid's fixed load is base + amplitude * daily
// shape plus a small seeded jitter, rounded to 0.01 MW. The hourly award is
// the total fixed load plus a responsive block of 12..38 MW following the
// responsive shape, which keeps 20-60% of the award adjustable, keeps every
// hour inside the fleet's feasible window for floors up to 15 MW/h, and
// leaves the floor-free case short of 12.5 MW/h of ramp in most hours.
Scenario reference_scenario(unsigned seed) {
  Scenario scenario;
  scenario.horizon = 24;
  scenario.epsilon = 1e-3;
  scenario.big_m = 0.0;

  ProfileRng rng(seed);
  const auto fleets = reference_fleets();
  std::vector<double> base, amplitude;
  for (std::size_t m = 0; m < fleets.size(); ++m) {
    base.push_back(rng.uniform(4.0, 8.0));
    amplitude.push_back(rng.uniform(1.5, 3.5));
  }

  std::vector<double> fixed_total(24, 0.0);
  for (std::size_t m = 0; m < fleets.size(); ++m) {
    std::vector<double> fixed(24, 0.0);
    for (int t = 0; t < 24; ++t) {
      const double jitter = rng.uniform(-0.25, 0.25);
      fixed[t] = std::max(
          0.5, round2(base[m] + amplitude[m] * kDailyShape[t] + jitter));
      fixed_total[t] += fixed[t];
    }
    scenario.microgrids.push_back(build_bid_from_fleet(
        fleets[m], std::move(fixed), static_cast<int>(m)));
    scenario.microgrid_names.push_back("MG" + std::to_string(m + 1));
  }

  scenario.award_profile.resize(24);
  for (int t = 0; t < 24; ++t) {
    const double responsive =
        round2(12.0 + 26.0 * kResponsiveShape[t] + rng.uniform(-0.25, 0.25));
    scenario.award_profile[t] = round2(fixed_total[t] + responsive);
  }
  scenario.ramp_floor_profile.assign(24, 12.5);
  return scenario;
}

}  // namespace dmo
