#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dmo/scenario.hpp"
#include "dmo/solver.hpp"

namespace dmo_test {

// The reference bids with a flat fixed load, handy for hour-level tests.
inline std::vector<dmo::MicrogridBid> reference_bids(int horizon = 1,
                                                     double fixed = 0.0) {
  std::vector<dmo::MicrogridBid> bids;
  const auto fleets = dmo::reference_fleets();
  for (std::size_t m = 0; m < fleets.size(); ++m)
    bids.push_back(dmo::build_bid_from_fleet(
        fleets[m], std::vector<double>(horizon, fixed),
        static_cast<int>(m)));
  return bids;
}

inline dmo::HourProblem hour_problem_from_bids(
    const std::vector<dmo::MicrogridBid>& bids, double awarded_demand,
    std::optional<double> ramp_floor = std::nullopt, int hour = 0) {
  dmo::HourProblem problem;
  problem.awarded_demand = awarded_demand;
  problem.ramp_floor = ramp_floor;
  for (const dmo::MicrogridBid& bid : bids)
    problem.bids.push_back({bid.id, bid.fixed_load[hour], bid.segments});
  return problem;
}

// Randomized hour instance: up to 5 microgrids with up to 4 segments each,
// prices in [10, 80] (sorted non-increasing), capacities in [1, 5], ramps in
// [0.5, 3.5]. The demand always fits the all-selected window; the optional
// floor is drawn up to just past the reachable maximum so some instances are
// infeasible on purpose.
inline dmo::HourProblem random_instance(std::mt19937& rng) {
  std::uniform_int_distribution<int> m_dist(1, 5);
  std::uniform_int_distribution<int> j_dist(1, 4);
  std::uniform_real_distribution<double> price(10.0, 80.0);
  std::uniform_real_distribution<double> cap(1.0, 5.0);
  std::uniform_real_distribution<double> ramp(0.5, 3.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  dmo::HourProblem problem;
  const int m_count = m_dist(rng);
  int total_segments = 0;
  double total_cap = 0.0;
  double best_ramp_sum = 0.0;
  for (int m = 0; m < m_count; ++m) {
    dmo::HourBid bid;
    bid.microgrid_id = m;
    bid.fixed_load = 5.0 * unit(rng);
    const int j_count = j_dist(rng);
    std::vector<double> prices;
    for (int j = 0; j < j_count; ++j) prices.push_back(price(rng));
    std::sort(prices.rbegin(), prices.rend());
    double best = 0.0;
    for (int j = 0; j < j_count; ++j) {
      dmo::BidSegment seg{prices[j], cap(rng), ramp(rng)};
      best = std::max(best, seg.ramp_rate);
      total_cap += seg.max_quantity;
      bid.segments.push_back(seg);
      ++total_segments;
    }
    best_ramp_sum += best;
    problem.bids.push_back(std::move(bid));
  }
  const double min_load = total_segments * problem.epsilon;
  const double responsive = min_load + (total_cap - min_load) * unit(rng);
  problem.awarded_demand = problem.total_fixed_load() + responsive;
  if (unit(rng) < 0.67)
    problem.ramp_floor = 1.05 * best_ramp_sum * unit(rng);
  return problem;
}

inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace dmo_test
