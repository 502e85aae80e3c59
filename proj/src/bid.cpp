#include "dmo/bid.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dmo {

MicrogridBid build_bid_from_fleet(const std::vector<DgUnit>& fleet,
                                  std::vector<double> fixed_load, int id) {
  if (fleet.empty())
    throw std::invalid_argument("build_bid_from_fleet: fleet is empty");
  for (const DgUnit& unit : fleet) {
    if (!(unit.capacity > 0.0))
      throw std::invalid_argument(
          "build_bid_from_fleet: unit capacity must be positive");
    if (unit.marginal_cost < 0.0 || unit.ramp_rate < 0.0)
      throw std::invalid_argument(
          "build_bid_from_fleet: negative unit cost or ramp rate");
  }

  std::vector<std::size_t> order(fleet.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&fleet](std::size_t a, std::size_t b) {
                     if (fleet[a].marginal_cost != fleet[b].marginal_cost)
                       return fleet[a].marginal_cost > fleet[b].marginal_cost;
                     return fleet[a].capacity > fleet[b].capacity;
                   });

  MicrogridBid bid;
  bid.id = id;
  bid.fixed_load = std::move(fixed_load);
  bid.segments.reserve(fleet.size());
  for (std::size_t i : order)
    bid.segments.push_back(
        {fleet[i].marginal_cost, fleet[i].capacity, fleet[i].ramp_rate});
  return bid;
}

BidValidation validate_bid(const MicrogridBid& bid) {
  BidValidation report;
  auto flag = [&report](std::string msg) {
    report.violations.push_back(std::move(msg));
  };

  if (bid.segments.empty()) flag("segments list is empty");
  for (std::size_t j = 0; j < bid.segments.size(); ++j) {
    const BidSegment& s = bid.segments[j];
    const std::string at = " at segment " + std::to_string(j);
    if (!(s.max_quantity > 0.0)) flag("max_quantity > 0 violated" + at);
    if (s.price < 0.0) flag("price >= 0 violated" + at);
    if (s.ramp_rate < 0.0) flag("ramp_rate >= 0 violated" + at);
    if (j > 0 && s.price > bid.segments[j - 1].price)
      flag("prices not non-increasing" + at);
  }
  for (std::size_t t = 0; t < bid.fixed_load.size(); ++t)
    if (bid.fixed_load[t] < 0.0)
      flag("fixed_load >= 0 violated at hour " + std::to_string(t));
  return report;
}

double total_bid_capacity(const MicrogridBid& bid) {
  double total = 0.0;
  for (const BidSegment& s : bid.segments) total += s.max_quantity;
  return total;
}

double marginal_ramp_at(const std::vector<BidSegment>& segments,
                        double responsive_load) {
  if (responsive_load < 0.0)
    throw std::out_of_range("marginal_ramp_at: negative responsive load");
  if (responsive_load == 0.0) return 0.0;
  double cumulative = 0.0;
  for (const BidSegment& s : segments) {
    cumulative += s.max_quantity;
    if (responsive_load <= cumulative) return s.ramp_rate;
  }
  throw std::out_of_range(
      "marginal_ramp_at: responsive load exceeds total bid capacity");
}

double marginal_ramp_at(const MicrogridBid& bid, double responsive_load) {
  return marginal_ramp_at(bid.segments, responsive_load);
}

}  // namespace dmo
