#include "dmo/aggregate.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmo {
namespace {

struct MergedRef {
  double price = 0.0;
  double quantity = 0.0;
  double ramp = 0.0;
  int microgrid_id = 0;
  int segment_index = 0;
};

// All segments of all bids, sorted by non-increasing price; ties keep
// submission order (microgrid first, then segment position).
std::vector<MergedRef> merged_merit_order(
    const std::vector<MicrogridBid>& bids) {
  std::vector<MergedRef> merged;
  for (const MicrogridBid& bid : bids)
    for (std::size_t j = 0; j < bid.segments.size(); ++j) {
      const BidSegment& s = bid.segments[j];
      merged.push_back(
          {s.price, s.max_quantity, s.ramp_rate, bid.id, static_cast<int>(j)});
    }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const MergedRef& a, const MergedRef& b) {
                     return a.price > b.price;
                   });
  return merged;
}

}  // namespace

std::vector<double> total_fixed_load(const std::vector<MicrogridBid>& bids) {
  if (bids.empty())
    throw std::invalid_argument("total_fixed_load: empty bid list");
  const std::size_t horizon = bids.front().fixed_load.size();
  std::vector<double> total(horizon, 0.0);
  for (const MicrogridBid& bid : bids) {
    if (bid.fixed_load.size() != horizon)
      throw std::invalid_argument(
          "total_fixed_load: mismatched horizon lengths");
    for (std::size_t t = 0; t < horizon; ++t) total[t] += bid.fixed_load[t];
  }
  return total;
}

AggregateDemandBid aggregate_demand_bid(const std::vector<MicrogridBid>& bids) {
  if (bids.empty())
    throw std::invalid_argument("aggregate_demand_bid: empty bid list");
  AggregateDemandBid agg;
  agg.fixed_total = total_fixed_load(bids);
  for (const MergedRef& s : merged_merit_order(bids))
    agg.merged_segments.push_back(
        {s.price, s.quantity, s.microgrid_id, s.segment_index});
  return agg;
}

AggregateRampCurve aggregate_ramp_curve(const std::vector<MicrogridBid>& bids) {
  if (bids.empty())
    throw std::invalid_argument("aggregate_ramp_curve: empty bid list");
  AggregateRampCurve curve;
  double cumulative = 0.0;
  for (const MergedRef& s : merged_merit_order(bids)) {
    cumulative += s.quantity;
    curve.breakpoints.push_back({cumulative, s.ramp});
  }
  return curve;
}

double AggregateRampCurve::value_at(double load) const {
  if (load < 0.0)
    throw std::out_of_range("AggregateRampCurve: negative load");
  if (load == 0.0) return 0.0;
  for (const Point& p : breakpoints)
    if (load <= p.load) return p.ramp;
  throw std::out_of_range("AggregateRampCurve: load exceeds total capacity");
}

double AggregateRampCurve::total_capacity() const {
  return breakpoints.empty() ? 0.0 : breakpoints.back().load;
}

}  // namespace dmo
