#pragma once

#include <vector>

#include "dmo/bid.hpp"

namespace dmo {

// One segment of the market-wide merit order, tagged with its origin so the
// award can later be traced back to the owning microgrid.
struct MergedSegment {
  double price = 0.0;     // $/MWh
  double quantity = 0.0;  // MW
  int microgrid_id = 0;
  int segment_index = 0;  // position within the owning bid
};

// Operator-side merge of all microgrid demand bids: total fixed load per hour
// plus every bid segment sorted by non-increasing price (ties keep submission
// order).
struct AggregateDemandBid {
  std::vector<double> fixed_total;  // MW per hour
  std::vector<MergedSegment> merged_segments;
};

// Step curve of ramping capability over total responsive load. Segments are
// laid end to end in merged merit order; on (load_{k-1}, load_k] the k-th
// merged segment is the marginal one and the curve reports its ramp rate.
// Reporting aid only; hourly solves work from the individual bids.
struct AggregateRampCurve {
  struct Point {
    double load = 0.0;  // cumulative responsive load, MW
    double ramp = 0.0;  // MW/h while this segment is marginal
  };
  std::vector<Point> breakpoints;

  double value_at(double load) const;
  double total_capacity() const;
};

// Element-wise sum of the bids' fixed-load profiles.
std::vector<double> total_fixed_load(const std::vector<MicrogridBid>& bids);

AggregateDemandBid aggregate_demand_bid(const std::vector<MicrogridBid>& bids);

AggregateRampCurve aggregate_ramp_curve(const std::vector<MicrogridBid>& bids);

}  // namespace dmo
