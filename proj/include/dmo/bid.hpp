#pragma once

#include <string>
#include <vector>

namespace dmo {

// One dispatchable generation unit of a microgrid fleet.
struct DgUnit {
  double marginal_cost = 0.0;  // $/MWh
  double capacity = 0.0;       // MW
  double ramp_rate = 0.0;      // MW/h
};

// One step of a demand bid curve: up to max_quantity MW of responsive load
// offered at `price`, backed by `ramp_rate` of ramping capability.
struct BidSegment {
  double price = 0.0;         // $/MWh
  double max_quantity = 0.0;  // MW
  double ramp_rate = 0.0;     // MW/h
};

// A microgrid's offer to the distribution market: an hourly fixed load that
// must be served in full, plus an ordered stepwise curve of responsive load.
// Segment prices are non-increasing (highest-value displaced generation is
// offered first).
struct MicrogridBid {
  int id = 0;                      // microgrid index
  std::vector<double> fixed_load;  // MW, one entry per hour
  std::vector<BidSegment> segments;
};

struct BidValidation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Builds the bid curve of a dispatchable fleet: one segment per unit, ordered
// by descending marginal cost. Cost ties break by larger capacity first, then
// input order.
MicrogridBid build_bid_from_fleet(const std::vector<DgUnit>& fleet,
                                  std::vector<double> fixed_load, int id = 0);

// Checks every MicrogridBid invariant; violations come back as data.
BidValidation validate_bid(const MicrogridBid& bid);

double total_bid_capacity(const MicrogridBid& bid);

// Ramp rate of the marginal (highest filled) segment when `responsive_load`
// MW is assigned to this curve. Zero load carries zero ramp; a load exactly
// on a cumulative segment boundary belongs to the segment it completes.
// Throws std::out_of_range for loads outside [0, total capacity].
double marginal_ramp_at(const std::vector<BidSegment>& segments,
                        double responsive_load);
double marginal_ramp_at(const MicrogridBid& bid, double responsive_load);

}  // namespace dmo
