#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "dmo/bid.hpp"
#include "dmo/scenario.hpp"

using namespace dmo;

namespace {

MicrogridBid table_bid(int m) {
  return build_bid_from_fleet(reference_fleets()[m], {0.0}, m);
}

}  // namespace

TEST_CASE("fleet bids order segments by descending marginal cost") {
  const MicrogridBid mg1 = table_bid(0);
  REQUIRE(mg1.segments.size() == 4);
  const double expected[4][3] = {
      {71.5, 5, 3}, {58.4, 5, 2}, {45.2, 3, 3}, {23.2, 2, 1.5}};
  for (int j = 0; j < 4; ++j) {
    CHECK(mg1.segments[j].price == expected[j][0]);
    CHECK(mg1.segments[j].max_quantity == expected[j][1]);
    CHECK(mg1.segments[j].ramp_rate == expected[j][2]);
  }

  // same fleet shuffled -> same curve
  auto fleet = reference_fleets()[0];
  std::swap(fleet[0], fleet[3]);
  std::swap(fleet[1], fleet[2]);
  const MicrogridBid shuffled = build_bid_from_fleet(fleet, {0.0}, 0);
  for (int j = 0; j < 4; ++j)
    CHECK(shuffled.segments[j].price == mg1.segments[j].price);
}

TEST_CASE("single unit maps to a single segment") {
  const MicrogridBid bid =
      build_bid_from_fleet({{10.0, 5.0, 2.0}}, {0.0});
  REQUIRE(bid.segments.size() == 1);
  CHECK(bid.segments[0].price == 10.0);
  CHECK(bid.segments[0].max_quantity == 5.0);
  CHECK(bid.segments[0].ramp_rate == 2.0);
}

TEST_CASE("third fleet leads with the high-ramp segment") {
  const MicrogridBid mg3 = table_bid(2);
  CHECK(mg3.segments[0].price == 64.5);
  CHECK(mg3.segments[0].max_quantity == 5.0);
  CHECK(mg3.segments[0].ramp_rate == 3.5);
}

TEST_CASE("cost ties break by larger capacity, then input order") {
  const MicrogridBid bid = build_bid_from_fleet(
      {{50.0, 2.0, 1.0}, {50.0, 4.0, 2.0}, {50.0, 2.0, 3.0}}, {0.0});
  CHECK(bid.segments[0].max_quantity == 4.0);
  CHECK(bid.segments[1].ramp_rate == 1.0);  // first of the 2 MW pair
  CHECK(bid.segments[2].ramp_rate == 3.0);
}

TEST_CASE("fleet construction rejects bad input") {
  CHECK_THROWS_AS(build_bid_from_fleet({}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_bid_from_fleet({{10.0, 0.0, 1.0}}, {0.0}),
                  std::invalid_argument);
}

TEST_CASE("bid validation flags each broken invariant") {
  CHECK(validate_bid(table_bid(1)).ok());

  MicrogridBid increasing;
  increasing.fixed_load = {0.0};
  increasing.segments = {{50.0, 5.0, 1.0}, {60.0, 5.0, 1.0}};
  const auto report = validate_bid(increasing);
  REQUIRE(!report.ok());
  CHECK(report.violations.front().find("prices not non-increasing") !=
        std::string::npos);

  MicrogridBid zero_cap;
  zero_cap.fixed_load = {0.0};
  zero_cap.segments = {{50.0, 0.0, 1.0}};
  const auto zero_report = validate_bid(zero_cap);
  REQUIRE(!zero_report.ok());
  CHECK(zero_report.violations.front().find("max_quantity > 0") !=
        std::string::npos);

  MicrogridBid negative_fixed;
  negative_fixed.fixed_load = {1.0, -0.5};
  negative_fixed.segments = {{50.0, 5.0, 1.0}};
  CHECK(!validate_bid(negative_fixed).ok());
}

TEST_CASE("marginal ramp tracks the highest filled segment") {
  const MicrogridBid mg1 = table_bid(0);
  CHECK(marginal_ramp_at(mg1, 10.0) == 2.0);
  CHECK(marginal_ramp_at(mg1, 10.5) == 3.0);
  CHECK(marginal_ramp_at(mg1, 0.0) == 0.0);

  const MicrogridBid mg3 = table_bid(2);
  CHECK(marginal_ramp_at(mg3, 5.0) == 3.5);

  CHECK_THROWS_AS(marginal_ramp_at(mg1, -1.0), std::out_of_range);
  CHECK_THROWS_AS(marginal_ramp_at(mg1, 15.0 + 1e-6), std::out_of_range);
}

TEST_CASE("marginal ramp is piecewise constant with boundary breakpoints") {
  for (int m = 0; m < 5; ++m) {
    const MicrogridBid bid = table_bid(m);
    double cumulative = 0.0;
    for (const BidSegment& s : bid.segments) {
      const double lo = cumulative;
      cumulative += s.max_quantity;
      CHECK(marginal_ramp_at(bid, lo + 1e-9) == s.ramp_rate);
      CHECK(marginal_ramp_at(bid, 0.5 * (lo + cumulative)) == s.ramp_rate);
      CHECK(marginal_ramp_at(bid, cumulative) == s.ramp_rate);
    }
    CHECK(cumulative == total_bid_capacity(bid));
  }
}

TEST_CASE("fleet conversion is a permutation of the unit triples") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> cost(5.0, 90.0);
  std::uniform_real_distribution<double> cap(0.5, 6.0);
  std::uniform_real_distribution<double> ramp(0.0, 4.0);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DgUnit> fleet;
    for (int i = 0; i < size(rng); ++i)
      fleet.push_back({cost(rng), cap(rng), ramp(rng)});
    const MicrogridBid bid = build_bid_from_fleet(fleet, {0.0});

    auto key = [](double a, double b, double c) {
      return std::tuple<double, double, double>(a, b, c);
    };
    std::vector<std::tuple<double, double, double>> want, got;
    for (const DgUnit& u : fleet)
      want.push_back(key(u.marginal_cost, u.capacity, u.ramp_rate));
    for (const BidSegment& s : bid.segments)
      got.push_back(key(s.price, s.max_quantity, s.ramp_rate));
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    CHECK(want == got);

    // prices non-increasing, prefix capacity strictly increasing
    double cumulative = 0.0;
    for (std::size_t j = 0; j < bid.segments.size(); ++j) {
      if (j > 0) CHECK(bid.segments[j].price <= bid.segments[j - 1].price);
      const double next = cumulative + bid.segments[j].max_quantity;
      CHECK(next > cumulative);
      cumulative = next;
    }
  }
}
