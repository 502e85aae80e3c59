#include "dmo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmo {
namespace {

constexpr double kFeasTol = 1e-9;   // residual tolerance on constraint checks
constexpr double kDustTol = 1e-12;  // float-dust slack in pruning comparisons

double bound_slack(double value) {
  return kDustTol * std::max(1.0, std::abs(value));
}

struct SegmentRef {
  double price = 0.0;
  double cap = 0.0;
  int mg = 0;
  int seg = 0;
};

// Strictly descending price; ties by microgrid, then segment position.
bool merit_before(const SegmentRef& a, const SegmentRef& b) {
  if (a.price != b.price) return a.price > b.price;
  if (a.mg != b.mg) return a.mg < b.mg;
  return a.seg < b.seg;
}

void check_problem(const HourProblem& problem) {
  if (!(problem.epsilon > 0.0))
    throw std::invalid_argument("hour problem: epsilon must be positive");
  for (const HourBid& bid : problem.bids) {
    if (bid.fixed_load < 0.0)
      throw std::invalid_argument("hour problem: negative fixed load");
    for (const BidSegment& s : bid.segments)
      if (!(s.max_quantity > 0.0) || s.price < 0.0 || s.ramp_rate < 0.0)
        throw std::invalid_argument("hour problem: malformed bid segment");
  }
}

std::uint64_t combination_count(const HourProblem& problem,
                                std::uint64_t cap) {
  std::uint64_t combos = 1;
  for (const HourBid& bid : problem.bids) {
    const std::uint64_t choices = bid.segments.size() + 1;
    if (combos > (cap + 1) / choices + 1) return cap + 1;  // saturate
    combos *= choices;
    if (combos > cap) return cap + 1;
  }
  return combos;
}

// Per-microgrid prefix lookup tables.
//   cap[m][n]   cumulative capacity of the first n segments
//   ramp[m][n]  marginal ramp of prefix n (0 at n = 0)
//   max_valid[m] largest prefix whose segments can all carry epsilon
struct PrefixTables {
  std::vector<std::vector<double>> cap;
  std::vector<std::vector<double>> ramp;
  std::vector<int> max_valid;
  std::vector<double> best_ramp;  // max ramp over valid prefixes, 0 included
  std::vector<double> max_cap;    // capacity of the largest valid prefix
};

PrefixTables build_tables(const HourProblem& problem) {
  PrefixTables tab;
  const std::size_t m_count = problem.bids.size();
  tab.cap.resize(m_count);
  tab.ramp.resize(m_count);
  tab.max_valid.resize(m_count);
  tab.best_ramp.resize(m_count);
  tab.max_cap.resize(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto& segments = problem.bids[m].segments;
    tab.cap[m].resize(segments.size() + 1, 0.0);
    tab.ramp[m].resize(segments.size() + 1, 0.0);
    int valid = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < segments.size(); ++j) {
      tab.cap[m][j + 1] = tab.cap[m][j] + segments[j].max_quantity;
      tab.ramp[m][j + 1] = segments[j].ramp_rate;
      if (valid == static_cast<int>(j) && segments[j].max_quantity >= problem.epsilon) {
        valid = static_cast<int>(j) + 1;
        best = std::max(best, segments[j].ramp_rate);
      }
    }
    tab.max_valid[m] = valid;
    tab.best_ramp[m] = best;
    tab.max_cap[m] = tab.cap[m][valid];
  }
  return tab;
}

double selection_ramp(const HourProblem& problem,
                      const std::vector<int>& prefixes) {
  double total = 0.0;
  for (std::size_t m = 0; m < prefixes.size(); ++m)
    if (prefixes[m] > 0)
      total += problem.bids[m].segments[prefixes[m] - 1].ramp_rate;
  return total;
}

HourSolution assemble_solution(const HourProblem& problem,
                               const std::vector<int>& prefixes,
                               const InnerFill& fill) {
  HourSolution sol;
  sol.awards.resize(problem.bids.size());
  double total_ramp = 0.0;
  for (std::size_t m = 0; m < problem.bids.size(); ++m) {
    const HourBid& bid = problem.bids[m];
    MicrogridAward& award = sol.awards[m];
    award.microgrid_id = bid.microgrid_id;
    award.segment_loads = fill.segment_loads[m];
    award.selected.assign(bid.segments.size(), false);
    for (int j = 0; j < prefixes[m]; ++j) award.selected[j] = true;
    award.selected_ramp =
        prefixes[m] > 0 ? bid.segments[prefixes[m] - 1].ramp_rate : 0.0;
    double responsive = 0.0;
    for (double load : award.segment_loads) responsive += load;
    award.responsive_load = responsive;
    award.total_award = responsive + bid.fixed_load;
    total_ramp += award.selected_ramp;
  }
  sol.total_ramp = total_ramp;
  sol.objective = fill.objective;
  return sol;
}

// Sweeps the prefix space to explain why no selection works: the best ramp
// among demand-feasible selections and the demand window among floor-feasible
// ones. Falls back to coarse bounds when the space is too large to sweep.
InfeasibleHour infeasibility_diagnostic(const HourProblem& problem,
                                        std::uint64_t sweep_cap) {
  InfeasibleHour diag;
  const double demand = problem.responsive_demand();
  if (demand < 0.0) {
    diag.reason = "fixed load exceeds award";
    return diag;
  }

  const PrefixTables tab = build_tables(problem);
  const std::size_t m_count = problem.bids.size();

  if (combination_count(problem, sweep_cap) > sweep_cap) {
    double best_ramp = 0.0, max_cap = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      best_ramp += tab.best_ramp[m];
      max_cap += tab.max_cap[m];
    }
    if (problem.ramp_floor && best_ramp < *problem.ramp_floor)
      diag.reason = "ramp floor unreachable";
    else if (demand > max_cap)
      diag.reason = "responsive demand outside any selection window";
    else
      diag.reason = "infeasible (diagnostic sweep skipped: combination cap)";
    diag.max_total_ramp = best_ramp;
    diag.demand_max = max_cap;
    return diag;
  }

  bool any_demand_ok = false, any_floor_ok = false;
  double best_ramp_demand_ok = 0.0;
  double floor_demand_min = std::numeric_limits<double>::infinity();
  double floor_demand_max = -std::numeric_limits<double>::infinity();

  std::vector<int> prefix(m_count, 0);
  while (true) {
    bool valid = true;
    int selected = 0;
    double cap_sum = 0.0, ramp_sum = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (prefix[m] > tab.max_valid[m]) valid = false;
      selected += prefix[m];
      cap_sum += tab.cap[m][prefix[m]];
      ramp_sum += tab.ramp[m][prefix[m]];
    }
    if (valid) {
      const double min_load = selected * problem.epsilon;
      const bool demand_ok = demand >= min_load && demand <= cap_sum;
      const bool floor_ok =
          !problem.ramp_floor || ramp_sum >= *problem.ramp_floor;
      if (demand_ok) {
        any_demand_ok = true;
        best_ramp_demand_ok = std::max(best_ramp_demand_ok, ramp_sum);
      }
      if (floor_ok) {
        any_floor_ok = true;
        floor_demand_min = std::min(floor_demand_min, min_load);
        floor_demand_max = std::max(floor_demand_max, cap_sum);
      }
    }
    std::size_t k = m_count;
    while (k > 0) {
      if (++prefix[k - 1] <=
          static_cast<int>(problem.bids[k - 1].segments.size()))
        break;
      prefix[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }

  diag.max_total_ramp = any_demand_ok ? best_ramp_demand_ok : 0.0;
  if (any_floor_ok) {
    diag.demand_min = floor_demand_min;
    diag.demand_max = floor_demand_max;
  }
  if (problem.ramp_floor && !any_floor_ok)
    diag.reason = "ramp floor unreachable";
  else if (!any_demand_ok)
    diag.reason = "responsive demand outside any selection window";
  else
    diag.reason = "ramp floor and demand window cannot be met together";
  return diag;
}

}  // namespace

double HourProblem::total_fixed_load() const {
  double total = 0.0;
  for (const HourBid& bid : bids) total += bid.fixed_load;
  return total;
}

double HourProblem::responsive_demand() const {
  const double r = awarded_demand - total_fixed_load();
  return std::abs(r) <= kFeasTol ? 0.0 : r;
}

double HourProblem::effective_big_m() const {
  if (big_m > 0.0) return big_m;
  double max_ramp = 0.0;
  for (const HourBid& bid : bids)
    for (const BidSegment& s : bid.segments)
      max_ramp = std::max(max_ramp, s.ramp_rate);
  return 1.0 + max_ramp;
}

int MicrogridAward::selected_prefix() const {
  int prefix = 0;
  while (prefix < static_cast<int>(selected.size()) && selected[prefix])
    ++prefix;
  return prefix;
}

std::optional<InnerFill> inner_fill(const std::vector<int>& selected_prefixes,
                                    double responsive_demand,
                                    const HourProblem& problem) {
  const auto& bids = problem.bids;
  if (selected_prefixes.size() != bids.size())
    throw std::invalid_argument(
        "inner_fill: prefix count does not match bid count");
  const double eps = problem.epsilon;

  std::vector<SegmentRef> selected;
  double cap_sum = 0.0;
  int n = 0;
  for (std::size_t m = 0; m < bids.size(); ++m) {
    const int p = selected_prefixes[m];
    if (p < 0 || p > static_cast<int>(bids[m].segments.size()))
      throw std::invalid_argument("inner_fill: prefix length out of range");
    for (int j = 0; j < p; ++j) {
      const BidSegment& s = bids[m].segments[j];
      if (s.max_quantity < eps) return std::nullopt;  // cannot carry the minimum
      selected.push_back({s.price, s.max_quantity, static_cast<int>(m), j});
      cap_sum += s.max_quantity;
      ++n;
    }
  }

  const double min_load = n * eps;
  if (responsive_demand < min_load || responsive_demand > cap_sum)
    return std::nullopt;

  InnerFill fill;
  fill.segment_loads.resize(bids.size());
  for (std::size_t m = 0; m < bids.size(); ++m)
    fill.segment_loads[m].assign(bids[m].segments.size(), 0.0);

  std::sort(selected.begin(), selected.end(), merit_before);
  double remaining = responsive_demand - min_load;
  int last_mg = -1, last_seg = -1;
  for (const SegmentRef& s : selected) {
    const double take = std::min(remaining, s.cap - eps);
    fill.segment_loads[s.mg][s.seg] = eps + take;
    remaining -= take;
    last_mg = s.mg;
    last_seg = s.seg;
  }
  // Sub-ulp residue survives when the demand sits exactly on the capacity
  // edge; fold it into the cheapest selected segment.
  if (remaining != 0.0 && last_mg >= 0)
    fill.segment_loads[last_mg][last_seg] += remaining;

  double objective = 0.0;
  for (std::size_t m = 0; m < bids.size(); ++m)
    for (std::size_t j = 0; j < bids[m].segments.size(); ++j)
      objective += bids[m].segments[j].price * fill.segment_loads[m][j];
  fill.objective = objective;
  return fill;
}

HourOutcome enumerate_hour(const HourProblem& problem,
                           std::uint64_t max_combinations) {
  check_problem(problem);
  if (combination_count(problem, max_combinations) > max_combinations)
    throw std::runtime_error("enumerate_hour: combination cap exceeded");

  HourOutcome out;
  const double demand = problem.responsive_demand();
  if (demand < 0.0) {
    out.infeasible = infeasibility_diagnostic(problem, max_combinations);
    return out;
  }

  const std::size_t m_count = problem.bids.size();
  std::vector<int> prefix(m_count, 0);
  std::vector<int> best_prefix;
  std::optional<InnerFill> best;
  while (true) {
    const double ramp = selection_ramp(problem, prefix);
    if (!problem.ramp_floor || ramp >= *problem.ramp_floor) {
      auto fill = inner_fill(prefix, demand, problem);
      if (fill && (!best || fill->objective > best->objective)) {
        best = std::move(fill);
        best_prefix = prefix;
      }
    }
    std::size_t k = m_count;
    while (k > 0) {
      if (++prefix[k - 1] <=
          static_cast<int>(problem.bids[k - 1].segments.size()))
        break;
      prefix[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }

  if (best)
    out.solution = assemble_solution(problem, best_prefix, *best);
  else
    out.infeasible = infeasibility_diagnostic(problem, max_combinations);
  return out;
}

namespace {

struct Incumbent {
  double objective = 0.0;
  std::vector<int> prefix;
  InnerFill fill;
};

struct BnbSearch {
  const HourProblem& problem;
  const PrefixTables& tab;
  double demand = 0.0;
  SolveStats& stats;

  std::vector<SegmentRef> merit;       // every segment, merit-sorted once
  std::vector<double> suffix_best_ramp;  // over microgrids m.. (valid prefixes)
  std::vector<double> suffix_max_cap;
  std::vector<int> prefix;
  std::optional<Incumbent> incumbent;

  BnbSearch(const HourProblem& p, const PrefixTables& t, double r,
            SolveStats& s)
      : problem(p), tab(t), demand(r), stats(s) {
    const std::size_t m_count = problem.bids.size();
    for (std::size_t m = 0; m < m_count; ++m)
      for (std::size_t j = 0; j < problem.bids[m].segments.size(); ++j) {
        const BidSegment& seg = problem.bids[m].segments[j];
        merit.push_back({seg.price, seg.max_quantity, static_cast<int>(m),
                         static_cast<int>(j)});
      }
    std::sort(merit.begin(), merit.end(), merit_before);
    suffix_best_ramp.assign(m_count + 1, 0.0);
    suffix_max_cap.assign(m_count + 1, 0.0);
    for (std::size_t m = m_count; m > 0; --m) {
      suffix_best_ramp[m - 1] = suffix_best_ramp[m] + tab.best_ramp[m - 1];
      suffix_max_cap[m - 1] = suffix_max_cap[m] + tab.max_cap[m - 1];
    }
    prefix.assign(m_count, 0);
  }

  // Greedy merit-order fill ignoring the per-segment minimum loads, over the
  // fixed prefixes below `first_free` and every epsilon-valid segment above.
  // Upper-bounds any completion of this node; -inf when the demand cannot
  // even be covered.
  double relaxation_bound(std::size_t first_free) const {
    double remaining = demand;
    double value = 0.0;
    for (const SegmentRef& s : merit) {
      if (remaining <= 0.0) break;
      const std::size_t m = static_cast<std::size_t>(s.mg);
      const int limit = m < first_free ? prefix[m] : tab.max_valid[m];
      if (s.seg >= limit) continue;
      const double take = std::min(remaining, s.cap);
      value += s.price * take;
      remaining -= take;
    }
    if (remaining > bound_slack(demand))
      return -std::numeric_limits<double>::infinity();
    return value;
  }

  // Selection induced by the relaxed greedy fill; every touched segment is
  // selected. Used as the root's primal candidate.
  std::vector<int> greedy_prefix_vector() const {
    std::vector<int> induced(problem.bids.size(), 0);
    double remaining = demand;
    for (const SegmentRef& s : merit) {
      if (remaining <= 0.0) break;
      const std::size_t m = static_cast<std::size_t>(s.mg);
      if (s.seg >= tab.max_valid[m]) continue;
      const double take = std::min(remaining, s.cap);
      if (take > 0.0) induced[m] = std::max(induced[m], s.seg + 1);
      remaining -= take;
    }
    return induced;
  }

  void offer_leaf(const std::vector<int>& candidate) {
    ++stats.leaves;
    const double ramp = selection_ramp(problem, candidate);
    if (problem.ramp_floor && ramp < *problem.ramp_floor) return;
    auto fill = inner_fill(candidate, demand, problem);
    if (!fill) return;
    const bool better =
        !incumbent || fill->objective > incumbent->objective ||
        (fill->objective == incumbent->objective &&
         std::lexicographical_compare(candidate.begin(), candidate.end(),
                                      incumbent->prefix.begin(),
                                      incumbent->prefix.end()));
    if (better)
      incumbent = Incumbent{fill->objective, candidate, std::move(*fill)};
  }

  void search(std::size_t depth, double fixed_ramp, double fixed_cap,
              double fixed_min_load) {
    if (depth == problem.bids.size()) {
      offer_leaf(prefix);
      return;
    }
    for (int p = 0; p <= tab.max_valid[depth]; ++p) {
      const double ramp = fixed_ramp + tab.ramp[depth][p];
      const double cap = fixed_cap + tab.cap[depth][p];
      const double min_load = fixed_min_load + p * problem.epsilon;
      if (problem.ramp_floor &&
          ramp + suffix_best_ramp[depth + 1] <
              *problem.ramp_floor - bound_slack(*problem.ramp_floor))
        continue;
      if (demand > cap + suffix_max_cap[depth + 1] + bound_slack(demand))
        continue;
      if (demand < min_load - bound_slack(min_load)) continue;
      prefix[depth] = p;
      if (incumbent) {
        const double bound = relaxation_bound(depth + 1);
        if (bound <= incumbent->objective + bound_slack(incumbent->objective))
          continue;
      }
      ++stats.nodes;
      search(depth + 1, ramp, cap, min_load);
    }
    prefix[depth] = 0;
  }
};

}  // namespace

HourOutcome solve_hour_bnb(const HourProblem& problem, SolveStats* stats) {
  check_problem(problem);
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = SolveStats{};

  HourOutcome out;
  const double demand = problem.responsive_demand();
  if (demand < 0.0) {
    out.infeasible =
        infeasibility_diagnostic(problem, kDefaultCombinationCap);
    return out;
  }

  const PrefixTables tab = build_tables(problem);
  BnbSearch search{problem, tab, demand, st};
  st.nodes = 1;  // root

  search.offer_leaf(search.greedy_prefix_vector());

  const bool caps_ok =
      demand <= search.suffix_max_cap[0] + bound_slack(demand);
  const bool floor_ok =
      !problem.ramp_floor ||
      search.suffix_best_ramp[0] >=
          *problem.ramp_floor - bound_slack(*problem.ramp_floor);
  if (caps_ok && floor_ok) {
    const double root_bound = search.relaxation_bound(0);
    if (!search.incumbent ||
        root_bound > search.incumbent->objective +
                         bound_slack(search.incumbent->objective))
      search.search(0, 0.0, 0.0, 0.0);
  }

  if (search.incumbent)
    out.solution = assemble_solution(problem, search.incumbent->prefix,
                                     search.incumbent->fill);
  else
    out.infeasible =
        infeasibility_diagnostic(problem, kDefaultCombinationCap);
  return out;
}

std::vector<HourOutcome> solve_horizon(const std::vector<HourProblem>& problems,
                                       HourSolver solver) {
  std::vector<HourOutcome> outcomes;
  outcomes.reserve(problems.size());
  for (const HourProblem& problem : problems)
    outcomes.push_back(solver == HourSolver::kEnumerate
                           ? enumerate_hour(problem)
                           : solve_hour_bnb(problem));
  return outcomes;
}

std::vector<ConstraintViolation> verify_milp_constraints(
    const HourProblem& problem, const HourSolution& solution) {
  std::vector<ConstraintViolation> violations;
  auto flag = [&violations](std::string constraint, std::string detail,
                            double residual) {
    violations.push_back(
        {std::move(constraint), std::move(detail), residual});
  };

  if (solution.awards.size() != problem.bids.size()) {
    flag("solution shape", "award count does not match bid count", 0.0);
    return violations;
  }

  const double big_m = problem.effective_big_m();
  const double eps = problem.epsilon;
  double award_total = 0.0;
  double ramp_total = 0.0;

  for (std::size_t m = 0; m < problem.bids.size(); ++m) {
    const HourBid& bid = problem.bids[m];
    const MicrogridAward& award = solution.awards[m];
    const std::size_t j_count = bid.segments.size();
    const std::string mg = "microgrid " + std::to_string(m);
    if (award.segment_loads.size() != j_count ||
        award.selected.size() != j_count) {
      flag("solution shape", mg + ": segment arrays do not match the bid",
           0.0);
      return violations;
    }

    double responsive_sum = 0.0;
    double selected_count = 0.0;
    for (std::size_t j = 0; j < j_count; ++j) {
      const double load = award.segment_loads[j];
      const bool on = award.selected[j];
      const std::string seg = mg + " segment " + std::to_string(j);
      if (on) {
        if (load < eps - kFeasTol)
          flag("segment load bounds", seg + ": selected load below epsilon",
               eps - load);
        if (load > bid.segments[j].max_quantity + kFeasTol)
          flag("segment load bounds", seg + ": load above segment capacity",
               load - bid.segments[j].max_quantity);
      } else if (std::abs(load) > kFeasTol) {
        flag("segment load bounds", seg + ": unselected segment carries load",
             std::abs(load));
      }
      if (j > 0 && on && !award.selected[j - 1])
        flag("sequential segment selection",
             seg + ": selected after an unselected segment", 1.0);
      responsive_sum += load;
      selected_count += on ? 1.0 : 0.0;

      // Pairing: whenever segment j is the marginal selected one, the
      // microgrid's selected ramp must equal this segment's ramp.
      double trailing = 0.0;
      for (std::size_t k = j + 1; k < j_count; ++k)
        trailing += award.selected[k] ? 1.0 : 0.0;
      const double slack = big_m * (1.0 - (on ? 1.0 : 0.0) + trailing);
      const double gap =
          std::abs(award.selected_ramp - bid.segments[j].ramp_rate);
      if (gap > slack + kFeasTol)
        flag("selected ramp pairing",
             seg + ": selected ramp does not match the marginal segment",
             gap - slack);
    }

    if (std::abs(award.selected_ramp) > big_m * selected_count + kFeasTol)
      flag("unselected ramp is zero",
           mg + ": ramp claimed with no segment selected",
           std::abs(award.selected_ramp) - big_m * selected_count);

    if (std::abs(award.responsive_load - responsive_sum) > kFeasTol)
      flag("responsive load aggregation",
           mg + ": responsive load does not equal the sum of segment loads",
           std::abs(award.responsive_load - responsive_sum));
    if (std::abs(award.responsive_load + bid.fixed_load - award.total_award) >
        kFeasTol)
      flag("award balance",
           mg + ": total award does not equal fixed plus responsive load",
           std::abs(award.responsive_load + bid.fixed_load -
                    award.total_award));
    award_total += award.total_award;
    ramp_total += award.selected_ramp;
  }

  if (std::abs(award_total - problem.awarded_demand) > kFeasTol)
    flag("demand conservation",
         "total awards do not match the demand handed down",
         std::abs(award_total - problem.awarded_demand));
  if (std::abs(solution.total_ramp - ramp_total) > kFeasTol)
    flag("total ramp aggregation",
         "total ramp does not equal the sum of selected ramps",
         std::abs(solution.total_ramp - ramp_total));
  if (problem.ramp_floor &&
      solution.total_ramp < *problem.ramp_floor - kFeasTol)
    flag("ramp floor", "total ramp below the guaranteed floor",
         *problem.ramp_floor - solution.total_ramp);

  return violations;
}

FeasibilityReport feasibility_check(const HourProblem& problem) {
  FeasibilityReport report;
  const double fixed = problem.total_fixed_load();
  if (problem.awarded_demand < fixed - kFeasTol)
    report.issues.push_back("fixed load exceeds award");

  double capacity = 0.0;
  double best_ramp_sum = 0.0;
  for (const HourBid& bid : problem.bids) {
    double best = 0.0;
    for (const BidSegment& s : bid.segments) {
      capacity += s.max_quantity;
      best = std::max(best, s.ramp_rate);
    }
    best_ramp_sum += best;
  }
  if (problem.responsive_demand() > capacity + kFeasTol)
    report.issues.push_back("responsive demand exceeds total bid capacity");
  if (problem.ramp_floor && *problem.ramp_floor > best_ramp_sum + kFeasTol)
    report.issues.push_back("ramp floor unreachable");
  return report;
}

}  // namespace dmo
