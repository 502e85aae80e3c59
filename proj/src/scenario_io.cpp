#include "dmo/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dmo {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioFormatError(where + ": " + what);
}

const json& member(const json& obj, const std::string& where,
                   const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number_field(const json& obj, const std::string& where,
                    const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

int int_field(const json& obj, const std::string& where, const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::vector<double> hour_array(const json& v, const std::string& where,
                               int horizon) {
  if (!v.is_array()) fail(where, "expected an array of hourly values");
  if (static_cast<int>(v.size()) != horizon)
    fail(where, "expected " + std::to_string(horizon) + " values, got " +
                    std::to_string(v.size()));
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      fail(where + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

double round6(double value) { return std::round(value * 1e6) / 1e6; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportIoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw ReportIoError("write failed: " + path.string());
}

ordered_json case_summary_json(const CaseReport& report) {
  ordered_json c;
  c["label"] = report.case_label;
  c["objective_total"] = round6(report.objective_total);
  c["min_total_ramp"] = round6(report.min_total_ramp());
  ordered_json infeasible = ordered_json::array();
  for (const InfeasibleHourRecord& rec : report.infeasible_hours) {
    ordered_json entry;
    entry["hour"] = rec.hour;
    entry["reason"] = rec.diagnostic.reason;
    entry["max_total_ramp"] = round6(rec.diagnostic.max_total_ramp);
    infeasible.push_back(std::move(entry));
  }
  c["infeasible_hours"] = std::move(infeasible);
  return c;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) fail("scenario", "top level must be an object");
  const int version = int_field(doc, "scenario", "schema_version");
  if (version != 1)
    fail("scenario.schema_version",
         "unsupported version " + std::to_string(version));

  Scenario scenario;
  scenario.horizon = int_field(doc, "scenario", "horizon");
  if (scenario.horizon <= 0) fail("scenario.horizon", "must be positive");

  const json& mgs = member(doc, "scenario", "microgrids");
  if (!mgs.is_array() || mgs.empty())
    fail("scenario.microgrids", "expected a non-empty array");

  for (std::size_t m = 0; m < mgs.size(); ++m) {
    const std::string where = "microgrids[" + std::to_string(m) + "]";
    const json& mg = mgs[m];
    if (!mg.is_object()) fail(where, "expected an object");

    const json& name = member(mg, where, "name");
    if (!name.is_string() || name.get<std::string>().empty())
      fail(where + ".name", "expected a non-empty string");
    const std::string name_str = name.get<std::string>();
    if (name_str.find_first_of(",\r\n") != std::string::npos)
      fail(where + ".name", "must not contain commas or newlines");

    std::vector<double> fixed = hour_array(member(mg, where, "fixed_load"),
                                           where + ".fixed_load",
                                           scenario.horizon);
    for (std::size_t t = 0; t < fixed.size(); ++t)
      if (fixed[t] < 0.0)
        fail(where + ".fixed_load[" + std::to_string(t) + "]",
             "must be non-negative");

    const bool has_units = mg.contains("dg_units");
    const bool has_segments = mg.contains("segments");
    if (has_units == has_segments)
      fail(where, "expected exactly one of 'dg_units' or 'segments'");

    MicrogridBid bid;
    if (has_units) {
      const json& units = mg.at("dg_units");
      if (!units.is_array() || units.empty())
        fail(where + ".dg_units", "expected a non-empty array");
      std::vector<DgUnit> fleet;
      for (std::size_t u = 0; u < units.size(); ++u) {
        const std::string uw = where + ".dg_units[" + std::to_string(u) + "]";
        DgUnit unit;
        unit.marginal_cost = number_field(units[u], uw, "cost");
        unit.capacity = number_field(units[u], uw, "capacity");
        unit.ramp_rate = number_field(units[u], uw, "ramp");
        if (!(unit.capacity > 0.0)) fail(uw + ".capacity", "must be positive");
        if (unit.marginal_cost < 0.0) fail(uw + ".cost", "must be non-negative");
        if (unit.ramp_rate < 0.0) fail(uw + ".ramp", "must be non-negative");
        fleet.push_back(unit);
      }
      bid = build_bid_from_fleet(fleet, std::move(fixed),
                                 static_cast<int>(m));
    } else {
      const json& segs = mg.at("segments");
      if (!segs.is_array() || segs.empty())
        fail(where + ".segments", "expected a non-empty array");
      bid.id = static_cast<int>(m);
      bid.fixed_load = std::move(fixed);
      for (std::size_t j = 0; j < segs.size(); ++j) {
        const std::string sw = where + ".segments[" + std::to_string(j) + "]";
        BidSegment seg;
        seg.price = number_field(segs[j], sw, "price");
        seg.max_quantity = number_field(segs[j], sw, "max_quantity");
        seg.ramp_rate = number_field(segs[j], sw, "ramp_rate");
        bid.segments.push_back(seg);
      }
      const BidValidation check = validate_bid(bid);
      if (!check.ok()) fail(where + ".segments", check.violations.front());
    }
    scenario.microgrids.push_back(std::move(bid));
    scenario.microgrid_names.push_back(name_str);
  }

  scenario.award_profile = hour_array(member(doc, "scenario", "award"),
                                      "scenario.award", scenario.horizon);
  for (double v : scenario.award_profile)
    if (v < 0.0) fail("scenario.award", "must be non-negative");

  if (doc.contains("ramp_floor")) {
    const json& floor = doc.at("ramp_floor");
    if (floor.is_number()) {
      scenario.ramp_floor_profile.assign(
          static_cast<std::size_t>(scenario.horizon), floor.get<double>());
    } else {
      scenario.ramp_floor_profile =
          hour_array(floor, "scenario.ramp_floor", scenario.horizon);
    }
    for (double v : scenario.ramp_floor_profile)
      if (v < 0.0) fail("scenario.ramp_floor", "must be non-negative");
  }

  if (doc.contains("epsilon")) {
    scenario.epsilon = number_field(doc, "scenario", "epsilon");
    if (!(scenario.epsilon > 0.0)) fail("scenario.epsilon", "must be positive");
  }
  if (doc.contains("big_m")) {
    scenario.big_m = number_field(doc, "scenario", "big_m");
    if (!(scenario.big_m > 0.0)) fail("scenario.big_m", "must be positive");
  }

  const auto issues = validate_scenario(scenario);
  if (!issues.empty()) fail("scenario", issues.front());
  return scenario;
}

ordered_json scenario_to_json(const Scenario& scenario) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["horizon"] = scenario.horizon;
  ordered_json mgs = ordered_json::array();
  for (std::size_t m = 0; m < scenario.microgrids.size(); ++m) {
    const MicrogridBid& bid = scenario.microgrids[m];
    ordered_json mg;
    mg["name"] = m < scenario.microgrid_names.size()
                     ? scenario.microgrid_names[m]
                     : "MG" + std::to_string(m + 1);
    mg["fixed_load"] = bid.fixed_load;
    ordered_json segs = ordered_json::array();
    for (const BidSegment& s : bid.segments) {
      ordered_json seg;
      seg["price"] = s.price;
      seg["max_quantity"] = s.max_quantity;
      seg["ramp_rate"] = s.ramp_rate;
      segs.push_back(std::move(seg));
    }
    mg["segments"] = std::move(segs);
    mgs.push_back(std::move(mg));
  }
  doc["microgrids"] = std::move(mgs);
  doc["award"] = scenario.award_profile;
  if (!scenario.ramp_floor_profile.empty()) {
    const auto& floor = scenario.ramp_floor_profile;
    const bool constant =
        std::all_of(floor.begin(), floor.end(),
                    [&floor](double v) { return v == floor.front(); });
    if (constant)
      doc["ramp_floor"] = floor.front();
    else
      doc["ramp_floor"] = floor;
  }
  doc["epsilon"] = scenario.epsilon;
  if (scenario.big_m > 0.0) doc["big_m"] = scenario.big_m;
  return doc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportIoError("cannot open scenario file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError("scenario file " + path.string() +
                              ": " + e.what());
  }
  return scenario_from_json(doc);
}

void write_scenario(const Scenario& scenario,
                    const std::filesystem::path& path) {
  write_text(path, scenario_to_json(scenario).dump(2) + "\n");
}

void emit_reports(const CaseComparison& comparison,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw ReportIoError("cannot create output directory: " +
                        out_dir.string());

  ordered_json summary;
  summary["schema_version"] = 1;
  {
    ordered_json c;
    c["label"] = "case1";
    c["objective_total"] = round6(comparison.objective_case1);
    c["min_total_ramp"] = round6(comparison.min_ramp_case1);
    c["infeasible_hours"] = ordered_json::array();
    summary["case1"] = std::move(c);
  }
  {
    ordered_json c;
    c["label"] = "case2";
    c["objective_total"] = round6(comparison.objective_case2);
    c["min_total_ramp"] = round6(comparison.min_ramp_case2);
    c["infeasible_hours"] = ordered_json::array();
    summary["case2"] = std::move(c);
  }
  summary["objective_delta"] = round6(comparison.objective_delta);
  summary["relative_gap"] = round6(comparison.relative_gap);
  summary["awards_conserved"] = comparison.awards_conserved;
  summary["max_award_residual"] = round6(comparison.max_award_residual);
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");

  std::ostringstream ramp;
  ramp << "hour,case1_total_ramp,case2_total_ramp,floor\n";
  for (int t = 0; t < comparison.horizon; ++t)
    ramp << t << ',' << format_fixed(comparison.ramp_case1[t]) << ','
         << format_fixed(comparison.ramp_case2[t]) << ','
         << format_fixed(comparison.floor.empty() ? 0.0 : comparison.floor[t])
         << '\n';
  write_text(out_dir / "ramp_profile.csv", ramp.str());

  std::ostringstream awards;
  awards << "hour,microgrid,case1_award,case2_award\n";
  for (int t = 0; t < comparison.horizon; ++t)
    for (std::size_t m = 0; m < comparison.microgrid_names.size(); ++m)
      awards << t << ',' << comparison.microgrid_names[m] << ','
             << format_fixed(comparison.awards_case1[t][m]) << ','
             << format_fixed(comparison.awards_case2[t][m]) << '\n';
  write_text(out_dir / "awards.csv", awards.str());
}

void emit_case_summary(const CaseReport& report,
                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw ReportIoError("cannot create output directory: " +
                        out_dir.string());
  ordered_json summary;
  summary["schema_version"] = 1;
  summary[report.case_label] = case_summary_json(report);
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace dmo
