#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dmo/scenario.hpp"

namespace dmo {

// Malformed or schema-violating scenario content.
struct ScenarioFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem trouble (unreadable input, unwritable output).
struct ReportIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario file schema (version 1):
//   {
//     "schema_version": 1,
//     "horizon": 24,
//     "microgrids": [
//       {"name": "MG1", "fixed_load": [...],
//        "dg_units": [{"cost": .., "capacity": .., "ramp": ..}, ...]},
//       {"name": "MG2", "fixed_load": [...],
//        "segments": [{"price": .., "max_quantity": .., "ramp_rate": ..}]}
//     ],
//     "award": [...],
//     "ramp_floor": 12.5 | [...],      (optional)
//     "epsilon": 0.001, "big_m": 4.5   (optional)
//   }
// Every microgrid carries exactly one of dg_units/segments; all arrays of
// hourly values have `horizon` entries.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

Scenario parse_scenario(const std::filesystem::path& path);
void write_scenario(const Scenario& scenario,
                    const std::filesystem::path& path);

// Writes the comparison as three files under out_dir:
//   summary.json       objectives, delta, min ramps, infeasible hours
//   ramp_profile.csv   hour,case1_total_ramp,case2_total_ramp,floor
//   awards.csv         hour,microgrid,case1_award,case2_award
// Numbers carry six decimal places; identical inputs produce byte-identical
// files.
void emit_reports(const CaseComparison& comparison,
                  const std::filesystem::path& out_dir);

// Single-case summary.json for runs that skip the comparison.
void emit_case_summary(const CaseReport& report,
                       const std::filesystem::path& out_dir);

}  // namespace dmo
