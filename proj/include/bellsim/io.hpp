#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bellsim/analysis.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/hpdensity.hpp"

namespace bellsim {

struct AnalysisOptions {
  double confidence = 0.99;
  double alpha = 1e-3;  // freedom / no-signaling rejection level
};

struct HpAuditConfig {
  int n = 1;
  std::string family = "reference";  // reference | uniform_local
  ReferenceFamilyParams reference_params;
  double uniform_weight_sigma = 0.25;
  double uniform_weight_tau = 0.25;
  Plane plane = Plane::xy;
  std::vector<double> a_grid_deg;  // defaults to 0..90 in steps of 10
  std::vector<double> b_grid_deg;
  QuadratureConfig quadrature;
};

// One config document with sections model / table / run / analysis / hp.
// Directions enter as angles in degrees within a named plane and are
// normalized to unit vectors on load.
struct AppConfig {
  ExperimentConfig run;
  AnalysisOptions analysis;
  std::optional<HpAuditConfig> hp;
  nlohmann::json echo;  // parsed document, embedded in reports for provenance
};

AppConfig parse_config(const nlohmann::json& doc);
AppConfig load_config(const std::filesystem::path& path);

// A table object {plane, a_deg, b_deg}; load_table also accepts a full
// config document and uses its table section.
SettingTable parse_table(const nlohmann::json& doc);
SettingTable load_table(const std::filesystem::path& path);

// Direction grid for the audit: angles in degrees within `plane`.
std::vector<Direction> grid_from_angles(const std::vector<double>& degrees,
                                        Plane plane);

// Trial logs: one record per line,
//   {"index":0,"a":1,"b":2,"x":1,"y":-1,"revealed":[1,1,-1,1]}
// with revealed either a 4-array in (x1, x2, y1, y2) order or null.
void append_log_line(std::string& out, const TrialRecord& rec);
std::string log_to_string(const TrialLog& log);
TrialRecord parse_log_line(std::string_view line, std::uint64_t line_number);

void write_log_file(const std::filesystem::path& path, const TrialLog& log);
TrialLog read_log_file(const std::filesystem::path& path);

// Streaming read for constant-memory analysis.
void for_each_record(std::istream& is,
                     const std::function<void(const TrialRecord&)>& fn);

// Report serialization.
nlohmann::json to_json(const ModelDescriptor& d);
nlohmann::json to_json(const Direction& d);
nlohmann::json to_json(const BellEstimate& est);
nlohmann::json to_json(const IndependenceReport& rep);
nlohmann::json to_json(const NoSignalingReport& rep);
nlohmann::json to_json(const LocalityAuditReport& rep);

// Run manifest: config echo, artifact version, creation time, output paths.
nlohmann::json make_manifest(const AppConfig& cfg,
                             const std::vector<std::string>& output_paths);

std::string iso8601_utc_now();

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace bellsim
