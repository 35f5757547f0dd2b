#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brt/geometry.hpp"
#include "brt/raytracer.hpp"
#include "brt/recon.hpp"
#include "brt/smcalculus.hpp"
#include "brt/tensorfield.hpp"

namespace brt::cli {

struct VerifyConfig {
  std::vector<int> resolutions{32, 64, 128};
  int n_theta = 64;
  std::optional<double> tolerance;
  std::pair<int, int> k_range{2, 200};
  std::pair<int, int> N_range{0, 200};
  std::pair<int, int> n_range{2, 10};
  int max_degree = 7;
};

struct ReconBlock {
  int rank = 0;
  int n_r = 64;
  int n_ang = 64;
  std::optional<double> lambda;  // default 1e-6 * mean ray length
  int max_iter = 1000;
  double tol = 1e-8;
};

struct AdmissibilityBlock {
  int fan_size = 400;
  double l_max = 100.0;
};

struct RunConfig {
  nlohmann::json source;
  geometry::Geometry geometry;
  tensorfield::FieldPtr field;
  std::optional<tensorfield::GaugeSpec> gauge;
  std::optional<raytracer::FanSpec> fan;
  raytracer::TraceParams tracer;
  smcalculus::GridSpec grid;
  VerifyConfig verify;
  ReconBlock recon;
  AdmissibilityBlock admissibility;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::string hash;
};

// Validates the whole document before anything runs; throws ConfigError. The seed overrides the config's.
RunConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = std::nullopt);
nlohmann::json default_config();
std::string sha256_hex(const std::string& data);

// Seeds used by gauge-test when the config has no gauge block.
tensorfield::FieldPtr default_gauge_seed(int rank, std::shared_ptr<const geometry::ConformalMetric> metric);
// One-form used by verify beurling when the config has no field block.
tensorfield::FieldPtr default_beurling_field(std::shared_ptr<const geometry::ConformalMetric> metric);

// Writes through a temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace brt::cli
