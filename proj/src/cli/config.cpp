#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <sstream>

#include "brt/cli.hpp"
#include "brt/errors.hpp"
#include "brt/json_util.hpp"

namespace brt::cli {

using namespace json_util;

namespace {

std::pair<int, int> int_range(const nlohmann::json& j, const char* key, std::pair<int, int> fallback,
                              const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer() ||
      v[0].get<int>() > v[1].get<int>())
    throw ConfigError(where + ": '" + key + "' must be [lo, hi] integers with lo <= hi");
  return {v[0].get<int>(), v[1].get<int>()};
}

int positive_int(const nlohmann::json& j, const char* key, int fallback, const std::string& where, int min = 1) {
  const int v = integer_or(j, key, fallback, where);
  if (v < min) throw ConfigError(where + ": '" + key + "' must be >= " + std::to_string(min));
  return v;
}

double positive_number(const nlohmann::json& j, const char* key, double fallback, const std::string& where) {
  const double v = number_or(j, key, fallback, where);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + ": '" + key + "' must be positive");
  return v;
}

}  // namespace

nlohmann::json default_config() {
  return {{"geometry",
           {{"metric", {{"phi", "zero"}}},
            {"outer", {{"circle", {{"center", {0.0, 0.0}}, {"radius", 2.0}}}}},
            {"obstacle", {{"circle", {{"center", {0.0, 0.0}}, {"radius", 1.0}}}}}}}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

RunConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override) {
  check_keys(j, {"geometry", "field", "gauge", "fan", "tracer", "grid", "verify", "recon", "admissibility", "seed",
                 "output_dir"},
             "config");
  RunConfig cfg;
  cfg.source = j;
  cfg.geometry = geometry::parse_geometry(j.contains("geometry") ? j.at("geometry") : default_config()["geometry"]);
  const auto& domain = *cfg.geometry.domain;
  const double R = domain.outer().max_radius();

  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long>() < 0))
      throw ConfigError("config: 'seed' must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("config: 'output_dir' must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }

  if (j.contains("field")) cfg.field = tensorfield::parse_field(j.at("field"), cfg.geometry.metric);
  if (j.contains("gauge")) {
    cfg.gauge = tensorfield::parse_gauge(j.at("gauge"), cfg.geometry.metric);
    if (cfg.gauge->seed->rank() > 2) throw ConfigError("gauge: seed rank must be <= 2");
    const double gap = domain.gap();
    if (!(cfg.gauge->cutoff_width < gap && cfg.gauge->blend_width < gap && cfg.gauge->cutoff_width > 0.0 &&
          cfg.gauge->blend_width > 0.0))
      throw ConfigError("gauge: widths must be positive and smaller than the E-R gap");
  }
  if (j.contains("fan")) {
    cfg.fan = raytracer::parse_fan(j.at("fan"));
    if (cfg.fan->kind == raytracer::FanSpec::Kind::RandomBoundary && !j.at("fan").begin()->contains("seed"))
      cfg.fan->seed = cfg.seed;
  }

  cfg.tracer.step = 1e-3 * R;
  if (j.contains("tracer")) {
    const auto& t = j.at("tracer");
    check_keys(t, {"step", "l_max", "a", "max_reflections"}, "tracer");
    cfg.tracer.step = positive_number(t, "step", cfg.tracer.step, "tracer");
    cfg.tracer.l_max = positive_number(t, "l_max", cfg.tracer.l_max, "tracer");
    cfg.tracer.a = positive_number(t, "a", cfg.tracer.a, "tracer");
    cfg.tracer.max_reflections = positive_int(t, "max_reflections", cfg.tracer.max_reflections, "tracer");
  }

  cfg.grid.r_max = R;
  cfg.grid.r_min = 0.1 * R;
  if (const auto* obs = dynamic_cast<const geometry::Circle*>(domain.obstacle());
      obs && (obs->center() - domain.outer().center()).norm() < 1e-12)
    cfg.grid.r_min = obs->radius();
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"n_r", "n_ang", "n_theta", "r_min", "r_max"}, "grid");
    cfg.grid.n_r = positive_int(g, "n_r", cfg.grid.n_r, "grid", 5);
    cfg.grid.n_ang = positive_int(g, "n_ang", cfg.grid.n_ang, "grid", 5);
    cfg.grid.n_theta = positive_int(g, "n_theta", cfg.grid.n_theta, "grid", 4);
    if (cfg.grid.n_theta % 2) throw ConfigError("grid: n_theta must be even");
    cfg.grid.r_min = positive_number(g, "r_min", cfg.grid.r_min, "grid");
    cfg.grid.r_max = positive_number(g, "r_max", cfg.grid.r_max, "grid");
    if (cfg.grid.r_min >= cfg.grid.r_max) throw ConfigError("grid: r_min must be below r_max");
  }

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    check_keys(v, {"resolutions", "n_theta", "tolerance", "k_range", "N_range", "n_range", "max_degree"}, "verify");
    if (v.contains("resolutions")) {
      if (!v.at("resolutions").is_array() || v.at("resolutions").empty())
        throw ConfigError("verify: 'resolutions' must be a non-empty array");
      cfg.verify.resolutions.clear();
      for (const auto& r : v.at("resolutions")) {
        if (!r.is_number_integer() || r.get<int>() < 8) throw ConfigError("verify: resolutions must be integers >= 8");
        cfg.verify.resolutions.push_back(r.get<int>());
      }
    }
    cfg.verify.n_theta = positive_int(v, "n_theta", cfg.verify.n_theta, "verify", 4);
    if (cfg.verify.n_theta % 2) throw ConfigError("verify: n_theta must be even");
    if (v.contains("tolerance")) cfg.verify.tolerance = positive_number(v, "tolerance", 1.0, "verify");
    cfg.verify.k_range = int_range(v, "k_range", cfg.verify.k_range, "verify");
    cfg.verify.N_range = int_range(v, "N_range", cfg.verify.N_range, "verify");
    cfg.verify.n_range = int_range(v, "n_range", cfg.verify.n_range, "verify");
    cfg.verify.max_degree = positive_int(v, "max_degree", cfg.verify.max_degree, "verify", 2);
  }

  if (j.contains("recon")) {
    const auto& r = j.at("recon");
    check_keys(r, {"rank", "n_r", "n_ang", "lambda", "max_iter", "tol"}, "recon");
    cfg.recon.rank = integer_or(r, "rank", 0, "recon");
    if (cfg.recon.rank < 0 || cfg.recon.rank > tensorfield::kMaxFieldRank) throw ConfigError("recon: rank must be in 0..3");
    cfg.recon.n_r = positive_int(r, "n_r", cfg.recon.n_r, "recon", 2);
    cfg.recon.n_ang = positive_int(r, "n_ang", cfg.recon.n_ang, "recon", 3);
    if (r.contains("lambda")) {
      const double l = number(r, "lambda", "recon");
      if (l < 0.0) throw ConfigError("recon: lambda must be >= 0");
      cfg.recon.lambda = l;
    }
    cfg.recon.max_iter = positive_int(r, "max_iter", cfg.recon.max_iter, "recon");
    cfg.recon.tol = positive_number(r, "tol", cfg.recon.tol, "recon");
  }

  if (j.contains("admissibility")) {
    const auto& a = j.at("admissibility");
    check_keys(a, {"fan_size", "l_max"}, "admissibility");
    cfg.admissibility.fan_size = positive_int(a, "fan_size", cfg.admissibility.fan_size, "admissibility");
    cfg.admissibility.l_max = positive_number(a, "l_max", cfg.admissibility.l_max, "admissibility");
  }

  cfg.hash = sha256_hex(nlohmann::json{{"config", j}, {"seed", cfg.seed}}.dump());
  return cfg;
}

}  // namespace brt::cli
