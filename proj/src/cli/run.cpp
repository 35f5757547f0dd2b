#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "brt/beurling.hpp"
#include "brt/cli.hpp"
#include "brt/errors.hpp"
#include "brt/parallel.hpp"
#include "brt/transform.hpp"
#include "io.hpp"

namespace brt::cli {

namespace {

using nlohmann::json;

// Residual above tolerance inside a verify-style run.
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string data_path;
  std::string recon_out;
  int gauge_rank = 1;
  bool svg = false;
};

void setup_logging() {
  auto logger = std::make_shared<spdlog::logger>("brt", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  const char* env = std::getenv("BRT_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet")
    logger->set_level(spdlog::level::off);
  else if (level == "debug")
    logger->set_level(spdlog::level::debug);
  else
    logger->set_level(spdlog::level::info);
  spdlog::set_default_logger(logger);
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

RunConfig load(const Options& opt) {
  json j = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) throw ConfigError("cannot read config " + opt.config_path);
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
  }
  auto cfg = parse_config(j, opt.seed);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  return cfg;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

raytracer::FanSpec fan_or_default(const RunConfig& cfg) {
  if (cfg.fan) return *cfg.fan;
  raytracer::FanSpec s;
  s.kind = raytracer::FanSpec::Kind::Boundary;
  s.n_pos = 16;
  s.n_ang = 8;
  return s;
}

const tensorfield::SymTensorField& require_field(const RunConfig& cfg) {
  if (!cfg.field) throw ConfigError("this subcommand needs a 'field' block");
  return *cfg.field;
}

json vec_json(const geometry::Vec2& v) { return json::array({v.x(), v.y()}); }

// ---- subcommands ----

int cmd_check_geometry(const RunConfig& cfg) {
  const auto rep = geometry::check_admissibility(*cfg.geometry.domain, *cfg.geometry.metric,
                                                 cfg.admissibility.fan_size, cfg.tracer.a, cfg.admissibility.l_max);
  json out{{"config_hash", cfg.hash}, {"admissible", rep.admissible()}, {"report", rep.to_json()}};
  write_atomic(join_path(cfg.output_dir, "admissibility.json"), dump(out));
  std::cout << json{{"admissible", rep.admissible()}, {"L_estimate", rep.L_estimate}}.dump() << std::endl;
  return 0;
}

int cmd_trace(const RunConfig& cfg, const Options& opt) {
  const auto fan = raytracer::sample_fan(*cfg.geometry.domain, fan_or_default(cfg));
  const std::size_t n = fan.states.size();
  std::vector<json> records(n);
  std::vector<raytracer::BrokenRay> rays(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& p = fan.states[i];
    json r{{"id", i}, {"x0", vec_json(p.x)}, {"theta0", p.theta}};
    try {
      rays[i] = raytracer::trace_broken_ray(*cfg.geometry.domain, *cfg.geometry.metric, p, cfg.tracer);
      json tr = json::array();
      for (const auto& refl : rays[i].reflections) tr.push_back(refl.transversality);
      r["n_reflections"] = rays[i].reflections.size();
      r["tau"] = rays[i].tau;
      r["transversalities"] = tr;
      r["exit_point"] = vec_json(rays[i].exit.x);
      r["near_tangential"] = rays[i].near_tangential;
      r["grazing"] = rays[i].grazing;
    } catch (const raytracer::TraceError& e) {
      r["error"] = raytracer::to_string(e.kind());
    }
    records[i] = std::move(r);
  });
  json out{{"config_hash", cfg.hash}, {"fan", fan.spec.to_json()}, {"tracer_step", cfg.tracer.step},
           {"rays", records}};
  write_atomic(join_path(cfg.output_dir, "rays.json"), dump(out));
  if (opt.svg) write_atomic(join_path(cfg.output_dir, "rays.svg"), rays_svg(*cfg.geometry.domain, rays, cfg.hash));
  std::cout << json{{"rays", n}}.dump() << std::endl;
  return 0;
}

int cmd_transform(const RunConfig& cfg) {
  const auto& f = require_field(cfg);
  const auto fan = raytracer::sample_fan(*cfg.geometry.domain, fan_or_default(cfg));
  auto ds = transform::forward(*cfg.geometry.domain, *cfg.geometry.metric, fan, f, cfg.tracer);
  ds.config_hash = cfg.hash;
  std::ostringstream os;
  ds.write_csv(os);
  write_atomic(join_path(cfg.output_dir, "transform.csv"), os.str());
  int failed = 0;
  for (const auto& r : ds.rows) failed += r.status != "ok";
  std::cout << json{{"rays", ds.rows.size()}, {"failed", failed}}.dump() << std::endl;
  return 0;
}

int cmd_u_field(const RunConfig& cfg) {
  const auto& f = require_field(cfg);
  auto grid = std::make_shared<const smcalculus::SMGrid>(cfg.geometry.domain, cfg.geometry.metric, cfg.grid);
  const auto u = transform::integral_function_u(f, grid, cfg.tracer);
  std::ostringstream os;
  os << "# config_hash=" << cfg.hash << " step=" << format_double(cfg.tracer.step) << "\n";
  os << "r_index,ang_index,theta_index,value,valid,flags\n";
  for (int i = 0; i < grid->n_r(); ++i)
    for (int j = 0; j < grid->n_ang(); ++j)
      for (int k = 0; k < grid->n_theta(); ++k) {
        const std::size_t n = grid->index(i, j, k);
        os << i << ',' << j << ',' << k << ',' << format_double(u.values[n]) << ',' << int(u.valid[n]) << ','
           << (u.flags.empty() ? 0 : int(u.flags[n])) << '\n';
      }
  write_atomic(join_path(cfg.output_dir, "u_field.csv"), os.str());
  std::cout << json{{"nodes", grid->size()}}.dump() << std::endl;
  return 0;
}

int finish_verify(const RunConfig& cfg, const std::string& name, json body, bool passed) {
  body["config_hash"] = cfg.hash;
  body["passed"] = passed;
  write_atomic(join_path(cfg.output_dir, "verify_" + name + ".json"), dump(body));
  std::cout << json{{"verify", name}, {"passed", passed}}.dump() << std::endl;
  if (!passed) throw AssertionFailure("verify " + name + ": residual above tolerance");
  return 0;
}

int cmd_verify_structure(const RunConfig& cfg) {
  const auto& g = cfg.grid;
  const auto center = cfg.geometry.domain->outer().center();
  const auto reps = smcalculus::verify_structure(smcalculus::interior_batch(center, g.r_min, g.r_max),
                                                 cfg.geometry.domain, cfg.geometry.metric, cfg.verify.resolutions,
                                                 cfg.verify.n_theta, g.r_min, g.r_max);
  const double tol = cfg.verify.tolerance.value_or(cfg.geometry.metric->is_flat() ? 1e-6 : 1e-3);
  bool ok = true;
  json arr = json::array();
  for (const auto& r : reps) {
    ok = ok && r.converges_at_order(2.0) && r.residuals.back() < tol;
    arr.push_back(r.to_json());
  }
  return finish_verify(cfg, "structure", {{"tolerance", tol}, {"min_order", 2.0}, {"reports", arr}}, ok);
}

int cmd_verify_pestov(const RunConfig& cfg) {
  const auto& g = cfg.grid;
  const auto center = cfg.geometry.domain->outer().center();
  const double tol = cfg.verify.tolerance.value_or(1e-3);
  const double bdy_tol = 1e-2;
  const auto interior = smcalculus::pestov_refinement(smcalculus::interior_batch(center, g.r_min, g.r_max)[1],
                                                      cfg.geometry.domain, cfg.geometry.metric,
                                                      cfg.verify.resolutions, cfg.verify.n_theta, g.r_min, g.r_max);
  const int N = cfg.verify.resolutions.back();
  auto grid = std::make_shared<const smcalculus::SMGrid>(
      cfg.geometry.domain, cfg.geometry.metric, smcalculus::GridSpec{N, N, cfg.verify.n_theta, g.r_min, g.r_max});
  const auto bdy = smcalculus::pestov_check(smcalculus::SMGridFunction::sample(grid, smcalculus::reflection_symmetric(center)));
  const bool ok = interior.converges_at_order(2.0) && interior.residuals.back() < tol && bdy.boundary_defect < bdy_tol;
  return finish_verify(cfg, "pestov",
                       {{"tolerance", tol},
                        {"boundary_tolerance", bdy_tol},
                        {"interior", interior.to_json()},
                        {"boundary", bdy.to_json()}},
                       ok);
}

int cmd_verify_commproj(const RunConfig& cfg) {
  const auto& g = cfg.grid;
  const auto center = cfg.geometry.domain->outer().center();
  const double tol = cfg.verify.tolerance.value_or(1e-6);
  auto grid = std::make_shared<const smcalculus::SMGrid>(cfg.geometry.domain, cfg.geometry.metric, g);
  json arr = json::array();
  bool ok = true;
  for (int m = 0; m <= 3; ++m) {
    const double r = smcalculus::comm_proj_check(
        m, smcalculus::SMGridFunction::sample(grid, smcalculus::comm_proj_input(center, g.r_min, g.r_max, m)));
    ok = ok && r < tol;
    arr.push_back({{"m", m}, {"residual", r}});
  }
  return finish_verify(cfg, "commproj",
                       {{"identity", "([X,Delta]u)_m - (2m+1)(Xu)_m"}, {"tolerance", tol}, {"results", arr}}, ok);
}

int cmd_verify_constants(const RunConfig& cfg) {
  const auto table = smcalculus::constants(cfg.verify.k_range, cfg.verify.N_range, cfg.verify.n_range);
  const bool c32 = smcalculus::C_const(3, 2) == mpq_class(7, 5);
  const bool ok = smcalculus::prodest_check(table) && c32;
  return finish_verify(cfg, "constants",
                       {{"identity", "B(k,N,n)^2 (2k+n-3) <= 2k+n-3+4N"},
                        {"C_3_2", smcalculus::C_const(3, 2).get_str()},
                        {"table", smcalculus::to_json(table)}},
                       ok);
}

int cmd_verify_beurling(const RunConfig& cfg) {
  if (cfg.geometry.domain->has_obstacle()) throw ConfigError("verify beurling needs a domain without obstacle");
  const auto f = cfg.field ? cfg.field : default_beurling_field(cfg.geometry.metric);
  auto grid = std::make_shared<const smcalculus::SMGrid>(cfg.geometry.domain, cfg.geometry.metric, cfg.grid);
  const auto rep = smcalculus::beurling_experiment(*f, grid, cfg.tracer, cfg.verify.max_degree);
  const double mismatch_tol = 0.05, slack = 1.05;
  json rel1 = json::array(), rel2 = json::array();
  bool ok = true;
  for (int k = f->rank() % 2 ? 1 : 0; k + 2 <= rep.max_degree; k += 2) {
    const double mm = rep.raising_lowering_mismatch(k);
    if (k >= f->rank()) ok = ok && mm < mismatch_tol;
    rel1.push_back({{"k", k}, {"mismatch", mm}});
  }
  for (int k = 3; k <= rep.max_degree; k += 2) {
    const double ratio = rep.beurling_ratio(k);
    ok = ok && ratio <= slack;
    rel2.push_back({{"k", k}, {"ratio", ratio}});
  }
  return finish_verify(cfg, "beurling",
                       {{"mismatch_tolerance", mismatch_tol},
                        {"ratio_slack", slack},
                        {"raising_lowering", rel1},
                        {"beurling", rel2},
                        {"report", rep.to_json()}},
                       ok);
}

std::vector<raytracer::BrokenRay> trace_rows(const RunConfig& cfg, const transform::TransformDataset& ds,
                                             std::vector<double>& values) {
  std::vector<const transform::DatasetRow*> rows;
  for (const auto& r : ds.rows)
    if (r.status == "ok" && std::isfinite(r.value)) rows.push_back(&r);
  std::vector<raytracer::BrokenRay> rays(rows.size());
  std::vector<std::uint8_t> ok(rows.size(), 1);
  parallel_for(rows.size(), [&](std::size_t i) {
    try {
      rays[i] = raytracer::trace_broken_ray(*cfg.geometry.domain, *cfg.geometry.metric, rows[i]->start, cfg.tracer);
    } catch (const std::exception&) {
      ok[i] = 0;
    }
  });
  std::vector<raytracer::BrokenRay> kept;
  values.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!ok[i]) {
      spdlog::warn("ray {} failed to retrace; dropped", rows[i]->ray_id);
      continue;
    }
    kept.push_back(std::move(rays[i]));
    values.push_back(rows[i]->value);
  }
  return kept;
}

int cmd_reconstruct(const RunConfig& cfg, const Options& opt) {
  if (opt.data_path.empty()) throw ConfigError("reconstruct needs --data");
  std::ifstream is(opt.data_path);
  if (!is) throw ConfigError("cannot read data " + opt.data_path);
  transform::TransformDataset ds;
  try {
    ds = transform::TransformDataset::read_csv(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed data file: ") + e.what());
  }
  std::vector<double> values;
  const auto rays = trace_rows(cfg, ds, values);
  if (rays.empty()) throw ConfigError("data file has no usable rays");

  recon::BaseGrid bg;
  bg.center = cfg.geometry.domain->outer().center();
  bg.r_min = cfg.grid.r_min;
  bg.r_max = cfg.grid.r_max;
  bg.n_r = cfg.recon.n_r;
  bg.n_ang = cfg.recon.n_ang;
  const recon::ForwardOperator A(bg, cfg.recon.rank, *cfg.geometry.metric, rays);
  recon::ReconConfig rc;
  rc.lambda = cfg.recon.lambda.value_or(1e-6 * A.mean_ray_length());
  rc.max_iter = cfg.recon.max_iter;
  rc.tol = cfg.recon.tol;
  const auto res = recon::reconstruct(A, Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()), rc);

  const std::string field_path = opt.recon_out.empty() ? join_path(cfg.output_dir, "field.csv") : opt.recon_out;
  const std::string stem = field_path.substr(0, field_path.size() - 4);

  const int nc = cfg.recon.rank + 1;
  std::ostringstream fs;
  fs << "# config_hash=" << cfg.hash << " rank=" << cfg.recon.rank << " lambda=" << format_double(rc.lambda)
     << " converged=" << (res.converged ? "true" : "false") << "\n";
  fs << "r_index,ang_index,r,ang";
  for (int c = 0; c < nc; ++c) fs << ",c" << c;
  fs << '\n';
  for (int i = 0; i < bg.n_r; ++i)
    for (int j = 0; j < bg.n_ang; ++j) {
      fs << i << ',' << j << ',' << format_double(bg.r(i)) << ',' << format_double(bg.ang(j));
      for (int c = 0; c < nc; ++c) fs << ',' << format_double(res.field.at(c, i, j));
      fs << '\n';
    }
  std::ostringstream ls;
  ls << "# config_hash=" << cfg.hash << "\n";
  ls << "iter,residual,normal_residual\n";
  for (const auto& l : res.log)
    ls << l.iter << ',' << format_double(l.residual) << ',' << format_double(l.normal_residual) << '\n';
  write_atomic(field_path, fs.str());
  write_atomic(stem + "_log.csv", ls.str());
  if (opt.svg)
    for (int c = 0; c < nc; ++c)
      write_atomic(stem + "_c" + std::to_string(c) + ".svg", field_svg(res.field, c, cfg.hash));
  std::cout << json{{"rays", rays.size()},
                    {"iterations", res.log.empty() ? 0 : res.log.back().iter},
                    {"converged", res.converged}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_gauge_test(const RunConfig& cfg, int rank) {
  if (rank < 1 || rank > tensorfield::kMaxFieldRank) throw ConfigError("--rank must be in 1..3");
  tensorfield::GaugeSpec spec;
  if (cfg.gauge) {
    spec = *cfg.gauge;
    if (spec.seed->rank() != rank - 1) throw ConfigError("gauge seed rank must equal --rank minus 1");
  } else {
    spec.seed = default_gauge_seed(rank - 1, cfg.geometry.metric);
  }
  const auto h = tensorfield::make_admissible_potential(cfg.geometry.domain, spec);
  const auto f = tensorfield::sym_cov_derivative(h);
  raytracer::FanSpec fs;
  if (cfg.fan) {
    fs = *cfg.fan;
  } else {
    fs.kind = raytracer::FanSpec::Kind::RandomBoundary;
    fs.count = 500;
    fs.seed = cfg.seed;
  }
  const auto fan = raytracer::sample_fan(*cfg.geometry.domain, fs);
  auto max_abs = [&](double step) {
    auto params = cfg.tracer;
    params.step = step;
    const auto ds = transform::forward(*cfg.geometry.domain, *cfg.geometry.metric, fan, *f, params);
    double m = 0.0;
    int failed = 0;
    for (const auto& r : ds.rows) {
      if (r.status != "ok") {
        ++failed;
        continue;
      }
      m = std::max(m, std::abs(r.value));
    }
    return std::make_pair(m, failed);
  };
  const auto [m1, failed1] = max_abs(cfg.tracer.step);
  const auto [m2, failed2] = max_abs(0.5 * cfg.tracer.step);
  const double tol = 1e-6;
  const bool ok = m1 < tol;
  json out{{"config_hash", cfg.hash},
           {"rank", rank},
           {"rays", fan.states.size()},
           {"step", cfg.tracer.step},
           {"max_abs", m1},
           {"max_abs_half_step", m2},
           {"reduction", m2 > 0.0 ? m1 / m2 : std::numeric_limits<double>::infinity()},
           {"failed_rays", failed1 + failed2},
           {"tolerance", tol},
           {"passed", ok}};
  write_atomic(join_path(cfg.output_dir, "gauge_test_rank" + std::to_string(rank) + ".json"), dump(out));
  std::cout << json{{"rank", rank}, {"max_abs", m1}, {"max_abs_half_step", m2}}.dump() << std::endl;
  if (!ok) throw AssertionFailure("gauge-test: max |I(d^s h)| above tolerance");
  return 0;
}

}  // namespace

tensorfield::FieldPtr default_gauge_seed(int rank, std::shared_ptr<const geometry::ConformalMetric> metric) {
  std::vector<ScalarExprPtr> c;
  switch (rank) {
    case 0:
      c = {make_sum({make_trig(1.0, {19.0, 8.0}, 0.3), make_trig(0.6, {-7.0, 21.0}, 1.1)})};
      break;
    case 1:
      c = {make_trig(1.0, {20.0, 10.0}, 0.2), make_trig(0.8, {-6.0, 20.0}, -0.4)};
      break;
    case 2:
      c = {make_trig(0.7, {18.0, 9.0}, 0.1), make_trig(0.5, {-14.0, 13.0}, 0.8), make_trig(0.9, {5.0, -19.0}, -0.3)};
      break;
    default:
      throw RankUnsupported("gauge seed rank must be <= 2");
  }
  return tensorfield::make_expression_field(std::move(metric), rank, std::move(c));
}

tensorfield::FieldPtr default_beurling_field(std::shared_ptr<const geometry::ConformalMetric> metric) {
  return tensorfield::make_expression_field(
      std::move(metric), 1, {make_gaussian(1.0, {0.3, 0.2}, 0.5), make_gaussian(0.5, {-0.2, 0.1}, 0.6)});
}

int run(int argc, const char* const* argv) {
  setup_logging();
  Options opt;
  CLI::App app{"broken-ray tensor tomography experiments", "brt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opt.config_path, "JSON run configuration");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--threads", opt.threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", opt.seed, "global seed");
  app.add_flag("--svg", opt.svg, "also write SVG plots");

  auto* check = app.add_subcommand("check-geometry", "admissibility report");
  auto* trace = app.add_subcommand("trace", "trace a ray fan");
  auto* transform_cmd = app.add_subcommand("transform", "broken-ray transform dataset");
  auto* ufield = app.add_subcommand("u-field", "integral function u on the grid");
  auto* verify = app.add_subcommand("verify", "identity checks");
  verify->require_subcommand(1);
  std::vector<CLI::App*> verify_subs;
  for (const char* name : {"structure", "pestov", "commproj", "constants", "beurling"})
    verify_subs.push_back(verify->add_subcommand(name)->fallthrough());
  auto* reconstruct = app.add_subcommand("reconstruct", "CGLS reconstruction from a dataset");
  reconstruct->add_option("--data", opt.data_path, "transform CSV")->required();
  auto* gauge = app.add_subcommand("gauge-test", "transform of an admissible potential field");
  gauge->add_option("--rank", opt.gauge_rank, "rank m of d^s h")->required();
  for (auto* s : {check, trace, transform_cmd, ufield, verify, reconstruct, gauge}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return 2;
  }

  // reconstruct accepts --out field.csv; the log and plots go beside it
  if (reconstruct->parsed() && opt.out_dir.size() >= 4 && opt.out_dir.substr(opt.out_dir.size() - 4) == ".csv") {
    opt.recon_out = opt.out_dir;
    const auto parent = std::filesystem::path(opt.out_dir).parent_path().string();
    opt.out_dir = parent.empty() ? "." : parent;
  }

  try {
    const RunConfig cfg = load(opt);
    ThreadLimit limit(opt.threads);
    ensure_dir(cfg.output_dir);
    return limit.execute([&]() -> int {
      if (check->parsed()) return cmd_check_geometry(cfg);
      if (trace->parsed()) return cmd_trace(cfg, opt);
      if (transform_cmd->parsed()) return cmd_transform(cfg);
      if (ufield->parsed()) return cmd_u_field(cfg);
      if (reconstruct->parsed()) return cmd_reconstruct(cfg, opt);
      if (gauge->parsed()) return cmd_gauge_test(cfg, opt.gauge_rank);
      if (verify_subs[0]->parsed()) return cmd_verify_structure(cfg);
      if (verify_subs[1]->parsed()) return cmd_verify_pestov(cfg);
      if (verify_subs[2]->parsed()) return cmd_verify_commproj(cfg);
      if (verify_subs[3]->parsed()) return cmd_verify_constants(cfg);
      return cmd_verify_beurling(cfg);
    });
  } catch (const AssertionFailure& e) {
    print_error("AssertionFailure", e.what());
    return 3;
  } catch (const ConfigError& e) {
    print_error("ConfigError", e.what());
    return 2;
  } catch (const RankUnsupported& e) {
    print_error("RankUnsupported", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"brt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace brt::cli
