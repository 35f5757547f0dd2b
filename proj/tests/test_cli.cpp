#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "brt/cli.hpp"

using namespace brt;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("brt_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(root / name) << text;
    return (root / name).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int quiet_run(std::vector<std::string> args) {
  std::ostringstream sink, esink;
  auto* out = std::cout.rdbuf(sink.rdbuf());
  auto* err = std::cerr.rdbuf(esink.rdbuf());
  const int rc = cli::run(std::move(args));
  std::cout.rdbuf(out);
  std::cerr.rdbuf(err);
  return rc;
}

const nlohmann::json kSmall = {
    {"field",
     {{"rank", 0},
      {"components", {{"", {{"gaussian", {{"amplitude", 1.0}, {"center", {1.2, 0.3}}, {"width", 0.5}}}}}}}}},
    {"fan", {{"boundary", {{"n_pos", 4}, {"n_ang", 3}}}}},
    {"tracer", {{"step", 1e-2}}},
    {"recon", {{"n_r", 8}, {"n_ang", 16}, {"max_iter", 20}}},
    {"seed", 3}};

}  // namespace

TEST_CASE("verify constants writes its report") {
  Scratch s("constants");
  const auto cfg = s.write("cfg.json", nlohmann::json({{"verify", {{"k_range", {2, 20}}, {"N_range", {0, 20}}}}}).dump());
  CHECK(quiet_run({"verify", "constants", "--config", cfg, "--out", (s.root / "out").string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(s.root / "out" / "verify_constants.json"));
  CHECK(j.contains("config_hash"));
}

TEST_CASE("malformed and unknown configs exit 2 without outputs") {
  Scratch s("bad");
  const auto out = (s.root / "out").string();
  CHECK(quiet_run({"check-geometry", "--config", s.write("a.json", "{not json"), "--out", out}) == 2);
  CHECK(quiet_run({"check-geometry", "--config", s.write("b.json", R"({"bogus": 1})"), "--out", out}) == 2);
  CHECK(quiet_run({"check-geometry", "--config", s.write("c.json", R"({"seed": -4})"), "--out", out}) == 2);
  CHECK(quiet_run({"gauge-test", "--rank", "4", "--config", s.write("d.json", "{}"), "--out", out}) == 2);
  CHECK(quiet_run({"no-such-command"}) == 2);
  CHECK((!fs::exists(out) || fs::is_empty(out)));
}

TEST_CASE("outputs carry the config hash and are reproducible") {
  Scratch s("hash");
  const auto cfg = s.write("cfg.json", kSmall.dump());
  const auto out = s.root / "out";
  REQUIRE(quiet_run({"transform", "--config", cfg, "--out", out.string()}) == 0);
  REQUIRE(quiet_run({"trace", "--config", cfg, "--out", out.string(), "--svg"}) == 0);
  const std::string hash = cli::parse_config(kSmall).hash;
  CHECK(hash.size() == 64);
  CHECK(slurp(out / "transform.csv").find(hash) != std::string::npos);
  CHECK(slurp(out / "rays.json").find(hash) != std::string::npos);
  CHECK(slurp(out / "rays.svg").find(hash) != std::string::npos);
  const std::string first = slurp(out / "transform.csv");
  REQUIRE(quiet_run({"transform", "--config", cfg, "--out", out.string()}) == 0);
  CHECK(slurp(out / "transform.csv") == first);
  // the seed override changes the hash
  CHECK(cli::parse_config(kSmall, 4).hash != hash);
}

TEST_CASE("reconstruct names its field file from --out") {
  Scratch s("recon");
  const auto cfg = s.write("cfg.json", kSmall.dump());
  REQUIRE(quiet_run({"transform", "--config", cfg, "--out", s.root.string()}) == 0);
  const auto field = s.root / "res" / "f.csv";
  CHECK(quiet_run({"reconstruct", "--config", cfg, "--data", (s.root / "transform.csv").string(), "--out",
                   field.string()}) == 0);
  CHECK(fs::exists(field));
  CHECK(fs::exists(s.root / "res" / "f_log.csv"));
  CHECK(quiet_run({"reconstruct", "--config", cfg, "--out", s.root.string()}) == 2);
}
