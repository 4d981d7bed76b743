#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "streamspec/report.hpp"

using namespace streamspec;
using nlohmann::json;

namespace {

RunConfig small(json problem, int samples = 40) {
  return parse_run_config({{"problem", problem}, {"samples", samples}, {"t_max", 4.0},
                           {"t_steps", 8}, {"horizon", 20.0}});
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("streamspec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run config defaults and overrides") {
  RunConfig c = parse_run_config({{"problem", {{"builtin", "rotation"}}}});
  CHECK(c.seed == 1);
  CHECK(c.samples == 200);
  CHECK(c.classification.horizon == 40.0);
  RunConfig d = parse_run_config(
      {{"problem", {{"builtin", "half_line"}}}, {"horizon", 12.5}, {"tolerances", {{"rtol", 1e-11}}}});
  CHECK(d.classification.horizon == 12.5);
  CHECK(d.flow.rtol == 1e-11);
  CHECK(d.classification.flow.rtol == 1e-11);
}

TEST_CASE("config errors name the offending key") {
  auto msg = [](const json& j) {
    try {
      parse_run_config(j);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const json rot = {{"builtin", "rotation"}};
  CHECK(msg({{"problem", rot}, {"sampels", 3}}).find("sampels") != std::string::npos);
  CHECK(msg({{"problem", rot}, {"samples", 0}}).find("samples") != std::string::npos);
  CHECK(msg({{"problem", rot}, {"horizon", "long"}}).find("horizon") != std::string::npos);
  CHECK(msg({{"problem", rot}, {"tolerances", {{"rtoll", 1}}}}).find("rtoll") != std::string::npos);
  CHECK(msg({{"samples", 3}}).find("problem") != std::string::npos);
  CHECK(msg({{"problem", rot}, {"seed", -4}}).find("seed") != std::string::npos);
  CHECK(parse_run_config({{"problem", rot}, {"seed", 9}}).seed == 9);
  CHECK_THROWS_AS(parse_run_config({{"problem", {{"builtin", "nope"}}}}), ConfigError);
}

TEST_CASE("syntax errors report line and column") {
  auto dir = scratch("syntax");
  auto path = dir / "bad.json";
  std::ofstream(path) << "{\n  \"seed\": 3,\n  \"samples\": ]\n}\n";
  try {
    load_run_config(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.json:3:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_run_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("config hash is stable and seed sensitive") {
  RunConfig a = small({{"builtin", "rotation"}});
  RunConfig b = small({{"builtin", "rotation"}});
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("spectrum output is deterministic for a fixed seed") {
  RunConfig c = small({{"builtin", "rotation"}});
  CHECK(cmd_spectrum(c).report.dump() == cmd_spectrum(c).report.dump());
}

TEST_CASE("composed spectrum is the union of the per-class sets") {
  for (const char* name : {"rotation", "half_line", "slab_constant"}) {
    json rep = cmd_spectrum(small({{"builtin", name}})).report;
    const json& spec = rep["spectrum"];
    std::vector<json> members = spec["generator"].value("members", json::array());
    std::vector<json> parts;
    for (const auto& [_, v] : spec["per_class"].items())
      if (v.contains("generator") && v["generator"]["kind"] != "empty") parts.push_back(v["generator"]);
    CHECK(members.size() == parts.size());
    for (const auto& p : parts) CHECK(std::find(members.begin(), members.end(), p) != members.end());
  }
}

TEST_CASE("an Omega2-only problem gives the half plane Re <= -c") {
  json rep = cmd_spectrum(small({{"builtin", "half_line"}, {"params", {{"c", 0.7}}}})).report;
  const json& block = rep["spectrum"]["per_class"]["omega1_omega2"];
  CHECK(block["generator"]["kind"] == "half_plane");
  CHECK(block["generator"]["re_max"].get<double>() == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(block["semigroup"]["radius"].get<double>() ==
        doctest::Approx(std::exp(-0.7)).epsilon(1e-6));
}

TEST_CASE("starved estimators are reported, not fatal") {
  json rep = cmd_gamma(small({{"builtin", "rotation"}})).report;
  CHECK(rep["gamma1"].is_null());
  CHECK(rep["gamma2"].is_null());
  CHECK(rep.contains("gamma1_note"));
}

TEST_CASE("classify writes a CSV row per sample") {
  CommandOutput out = cmd_classify(small({{"builtin", "slab_constant"}}, 25));
  const std::string& csv = out.files.at("classification.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
  CHECK(out.report["classification"]["counts"]["Omega1"] == 25);
}

TEST_CASE("verify passes on every builtin and flags a kappa that is too small") {
  RunConfig c = small({{"builtin", "rotation"}});
  CHECK(cmd_verify(c, true).status == 0);
  RunConfig bad = small({{"builtin", "rotation"}, {"params", {{"kappa", 0.1}}}});
  CommandOutput out = cmd_verify(bad, false);
  CHECK(out.status == 1);
  bool yorke_failed = false;
  for (const auto& row : out.report["suites"])
    if (row["suite"] == "yorke_bound") yorke_failed = !row["passed"].get<bool>();
  CHECK(yorke_failed);
}

TEST_CASE("smt demo reports collapse at 2*pi and a strict inclusion otherwise") {
  CommandOutput a = cmd_smt_demo(2 * M_PI, 5);
  CHECK(a.report["collapsed_to_one"] == true);
  CHECK(a.status == 0);
  CommandOutput b = cmd_smt_demo(1.0, 5);
  CHECK(b.report["distinct_points"] == 11);
  CHECK(b.report["strict_inclusion"] == true);
}

TEST_CASE("outputs keep the timestamp out of the main report") {
  auto dir = scratch("outputs");
  CommandOutput out = cmd_smt_demo(1.0, 2);
  write_outputs(out, dir, "smt");
  CHECK(std::filesystem::exists(dir / "smt.json"));
  CHECK(std::filesystem::exists(dir / "smt_image.dat"));
  std::ifstream main(dir / "smt.json"), info(dir / "run_info.json");
  json m = json::parse(main), i = json::parse(info);
  CHECK_FALSE(m.contains("timestamp"));
  CHECK(i.contains("timestamp"));
}
