// Copyright 2026 The dggfso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dgg/errors.hpp"
#include "dgg/run.hpp"

using namespace dgg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dggfso_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DGGFSO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small_config(const fs::path& dir) {
  return json{{"channels", {"b"}},
              {"n", {1, 2}},
              {"snr_db", {{"start", 0}, {"stop", 30}, {"step", 10}}},
              {"estimators", {"mc", "bound"}},
              {"mc", {{"seed", 4}, {"n_samples", 20000}, {"batch_size", 5000}}},
              {"output", {{"dir", dir.string()}, {"prefix", "t"}, {"plot", true}}}};
}

}  // namespace

TEST_CASE("config parsing") {
  const RunSpec s = parse_run_spec(small_config("out"));
  CHECK(s.channels.size() == 1);
  CHECK(s.n_values == std::vector<int>{1, 2});
  CHECK(s.snr_db.points() == std::vector<double>{0.0, 10.0, 20.0, 30.0});
  CHECK(s.estimators == std::vector<Estimator>{Estimator::kMC, Estimator::kBound});
  CHECK(s.mc.n_samples == 20000);
  CHECK(s.prefix == "t");

  const json inline_channel = {{"channels",
                                {{{"name", "custom"},
                                  {"large", {{"m", 1.5}, {"gamma", 2.0}}},
                                  {"small", {{"m", 1.0}, {"gamma", 1.0}, {"omega", 1.0}}}}}},
                               {"n", {1}},
                               {"estimators", {"bound"}}};
  const RunSpec c = parse_run_spec(inline_channel);
  CHECK(c.channels[0].ratio.num == 2);
  CHECK(c.channels[0].ratio.den == 1);
  CHECK(c.channels[0].large_scale.omega == doctest::Approx(omega_from_shape(1.5, 2.0)));

  json bad = small_config("out");
  bad["estimators"] = json::array();
  CHECK_THROWS_WITH_AS(parse_run_spec(bad).validate(), doctest::Contains("estimators must be nonempty"),
                       ValidationError);
  bad = small_config("out");
  bad["bogus"] = 1;
  CHECK_THROWS_WITH_AS(parse_run_spec(bad), doctest::Contains("unknown key 'bogus'"), ValidationError);
  bad = small_config("out");
  bad["channels"] = {"z"};
  CHECK_THROWS_AS(parse_run_spec(bad), ValidationError);
  bad = small_config("out");
  bad["channels"] = {"a", "b"};
  CHECK_THROWS_WITH_AS(parse_run_spec(bad).validate(), doctest::Contains("N must equal"), ValidationError);
  bad = small_config("out");
  bad["estimators"] = {"mc", "mc"};
  CHECK_THROWS_AS(parse_run_spec(bad).validate(), ValidationError);
  bad = small_config("out");
  bad["snr_db"]["step"] = 0;
  CHECK_THROWS_AS(parse_run_spec(bad).validate(), ValidationError);
}

TEST_CASE("run writes curves, metadata and plot") {
  const fs::path dir = fresh_dir("run");
  const RunResult r = run(parse_run_spec(small_config(dir)));
  REQUIRE(r.csv_files.size() == 4);
  CHECK(r.csv_files[0].filename() == "t_N1_mc.csv");
  CHECK(r.csv_files[3].filename() == "t_N2_bound.csv");
  CHECK(fs::exists(r.plot_file));
  CHECK(slurp(r.plot_file).find("<svg") != std::string::npos);

  for (const fs::path& f : r.csv_files) {
    std::istringstream in(slurp(f));
    std::string line;
    std::getline(in, line);
    CHECK(line == "snr_db,ber,ci_low,ci_high,estimator,n_samples");
    int rows = 0;
    while (std::getline(in, line)) {
      double snr, ber, lo, hi;
      char est[32];
      std::size_t n;
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%31[^,],%zu", &snr, &ber, &lo, &hi, est, &n) == 6);
      CHECK(ber > 0.0);
      CHECK(ber <= 0.5);
      CHECK(lo <= ber);
      CHECK(ber <= hi);
      CHECK(n == (std::string(est) == "mc" ? 20000u : 0u));
      ++rows;
    }
    CHECK(rows == 4);
  }

  const json meta = json::parse(slurp(r.metadata_file));
  CHECK(meta["seed"] == 4);
  REQUIRE(meta["runs"].size() == 2);
  CHECK(meta["runs"][1]["n"] == 2);
  CHECK(meta["runs"][1]["diversity_order"].get<double>() == doctest::Approx(0.93105));
  CHECK(meta["runs"][1]["product_model"]["alpha"].get<int>() >= 1);
  CHECK(meta["runs"][1]["bound_terms"]["q"] == 1);
}

TEST_CASE("reruns are byte identical") {
  const fs::path d1 = fresh_dir("rerun1"), d2 = fresh_dir("rerun2");
  json cfg = small_config(d1);
  cfg["estimators"] = {"mc", "bound"};
  cfg["channels"] = {"a", "b"};
  cfg["n"] = {2};
  cfg["estimators"].push_back("asymptotic");
  const RunResult a = run(parse_run_spec(cfg));
  cfg["output"]["dir"] = d2.string();
  const RunResult b = run(parse_run_spec(cfg));
  REQUIRE(a.csv_files.size() == b.csv_files.size());
  for (std::size_t i = 0; i < a.csv_files.size(); ++i) CHECK(slurp(a.csv_files[i]) == slurp(b.csv_files[i]));
  CHECK(slurp(a.plot_file) == slurp(b.plot_file));
}

TEST_CASE("CSV rows outside (0, 0.5] are dropped") {
  std::vector<BERPoint> curve(3);
  curve[0].ber = 0.0;
  curve[1].ber = 0.25;
  curve[1].snr_db = 2.0;
  curve[2].ber = 0.6;
  const std::string csv = format_csv(curve);
  CHECK(csv == "snr_db,ber,ci_low,ci_high,estimator,n_samples\n2.0000,2.500000000e-01,0.000000000e+00,"
               "0.000000000e+00,mc,0\n");
}

TEST_CASE("presets listing") {
  const std::string p = format_presets();
  for (const char* v : {"2.1690", "0.8530", "1.8621", "0.7638", "0.9135", "1.4385", "0.4205", "0.6643", "1.5793",
                        "0.9224", "28", "11"}) {
    CHECK(p.find(v) != std::string::npos);
  }
}

TEST_CASE("figure specs") {
  CHECK(figure_spec(1).n_values == std::vector<int>{1, 2, 3});
  CHECK(figure_spec(3).channels.size() == 2);
  CHECK(figure_spec(4).product.beta_cap == 300);
  CHECK_THROWS_WITH_AS(figure_spec(5), doctest::Contains("unknown figure 5"), ValidationError);
  for (int f = 1; f <= 4; ++f) CHECK_NOTHROW(figure_spec(f).validate());
}

TEST_CASE("unreachable output directory fails before computing") {
  json cfg = small_config("/proc/dggfso/none");
  CHECK_THROWS_WITH_AS(run(parse_run_spec(cfg)), doctest::Contains("unreachable output path"), ValidationError);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = fresh_dir("cli");
  CHECK(cli("presets") == 0);
  CHECK(cli("run --preset b --n 2 --snr-stop 10 --snr-step 10 --estimator mc --estimator bound --samples 5000 "
            "--output-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "ber_N2_bound.csv"));
  CHECK(fs::exists(dir / "ber_metadata.json"));
  CHECK(cli("run --preset zz --n 1 --estimator bound --output-dir " + dir.string()) == 2);
  CHECK(cli("run --preset b --n 1 --estimator exact --output-dir " + dir.string()) == 2);
  CHECK(cli("run --preset b --n 1 --estimator bound --output-dir /proc/dggfso/none") == 2);
  CHECK(cli("run --preset c --preset d --n 2 --estimator bound --beta-cap 200 --output-dir " + dir.string()) == 2);
  CHECK(cli("reproduce --figure 5") == 2);
  CHECK(cli("--no-such-flag") == 2);

  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << small_config(dir / "from_config").dump();
  CHECK(cli("run --config " + cfg.string() + " --samples 6000 --no-plot") == 0);
  CHECK(fs::exists(dir / "from_config" / "t_N1_mc.csv"));
  CHECK_FALSE(fs::exists(dir / "from_config" / "t.svg"));
  CHECK(slurp(dir / "from_config" / "t_N1_mc.csv").find(",mc,6000") != std::string::npos);
}
