// End-to-end subprocess tests of the sglv-cli binary. The binary path comes
// in through the SGLV_CLI_PATH compile definition.

#include <cstdlib>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "sglv/experiments.hpp"
#include "sglv/model.hpp"
#include "support/test_support.hpp"

using nlohmann::json;
using namespace sglv;
using testsupport::TempDir;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args, const TempDir& scratch) {
  static int counter = 0;
  const std::string tag = std::to_string(counter++);
  const std::string out_path = scratch.file("cli_out_" + tag + ".txt");
  const std::string err_path = scratch.file("cli_err_" + tag + ".txt");
  const std::string cmd = std::string(SGLV_CLI_PATH) + " " + args + " > " + out_path +
                          " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliRun res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = testsupport::read_file(out_path);
  res.err = testsupport::read_file(err_path);
  return res;
}

json read_json(const std::string& path) { return json::parse(testsupport::read_file(path)); }

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

std::string write_benchmark_params(const TempDir& dir) {
  const std::string path = dir.file("params.json");
  save_params_json(case1_params(), path);
  return path;
}

std::string write_stable_pair_params(const TempDir& dir) {
  ModelParams p;
  p.r = {1.0, 1.0};
  p.a = Matrix{{-1.0, 0.0}, {0.0, -1.0}};
  p.sigma = {0.3, 0.3};
  const std::string path = dir.file("pair.json");
  save_params_json(p, path);
  return path;
}

}  // namespace

TEST_SUITE("cli/simulate") {
  TEST_CASE("same seed gives byte-identical series") {
    TempDir dir;
    const std::string params = write_benchmark_params(dir);
    const std::string base = "simulate --params " + params +
                             " --n 50 --seed 7 --x0 0.5,0.15,0.13,0.05,0.04 --out ";
    const CliRun a = run_cli(base + dir.file("a"), dir);
    const CliRun b = run_cli(base + dir.file("b"), dir);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.err.empty());
    CHECK(testsupport::read_file(dir.file("a") + "/series.csv") ==
          testsupport::read_file(dir.file("b") + "/series.csv"));

    const json doc = read_json(dir.file("a") + "/simulate.json");
    CHECK(doc["artifact_version"] == "0.1.0");
    CHECK(doc["seed"].get<std::uint64_t>() == 7);
    CHECK(doc["config"]["n"].get<std::size_t>() == 50);
    CHECK(doc["config_hash"].is_string());
    CHECK(doc["n_obs"].get<std::size_t>() == 50);
  }

  TEST_CASE("sigma-scale 0 removes every trace of the noise stream") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    const std::string base = "simulate --params " + params +
                             " --n 30 --x0 1,1 --sigma-scale 0 --out ";
    const CliRun a = run_cli(base + dir.file("s1") + " --seed 1", dir);
    const CliRun b = run_cli(base + dir.file("s2") + " --seed 999", dir);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    // Different seeds draw different schedules, so compare at fixed gaps too.
    const std::string fixed = "simulate --params " + params +
                              " --n 30 --x0 1,1 --sigma-scale 0 --gaps 0.1 --probs 1 --out ";
    const CliRun c = run_cli(fixed + dir.file("s3") + " --seed 1", dir);
    const CliRun d = run_cli(fixed + dir.file("s4") + " --seed 999", dir);
    REQUIRE(c.exit_code == 0);
    REQUIRE(d.exit_code == 0);
    CHECK(testsupport::read_file(dir.file("s3") + "/series.csv") ==
          testsupport::read_file(dir.file("s4") + "/series.csv"));
  }

  TEST_CASE("missing parameter file fails with the path in the message") {
    TempDir dir;
    const CliRun r = run_cli("simulate --params " + dir.file("absent.json"), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("E_IO:", 0) == 0);
    CHECK(r.err.find("absent.json") != std::string::npos);
  }

  TEST_CASE("usage errors exit with code 2 and an E_ARGS prefix") {
    TempDir dir;
    const CliRun none = run_cli("", dir);
    CHECK(none.exit_code == 2);
    CHECK(none.err.rfind("E_ARGS:", 0) == 0);
    const CliRun unknown = run_cli("simulate --params x.json --bogus 3", dir);
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.rfind("E_ARGS:", 0) == 0);
  }
}

TEST_SUITE("cli/fit") {
  TEST_CASE("simulate then fit round trip with coherent artifacts") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    REQUIRE(run_cli("simulate --params " + params +
                        " --n 200 --seed 3 --x0 1,1 --out " + dir.file("sim"),
                    dir)
                .exit_code == 0);
    const CliRun fit = run_cli(
        "fit --series " + dir.file("sim") + "/series.csv --out " + dir.file("fit"), dir);
    REQUIRE(fit.exit_code == 0);

    const json doc = read_json(dir.file("fit") + "/fit.json");
    CHECK(doc["sglv"]["r_hat"].size() == 2);
    CHECK(doc["sglv"]["sigma2_hat"].size() == 2);
    CHECK(doc["glv"]["r_hat"].size() == 2);
    CHECK(doc["assumptions"].contains("a1"));
    CHECK(doc["seed"].is_null());

    const json ci = read_json(dir.file("fit") + "/intervals.json");
    CHECK(ci["intervals"]["level"].get<double>() == doctest::Approx(0.95));

    // The emitted network must contain exactly the significant interactions.
    const json net = read_json(dir.file("fit") + "/network.json");
    std::size_t significant = 0;
    const auto& sig = ci["intervals"]["significant"];
    for (std::size_t k = 0; k < sig.size(); ++k)
      for (std::size_t l = 1; l < sig[k].size(); ++l)
        if (sig[k][l].get<bool>()) ++significant;
    CHECK(net["network"]["edges"].size() == significant);

    // Re-running the same fit reproduces the numeric payload exactly (the
    // header differs because the config embeds the output path).
    const CliRun again = run_cli(
        "fit --series " + dir.file("sim") + "/series.csv --out " + dir.file("fit2"), dir);
    REQUIRE(again.exit_code == 0);
    CHECK(ci["intervals"] == read_json(dir.file("fit2") + "/intervals.json")["intervals"]);
  }

  TEST_CASE("noiseless one-step dynamics come back with zero diffusion") {
    TempDir dir;
    // One Euler transition per observation gap with sigma = 0 is exactly the
    // regression model, so the fit must recover it to rounding error. A
    // sigma-scale-0 *simulation* would not do: its fine integration grid takes
    // many steps per gap and leaves O(dt^2) residuals in the regression.
    ModelParams p;
    p.r = {1.0, 0.5};
    p.a = Matrix{{-1.0, -0.2}, {-0.3, -0.8}};
    p.sigma = {0.0, 0.0};
    const double menu[5] = {0.1, 0.3, 0.5, 0.1, 0.1};
    Vector gaps;
    for (int i = 0; i < 40; ++i) gaps.push_back(menu[i % 5]);
    const ObservationSeries chain = testsupport::noiseless_chain(p, {0.5, 0.3}, gaps);
    save_series_csv(chain, dir.file("noiseless.csv"));

    REQUIRE(run_cli("fit --series " + dir.file("noiseless.csv") + " --out " +
                        dir.file("fit"),
                    dir)
                .exit_code == 0);
    const json doc = read_json(dir.file("fit") + "/fit.json");
    for (const auto& s2 : doc["sglv"]["sigma2_hat"]) CHECK(s2.get<double>() < 1e-15);
    CHECK(doc["sglv"]["r_hat"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(doc["sglv"]["a_hat"][0][1].get<double>() == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(doc["glv"]["r_hat"][1].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
  }

  TEST_CASE("a collinear species pair is named in the error") {
    TempDir dir;
    std::string csv = "time,x_1,x_2\n";
    double t = 0.0, x = 0.5;
    for (int i = 0; i < 12; ++i) {
      csv += format_full(t) + "," + format_full(x) + "," + format_full(2.0 * x) + "\n";
      t += 0.1;
      x *= 1.07;
    }
    const std::string path = dir.file("collinear.csv");
    testsupport::write_file(path, csv);
    const CliRun r = run_cli("fit --series " + path, dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("E_COLLINEAR:", 0) == 0);
    CHECK(r.err.find("x_") != std::string::npos);
  }
}

TEST_SUITE("cli/check") {
  TEST_CASE("the five-species benchmark reports pass/fail structure") {
    TempDir dir;
    const std::string params = write_benchmark_params(dir);
    const CliRun r = run_cli("check --params " + params +
                                 " --x0 0.5,0.15,0.13,0.05,0.04 --out " + dir.file("chk"),
                             dir);
    REQUIRE(r.exit_code == 0);
    const json doc = read_json(dir.file("chk") + "/assumptions.json");
    CHECK(doc["report"]["a1"]["pass"].get<bool>());
    CHECK(doc["report"]["a2"]["pass"].get<bool>());
    REQUIRE(doc["report"]["a2"].contains("phi_interval"));
    CHECK(doc["report"]["a2"]["phi_interval"][0].get<double>() ==
          doctest::Approx(4.0));
    CHECK(doc["report"]["a3"]["pass"].get<bool>());
    CHECK_FALSE(doc["report"]["a4"]["pass"].get<bool>());
    CHECK_FALSE(doc["report"]["a4"].contains("c_witness"));
    CHECK_FALSE(doc["all_pass"].get<bool>());
  }

  TEST_CASE("an all-pass system carries a feasibility witness") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    const CliRun r = run_cli(
        "check --params " + params + " --x0 1,1 --out " + dir.file("chk"), dir);
    REQUIRE(r.exit_code == 0);
    const json doc = read_json(dir.file("chk") + "/assumptions.json");
    CHECK(doc["all_pass"].get<bool>());
    REQUIRE(doc["report"]["a4"].contains("c_witness"));
    CHECK(doc["report"]["a4"]["c_witness"].size() == 2);
    CHECK(doc["report"]["a4"]["margin"].get<double>() < 0.0);
  }
}

TEST_SUITE("cli/studies") {
  TEST_CASE("mc smoke run emits the forty-row benchmark table") {
    TempDir dir;
    const CliRun r = run_cli("mc --case 1 --n 40 --replicates 5 --seed 9 --jobs 2 --out " +
                                 dir.file("mc"),
                             dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = testsupport::read_file(dir.file("mc") + "/mc.csv");
    CHECK(count_occurrences(csv, "\n") == 40);
    CHECK(csv.rfind("case,n,block,param,mse_sglv,se_sglv,mse_glv,se_glv\n", 0) == 0);
    const json doc = read_json(dir.file("mc") + "/mc.json");
    REQUIRE(doc["blocks"].size() == 1);
    CHECK(doc["blocks"][0]["replicates_used"].get<std::size_t>() +
              doc["blocks"][0]["failures"].get<std::size_t>() ==
          5);
    CHECK(doc["seed"].get<std::uint64_t>() == 9);
  }

  TEST_CASE("crossval produces one summary point with the requested shape") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    REQUIRE(run_cli("simulate --params " + params +
                        " --n 60 --seed 11 --x0 1,1 --out " + dir.file("sim"),
                    dir)
                .exit_code == 0);
    const CliRun r = run_cli("crossval --series " + dir.file("sim") +
                                 "/series.csv --k 4 --splits 3 --seed 5 --out " +
                                 dir.file("cv"),
                             dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = testsupport::read_file(dir.file("cv") + "/crossval.csv");
    CHECK(csv.rfind("k,n_splits,dropped,mspe_sglv,se_sglv,mspe_glv,se_glv\n", 0) == 0);
    const json doc = read_json(dir.file("cv") + "/crossval.json");
    REQUIRE(doc["points"].size() == 1);
    CHECK(doc["points"][0]["k"].get<std::size_t>() == 4);
    CHECK(doc["points"][0]["mspe_sglv"].get<double>() > 0.0);
  }
}

TEST_SUITE("cli/ingest") {
  namespace fixtures {
    const char* kCounts =
        "time,otuB,otuA,otuC,otuD\n"
        "4,40,4,14,24\n"
        "0,10,1,11,21\n"
        "2,20,2,12,22\n"
        "9,90,9,19,29\n";
    const char* kTaxonomy =
        "taxon_id,kingdom,phylum,class,order,family,genus\n"
        "otuA,Bacteria,Firmicutes,Clostridia,Clostridiales,Lachnospiraceae,Blautia\n"
        "otuB,Bacteria,Firmicutes,Clostridia,Clostridiales,Lachnospiraceae,Roseburia\n"
        "otuC,Bacteria,Bacteroidetes,Bacteroidia,Bacteroidales,,\n"
        "otuD,Bacteria,Firmicutes,Clostridia,Clostridiales,Ruminococcaceae,"
        "Faecalibacterium\n";
  }  // namespace fixtures

  TEST_CASE("family-level top-2 pipeline emits a loadable proportion series") {
    TempDir dir;
    const std::string counts = dir.file("counts.csv");
    const std::string tax = dir.file("taxonomy.csv");
    testsupport::write_file(counts, fixtures::kCounts);
    testsupport::write_file(tax, fixtures::kTaxonomy);

    const CliRun top = run_cli("ingest --counts " + counts + " --taxonomy " + tax +
                                   " --rank family --k 2 --out " + dir.file("top"),
                               dir);
    REQUIRE(top.exit_code == 0);
    const ObservationSeries series = load_series_csv(dir.file("top") + "/series.csv");
    CHECK(series.n_obs() == 4);
    CHECK(series.n_species() == 2);
    CHECK(series.times().front() == 0.0);
    for (std::size_t i = 0; i < series.n_obs(); ++i) {
      double total = 0.0;
      for (std::size_t k = 0; k < 2; ++k) total += series.values()(i, k);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    const json doc = read_json(dir.file("top") + "/ingest.json");
    REQUIRE(doc["taxa"].size() == 2);
    CHECK(doc["taxa"][0]["id"] == "Lachnospiraceae");

    // The full-table renormalization keeps the dropped mass, so the retained
    // columns no longer sum to one.
    const CliRun full = run_cli("ingest --counts " + counts + " --taxonomy " + tax +
                                    " --rank family --k 2 --renormalize full --out " +
                                    dir.file("full"),
                                dir);
    REQUIRE(full.exit_code == 0);
    const ObservationSeries fser = load_series_csv(dir.file("full") + "/series.csv");
    double total0 = 0.0;
    for (std::size_t k = 0; k < 2; ++k) total0 += fser.values()(0, k);
    CHECK(total0 < 0.999);

    const CliRun bad = run_cli("ingest --counts " + counts + " --taxonomy " + tax +
                                   " --renormalize sideways",
                               dir);
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.rfind("E_ARGS:", 0) == 0);
  }
}

TEST_SUITE("cli/predict-plot") {
  TEST_CASE("predict writes aligned rows and summary errors") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    REQUIRE(run_cli("simulate --params " + params +
                        " --n 40 --seed 13 --x0 1,1 --out " + dir.file("sim"),
                    dir)
                .exit_code == 0);
    const CliRun r = run_cli("predict --series " + dir.file("sim") +
                                 "/series.csv --out " + dir.file("pred"),
                             dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = testsupport::read_file(dir.file("pred") + "/predictions.csv");
    CHECK(count_occurrences(csv, "\n") == 40);  // header + 39 transitions
    CHECK(csv.rfind("time,x_1,x_2,sglv_x_1,sglv_x_2,glv_x_1,glv_x_2\n", 0) == 0);
    const json doc = read_json(dir.file("pred") + "/predict.json");
    CHECK(doc["mspe_sglv"].size() == 2);
    CHECK(doc["mspe_total_sglv"].get<double>() > 0.0);
    CHECK(doc["n_predictions"].get<std::size_t>() == 39);
  }

  TEST_CASE("plot renders one polyline per species plus a prediction overlay") {
    TempDir dir;
    const std::string params = write_stable_pair_params(dir);
    REQUIRE(run_cli("simulate --params " + params +
                        " --n 30 --seed 17 --x0 1,1 --out " + dir.file("sim"),
                    dir)
                .exit_code == 0);
    const CliRun r = run_cli("plot --series " + dir.file("sim") + "/series.csv --out " +
                                 dir.file("plot"),
                             dir);
    REQUIRE(r.exit_code == 0);
    const std::string svg = testsupport::read_file(dir.file("plot") + "/series.svg");
    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(count_occurrences(svg, "<polyline") == 2);
    CHECK(svg.find("</svg>") != std::string::npos);
    const std::string pred = testsupport::read_file(dir.file("plot") + "/predictions.svg");
    CHECK(count_occurrences(pred, "<polyline") == 4);  // solid + dashed per species
    CHECK(count_occurrences(pred, "stroke-dasharray") == 2);
    const json doc = read_json(dir.file("plot") + "/plot.json");
    CHECK(doc["prediction_overlay"].get<bool>());
  }

  TEST_CASE("a three-point series still renders the plain chart") {
    TempDir dir;
    const std::string path = dir.file("tiny.csv");
    testsupport::write_file(path,
                            "time,x_1,x_2\n"
                            "0,0.5,0.2\n"
                            "0.5,0.45,0.25\n"
                            "1,0.4,0.3\n");
    const CliRun r = run_cli("plot --series " + path + " --out " + dir.file("plot"), dir);
    REQUIRE(r.exit_code == 0);
    const std::string svg = testsupport::read_file(dir.file("plot") + "/series.svg");
    CHECK(count_occurrences(svg, "<polyline") == 2);
    const json doc = read_json(dir.file("plot") + "/plot.json");
    CHECK_FALSE(doc["prediction_overlay"].get<bool>());
    CHECK(doc["outputs"].size() == 1);
  }
}
