// Command-line front end: simulate | fit | check | mc | crossval | ingest |
// predict | plot. Every JSON output carries a reproducibility header
// (artifact version, seed, resolved config and its hash); all errors print a
// stable E_* code prefix on stderr and exit nonzero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sglv/assumptions.hpp"
#include "sglv/error.hpp"
#include "sglv/experiments.hpp"
#include "sglv/inference.hpp"
#include "sglv/ingest.hpp"
#include "sglv/model.hpp"
#include "sglv/rng.hpp"
#include "sglv/simulate.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sglv;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Reproducibility header shared by every JSON artifact.
json with_header(const json& payload, const json& config,
                 std::optional<std::uint64_t> seed) {
  json doc;
  doc["artifact_version"] = kArtifactVersion;
  doc["config"] = config;
  doc["config_hash"] = hex64(fnv1a64(config.dump()));
  if (seed)
    doc["seed"] = *seed;
  else
    doc["seed"] = nullptr;
  for (auto it = payload.begin(); it != payload.end(); ++it) doc[it.key()] = it.value();
  return doc;
}

fs::path prepare_out(const std::string& out) {
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::kIo, "cannot create output directory: " + dir.string());
  return dir;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file: " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

Vector resolve_x0(const std::vector<double>& flag, std::size_t n_species) {
  if (flag.empty()) return Vector(n_species, 0.1);
  if (flag.size() != n_species)
    throw Error(ErrorCode::kDim, "--x0 needs " + std::to_string(n_species) +
                                     " comma-separated values");
  return flag;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string params_path;
  std::string out = ".";
  std::size_t n = 300;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double fine_dt = 0.01;
  double sigma_scale = 1.0;
  std::vector<double> gaps{0.1, 0.3, 0.5};
  std::vector<double> probs{0.7, 0.2, 0.1};
  std::vector<double> x0;
};

void run_simulate(const SimulateOpts& o) {
  if (!(o.sigma_scale >= 0.0) || !std::isfinite(o.sigma_scale))
    throw Error(ErrorCode::kArgs, "--sigma-scale must be a finite value >= 0");
  ModelParams params = load_params_json(o.params_path);
  for (double& s : params.sigma) s *= o.sigma_scale;

  SamplingSchedule schedule;
  schedule.gaps = o.gaps;
  schedule.probs = o.probs;
  schedule.n_obs = o.n;

  SimConfig config;
  config.fine_dt = o.fine_dt;
  config.x0 = resolve_x0(o.x0, params.n_species());
  config.seed = o.seed;
  config.stream_id = o.stream;

  RngStream rng(o.seed, o.stream);
  const ObservationSeries series = simulate_observed(params, config, schedule, rng);

  const fs::path dir = prepare_out(o.out);
  save_series_csv(series, (dir / "series.csv").string());

  const json cfg = {{"command", "simulate"}, {"params", o.params_path},
                    {"n", o.n},              {"seed", o.seed},
                    {"stream", o.stream},    {"fine_dt", o.fine_dt},
                    {"sigma_scale", o.sigma_scale}, {"gaps", o.gaps},
                    {"probs", o.probs},      {"x0", config.x0},
                    {"out", o.out}};
  json payload;
  payload["outputs"] = json::array({"series.csv"});
  payload["n_obs"] = series.n_obs();
  payload["n_species"] = series.n_species();
  payload["t_end"] = series.times().back();
  write_json_file(dir / "simulate.json", with_header(payload, cfg, o.seed));
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOpts {
  std::string series_path;
  std::string out = ".";
  double level = 0.95;
};

void run_fit(const FitOpts& o) {
  const ObservationSeries series = load_series_csv(o.series_path);
  const SglvFit sglv = fit_sglv_amle(series);
  const GlvFit glv = fit_glv_ls(series);
  const ConfidenceIntervals ci = confidence_intervals(sglv, o.level);

  // Assumption report evaluated at the fitted parameters, starting from the
  // first observed state.
  ModelParams fitted;
  fitted.r = sglv.r_hat;
  fitted.a = sglv.a_hat;
  fitted.sigma = Vector(sglv.sigma2_hat.size());
  for (std::size_t k = 0; k < fitted.sigma.size(); ++k)
    fitted.sigma[k] = std::sqrt(std::max(0.0, sglv.sigma2_hat[k]));
  const AssumptionReport report = check_all(fitted, series.values().row(0));

  const json cfg = {{"command", "fit"},
                    {"series", o.series_path},
                    {"level", o.level},
                    {"out", o.out}};
  const fs::path dir = prepare_out(o.out);

  json fit_payload;
  fit_payload["sglv"] = json::parse(sglv_fit_to_json_text(sglv));
  fit_payload["glv"] = json::parse(glv_fit_to_json_text(glv));
  fit_payload["assumptions"] = json::parse(report_to_json_text(report));
  fit_payload["outputs"] = json::array({"fit.json", "intervals.json", "network.json"});
  write_json_file(dir / "fit.json", with_header(fit_payload, cfg, std::nullopt));

  json ci_payload;
  ci_payload["intervals"] = json::parse(intervals_to_json_text(ci));
  write_json_file(dir / "intervals.json", with_header(ci_payload, cfg, std::nullopt));

  json net_payload;
  net_payload["network"] = json::parse(network_to_json_text(sglv.a_hat, ci));
  write_json_file(dir / "network.json", with_header(net_payload, cfg, std::nullopt));
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckOpts {
  std::string params_path;
  std::string out = ".";
  std::vector<double> x0;
};

void run_check(const CheckOpts& o) {
  const ModelParams params = load_params_json(o.params_path);
  const Vector x0 = resolve_x0(o.x0, params.n_species());
  const AssumptionReport report = check_all(params, x0);

  const json cfg = {
      {"command", "check"}, {"params", o.params_path}, {"x0", x0}, {"out", o.out}};
  json payload;
  payload["report"] = json::parse(report_to_json_text(report));
  payload["all_pass"] = report.all_pass();
  write_json_file(prepare_out(o.out) / "assumptions.json",
                  with_header(payload, cfg, std::nullopt));
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

struct McOpts {
  int case_id = 1;
  std::vector<std::size_t> n_list{300, 500, 1000};
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  double fine_dt = 0.01;
  std::size_t jobs = 1;
  std::string out = ".";
};

void run_mc(const McOpts& o) {
  McConfig config = default_mc_config(o.case_id);
  config.n_obs_list = o.n_list;
  config.replicates = o.replicates;
  config.seed = o.seed;
  config.fine_dt = o.fine_dt;
  config.jobs = o.jobs;
  const McResult result = run_mc_study(config);

  const json cfg = {{"command", "mc"},       {"case", o.case_id},
                    {"n", o.n_list},         {"replicates", o.replicates},
                    {"seed", o.seed},        {"fine_dt", o.fine_dt},
                    {"jobs", o.jobs},        {"out", o.out}};
  const fs::path dir = prepare_out(o.out);
  write_text_file(dir / "mc.csv", mc_result_to_csv_text(result));
  json payload = json::parse(mc_result_to_json_text(result));
  payload["outputs"] = json::array({"mc.csv", "mc.json"});
  write_json_file(dir / "mc.json", with_header(payload, cfg, o.seed));
}

// ---------------------------------------------------------------------------
// crossval
// ---------------------------------------------------------------------------

struct CrossvalOpts {
  std::string series_path;
  std::size_t k = 5;
  std::size_t splits = 20;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out = ".";
};

void run_crossval_cmd(const CrossvalOpts& o) {
  const ObservationSeries series = load_series_csv(o.series_path);
  RngStream rng(o.seed, 0);
  const MspeResult result = run_crossval(series, o.k, o.splits, rng, o.jobs);

  const json cfg = {{"command", "crossval"}, {"series", o.series_path},
                    {"k", o.k},              {"splits", o.splits},
                    {"seed", o.seed},        {"jobs", o.jobs},
                    {"out", o.out}};
  const fs::path dir = prepare_out(o.out);
  write_text_file(dir / "crossval.csv", mspe_result_to_csv_text(result));
  json payload = json::parse(mspe_result_to_json_text(result));
  payload["outputs"] = json::array({"crossval.csv", "crossval.json"});
  write_json_file(dir / "crossval.json", with_header(payload, cfg, o.seed));
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
  std::string counts_path;
  std::string taxonomy_path;
  std::string rank = "genus";
  std::size_t k = 0;  // 0 keeps every taxon
  double pseudocount = 0.5;
  std::string renormalize = "top";
  std::string out = ".";
};

void run_ingest(const IngestOpts& o) {
  const CountTable raw = load_counts_csv(o.counts_path, o.taxonomy_path);
  const CountTable agg = aggregate_taxa(raw, o.rank);

  ObservationSeries series;
  std::vector<std::string> retained;
  if (o.renormalize == "top") {
    // Proportions computed after dropping everything outside the top k.
    const CountTable sel = o.k > 0 ? select_top_k(agg, o.k) : agg;
    series = to_proportions(sel, o.pseudocount);
    retained = sel.taxa_ids;
  } else {
    // Proportions on the full table first, then column selection.
    const ObservationSeries full = to_proportions(agg, o.pseudocount);
    if (o.k > 0) {
      const CountTable sel = select_top_k(agg, o.k);
      std::vector<std::size_t> columns;
      for (const std::string& id : sel.taxa_ids) {
        const auto it = std::find(agg.taxa_ids.begin(), agg.taxa_ids.end(), id);
        columns.push_back(static_cast<std::size_t>(it - agg.taxa_ids.begin()));
      }
      series = select_species(full, columns);
      retained = sel.taxa_ids;
    } else {
      series = full;
      retained = agg.taxa_ids;
    }
  }

  const json cfg = {{"command", "ingest"},       {"counts", o.counts_path},
                    {"taxonomy", o.taxonomy_path}, {"rank", o.rank},
                    {"k", o.k},                  {"pseudocount", o.pseudocount},
                    {"renormalize", o.renormalize}, {"out", o.out}};
  const fs::path dir = prepare_out(o.out);
  save_series_csv(series, (dir / "series.csv").string());

  json taxa = json::array();
  for (const std::string& id : retained) {
    const auto it = std::find(agg.taxa_ids.begin(), agg.taxa_ids.end(), id);
    const auto col = static_cast<std::size_t>(it - agg.taxa_ids.begin());
    taxa.push_back({{"id", id}, {"total", agg.total(col)}});
  }
  json payload;
  payload["taxa"] = taxa;
  payload["n_samples"] = series.n_obs();
  payload["outputs"] = json::array({"series.csv"});
  write_json_file(dir / "ingest.json", with_header(payload, cfg, std::nullopt));
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictOpts {
  std::string series_path;
  std::string out = ".";
};

// One-step-ahead predictions for every observed transition, on the abundance
// scale, for both estimators.
void run_predict(const PredictOpts& o) {
  const ObservationSeries series = load_series_csv(o.series_path);
  const SglvFit sglv = fit_sglv_amle(series);
  const GlvFit glv = fit_glv_ls(series);

  const std::size_t n = series.n_obs();
  const std::size_t n_species = series.n_species();
  Matrix pred_sglv(n - 1, n_species);
  Matrix pred_glv(n - 1, n_species);
  Vector mspe_sglv(n_species, 0.0);
  Vector mspe_glv(n_species, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vector u_prev = series.log_values().row(i);
    const Vector u_s = predict_one_step(sglv, u_prev, series.gap(i));
    const Vector u_g = predict_one_step(glv, u_prev, series.gap(i));
    for (std::size_t k = 0; k < n_species; ++k) {
      pred_sglv(i, k) = std::exp(u_s[k]);
      pred_glv(i, k) = std::exp(u_g[k]);
      const double truth = series.values()(i + 1, k);
      mspe_sglv[k] += (pred_sglv(i, k) - truth) * (pred_sglv(i, k) - truth);
      mspe_glv[k] += (pred_glv(i, k) - truth) * (pred_glv(i, k) - truth);
    }
  }
  double total_sglv = 0.0, total_glv = 0.0;
  for (std::size_t k = 0; k < n_species; ++k) {
    mspe_sglv[k] /= static_cast<double>(n - 1);
    mspe_glv[k] /= static_cast<double>(n - 1);
    total_sglv += mspe_sglv[k];
    total_glv += mspe_glv[k];
  }

  std::ostringstream csv;
  csv << "time";
  for (std::size_t k = 1; k <= n_species; ++k) csv << ",x_" << k;
  for (std::size_t k = 1; k <= n_species; ++k) csv << ",sglv_x_" << k;
  for (std::size_t k = 1; k <= n_species; ++k) csv << ",glv_x_" << k;
  csv << "\n";
  for (std::size_t i = 0; i + 1 < n; ++i) {
    csv << format_full(series.times()[i + 1]);
    for (std::size_t k = 0; k < n_species; ++k)
      csv << ',' << format_full(series.values()(i + 1, k));
    for (std::size_t k = 0; k < n_species; ++k) csv << ',' << format_full(pred_sglv(i, k));
    for (std::size_t k = 0; k < n_species; ++k) csv << ',' << format_full(pred_glv(i, k));
    csv << "\n";
  }

  const json cfg = {{"command", "predict"}, {"series", o.series_path}, {"out", o.out}};
  const fs::path dir = prepare_out(o.out);
  write_text_file(dir / "predictions.csv", csv.str());
  json payload;
  payload["mspe_sglv"] = mspe_sglv;
  payload["mspe_glv"] = mspe_glv;
  payload["mspe_total_sglv"] = total_sglv;
  payload["mspe_total_glv"] = total_glv;
  payload["n_predictions"] = n - 1;
  payload["outputs"] = json::array({"predictions.csv"});
  write_json_file(dir / "predict.json", with_header(payload, cfg, std::nullopt));
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

struct PlotOpts {
  std::string series_path;
  std::string out = ".";
  std::string title;
};

void run_plot(const PlotOpts& o) {
  const ObservationSeries series = load_series_csv(o.series_path);
  const fs::path dir = prepare_out(o.out);

  const std::string title = o.title.empty() ? "abundance trajectories" : o.title;
  write_text_file(dir / "series.svg", sglvcli::render_series_svg(series, title));

  json outputs = json::array({"series.svg"});
  bool overlay = false;
  try {
    const SglvFit fit = fit_sglv_amle(series);
    const std::size_t n = series.n_obs();
    Matrix predicted(n - 1, series.n_species());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vector u_hat = predict_one_step(fit, series.log_values().row(i), series.gap(i));
      for (std::size_t k = 0; k < series.n_species(); ++k)
        predicted(i, k) = std::exp(u_hat[k]);
    }
    write_text_file(dir / "predictions.svg",
                    sglvcli::render_prediction_svg(series, predicted,
                                                   title + " (log scale, one-step fit)"));
    outputs.push_back("predictions.svg");
    overlay = true;
  } catch (const Error&) {
    // Series too short or degenerate for a fit: the plain chart still stands.
  }

  const json cfg = {
      {"command", "plot"}, {"series", o.series_path}, {"title", o.title}, {"out", o.out}};
  json payload;
  payload["outputs"] = outputs;
  payload["prediction_overlay"] = overlay;
  write_json_file(dir / "plot.json", with_header(payload, cfg, std::nullopt));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic generalized Lotka-Volterra simulation and inference toolkit"};
  app.require_subcommand(1);

  SimulateOpts so;
  CLI::App* sim = app.add_subcommand("simulate", "simulate an observed series");
  sim->add_option("--params", so.params_path, "model parameter JSON")->required();
  sim->add_option("--out", so.out, "output directory");
  sim->add_option("--n", so.n, "number of observations");
  sim->add_option("--seed", so.seed, "RNG seed");
  sim->add_option("--stream", so.stream, "RNG stream id");
  sim->add_option("--fine-dt", so.fine_dt, "fine Euler step");
  sim->add_option("--sigma-scale", so.sigma_scale, "multiplier applied to sigma");
  sim->add_option("--gaps", so.gaps, "observation gap menu")->delimiter(',');
  sim->add_option("--probs", so.probs, "gap probabilities")->delimiter(',');
  sim->add_option("--x0", so.x0, "initial state (default 0.1 per species)")
      ->delimiter(',');

  FitOpts fo;
  CLI::App* fit = app.add_subcommand("fit", "fit both estimators to a series");
  fit->add_option("--series", fo.series_path, "observation CSV")->required();
  fit->add_option("--out", fo.out, "output directory");
  fit->add_option("--level", fo.level, "confidence level");

  CheckOpts co;
  CLI::App* check = app.add_subcommand("check", "evaluate the stability assumptions");
  check->add_option("--params", co.params_path, "model parameter JSON")->required();
  check->add_option("--out", co.out, "output directory");
  check->add_option("--x0", co.x0, "initial state (default 0.1 per species)")
      ->delimiter(',');

  McOpts mo;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimator study");
  mc->add_option("--case", mo.case_id, "benchmark case (1 or 2)");
  mc->add_option("--n", mo.n_list, "observation counts")->delimiter(',');
  mc->add_option("--replicates", mo.replicates, "replicates per block");
  mc->add_option("--seed", mo.seed, "RNG seed");
  mc->add_option("--fine-dt", mo.fine_dt, "fine Euler step");
  mc->add_option("--jobs", mo.jobs, "worker threads");
  mc->add_option("--out", mo.out, "output directory");

  CrossvalOpts vo;
  CLI::App* cv = app.add_subcommand("crossval", "k-fold transition cross-validation");
  cv->add_option("--series", vo.series_path, "observation CSV")->required();
  cv->add_option("--k", vo.k, "folds per split");
  cv->add_option("--splits", vo.splits, "number of random splits");
  cv->add_option("--seed", vo.seed, "RNG seed");
  cv->add_option("--jobs", vo.jobs, "worker threads");
  cv->add_option("--out", vo.out, "output directory");

  IngestOpts io;
  CLI::App* ing = app.add_subcommand("ingest", "count table to proportion series");
  ing->add_option("--counts", io.counts_path, "count CSV")->required();
  ing->add_option("--taxonomy", io.taxonomy_path, "taxonomy CSV")->required();
  ing->add_option("--rank", io.rank, "aggregation rank (kingdom..genus)");
  ing->add_option("--k", io.k, "keep the k most abundant taxa (0 = all)");
  ing->add_option("--pseudocount", io.pseudocount, "zero-count smoothing");
  ing->add_option("--renormalize", io.renormalize,
                  "proportions after (top) or before (full) selection")
      ->check(CLI::IsMember({"top", "full"}));
  ing->add_option("--out", io.out, "output directory");

  PredictOpts po;
  CLI::App* pred = app.add_subcommand("predict", "one-step-ahead predictions");
  pred->add_option("--series", po.series_path, "observation CSV")->required();
  pred->add_option("--out", po.out, "output directory");

  PlotOpts lo;
  CLI::App* plot = app.add_subcommand("plot", "render series and prediction SVG charts");
  plot->add_option("--series", lo.series_path, "observation CSV")->required();
  plot->add_option("--out", lo.out, "output directory");
  plot->add_option("--title", lo.title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E_ARGS: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) run_simulate(so);
    if (fit->parsed()) run_fit(fo);
    if (check->parsed()) run_check(co);
    if (mc->parsed()) run_mc(mo);
    if (cv->parsed()) run_crossval_cmd(vo);
    if (ing->parsed()) run_ingest(io);
    if (pred->parsed()) run_predict(po);
    if (plot->parsed()) run_plot(lo);
  } catch (const Error& e) {
    std::cerr << e.code_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
