#include "sglv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sglv/error.hpp"
#include "sglv/inference.hpp"

namespace sglv {

using nlohmann::json;

ModelParams case1_params() {
  ModelParams p;
  p.r = {1.0, 1.5, 2.0, 1.5, 2.0};
  p.a = {{-2.0, -2.5, -2.0, 1.0, 1.0},
         {1.0, -6.0, -2.0, 3.0, -1.0},
         {-1.0, -2.0, -5.0, 1.0, -1.0},
         {-1.0, 0.5, 0.1, -10.0, 1.0},
         {-1.5, -2.0, -2.0, 2.0, -9.0}};
  p.sigma = Vector(5, 0.1);
  return p;
}

ModelParams case2_params() {
  ModelParams p = case1_params();
  p.sigma = Vector(5, 1.0);
  return p;
}

Vector case_x0() { return {0.5, 0.15, 0.13, 0.05, 0.04}; }

SamplingSchedule paper_schedule(std::size_t n_obs) {
  SamplingSchedule s;
  s.gaps = {0.1, 0.3, 0.5};
  s.probs = {0.7, 0.2, 0.1};
  s.n_obs = n_obs;
  return s;
}

McConfig default_mc_config(int case_id) {
  if (case_id != 1 && case_id != 2)
    throw Error(ErrorCode::kArgs, "case id must be 1 or 2");
  McConfig config;
  config.label = case_id == 1 ? "case1" : "case2";
  config.params = case_id == 1 ? case1_params() : case2_params();
  config.x0 = case_x0();
  config.schedule = paper_schedule(2);
  config.n_obs_list = {300, 500, 1000};
  return config;
}

namespace {

// Squared errors of one replicate, flattened (a row-major | r | sigma2).
struct ReplicateErrors {
  bool ok = false;
  Vector sglv;  // N*N + N + N
  Vector glv;   // N*N + N (no diffusion)
};

ReplicateErrors one_replicate(const McConfig& config, std::size_t n_obs,
                              std::uint64_t stream_id) {
  const std::size_t n = config.params.n_species();
  ReplicateErrors out;
  try {
    RngStream rng(config.seed, stream_id);
    SamplingSchedule schedule = config.schedule;
    schedule.n_obs = n_obs;
    SimConfig sim;
    sim.fine_dt = config.fine_dt;
    sim.x0 = config.x0;
    const ObservationSeries series = simulate_observed(config.params, sim, schedule, rng);
    const SglvFit sglv = fit_sglv_amle(series);
    const GlvFit glv = fit_glv_ls(series);

    out.sglv.reserve(n * n + 2 * n);
    out.glv.reserve(n * n + n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        const double truth = config.params.a(k, l);
        const double es = sglv.a_hat(k, l) - truth;
        const double eg = glv.a_hat(k, l) - truth;
        out.sglv.push_back(es * es);
        out.glv.push_back(eg * eg);
      }
    for (std::size_t k = 0; k < n; ++k) {
      const double es = sglv.r_hat[k] - config.params.r[k];
      const double eg = glv.r_hat[k] - config.params.r[k];
      out.sglv.push_back(es * es);
      out.glv.push_back(eg * eg);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double s2 = config.params.sigma[k] * config.params.sigma[k];
      const double es = sglv.sigma2_hat[k] - s2;
      out.sglv.push_back(es * es);
    }
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

void mean_and_se(const std::vector<const Vector*>& rows, std::size_t idx, double& mse,
                 double& se) {
  const double n = static_cast<double>(rows.size());
  double m = 0.0;
  for (const Vector* r : rows) m += (*r)[idx];
  m /= n;
  double var = 0.0;
  for (const Vector* r : rows) var += ((*r)[idx] - m) * ((*r)[idx] - m);
  var = rows.size() > 1 ? var / (n - 1.0) : 0.0;
  mse = m;
  se = std::sqrt(var / n);
}

void run_parallel(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& work) {
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(jobs, count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t)
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

McResult run_mc_study(const McConfig& config) {
  config.params.validate();
  if (config.replicates < 1) throw Error(ErrorCode::kRange, "replicates must be >= 1");
  const std::size_t n = config.params.n_species();

  McResult result;
  result.label = config.label;
  result.seed = config.seed;
  result.replicates = config.replicates;

  for (std::size_t block_idx = 0; block_idx < config.n_obs_list.size(); ++block_idx) {
    const std::size_t n_obs = config.n_obs_list[block_idx];
    std::vector<ReplicateErrors> reps(config.replicates);
    const std::uint64_t base = block_idx * config.replicates;
    run_parallel(config.replicates, config.jobs, [&](std::size_t r) {
      reps[r] = one_replicate(config, n_obs, base + r);
    });

    // Reduction order fixed by replicate index regardless of thread schedule.
    std::vector<const Vector*> sglv_rows;
    std::vector<const Vector*> glv_rows;
    std::size_t failures = 0;
    for (const auto& rep : reps) {
      if (rep.ok) {
        sglv_rows.push_back(&rep.sglv);
        glv_rows.push_back(&rep.glv);
      } else {
        ++failures;
      }
    }
    // A block where every replicate failed still reports its failure count;
    // the statistics columns come out as NaN (CSV) / null (JSON).
    McBlock block;
    block.n_obs = n_obs;
    block.failures = failures;
    block.replicates_used = sglv_rows.size();
    block.a_mse_sglv = Matrix(n, n);
    block.a_se_sglv = Matrix(n, n);
    block.a_mse_glv = Matrix(n, n);
    block.a_se_glv = Matrix(n, n);
    block.r_mse_sglv = Vector(n);
    block.r_se_sglv = Vector(n);
    block.r_mse_glv = Vector(n);
    block.r_se_glv = Vector(n);
    block.s2_mse_sglv = Vector(n);
    block.s2_se_sglv = Vector(n);

    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        mean_and_se(sglv_rows, idx, block.a_mse_sglv(k, l), block.a_se_sglv(k, l));
        mean_and_se(glv_rows, idx, block.a_mse_glv(k, l), block.a_se_glv(k, l));
        ++idx;
      }
    for (std::size_t k = 0; k < n; ++k) {
      mean_and_se(sglv_rows, idx, block.r_mse_sglv[k], block.r_se_sglv[k]);
      mean_and_se(glv_rows, idx, block.r_mse_glv[k], block.r_se_glv[k]);
      ++idx;
    }
    for (std::size_t k = 0; k < n; ++k) {
      mean_and_se(sglv_rows, idx, block.s2_mse_sglv[k], block.s2_se_sglv[k]);
      ++idx;
    }
    result.blocks.push_back(std::move(block));
  }
  return result;
}

MspeResult run_crossval(const ObservationSeries& series, std::size_t k,
                        std::size_t n_splits, RngStream& rng, std::size_t jobs) {
  if (k < 2) throw Error(ErrorCode::kRange, "crossval needs k >= 2");
  if (n_splits < 1) throw Error(ErrorCode::kRange, "crossval needs n_splits >= 1");
  const TransitionData full = transitions_of(series);
  const std::size_t n_t = full.n_transitions();
  const std::size_t n_species = series.n_species();
  const std::size_t n_test =
      (series.n_obs() + k - 1) / k;  // ceil(n / k) held-out prediction targets
  if (n_test >= n_t || n_t - n_test < n_species + 2)
    throw Error(ErrorCode::kRange,
                "crossval training set too small for the drift regression");

  // Pre-draw every split's held-out transitions; evaluation is then pure.
  std::vector<std::vector<std::size_t>> splits(n_splits);
  std::vector<std::size_t> pool(n_t);
  for (std::size_t s = 0; s < n_splits; ++s) {
    for (std::size_t i = 0; i < n_t; ++i) pool[i] = i;
    for (std::size_t j = 0; j < n_test; ++j) {
      const std::size_t pick = j + rng.uniform_index(n_t - j);
      std::swap(pool[j], pool[pick]);
    }
    splits[s].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::sort(splits[s].begin(), splits[s].end());
  }

  Vector sglv_mspe(n_splits, -1.0);
  Vector glv_mspe(n_splits, -1.0);
  run_parallel(n_splits, jobs, [&](std::size_t s) {
    const std::vector<std::size_t>& test = splits[s];
    TransitionData train;
    const std::size_t n_train = n_t - test.size();
    train.dt = Vector(n_train);
    train.g = Matrix(n_train, n_species + 1);
    train.du = Matrix(n_train, n_species);
    std::size_t w = 0;
    std::size_t next_test = 0;
    for (std::size_t i = 0; i < n_t; ++i) {
      if (next_test < test.size() && test[next_test] == i) {
        ++next_test;
        continue;
      }
      train.dt[w] = full.dt[i];
      for (std::size_t c = 0; c <= n_species; ++c) train.g(w, c) = full.g(i, c);
      for (std::size_t c = 0; c < n_species; ++c) train.du(w, c) = full.du(i, c);
      ++w;
    }
    try {
      const SglvFit sglv = fit_sglv_amle(train);
      const GlvFit glv = fit_glv_ls(train);
      double err_s = 0.0;
      double err_g = 0.0;
      for (std::size_t i : test) {
        const Vector u_prev = series.log_values().row(i);
        const Vector pred_s = predict_one_step(sglv, u_prev, full.dt[i]);
        const Vector pred_g = predict_one_step(glv, u_prev, full.dt[i]);
        for (std::size_t c = 0; c < n_species; ++c) {
          const double truth = series.log_values()(i + 1, c);
          err_s += (pred_s[c] - truth) * (pred_s[c] - truth);
          err_g += (pred_g[c] - truth) * (pred_g[c] - truth);
        }
      }
      sglv_mspe[s] = err_s / static_cast<double>(test.size());
      glv_mspe[s] = err_g / static_cast<double>(test.size());
    } catch (const Error&) {
      // collinear training split: dropped and counted below
    }
  });

  Vector ok_s, ok_g;
  for (std::size_t s = 0; s < n_splits; ++s) {
    if (sglv_mspe[s] >= 0.0 && glv_mspe[s] >= 0.0) {
      ok_s.push_back(sglv_mspe[s]);
      ok_g.push_back(glv_mspe[s]);
    }
  }
  if (ok_s.empty()) throw Error(ErrorCode::kSolver, "every cross-validation split failed");

  auto mean_se = [](const Vector& v, double& mean_out, double& se_out) {
    const double n = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var = v.size() > 1 ? var / (n - 1.0) : 0.0;
    mean_out = m;
    se_out = std::sqrt(var / n);
  };

  MspePoint point;
  point.k = k;
  point.n_splits = n_splits;
  point.dropped_splits = n_splits - ok_s.size();
  mean_se(ok_s, point.sglv_mean, point.sglv_se);
  mean_se(ok_g, point.glv_mean, point.glv_se);

  MspeResult result;
  result.points.push_back(point);
  return result;
}

namespace {

void append_csv_value(std::ostringstream& out, double v) { out << ',' << format_full(v); }

}  // namespace

std::string mc_result_to_csv_text(const McResult& result) {
  std::ostringstream out;
  out << "case,n,block,param,mse_sglv,se_sglv,mse_glv,se_glv\n";
  for (const McBlock& block : result.blocks) {
    const std::size_t n = block.r_mse_sglv.size();
    out << result.label << ',' << block.n_obs << ",a,,,,,\n";
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        out << result.label << ',' << block.n_obs << ",a,a_" << (k + 1) << (l + 1);
        append_csv_value(out, block.a_mse_sglv(k, l));
        append_csv_value(out, block.a_se_sglv(k, l));
        append_csv_value(out, block.a_mse_glv(k, l));
        append_csv_value(out, block.a_se_glv(k, l));
        out << "\n";
      }
    out << result.label << ',' << block.n_obs << ",r,,,,,\n";
    for (std::size_t k = 0; k < n; ++k) {
      out << result.label << ',' << block.n_obs << ",r,r_" << (k + 1);
      append_csv_value(out, block.r_mse_sglv[k]);
      append_csv_value(out, block.r_se_sglv[k]);
      append_csv_value(out, block.r_mse_glv[k]);
      append_csv_value(out, block.r_se_glv[k]);
      out << "\n";
    }
    out << result.label << ',' << block.n_obs << ",sigma2,,,,,\n";
    for (std::size_t k = 0; k < n; ++k) {
      out << result.label << ',' << block.n_obs << ",sigma2,sigma2_" << (k + 1);
      append_csv_value(out, block.s2_mse_sglv[k]);
      append_csv_value(out, block.s2_se_sglv[k]);
      out << ",,\n";
    }
    out << result.label << ',' << block.n_obs << ",failures," << block.failures
        << ",,,,\n";
  }
  return out.str();
}

std::string mc_result_to_json_text(const McResult& result) {
  json doc;
  doc["label"] = result.label;
  doc["seed"] = result.seed;
  doc["replicates"] = result.replicates;
  json blocks = json::array();
  for (const McBlock& block : result.blocks) {
    json b;
    b["n_obs"] = block.n_obs;
    b["replicates_used"] = block.replicates_used;
    b["failures"] = block.failures;
    auto matrix_rows = [](const Matrix& m) {
      json rows = json::array();
      for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
      return rows;
    };
    b["a_mse_sglv"] = matrix_rows(block.a_mse_sglv);
    b["a_se_sglv"] = matrix_rows(block.a_se_sglv);
    b["a_mse_glv"] = matrix_rows(block.a_mse_glv);
    b["a_se_glv"] = matrix_rows(block.a_se_glv);
    b["r_mse_sglv"] = block.r_mse_sglv;
    b["r_se_sglv"] = block.r_se_sglv;
    b["r_mse_glv"] = block.r_mse_glv;
    b["r_se_glv"] = block.r_se_glv;
    b["sigma2_mse_sglv"] = block.s2_mse_sglv;
    b["sigma2_se_sglv"] = block.s2_se_sglv;
    blocks.push_back(b);
  }
  doc["blocks"] = blocks;
  return doc.dump(2);
}

std::string mspe_result_to_csv_text(const MspeResult& result) {
  std::ostringstream out;
  out << "k,n_splits,dropped,mspe_sglv,se_sglv,mspe_glv,se_glv\n";
  for (const MspePoint& p : result.points) {
    out << p.k << ',' << p.n_splits << ',' << p.dropped_splits;
    append_csv_value(out, p.sglv_mean);
    append_csv_value(out, p.sglv_se);
    append_csv_value(out, p.glv_mean);
    append_csv_value(out, p.glv_se);
    out << "\n";
  }
  return out.str();
}

std::string mspe_result_to_json_text(const MspeResult& result) {
  json points = json::array();
  for (const MspePoint& p : result.points) {
    points.push_back({{"k", p.k},
                      {"n_splits", p.n_splits},
                      {"dropped_splits", p.dropped_splits},
                      {"mspe_sglv", p.sglv_mean},
                      {"se_sglv", p.sglv_se},
                      {"mspe_glv", p.glv_mean},
                      {"se_glv", p.glv_se}});
  }
  json doc;
  doc["points"] = points;
  return doc.dump(2);
}

}  // namespace sglv
