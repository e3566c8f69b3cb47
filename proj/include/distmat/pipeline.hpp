#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "distmat/oracle.hpp"
#include "distmat/regress.hpp"
#include "distmat/sketch.hpp"
#include "distmat/svd.hpp"
#include "distmat/weights.hpp"
#include "json.hpp"

namespace distmat {

// Wall-clock seconds per stage. Measurements, not outputs: every numeric
// artifact except these is bit-reproducible for a fixed seed.
struct StageTimes {
    double weights = 0.0;
    double sketch = 0.0;
    double regress = 0.0;
    double total = 0.0;
};

struct PipelineRun {
    Factors factors;
    RowWeights weights;
    LedgerCounts reads;  // this run only (delta), not the oracle's lifetime total
    StageTimes times;
    uint64_t seed = 0;
    bool symmetric_path = false;
    bool uniform_rows = false;
};

struct EvalNumbers {
    double err_sq = 0.0;
    double opt_sq = 0.0;
    double fro_sq = 0.0;
    double excess = 0.0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline PipelineRun run_common(DistanceOracle& oracle, RowWeights w, const SketchConfig& cfg,
                              RngStream& rng, uint64_t seed, int threads, bool symmetric_path,
                              bool uniform_rows, double t_weights, LedgerCounts before) {
    PipelineRun run;
    run.weights = std::move(w);
    run.seed = seed;
    run.symmetric_path = symmetric_path;
    run.uniform_rows = uniform_rows;
    run.times.weights = t_weights;

    auto t1 = std::chrono::steady_clock::now();
    RightFactor right = build_right_factor(oracle, run.weights, cfg, rng);
    run.times.sketch = seconds_since(t1);

    auto t2 = std::chrono::steady_clock::now();
    LeftFactor left = fit_left_factor(oracle, right, cfg, rng, threads);
    run.times.regress = seconds_since(t2);

    run.factors = compose(left, right);
    run.times.total = run.times.weights + run.times.sketch + run.times.regress;

    LedgerCounts after = oracle.counts();
    run.reads.weights_reads = after.weights_reads - before.weights_reads;
    run.reads.sketch_reads = after.sketch_reads - before.sketch_reads;
    run.reads.regression_reads = after.regression_reads - before.regression_reads;
    run.reads.eval_reads = after.eval_reads - before.eval_reads;
    return run;
}

}  // namespace detail

// Full anchored pipeline: row weights -> row-sampled sketch -> column-sampled
// regression. Deterministic per seed; never materializes the matrix.
inline PipelineRun low_rank_approx(DistanceOracle& oracle, const SketchConfig& cfg, uint64_t seed,
                                   int threads = 1) {
    cfg.validate();
    LedgerCounts before = oracle.counts();
    RngStream rng(seed);
    auto t0 = std::chrono::steady_clock::now();
    RowWeights w = oracle.symmetric() ? estimate_row_weights_symmetric(oracle, rng)
                                      : estimate_row_weights(oracle, rng);
    double t_weights = detail::seconds_since(t0);
    return detail::run_common(oracle, std::move(w), cfg, rng, seed, threads, oracle.symmetric(),
                              /*uniform_rows=*/false, t_weights, before);
}

// Ablation: identical sketch/regression stages but uniform row-sampling
// weights obtained without reading any entries.
inline PipelineRun uniform_baseline(DistanceOracle& oracle, const SketchConfig& cfg, uint64_t seed,
                                    int threads = 1) {
    cfg.validate();
    LedgerCounts before = oracle.counts();
    RngStream rng(seed);
    RowWeights w;
    w.raw.assign(oracle.rows(), 1.0);
    w.normalized.assign(oracle.rows(), 1.0 / static_cast<double>(oracle.rows()));
    w.istar = 0;
    w.jstar.reset();
    w.reads_used = 0;
    return detail::run_common(oracle, std::move(w), cfg, rng, seed, threads,
                              /*symmetric_path=*/false, /*uniform_rows=*/true,
                              /*t_weights=*/0.0, before);
}

// Exact squared Frobenius error of the best rank-k approximation of `a`.
inline double optimal_tail_sq(const Matrix& a, size_t k) {
    SvdResult s = small_svd(a);
    return tail_energy(s, k);
}

// Exact evaluation at desk scale. Materializes the oracle (charged to
// eval_reads, deliberately outside the algorithm's read budget). Pass
// `precomputed_opt_sq` to reuse a dense-SVD tail across runs on one instance.
inline EvalNumbers evaluate(DistanceOracle& oracle, const Factors& f,
                            std::optional<double> precomputed_opt_sq = std::nullopt,
                            uint64_t cap = 100000000ull, int threads = 1) {
    Matrix a = materialize(oracle, cap, threads);
    Matrix approx = compose_dense(f);
    EvalNumbers e;
    e.err_sq = diff_fro_sq(a, approx);
    e.fro_sq = fro_sq(a);
    e.opt_sq = precomputed_opt_sq ? *precomputed_opt_sq : optimal_tail_sq(a, f.u.rows());
    e.excess = e.fro_sq > 0.0 ? (e.err_sq - e.opt_sq) / e.fro_sq : 0.0;
    return e;
}

// Read-budget certificate: the algorithm's reads (weights + sketch +
// regression, never eval) must not exceed this bound.
inline double budget_bound(size_t n, size_t m, const SketchConfig& cfg) {
    double nm = static_cast<double>(n + m);
    double ratio = static_cast<double>(cfg.k) / cfg.eps;
    return nm * (1.0 + (cfg.c_r + cfg.c_c) * ratio) * 1.05;
}

inline bool within_budget(const LedgerCounts& reads, size_t n, size_t m,
                          const SketchConfig& cfg) {
    return static_cast<double>(reads.algo()) <= budget_bound(n, m, cfg);
}

inline nlohmann::json ledger_json(const LedgerCounts& c) {
    return {{"weights_reads", c.weights_reads},
            {"sketch_reads", c.sketch_reads},
            {"regression_reads", c.regression_reads},
            {"eval_reads", c.eval_reads},
            {"reads_algo", c.algo()},
            {"reads_total", c.total()}};
}

// Stable snake_case report. `times` holds wall-clock measurements and is the
// only part of the report that varies between identical-seed reruns.
inline nlohmann::json approx_report_json(const DistanceOracle& oracle, const SketchConfig& cfg,
                                         const PipelineRun& run,
                                         const std::optional<EvalNumbers>& eval) {
    nlohmann::json j;
    j["seed"] = run.seed;
    j["config"] = {{"n", oracle.rows()},
                   {"m", oracle.cols()},
                   {"metric", oracle.metric_label()},
                   {"symmetric", oracle.symmetric()},
                   {"k", cfg.k},
                   {"eps", cfg.eps},
                   {"c_r", cfg.c_r},
                   {"c_c", cfg.c_c},
                   {"s_rows", cfg.sample_rows_count()},
                   {"t_cols", cfg.sample_cols_count()},
                   {"method", run.uniform_rows ? "uniform" : "thiswork"},
                   {"symmetric_weights", run.symmetric_path}};
    j["ledger"] = ledger_json(run.reads);
    j["budget"] = {{"bound", budget_bound(oracle.rows(), oracle.cols(), cfg)},
                   {"within", within_budget(run.reads, oracle.rows(), oracle.cols(), cfg)}};
    j["times"] = {{"weights", run.times.weights},
                  {"sketch", run.times.sketch},
                  {"regress", run.times.regress},
                  {"total", run.times.total}};
    if (eval) {
        j["err_sq"] = eval->err_sq;
        j["opt_sq"] = eval->opt_sq;
        j["fro_sq"] = eval->fro_sq;
        j["excess"] = eval->excess;
    }
    return j;
}

}  // namespace distmat
