#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "distmat/hardgen.hpp"
#include "distmat/pipeline.hpp"
#include "json.hpp"

namespace distmat {

// Cluster-structured point set: centers uniform in [0,10]^d, isotropic
// Gaussian noise, then a per-dimension shift so every coordinate is
// nonnegative (keeps Canberra applicable). Point i belongs to cluster
// i mod n_clusters.
inline PointSet synth_clusters(size_t n_points, size_t n_features, size_t n_clusters,
                               uint64_t seed, double sigma = 1.0) {
    if (n_points == 0 || n_features == 0) throw InvalidInput("bench: empty point set");
    if (n_clusters == 0 || n_clusters > n_points)
        throw InvalidInput("bench: n_clusters must be in [1, n_points]");
    RngStream rng(seed);
    std::vector<double> centers(n_clusters * n_features);
    for (auto& c : centers) c = rng.uniform01() * 10.0;
    PointSet ps(n_points, n_features);
    for (size_t i = 0; i < n_points; ++i) {
        size_t c = i % n_clusters;
        for (size_t j = 0; j < n_features; ++j)
            ps.coords[i * n_features + j] = centers[c * n_features + j] + sigma * rng.normal();
    }
    for (size_t j = 0; j < n_features; ++j) {
        double lo = ps.coords[j];
        for (size_t i = 1; i < n_points; ++i) lo = std::min(lo, ps.coords[i * n_features + j]);
        if (lo < 0.0)
            for (size_t i = 0; i < n_points; ++i) ps.coords[i * n_features + j] -= lo;
    }
    return ps;
}

enum class BenchMethod { thiswork, uniform, svd };

inline const char* bench_method_name(BenchMethod m) {
    switch (m) {
        case BenchMethod::thiswork: return "thiswork";
        case BenchMethod::uniform: return "uniform";
        case BenchMethod::svd: return "svd";
    }
    throw InvalidInput("bench: unknown method");
}

inline BenchMethod parse_bench_method(const std::string& s) {
    if (s == "thiswork") return BenchMethod::thiswork;
    if (s == "uniform") return BenchMethod::uniform;
    if (s == "svd") return BenchMethod::svd;
    throw InvalidInput("bench: unknown method '" + s + "'");
}

struct HardDatasetSpec {
    HardKind kind = HardKind::bipartite_k1;
    size_t n = 0;
    size_t k = 1;
    double eps = 0.5;
    double beta = 1.0;
    double C = 1.0;
    uint64_t seed = 0;
};

struct SyntheticClustersSpec {
    size_t n_points = 0;
    size_t n_features = 0;
    size_t n_clusters = 1;
    uint64_t seed = 0;
    double sigma = 1.0;
};

enum class DatasetType { synthetic_clusters, csv_points, hard };

struct BenchDataset {
    DatasetType type = DatasetType::synthetic_clusters;
    SyntheticClustersSpec synthetic;
    std::string csv_path;
    HardDatasetSpec hard;
};

struct BenchSpec {
    BenchDataset dataset;
    std::vector<MetricKind> metrics;
    std::vector<size_t> ks;
    double eps = 0.5;
    double c_r = 4.0;
    double c_c = 4.0;
    std::vector<uint64_t> seeds;
    std::vector<BenchMethod> methods;
};

inline BenchSpec parse_bench_spec(const nlohmann::json& j) {
    BenchSpec spec;
    try {
        const auto& d = j.at("dataset");
        std::string type = d.at("type").get<std::string>();
        if (type == "synthetic_clusters") {
            spec.dataset.type = DatasetType::synthetic_clusters;
            spec.dataset.synthetic.n_points = d.at("n_points").get<size_t>();
            spec.dataset.synthetic.n_features = d.at("n_features").get<size_t>();
            spec.dataset.synthetic.n_clusters = d.at("n_clusters").get<size_t>();
            spec.dataset.synthetic.seed = d.at("seed").get<uint64_t>();
            spec.dataset.synthetic.sigma = d.value("sigma", 1.0);
        } else if (type == "csv_points") {
            spec.dataset.type = DatasetType::csv_points;
            spec.dataset.csv_path = d.at("path").get<std::string>();
        } else if (type == "hard") {
            spec.dataset.type = DatasetType::hard;
            spec.dataset.hard.kind = parse_hard_kind(d.at("kind").get<std::string>());
            spec.dataset.hard.n = d.at("n").get<size_t>();
            spec.dataset.hard.k = d.value("k", size_t{1});
            spec.dataset.hard.eps = d.at("eps").get<double>();
            spec.dataset.hard.beta = d.at("beta").get<double>();
            spec.dataset.hard.C = d.value("C", 1.0);
            spec.dataset.hard.seed = d.value("seed", uint64_t{0});
        } else {
            throw InvalidInput("bench: unknown dataset type '" + type + "'");
        }
        if (spec.dataset.type != DatasetType::hard)
            for (const auto& m : j.at("metrics").get<std::vector<std::string>>())
                spec.metrics.push_back(parse_metric(m));
        spec.ks = j.at("ks").get<std::vector<size_t>>();
        spec.eps = j.at("eps").get<double>();
        spec.c_r = j.value("c_r", 4.0);
        spec.c_c = j.value("c_c", 4.0);
        spec.seeds = j.at("seeds").get<std::vector<uint64_t>>();
        for (const auto& m : j.at("methods").get<std::vector<std::string>>())
            spec.methods.push_back(parse_bench_method(m));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bench: bad spec: ") + e.what());
    }
    if (spec.dataset.type != DatasetType::hard && spec.metrics.empty())
        throw InvalidInput("bench: metrics list is empty");
    if (spec.ks.empty() || spec.seeds.empty() || spec.methods.empty())
        throw InvalidInput("bench: ks, seeds, and methods must be nonempty");
    if (spec.eps <= 0.0) throw InvalidInput("bench: eps must be positive");
    for (size_t i = 0; i < spec.methods.size(); ++i)
        for (size_t l = i + 1; l < spec.methods.size(); ++l)
            if (spec.methods[i] == spec.methods[l])
                throw InvalidInput("bench: duplicate method (each cell must run exactly once)");
    return spec;
}

struct BenchRow {
    std::string method;
    std::string metric;
    size_t k = 0;
    uint64_t seed = 0;
    double err_sq = 0.0;
    double opt_sq = 0.0;
    double fro_sq = 0.0;
    double excess = 0.0;
    uint64_t reads_total = 0;
    uint64_t reads_algo = 0;
    double t_weights = 0.0;
    double t_sketch = 0.0;
    double t_regress = 0.0;
    double t_total = 0.0;
    std::string error;  // empty when the cell succeeded
};

struct BenchResults {
    std::vector<BenchRow> rows;
};

namespace detail {

// stable identifiers feeding each cell's derived RNG stream
inline uint64_t metric_stream_id(const std::string& label) {
    if (label == "l1") return 0;
    if (label == "l2") return 1;
    if (label == "linf") return 2;
    if (label == "canberra") return 3;
    return 4;  // dense
}

inline uint64_t method_stream_id(BenchMethod m) { return static_cast<uint64_t>(m); }

struct MetricContext {
    std::string label;
    std::optional<MetricKind> kind;  // absent for dense-backed datasets
    Matrix a;                        // cached materialization for evaluation
    double fro = 0.0;
    std::map<size_t, double> opt_by_k;
    double svd_seconds = 0.0;  // shared cost reported on every svd row
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// Runs every (metric, k, seed, method) cell exactly once. Per-cell failures
// land in the row's `error` field and the sweep continues. Cells run in
// parallel across `threads`; row order is the deterministic cell order.
inline BenchResults run_bench(const BenchSpec& spec, int threads = 1) {
    // dataset is generated once
    std::optional<PointSet> points;
    std::optional<Matrix> dense;
    switch (spec.dataset.type) {
        case DatasetType::synthetic_clusters: {
            const auto& s = spec.dataset.synthetic;
            points = synth_clusters(s.n_points, s.n_features, s.n_clusters, s.seed, s.sigma);
            break;
        }
        case DatasetType::csv_points:
            points = PointSet::from_csv(spec.dataset.csv_path);
            break;
        case DatasetType::hard: {
            const auto& h = spec.dataset.hard;
            HardInstance inst;
            switch (h.kind) {
                case HardKind::bipartite_k1:
                    inst = gen_bipartite_k1(h.n, h.eps, h.beta, h.C, h.seed);
                    break;
                case HardKind::symmetric_k1:
                    inst = gen_symmetric_k1(h.n, h.eps, h.beta, h.seed);
                    break;
                case HardKind::bipartite_k_block:
                    inst = gen_k_block(h.n, h.k, h.eps, h.beta, h.C, h.seed);
                    break;
                case HardKind::symmetric_k_block:
                    inst = gen_symmetric_k_block(h.n, h.k, h.eps, h.beta, h.C, h.seed);
                    break;
            }
            dense = std::move(inst.matrix);
            break;
        }
    }

    auto make_oracle = [&](const std::optional<MetricKind>& kind) {
        return kind ? DistanceOracle::from_points(*points, *kind)
                    : DistanceOracle::from_matrix(*dense);
    };

    // per-metric caches: one materialization and one dense SVD, tails per k
    std::vector<detail::MetricContext> contexts;
    if (dense) {
        detail::MetricContext ctx;
        ctx.label = "dense";
        contexts.push_back(std::move(ctx));
    } else {
        for (MetricKind m : spec.metrics) {
            detail::MetricContext ctx;
            ctx.label = metric_name(m);
            ctx.kind = m;
            contexts.push_back(std::move(ctx));
        }
    }
    for (auto& ctx : contexts) {
        auto t0 = std::chrono::steady_clock::now();
        auto oracle = make_oracle(ctx.kind);
        ctx.a = materialize(oracle, 100000000ull, threads);
        ctx.fro = fro_sq(ctx.a);
        SvdResult s = small_svd(ctx.a);
        for (size_t k : spec.ks) ctx.opt_by_k[k] = tail_energy(s, k);
        ctx.svd_seconds = detail::seconds_since(t0);
    }

    struct Cell {
        size_t ctx_idx;
        size_t k;
        uint64_t seed;
        BenchMethod method;
    };
    std::vector<Cell> cells;
    for (size_t ci = 0; ci < contexts.size(); ++ci)
        for (size_t k : spec.ks)
            for (uint64_t seed : spec.seeds)
                for (BenchMethod method : spec.methods) cells.push_back({ci, k, seed, method});

    BenchResults results;
    results.rows.assign(cells.size(), BenchRow{});
    parallel_for(cells.size(), std::max(1, threads),
                 [&](size_t lo, size_t hi) {
                     for (size_t idx = lo; idx < hi; ++idx) {
                         const Cell& cell = cells[idx];
                         const auto& ctx = contexts[cell.ctx_idx];
                         BenchRow& row = results.rows[idx];
                         row.method = bench_method_name(cell.method);
                         row.metric = ctx.label;
                         row.k = cell.k;
                         row.seed = cell.seed;
                         try {
                             double opt = ctx.opt_by_k.at(cell.k);
                             row.opt_sq = opt;
                             row.fro_sq = ctx.fro;
                             if (cell.method == BenchMethod::svd) {
                                 row.err_sq = opt;  // same routine: err == opt exactly
                                 row.excess = 0.0;
                                 size_t nm = ctx.a.rows() * ctx.a.cols();
                                 row.reads_total = nm;
                                 row.reads_algo = nm;
                                 row.t_total = ctx.svd_seconds;
                                 continue;
                             }
                             auto oracle = make_oracle(ctx.kind);
                             SketchConfig cfg;
                             cfg.k = cell.k;
                             cfg.eps = spec.eps;
                             cfg.c_r = spec.c_r;
                             cfg.c_c = spec.c_c;
                             uint64_t stream = derive_seed(
                                 {cell.seed, detail::method_stream_id(cell.method),
                                  detail::metric_stream_id(ctx.label),
                                  static_cast<uint64_t>(cell.k)});
                             PipelineRun run = cell.method == BenchMethod::thiswork
                                                   ? low_rank_approx(oracle, cfg, stream)
                                                   : uniform_baseline(oracle, cfg, stream);
                             row.err_sq = diff_fro_sq(ctx.a, compose_dense(run.factors));
                             row.excess =
                                 ctx.fro > 0.0 ? (row.err_sq - row.opt_sq) / ctx.fro : 0.0;
                             row.reads_algo = run.reads.algo();
                             row.reads_total = run.reads.total();
                             row.t_weights = run.times.weights;
                             row.t_sketch = run.times.sketch;
                             row.t_regress = run.times.regress;
                             row.t_total = run.times.total;
                         } catch (const std::exception& e) {
                             row.error = e.what();
                         }
                     }
                 });
    return results;
}

inline constexpr const char* kBenchCsvHeader =
    "method,metric,k,seed,err_sq,opt_sq,fro_sq,excess,reads_total,reads_algo,"
    "t_weights,t_sketch,t_regress,t_total,error";

inline std::string bench_csv(const BenchResults& results) {
    std::ostringstream out;
    out << kBenchCsvHeader << "\n";
    for (const auto& r : results.rows) {
        out << r.method << ',' << r.metric << ',' << r.k << ',' << r.seed << ','
            << fmt_double(r.err_sq) << ',' << fmt_double(r.opt_sq) << ',' << fmt_double(r.fro_sq)
            << ',' << fmt_double(r.excess) << ',' << r.reads_total << ',' << r.reads_algo << ','
            << fmt_double(r.t_weights) << ',' << fmt_double(r.t_sketch) << ','
            << fmt_double(r.t_regress) << ',' << fmt_double(r.t_total) << ','
            << detail::csv_escape(r.error) << "\n";
    }
    return out.str();
}

inline nlohmann::json bench_json(const BenchResults& results) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results.rows)
        rows.push_back({{"method", r.method},
                        {"metric", r.metric},
                        {"k", r.k},
                        {"seed", r.seed},
                        {"err_sq", r.err_sq},
                        {"opt_sq", r.opt_sq},
                        {"fro_sq", r.fro_sq},
                        {"excess", r.excess},
                        {"reads_total", r.reads_total},
                        {"reads_algo", r.reads_algo},
                        {"t_weights", r.t_weights},
                        {"t_sketch", r.t_sketch},
                        {"t_regress", r.t_regress},
                        {"t_total", r.t_total},
                        {"error", r.error}});
    return {{"rows", rows}};
}

// Plot-ready table for one metric: per (k, method), medians over seeds of the
// exact error and the optimum-relative excess. Timing-free, so reruns are
// byte-identical.
inline std::string plot_csv(const BenchResults& results, const std::string& metric) {
    std::vector<size_t> ks;
    std::vector<std::string> methods;
    std::map<std::pair<size_t, std::string>, std::vector<double>> errs, excesses;
    for (const auto& r : results.rows) {
        if (r.metric != metric || !r.error.empty()) continue;
        if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        errs[{r.k, r.method}].push_back(r.err_sq);
        excesses[{r.k, r.method}].push_back(r.excess);
    }
    std::sort(ks.begin(), ks.end());
    std::ostringstream out;
    out << "k,method,median_err_sq,median_excess\n";
    for (size_t k : ks)
        for (const auto& method : methods) {
            auto it = errs.find({k, method});
            if (it == errs.end()) continue;
            out << k << ',' << method << ',' << fmt_double(detail::median_of(it->second)) << ','
                << fmt_double(detail::median_of(excesses[{k, method}])) << "\n";
        }
    return out.str();
}

}  // namespace distmat
