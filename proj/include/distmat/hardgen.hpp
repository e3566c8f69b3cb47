#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "distmat/matrix.hpp"
#include "distmat/regress.hpp"
#include "json.hpp"

namespace distmat {

// Stress-test matrices for the sampling budget: each instance embeds n (or
// k·n) random length-r strings over a two-symbol alphabet whose per-string
// majority is recoverable from row means of any good low-rank approximation.
enum class HardKind {
    bipartite_k1,
    symmetric_k1,
    bipartite_k_block,
    symmetric_k_block,
};

inline const char* hard_kind_name(HardKind k) {
    switch (k) {
        case HardKind::bipartite_k1: return "bipartite-k1";
        case HardKind::symmetric_k1: return "symmetric-k1";
        case HardKind::bipartite_k_block: return "k-block";
        case HardKind::symmetric_k_block: return "symmetric-k-block";
    }
    throw InvalidInput("hardgen: unknown kind");
}

inline HardKind parse_hard_kind(const std::string& s) {
    if (s == "bipartite-k1") return HardKind::bipartite_k1;
    if (s == "symmetric-k1") return HardKind::symmetric_k1;
    if (s == "k-block" || s == "bipartite-k-block") return HardKind::bipartite_k_block;
    if (s == "symmetric-k-block") return HardKind::symmetric_k_block;
    throw InvalidInput("hardgen: unknown kind '" + s + "'");
}

struct HardParams {
    size_t n = 0;       // embedded instances per block
    size_t r = 0;       // symbols per instance
    size_t k = 1;       // blocks (k-block kinds)
    double C = 0.0;     // padding factor
    double beta = 0.0;  // r = round(beta / eps)
    double eps = 0.0;
    double M = 0.0;     // heavy-row value sqrt(C*n), bipartite-k1 only
    double scale = 1.0;  // affine map applied to raw block values
    double shift = 0.0;
    size_t n_eff = 0;  // padded row count per block (k-block kinds)
};

struct HardInstance {
    HardKind kind = HardKind::bipartite_k1;
    Matrix matrix;
    HardParams params;
    std::vector<size_t> perm;            // instance slot -> row slot within its block
    std::vector<int> majorities;         // per instance: 0 tie, 1 low symbol, 2 high symbol
    std::vector<size_t> majority_counts;  // per instance: count of the majority symbol

    size_t instance_count() const { return params.n * params.k; }
};

struct TypicalityReport {
    double gamma = 0.0;
    size_t typical_count = 0;
    size_t total = 0;
};

struct DecodeResult {
    std::vector<int> bits;  // predicted symbol per embedded instance (1 or 2)
    size_t decided = 0;     // instances with a strict ground-truth majority
    size_t correct = 0;
    double success_rate = 0.0;  // correct / decided
};

namespace detail {

// Sylvester–Hadamard entry: H[a][b] = (-1)^popcount(a & b); row 0 is all ones.
inline double hadamard_entry(size_t row, size_t col) {
    return (std::popcount(row & col) & 1u) ? -1.0 : 1.0;
}

inline size_t next_pow2(size_t v) {
    size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

inline size_t resolve_r(double beta, double eps) {
    if (eps <= 0.0 || beta <= 0.0) throw InvalidInput("hardgen: beta and eps must be positive");
    auto r = static_cast<long long>(std::llround(beta / eps));
    if (r < 1) throw InvalidInput("hardgen: beta/eps rounds below 1 symbol per instance");
    return static_cast<size_t>(r);
}

// Record one drawn instance string's majority bookkeeping. `high_count` is
// the number of high symbols among r draws.
inline void record_majority(HardInstance& inst, size_t high_count) {
    size_t r = inst.params.r;
    size_t low_count = r - high_count;
    if (high_count > low_count)
        inst.majorities.push_back(2);
    else if (low_count > high_count)
        inst.majorities.push_back(1);
    else
        inst.majorities.push_back(0);
    inst.majority_counts.push_back(std::max(low_count, high_count));
}

inline std::vector<size_t> identity_perm(size_t n) {
    std::vector<size_t> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = i;
    return p;
}

}  // namespace detail

// (n+1) x r matrix: rows are random strings over {1,2} in permuted order, plus
// one heavy all-M row. Low-rank approximations must spend reads on the string
// rows to recover their majorities.
inline HardInstance gen_bipartite_k1(size_t n, double eps, double beta, double C, uint64_t seed) {
    if (n == 0) throw InvalidInput("hardgen: n must be positive");
    if (C <= 0.0) throw InvalidInput("hardgen: C must be positive");
    size_t r = detail::resolve_r(beta, eps);

    HardInstance inst;
    inst.kind = HardKind::bipartite_k1;
    inst.params.n = n;
    inst.params.r = r;
    inst.params.k = 1;
    inst.params.C = C;
    inst.params.beta = beta;
    inst.params.eps = eps;
    inst.params.M = std::sqrt(C * static_cast<double>(n));

    RngStream rng(seed);
    std::vector<std::vector<double>> strings(n, std::vector<double>(r));
    for (size_t i = 0; i < n; ++i) {
        size_t high = 0;
        for (size_t j = 0; j < r; ++j) {
            size_t sym = rng.uniform_index(2);  // 0 -> 1, 1 -> 2
            strings[i][j] = 1.0 + static_cast<double>(sym);
            high += sym;
        }
        detail::record_majority(inst, high);
    }
    inst.perm = detail::identity_perm(n);
    rng.shuffle(inst.perm);

    inst.matrix = Matrix(n + 1, r);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < r; ++j) inst.matrix(inst.perm[i], j) = strings[i][j];
    for (size_t j = 0; j < r; ++j) inst.matrix(n, j) = inst.params.M;
    return inst;
}

// 2n x 2n symmetric matrix with zero diagonal. The off-diagonal blocks hold
// n/r horizontal copies of the permuted string matrix; within-group entries
// are constant. Raw values {1, 2, 2.25} are mapped by t -> 0.8t + 0.2 into
// [1, 2] so the result stays a metric under the exhaustive triangle check.
inline HardInstance gen_symmetric_k1(size_t n, double eps, double beta, uint64_t seed) {
    if (n == 0) throw InvalidInput("hardgen: n must be positive");
    size_t r = detail::resolve_r(beta, eps);
    if (n % r != 0) throw InvalidInput("hardgen: r must divide n for the symmetric layout");

    HardInstance inst;
    inst.kind = HardKind::symmetric_k1;
    inst.params.n = n;
    inst.params.r = r;
    inst.params.k = 1;
    inst.params.beta = beta;
    inst.params.eps = eps;
    inst.params.scale = 0.8;
    inst.params.shift = 0.2;

    RngStream rng(seed);
    std::vector<std::vector<double>> strings(n, std::vector<double>(r));
    for (size_t i = 0; i < n; ++i) {
        size_t high = 0;
        for (size_t j = 0; j < r; ++j) {
            size_t sym = rng.uniform_index(2);
            strings[i][j] = 1.0 + static_cast<double>(sym);
            high += sym;
        }
        detail::record_majority(inst, high);
    }
    inst.perm = detail::identity_perm(n);
    rng.shuffle(inst.perm);

    auto f = [&](double t) { return inst.params.scale * t + inst.params.shift; };
    inst.matrix = Matrix(2 * n, 2 * n);
    const double within = f(2.25);
    for (size_t g = 0; g < 2; ++g)  // within-group blocks
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                inst.matrix(g * n + a, g * n + b) = (a == b) ? 0.0 : within;
    const size_t copies = n / r;
    for (size_t i = 0; i < n; ++i) {
        size_t row = n + inst.perm[i];
        for (size_t c = 0; c < copies; ++c)
            for (size_t j = 0; j < r; ++j) {
                double v = f(strings[i][j]);
                inst.matrix(row, c * r + j) = v;
                inst.matrix(c * r + j, row) = v;
            }
    }
    return inst;
}

namespace detail {

// Shared k-block body: N_eff x (k*r) raw block matrix with values
// 2 + v_i[row]/1 + sign, where v_i is a non-constant Hadamard row scaled to
// {±1/2} and sign in {±1/2} for the first n (permuted) rows, 0 below.
inline HardInstance gen_k_block_common(size_t n, size_t k, double eps, double beta, double C,
                                       uint64_t seed, bool symmetric) {
    if (n == 0) throw InvalidInput("hardgen: n must be positive");
    if (k == 0) throw InvalidInput("hardgen: k must be positive");
    if (C <= 0.0) throw InvalidInput("hardgen: C must be positive");
    size_t r = detail::resolve_r(beta, eps);
    size_t target = static_cast<size_t>(std::ceil((1.0 + C) * static_cast<double>(n)));
    size_t n_eff = detail::next_pow2(target);
    if (k > n_eff - 1)
        throw InvalidInput("hardgen: not enough non-constant Hadamard rows for k blocks");
    if (symmetric && (n_eff % (k * r) != 0))
        throw InvalidInput("hardgen: k*r must divide the padded order for the symmetric layout");

    HardInstance inst;
    inst.kind = symmetric ? HardKind::symmetric_k_block : HardKind::bipartite_k_block;
    inst.params.n = n;
    inst.params.r = r;
    inst.params.k = k;
    inst.params.C = C;
    inst.params.beta = beta;
    inst.params.eps = eps;
    inst.params.n_eff = n_eff;
    if (symmetric) {
        inst.params.scale = 0.5;  // t -> (t + 1)/2 maps {1..3} into [1, 2]
        inst.params.shift = 0.5;
    }

    RngStream rng(seed);
    // signs[i][a][j] in {-1/2, +1/2} for instance slot a of block i
    std::vector<double> signs(k * n * r);
    for (size_t i = 0; i < k; ++i)
        for (size_t a = 0; a < n; ++a) {
            size_t high = 0;
            for (size_t j = 0; j < r; ++j) {
                size_t sym = rng.uniform_index(2);
                signs[(i * n + a) * r + j] = sym ? 0.5 : -0.5;
                high += sym;
            }
            detail::record_majority(inst, high);
        }
    inst.perm = detail::identity_perm(n);  // one permutation shared by all blocks
    rng.shuffle(inst.perm);

    Matrix raw(n_eff, k * r);
    for (size_t i = 0; i < k; ++i) {
        for (size_t row = 0; row < n_eff; ++row) {
            double v = 0.5 * detail::hadamard_entry(i + 1, row);
            for (size_t j = 0; j < r; ++j) raw(row, i * r + j) = 2.0 + v;
        }
        for (size_t a = 0; a < n; ++a) {
            size_t row = inst.perm[a];
            for (size_t j = 0; j < r; ++j) raw(row, i * r + j) += signs[(i * n + a) * r + j];
        }
    }

    if (!symmetric) {
        inst.matrix = std::move(raw);
        return inst;
    }

    const size_t copies = n_eff / (k * r);
    auto f = [&](double t) { return inst.params.scale * t + inst.params.shift; };
    inst.matrix = Matrix(2 * n_eff, 2 * n_eff);
    for (size_t g = 0; g < 2; ++g)
        for (size_t a = 0; a < n_eff; ++a)
            for (size_t b = 0; b < n_eff; ++b)
                inst.matrix(g * n_eff + a, g * n_eff + b) = (a == b) ? 0.0 : 1.0;
    for (size_t a = 0; a < n_eff; ++a)
        for (size_t c = 0; c < copies; ++c)
            for (size_t col = 0; col < k * r; ++col) {
                double v = f(raw(a, col));
                inst.matrix(n_eff + a, c * k * r + col) = v;
                inst.matrix(c * k * r + col, n_eff + a) = v;
            }
    return inst;
}

}  // namespace detail

inline HardInstance gen_k_block(size_t n, size_t k, double eps, double beta, double C,
                                uint64_t seed) {
    return detail::gen_k_block_common(n, k, eps, beta, C, seed, /*symmetric=*/false);
}

inline HardInstance gen_symmetric_k_block(size_t n, size_t k, double eps, double beta, double C,
                                          uint64_t seed) {
    return detail::gen_k_block_common(n, k, eps, beta, C, seed, /*symmetric=*/true);
}

// Largest margin gamma such that a uniformly random length-r two-symbol string
// has majority count >= r/2 + gamma*sqrt(r) with probability >= 1 - delta,
// from exact binomial tails. Can be 0 (small r: the central atom alone
// outweighs delta and no positive margin clears it).
inline double typical_gamma(size_t r, double delta) {
    if (r == 0) throw InvalidInput("hardgen: r must be positive");
    if (delta <= 0.0 || delta >= 1.0) throw InvalidInput("hardgen: delta must be in (0,1)");
    // pmf[j] = C(r, j) / 2^r via lgamma, accurate to ~1e-14 for r <= a few thousand
    std::vector<long double> pmf(r + 1);
    long double lg_r = std::lgamma(static_cast<long double>(r) + 1.0L);
    for (size_t j = 0; j <= r; ++j) {
        long double lg = lg_r - std::lgamma(static_cast<long double>(j) + 1.0L) -
                         std::lgamma(static_cast<long double>(r - j) + 1.0L) -
                         static_cast<long double>(r) * std::log(2.0L);
        pmf[j] = std::exp(lg);
    }
    // majority count of X ~ Bin(r, 1/2) is max(X, r-X); scan thresholds c from
    // the largest down, tracking P[max(X, r-X) >= c]
    size_t c_min = (r + 1) / 2;  // smallest possible majority count
    long double prob = 0.0L;
    double best = -1.0;
    for (size_t c = r + 1; c-- > c_min;) {
        prob += pmf[c];
        if (c != r - c) prob += pmf[r - c];
        if (static_cast<double>(prob) >= 1.0 - delta) {
            best = (static_cast<double>(c) - static_cast<double>(r) / 2.0) /
                   std::sqrt(static_cast<double>(r));
            break;
        }
    }
    if (best < 0.0)
        throw CheckFailed("hardgen: no achievable majority margin for this delta");
    return best;
}

// Counts embedded instances whose majority symbol appears at least
// r/2 + gamma*sqrt(r) times.
inline TypicalityReport typicality(const HardInstance& inst, double gamma) {
    if (gamma < 0.0) throw InvalidInput("hardgen: gamma must be nonnegative");
    TypicalityReport rep;
    rep.gamma = gamma;
    rep.total = inst.instance_count();
    double threshold = static_cast<double>(inst.params.r) / 2.0 +
                       gamma * std::sqrt(static_cast<double>(inst.params.r));
    for (size_t cnt : inst.majority_counts)
        if (static_cast<double>(cnt) >= threshold) ++rep.typical_count;
    return rep;
}

namespace detail {

struct DecodeView {
    size_t row;        // matrix row holding the instance
    size_t col0;       // first column of its block
    size_t ncols;      // columns to average
    double threshold;  // mean <= threshold -> low symbol
};

inline DecodeView decode_view(const HardInstance& inst, size_t block, size_t slot) {
    const auto& p = inst.params;
    DecodeView v{};
    switch (inst.kind) {
        case HardKind::bipartite_k1:
            v.row = inst.perm[slot];
            v.col0 = 0;
            v.ncols = p.r;
            v.threshold = 1.5;
            break;
        case HardKind::symmetric_k1:
            v.row = p.n + inst.perm[slot];
            v.col0 = 0;
            v.ncols = p.n;  // all horizontal copies; same mean as one copy
            v.threshold = p.scale * 1.5 + p.shift;
            break;
        case HardKind::bipartite_k_block:
            v.row = inst.perm[slot];
            v.col0 = block * p.r;
            v.ncols = p.r;
            v.threshold = 2.0 + 0.5 * hadamard_entry(block + 1, v.row);
            break;
        case HardKind::symmetric_k_block: {
            size_t inner = inst.perm[slot];
            v.row = p.n_eff + inner;
            v.col0 = block * p.r;  // first horizontal copy
            v.ncols = p.r;
            v.threshold = p.scale * (2.0 + 0.5 * hadamard_entry(block + 1, inner)) + p.shift;
            break;
        }
    }
    return v;
}

}  // namespace detail

// Predict each embedded instance's majority from the row means of a composed
// low-rank approximation; success_rate counts only instances with a strict
// ground-truth majority.
inline DecodeResult decode_majorities(const HardInstance& inst, const Factors& f) {
    Matrix approx = compose_dense(f);
    if (approx.rows() != inst.matrix.rows() || approx.cols() != inst.matrix.cols())
        throw InvalidInput("hardgen: factors do not match the instance shape");
    DecodeResult res;
    res.bits.reserve(inst.instance_count());
    for (size_t i = 0; i < inst.params.k; ++i)
        for (size_t a = 0; a < inst.params.n; ++a) {
            auto view = detail::decode_view(inst, i, a);
            double mean = 0.0;
            for (size_t j = 0; j < view.ncols; ++j) mean += approx(view.row, view.col0 + j);
            mean /= static_cast<double>(view.ncols);
            int bit = mean <= view.threshold ? 1 : 2;
            res.bits.push_back(bit);
            int truth = inst.majorities[i * inst.params.n + a];
            if (truth != 0) {
                ++res.decided;
                if (bit == truth) ++res.correct;
            }
        }
    res.success_rate =
        res.decided ? static_cast<double>(res.correct) / static_cast<double>(res.decided) : 0.0;
    return res;
}

// Re-derive the ground truth from the stored matrix alone (inverting the
// permutation and affine map); must reproduce `majorities` exactly.
inline std::vector<int> recompute_majorities(const HardInstance& inst) {
    std::vector<int> out;
    out.reserve(inst.instance_count());
    for (size_t i = 0; i < inst.params.k; ++i)
        for (size_t a = 0; a < inst.params.n; ++a) {
            auto view = detail::decode_view(inst, i, a);
            size_t r = inst.params.r;
            size_t high = 0;
            for (size_t j = 0; j < r; ++j) {
                double v = inst.matrix(view.row, view.col0 + j);
                if (v > view.threshold) ++high;
            }
            size_t low = r - high;
            out.push_back(high > low ? 2 : (low > high ? 1 : 0));
        }
    return out;
}

inline nlohmann::json hard_instance_meta_json(const HardInstance& inst) {
    const auto& p = inst.params;
    return {{"kind", hard_kind_name(inst.kind)},
            {"params",
             {{"n", p.n},
              {"r", p.r},
              {"k", p.k},
              {"C", p.C},
              {"beta", p.beta},
              {"eps", p.eps},
              {"M", p.M},
              {"scale", p.scale},
              {"shift", p.shift},
              {"n_eff", p.n_eff}}},
            {"perm", inst.perm},
            {"majorities", inst.majorities},
            {"majority_counts", inst.majority_counts}};
}

inline HardInstance hard_instance_from_parts(Matrix matrix, const nlohmann::json& meta) {
    HardInstance inst;
    try {
        inst.kind = parse_hard_kind(meta.at("kind").get<std::string>());
        const auto& p = meta.at("params");
        inst.params.n = p.at("n").get<size_t>();
        inst.params.r = p.at("r").get<size_t>();
        inst.params.k = p.at("k").get<size_t>();
        inst.params.C = p.at("C").get<double>();
        inst.params.beta = p.at("beta").get<double>();
        inst.params.eps = p.at("eps").get<double>();
        inst.params.M = p.at("M").get<double>();
        inst.params.scale = p.at("scale").get<double>();
        inst.params.shift = p.at("shift").get<double>();
        inst.params.n_eff = p.at("n_eff").get<size_t>();
        inst.perm = meta.at("perm").get<std::vector<size_t>>();
        inst.majorities = meta.at("majorities").get<std::vector<int>>();
        inst.majority_counts = meta.at("majority_counts").get<std::vector<size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("hardgen: bad instance metadata: ") + e.what());
    }
    inst.matrix = std::move(matrix);
    if (inst.perm.size() != inst.params.n || inst.majorities.size() != inst.instance_count() ||
        inst.majority_counts.size() != inst.instance_count())
        throw InvalidInput("hardgen: metadata sizes do not match params");
    return inst;
}

}  // namespace distmat
