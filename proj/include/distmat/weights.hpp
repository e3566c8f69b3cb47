#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "distmat/common.hpp"
#include "distmat/oracle.hpp"

namespace distmat {

// Row-importance weights for length-squared style row sampling.
struct RowWeights {
    std::vector<double> raw;         // unnormalized weights, >= 0
    std::vector<double> normalized;  // sums to 1; uniform fallback if raw is all zero
    size_t istar = 0;                // anchor row
    std::optional<size_t> jstar;     // anchor column (bipartite estimator only)
    uint64_t reads_used = 0;         // oracle entries paid for by this estimate
};

// Test hook: pin one or both anchors instead of drawing them. Pinned
// anchors consume no randomness; draw order is i* then j*.
struct AnchorOverride {
    std::optional<size_t> istar;
    std::optional<size_t> jstar;
};

namespace detail {
inline void normalize_weights(RowWeights& w) {
    double total = 0.0;
    for (double v : w.raw) total += v;
    w.normalized.resize(w.raw.size());
    if (total <= 0.0) {
        // all-zero matrix: degenerate but valid; fall back to uniform
        double u = 1.0 / static_cast<double>(w.raw.size());
        std::fill(w.normalized.begin(), w.normalized.end(), u);
        return;
    }
    for (size_t i = 0; i < w.raw.size(); ++i) w.normalized[i] = w.raw[i] / total;
}
}  // namespace detail

// One-anchor row weights: raw[i] = A[i,j*]^2 + A[i*,j*]^2 + mean_j A[i*,j]^2.
// Reads row i* then column j*: exactly n + m ledger charges (the shared
// entry's value enters two terms but is re-read, keeping the count exact).
// Guarantees sum_j A[i,j]^2 <= 4m * raw[i] for every i and any anchors.
inline RowWeights estimate_row_weights(const DistanceOracle& oracle, RngStream& rng,
                                       const AnchorOverride& force = {}) {
    size_t n = oracle.rows(), m = oracle.cols();
    if (n == 0 || m == 0) throw InvalidInput("estimate_row_weights: empty oracle");
    RowWeights w;
    w.istar = force.istar ? *force.istar : rng.uniform_index(n);
    size_t jstar = force.jstar ? *force.jstar : rng.uniform_index(m);
    if (w.istar >= n || jstar >= m)
        throw InvalidInput("estimate_row_weights: forced anchor out of range");
    w.jstar = jstar;

    double anchor_row_sq_sum = 0.0;
    double shared_sq = 0.0;
    for (size_t j = 0; j < m; ++j) {
        double v = oracle.entry(w.istar, j, Stage::weights);
        anchor_row_sq_sum += v * v;
        if (j == jstar) shared_sq = v * v;
    }
    double mean_sq = anchor_row_sq_sum / static_cast<double>(m);

    w.raw.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double v = oracle.entry(i, jstar, Stage::weights);
        w.raw[i] = v * v + shared_sq + mean_sq;
    }
    w.reads_used = static_cast<uint64_t>(n) + m;
    detail::normalize_weights(w);
    return w;
}

// Symmetric simplification: one anchor row only,
// raw[i] = A[i,i*]^2 + mean_j A[i*,j]^2, read from the single anchor row
// (n ledger charges). Guarantees sum_j A[i,j]^2 <= 2n * raw[i].
inline RowWeights estimate_row_weights_symmetric(const DistanceOracle& oracle, RngStream& rng,
                                                 std::optional<size_t> force_istar = {}) {
    if (!oracle.symmetric())
        throw InvalidInput("estimate_row_weights_symmetric: oracle is not symmetric");
    size_t n = oracle.rows();
    RowWeights w;
    w.istar = force_istar ? *force_istar : rng.uniform_index(n);
    if (w.istar >= n)
        throw InvalidInput("estimate_row_weights_symmetric: forced anchor out of range");

    std::vector<double> anchor(n);
    double sq_sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        anchor[j] = oracle.entry(w.istar, j, Stage::weights);
        sq_sum += anchor[j] * anchor[j];
    }
    double mean_sq = sq_sum / static_cast<double>(n);

    w.raw.resize(n);
    for (size_t i = 0; i < n; ++i) w.raw[i] = anchor[i] * anchor[i] + mean_sq;
    w.reads_used = n;
    detail::normalize_weights(w);
    return w;
}

// Inverse-CDF sampler over a fixed discrete distribution; zero-mass
// indices are never drawn (zero-width CDF steps are skipped by the
// strict upper bound).
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& probs) {
        if (probs.empty()) throw InvalidInput("DiscreteSampler: empty distribution");
        cdf_.resize(probs.size());
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] < 0.0) throw InvalidInput("DiscreteSampler: negative mass");
            acc += probs[i];
            cdf_[i] = acc;
        }
        if (acc <= 0.0) throw InvalidInput("DiscreteSampler: zero total mass");
        for (double& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    size_t draw(RngStream& rng) const {
        double u = rng.uniform01();
        return static_cast<size_t>(
            std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

// s i.i.d. draws from weights.normalized; consumes exactly s uniforms.
inline std::vector<size_t> sample_rows(const RowWeights& weights, size_t s, RngStream& rng) {
    if (s == 0) throw InvalidInput("sample_rows: need s >= 1");
    DiscreteSampler sampler(weights.normalized);
    std::vector<size_t> out(s);
    for (size_t i = 0; i < s; ++i) out[i] = sampler.draw(rng);
    return out;
}

}  // namespace distmat
