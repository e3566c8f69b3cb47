#pragma once

#include <cmath>
#include <vector>

#include "distmat/common.hpp"
#include "distmat/matrix.hpp"
#include "distmat/oracle.hpp"
#include "distmat/sketch.hpp"
#include "distmat/svd.hpp"
#include "distmat/weights.hpp"

namespace distmat {

// Left factor of the approximation A ~= V * U.
struct LeftFactor {
    Matrix v;                  // n x k
    std::vector<size_t> cols;  // sampled column indices (with multiplicity)
};

struct Factors {
    Matrix v;  // n x k
    Matrix u;  // k x m, row-orthonormal
};

namespace detail {

// Moore-Penrose pseudo-inverse via the dense SVD; minimum-norm solutions
// for rank-deficient systems.
inline Matrix pinv(const Matrix& m, double rcond = 1e-12) {
    SvdResult s = small_svd(m);
    size_t p = s.sigma.size();
    double cutoff = s.sigma.empty() ? 0.0 : s.sigma[0] * rcond;
    Matrix out(m.cols(), m.rows(), 0.0);
    for (size_t t = 0; t < p; ++t) {
        if (s.sigma[t] <= cutoff || s.sigma[t] == 0.0) continue;
        double inv = 1.0 / s.sigma[t];
        for (size_t i = 0; i < m.cols(); ++i) {
            double vi = s.v(i, t) * inv;
            if (vi == 0.0) continue;
            for (size_t j = 0; j < m.rows(); ++j) out(i, j) += vi * s.u(j, t);
        }
    }
    return out;
}

}  // namespace detail

// Column-sampled ridgeless regression of A onto the row space of U.
// Columns are drawn from the exact leverage distribution of the
// row-orthonormal U, q_j = ||U[:,j]||^2 / k (free: U is already in hand),
// both sides are rescaled by 1/sqrt(t q_j), and every row of V solves the
// same t-column least-squares system through one shared pseudo-inverse.
// Charges exactly n*t regression reads. Zero-mass columns are never drawn.
inline LeftFactor fit_left_factor(const DistanceOracle& oracle, const RightFactor& right,
                                  const SketchConfig& cfg, RngStream& rng, int threads = 1) {
    cfg.validate();
    size_t n = oracle.rows(), m = oracle.cols();
    size_t k = right.u.rows();
    if (right.u.cols() != m) throw InvalidInput("fit_left_factor: U/oracle shape mismatch");
    size_t t = cfg.sample_cols_count();

    // exact column leverage scores of U; they sum to 1
    std::vector<double> q(m, 0.0);
    for (size_t r = 0; r < k; ++r)
        for (size_t j = 0; j < m; ++j) q[j] += right.u(r, j) * right.u(r, j);
    for (double& v : q) v /= static_cast<double>(k);

    DiscreteSampler sampler(q);
    LeftFactor out;
    out.cols.resize(t);
    for (size_t c = 0; c < t; ++c) out.cols[c] = sampler.draw(rng);

    // rescaled sampled system: B = U_S D (k x t), solved once
    Matrix b(k, t);
    std::vector<double> scale(t);
    for (size_t c = 0; c < t; ++c) {
        size_t j = out.cols[c];
        scale[c] = 1.0 / std::sqrt(static_cast<double>(t) * q[j]);
        for (size_t r = 0; r < k; ++r) b(r, c) = right.u(r, j) * scale[c];
    }
    Matrix bp = detail::pinv(b);  // t x k

    // V[i,:] = (A_S[i,:] D) * pinv(U_S D); rows are independent solves
    out.v = Matrix(n, k, 0.0);
    parallel_for(n, threads, [&](size_t lo, size_t hi) {
        std::vector<double> arow(t);
        for (size_t i = lo; i < hi; ++i) {
            for (size_t c = 0; c < t; ++c)
                arow[c] = oracle.entry(i, out.cols[c], Stage::regression) * scale[c];
            for (size_t r = 0; r < k; ++r) {
                double acc = 0.0;
                for (size_t c = 0; c < t; ++c) acc += arow[c] * bp(c, r);
                out.v(i, r) = acc;
            }
        }
    });
    return out;
}

inline Factors compose(const LeftFactor& left, const RightFactor& right) {
    if (left.v.cols() != right.u.rows()) throw InvalidInput("compose: k mismatch");
    return Factors{left.v, right.u};
}

// Dense n x m product V * U.
inline Matrix compose_dense(const Factors& f) { return matmul(f.v, f.u); }

}  // namespace distmat
