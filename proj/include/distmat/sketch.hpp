#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "distmat/common.hpp"
#include "distmat/matrix.hpp"
#include "distmat/oracle.hpp"
#include "distmat/svd.hpp"
#include "distmat/weights.hpp"

namespace distmat {

struct SketchConfig {
    size_t k = 1;
    double eps = 0.5;
    double c_r = 4.0;  // row oversampling factor
    double c_c = 4.0;  // column oversampling factor

    // Stress hooks (0 = off): force the sampled-row / sampled-column
    // budgets, bypassing the k-floor. Used by budget-ablation tests.
    size_t rows_override = 0;
    size_t cols_override = 0;

    void validate() const {
        if (k < 1) throw InvalidInput("SketchConfig: k >= 1 required");
        if (!(eps > 0.0)) throw InvalidInput("SketchConfig: eps > 0 required");
        if (c_r < 1.0 || c_c < 1.0) throw InvalidInput("SketchConfig: c_r, c_c >= 1 required");
    }
    size_t sample_rows_count() const {
        if (rows_override) return rows_override;
        double s = std::ceil(c_r * static_cast<double>(k) / eps);
        return std::max<size_t>(k, static_cast<size_t>(s));
    }
    size_t sample_cols_count() const {
        if (cols_override) return cols_override;
        double t = std::ceil(c_c * static_cast<double>(k) / eps);
        return std::max<size_t>(k, static_cast<size_t>(t));
    }
};

// Row-orthonormal right factor: U is k x m with U U^T = I_k.
struct RightFactor {
    Matrix u;                  // k x m
    std::vector<size_t> rows;  // sampled row indices (with multiplicity)
    std::vector<size_t> cols;  // sampled column indices within the sketch
};

namespace detail {

// In-place modified Gram-Schmidt of row `target` of u against rows [0,target);
// two passes for numerical grip. Returns the residual norm.
inline double orthogonalize_row(Matrix& u, size_t target) {
    size_t m = u.cols();
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t r = 0; r < target; ++r) {
            double dot = 0.0;
            for (size_t j = 0; j < m; ++j) dot += u(target, j) * u(r, j);
            for (size_t j = 0; j < m; ++j) u(target, j) -= dot * u(r, j);
        }
    }
    double nrm = 0.0;
    for (size_t j = 0; j < m; ++j) nrm += u(target, j) * u(target, j);
    return std::sqrt(nrm);
}

// Fills row `target` with the best-exposed standard-basis vector
// orthogonalized against all previous rows; used when the sketch carries
// fewer than k directions. The max residual over basis vectors is at
// least sqrt(1/m) whenever a direction is genuinely missing.
inline void complete_row_with_basis(Matrix& u, size_t target) {
    size_t m = u.cols();
    std::vector<double> best;
    double best_nrm = -1.0;
    for (size_t b = 0; b < m; ++b) {
        for (size_t j = 0; j < m; ++j) u(target, j) = (j == b) ? 1.0 : 0.0;
        double nrm = orthogonalize_row(u, target);
        if (nrm > best_nrm) {
            best_nrm = nrm;
            best.assign(u.row(target), u.row(target) + m);
        }
        if (best_nrm > 0.7) break;
    }
    if (best_nrm < 0.5 / std::sqrt(static_cast<double>(m)))
        throw CheckFailed("build_right_factor: cannot complete orthonormal rows (k > m?)");
    for (size_t j = 0; j < m; ++j) u(target, j) = best[j] / best_nrm;
}

}  // namespace detail

// Sampled sketch of the oracle's row space. Draws s rows from `weights`
// (consuming s draws, then t column draws, in that order), rescales to an
// s x m sketch W, subsamples t columns by squared norm into W', and lifts
// the top-k left singular vectors of W' through W. Charges exactly s*m
// sketch reads. The result always has exactly orthonormal rows; degenerate
// directions fall back to standard-basis completions (zero matrix: rows
// e_0..e_{k-1}).
inline RightFactor build_right_factor(const DistanceOracle& oracle, const RowWeights& weights,
                                      const SketchConfig& cfg, RngStream& rng) {
    cfg.validate();
    size_t n = oracle.rows(), m = oracle.cols();
    if (weights.normalized.size() != n)
        throw InvalidInput("build_right_factor: weights/oracle size mismatch");
    if (cfg.k > std::min(n, m))
        throw InvalidInput("build_right_factor: k exceeds min(n, m)");
    size_t s = cfg.sample_rows_count();
    size_t t = cfg.sample_cols_count();

    RightFactor out;
    out.rows = sample_rows(weights, s, rng);

    // W: rescaled sampled rows (s*m sketch reads, duplicates re-read)
    Matrix w(s, m);
    for (size_t l = 0; l < s; ++l) {
        size_t i = out.rows[l];
        double p = weights.normalized[i];
        double scale = p > 0.0 ? 1.0 / std::sqrt(static_cast<double>(s) * p) : 0.0;
        for (size_t j = 0; j < m; ++j)
            w(l, j) = scale * oracle.entry(i, j, Stage::sketch);
    }

    std::vector<double> colsq(m, 0.0);
    double wtotal = 0.0;
    for (size_t l = 0; l < s; ++l)
        for (size_t j = 0; j < m; ++j) {
            double v = w(l, j);
            colsq[j] += v * v;
            wtotal += v * v;
        }

    out.u = Matrix(cfg.k, m, 0.0);
    if (wtotal <= 0.0) {
        // all-zero sketch (e.g. zero matrix): deterministic standard basis
        for (size_t i = 0; i < cfg.k; ++i) out.u(i, i) = 1.0;
        return out;
    }

    std::vector<double> q(m);
    for (size_t j = 0; j < m; ++j) q[j] = colsq[j] / wtotal;
    DiscreteSampler colsampler(q);
    out.cols.resize(t);
    for (size_t c = 0; c < t; ++c) out.cols[c] = colsampler.draw(rng);

    Matrix wp(s, t);
    for (size_t c = 0; c < t; ++c) {
        size_t j = out.cols[c];
        double scale = 1.0 / std::sqrt(static_cast<double>(t) * q[j]);
        for (size_t l = 0; l < s; ++l) wp(l, c) = scale * w(l, j);
    }

    SvdResult svd = small_svd(wp);
    double sig_floor = svd.sigma[0] * 1e-12;

    // rows of U: y_i = u_i^T W, normalized then re-orthonormalized
    size_t usable = std::min(cfg.k, svd.sigma.size());
    for (size_t i = 0; i < cfg.k; ++i) {
        bool degenerate = i >= usable || svd.sigma[i] <= sig_floor;
        if (!degenerate) {
            for (size_t j = 0; j < m; ++j) {
                double acc = 0.0;
                for (size_t l = 0; l < s; ++l) acc += svd.u(l, i) * w(l, j);
                out.u(i, j) = acc;
            }
            double raw_norm = 0.0;
            for (size_t j = 0; j < m; ++j) raw_norm += out.u(i, j) * out.u(i, j);
            raw_norm = std::sqrt(raw_norm);
            if (raw_norm <= 0.0) {
                degenerate = true;
            } else {
                double res = detail::orthogonalize_row(out.u, i);
                if (res <= 1e-10 * raw_norm) {
                    degenerate = true;
                } else {
                    for (size_t j = 0; j < m; ++j) out.u(i, j) /= res;
                }
            }
        }
        if (degenerate) detail::complete_row_with_basis(out.u, i);
    }
    return out;
}

// ||a - a U^T U||_F^2 for a dense a; evaluation helper shared by tests
// and reports.
inline double projection_residual_sq(const Matrix& a, const Matrix& u) {
    if (a.cols() != u.cols()) throw InvalidInput("projection_residual_sq: shape mismatch");
    size_t n = a.rows(), m = a.cols(), k = u.rows();
    double acc = 0.0;
    std::vector<double> coef(k);
    for (size_t i = 0; i < n; ++i) {
        const double* ar = a.row(i);
        for (size_t r = 0; r < k; ++r) {
            double d = 0.0;
            for (size_t j = 0; j < m; ++j) d += ar[j] * u(r, j);
            coef[r] = d;
        }
        for (size_t j = 0; j < m; ++j) {
            double rec = 0.0;
            for (size_t r = 0; r < k; ++r) rec += coef[r] * u(r, j);
            double diff = ar[j] - rec;
            acc += diff * diff;
        }
    }
    return acc;
}

}  // namespace distmat
