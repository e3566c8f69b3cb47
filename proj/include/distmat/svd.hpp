#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "distmat/common.hpp"
#include "distmat/matrix.hpp"

namespace distmat {

// Thin SVD: m = u * diag(sigma) * v^T, sigma descending, u and v with
// orthonormal columns (p = min(rows, cols) of them each).
struct SvdResult {
    Matrix u;
    std::vector<double> sigma;
    Matrix v;
};

namespace detail {

// One-sided Jacobi on the columns of x (col-major buffer, rows x cols):
// rotates column pairs until all are mutually orthogonal, accumulating
// the rotations in v (cols x cols, col-major). On exit x = u * sigma.
inline void jacobi_orthogonalize(std::vector<double>& x, std::vector<double>& v,
                                 size_t rows, size_t cols) {
    const double tol = 1e-14;
    const int max_sweeps = 60;
    std::vector<double> colsq(cols);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // fresh norms each sweep: incremental updates drift on the
        // near-null columns of rank-deficient inputs
        for (size_t j = 0; j < cols; ++j) {
            const double* cj = x.data() + j * rows;
            double s = 0.0;
            for (size_t r = 0; r < rows; ++r) s += cj[r] * cj[r];
            colsq[j] = s;
        }
        bool rotated = false;
        for (size_t p = 0; p + 1 < cols; ++p) {
            for (size_t q = p + 1; q < cols; ++q) {
                double* cp = x.data() + p * rows;
                double* cq = x.data() + q * rows;
                double apq = 0.0;
                for (size_t r = 0; r < rows; ++r) apq += cp[r] * cq[r];
                double app = colsq[p], aqq = colsq[q];
                if (std::fabs(apq) <= tol * std::sqrt(app * aqq)) continue;
                rotated = true;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (size_t r = 0; r < rows; ++r) {
                    double xp = cp[r], xq = cq[r];
                    cp[r] = c * xp - s * xq;
                    cq[r] = s * xp + c * xq;
                }
                double* vp = v.data() + p * cols;
                double* vq = v.data() + q * cols;
                for (size_t r = 0; r < cols; ++r) {
                    double yp = vp[r], yq = vq[r];
                    vp[r] = c * yp - s * yq;
                    vq[r] = s * yp + c * yq;
                }
                colsq[p] = app - t * apq;
                colsq[q] = aqq + t * apq;
            }
        }
        if (!rotated) return;
    }
}

// Orthonormal completion: replaces columns js of u (rows x cols, row-major
// Matrix) with vectors orthogonal to all other columns, sourced from the
// standard basis. Used for exactly-degenerate directions (sigma == 0-ish).
// For each slot the best-exposed basis vector is chosen; if d directions
// are missing from a span of dimension rows, the best residual norm is
// at least sqrt(d/rows), so valid slots always find a candidate.
inline void complete_orthonormal_columns(Matrix& u, const std::vector<size_t>& js) {
    size_t rows = u.rows(), cols = u.cols();
    for (size_t target : js) {
        std::vector<double> best;
        double best_nrm = -1.0;
        for (size_t b = 0; b < rows; ++b) {
            std::vector<double> cand(rows, 0.0);
            cand[b] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (size_t j = 0; j < cols; ++j) {
                    if (j == target) continue;
                    bool j_pending = false;
                    for (size_t other : js)
                        if (other == j && other > target) j_pending = true;
                    if (j_pending) continue;
                    double dot = 0.0;
                    for (size_t r = 0; r < rows; ++r) dot += cand[r] * u(r, j);
                    for (size_t r = 0; r < rows; ++r) cand[r] -= dot * u(r, j);
                }
            }
            double nrm = 0.0;
            for (double cv : cand) nrm += cv * cv;
            nrm = std::sqrt(nrm);
            if (nrm > best_nrm) {
                best_nrm = nrm;
                best = std::move(cand);
            }
            if (best_nrm > 0.7) break;  // good enough, skip the rest
        }
        if (best_nrm < 0.5 / std::sqrt(static_cast<double>(rows)))
            throw CheckFailed("svd: could not complete orthonormal basis");
        for (size_t r = 0; r < rows; ++r) u(r, target) = best[r] / best_nrm;
    }
}

}  // namespace detail

inline SvdResult small_svd(const Matrix& m) {
    size_t rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0) throw InvalidInput("small_svd: empty matrix");
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j)
            if (!std::isfinite(m(i, j))) throw InvalidInput("small_svd: non-finite entry");

    // Rotate columns of the tall orientation; transpose swaps u and v.
    bool flipped = rows < cols;
    size_t n = flipped ? cols : rows;  // tall rows
    size_t p = flipped ? rows : cols;  // tall cols = min(rows, cols)

    std::vector<double> x(n * p);
    for (size_t j = 0; j < p; ++j)
        for (size_t i = 0; i < n; ++i)
            x[j * n + i] = flipped ? m(j, i) : m(i, j);
    std::vector<double> vacc(p * p, 0.0);
    for (size_t j = 0; j < p; ++j) vacc[j * p + j] = 1.0;

    detail::jacobi_orthogonalize(x, vacc, n, p);

    std::vector<double> sigma(p);
    for (size_t j = 0; j < p; ++j) {
        double s = 0.0;
        const double* cj = x.data() + j * n;
        for (size_t i = 0; i < n; ++i) s += cj[i] * cj[i];
        sigma[j] = std::sqrt(s);
    }
    std::vector<size_t> order(p);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return sigma[a] > sigma[b]; });

    Matrix tall_u(n, p);   // normalized rotated columns
    Matrix small_v(p, p);  // accumulated rotations
    std::vector<double> sorted_sigma(p);
    double smax = sigma.empty() ? 0.0 : sigma[order[0]];
    // degeneracy cutoff at backward-error scale: directions below it carry
    // no reliable information and are replaced by an orthonormal completion
    double drop = smax * static_cast<double>(n) * 1e-15;
    std::vector<size_t> degenerate;
    for (size_t jj = 0; jj < p; ++jj) {
        size_t j = order[jj];
        sorted_sigma[jj] = sigma[j];
        for (size_t r = 0; r < p; ++r) small_v(r, jj) = vacc[j * p + r];
        if (sigma[j] <= drop) {
            degenerate.push_back(jj);
            continue;
        }
        const double* cj = x.data() + j * n;
        for (size_t i = 0; i < n; ++i) tall_u(i, jj) = cj[i] / sigma[j];
    }
    if (!degenerate.empty()) detail::complete_orthonormal_columns(tall_u, degenerate);

    SvdResult out;
    out.sigma = std::move(sorted_sigma);
    if (flipped) {
        out.u = std::move(small_v);
        out.v = std::move(tall_u);
    } else {
        out.u = std::move(tall_u);
        out.v = std::move(small_v);
    }
    return out;
}

// Sum of the squared singular values past the first k: ||m - m_k||_F^2.
inline double tail_energy(const SvdResult& s, size_t k) {
    double acc = 0.0;
    for (size_t i = k; i < s.sigma.size(); ++i) acc += s.sigma[i] * s.sigma[i];
    return acc;
}

}  // namespace distmat
