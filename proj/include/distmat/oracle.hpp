#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "distmat/common.hpp"
#include "distmat/matrix.hpp"
#include "distmat/metric.hpp"

namespace distmat {

// Which pipeline stage pays for a read.
enum class Stage { weights, sketch, regression, eval };

struct LedgerCounts {
    uint64_t weights_reads = 0;
    uint64_t sketch_reads = 0;
    uint64_t regression_reads = 0;
    uint64_t eval_reads = 0;

    uint64_t total() const {
        return weights_reads + sketch_reads + regression_reads + eval_reads;
    }
    // Reads the approximation algorithm itself paid for; evaluation
    // (materialize) is bookkeeping outside the sublinear budget.
    uint64_t algo() const { return total() - eval_reads; }
};

// Monotone counters; concurrent entry() calls may increment them from
// several threads, so they are atomics. Snapshots are plain values.
class QueryLedger {
public:
    void add(Stage s, uint64_t k = 1) {
        switch (s) {
            case Stage::weights: w_.fetch_add(k, std::memory_order_relaxed); break;
            case Stage::sketch: s_.fetch_add(k, std::memory_order_relaxed); break;
            case Stage::regression: r_.fetch_add(k, std::memory_order_relaxed); break;
            case Stage::eval: e_.fetch_add(k, std::memory_order_relaxed); break;
        }
    }
    LedgerCounts snapshot() const {
        LedgerCounts c;
        c.weights_reads = w_.load(std::memory_order_relaxed);
        c.sketch_reads = s_.load(std::memory_order_relaxed);
        c.regression_reads = r_.load(std::memory_order_relaxed);
        c.eval_reads = e_.load(std::memory_order_relaxed);
        return c;
    }

private:
    std::atomic<uint64_t> w_{0}, s_{0}, r_{0}, e_{0};
};

// Metered access to a distance matrix A[i][j] = d(x_i, y_j). Entries are
// computed on demand from points, or served from a dense matrix; either
// way every entry() call is charged to the ledger. Shareable across
// concurrent readers.
class DistanceOracle {
public:
    static DistanceOracle from_points(PointSet left, PointSet right, MetricKind kind) {
        DistanceOracle o;
        o.kind_ = kind;
        o.has_metric_ = true;
        o.symmetric_ = (left == right);
        validate_points(left, kind);
        if (!o.symmetric_) validate_points(right, kind);
        o.left_ = std::make_shared<const PointSet>(std::move(left));
        o.right_ = o.symmetric_ ? o.left_ : std::make_shared<const PointSet>(std::move(right));
        if (o.left_->d != o.right_->d)
            throw InvalidInput("oracle: left/right dimension mismatch");
        o.rows_ = o.left_->n;
        o.cols_ = o.right_->n;
        return o;
    }

    static DistanceOracle from_points(PointSet pts, MetricKind kind) {
        DistanceOracle o;
        o.kind_ = kind;
        o.has_metric_ = true;
        o.symmetric_ = true;
        validate_points(pts, kind);
        o.left_ = std::make_shared<const PointSet>(std::move(pts));
        o.right_ = o.left_;
        o.rows_ = o.left_->n;
        o.cols_ = o.left_->n;
        return o;
    }

    // Symmetric flag requires an actual self-distance matrix shape:
    // square, symmetric content, zero diagonal.
    static DistanceOracle from_matrix(Matrix m) {
        DistanceOracle o;
        o.rows_ = m.rows();
        o.cols_ = m.cols();
        o.symmetric_ = detect_symmetric(m);
        o.dense_ = std::make_shared<const Matrix>(std::move(m));
        return o;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool symmetric() const { return symmetric_; }
    bool dense_backed() const { return dense_ != nullptr; }
    MetricKind metric() const {
        if (!has_metric_) throw InvalidInput("oracle: dense-backed, no metric kind");
        return kind_;
    }
    std::string metric_label() const { return has_metric_ ? metric_name(kind_) : "dense"; }

    double entry(size_t i, size_t j, Stage stage = Stage::eval) const {
        if (i >= rows_ || j >= cols_)
            throw InvalidInput("oracle: entry index out of range");
        ledger_->add(stage);
        if (dense_) return (*dense_)(i, j);
        return distance(left_->point(i), right_->point(j), kind_);
    }

    const QueryLedger& ledger() const { return *ledger_; }
    QueryLedger& ledger() { return *ledger_; }
    LedgerCounts counts() const { return ledger_->snapshot(); }

private:
    static void validate_points(const PointSet& ps, MetricKind kind) {
        if (ps.n == 0 || ps.d == 0) throw InvalidInput("oracle: empty point set");
        for (double c : ps.coords)
            if (!std::isfinite(c)) throw InvalidInput("oracle: non-finite coordinate");
        if (kind == MetricKind::canberra)
            for (double c : ps.coords)
                if (c < 0.0)
                    throw InvalidInput("oracle: canberra requires nonnegative coordinates");
    }

    static bool detect_symmetric(const Matrix& m) {
        if (m.rows() != m.cols()) return false;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (m(i, i) != 0.0) return false;
            for (size_t j = i + 1; j < m.cols(); ++j)
                if (m(i, j) != m(j, i)) return false;
        }
        return true;
    }

    MetricKind kind_ = MetricKind::euclidean;
    bool has_metric_ = false;
    bool symmetric_ = false;
    size_t rows_ = 0, cols_ = 0;
    std::shared_ptr<const PointSet> left_, right_;
    std::shared_ptr<const Matrix> dense_;
    std::shared_ptr<QueryLedger> ledger_ = std::make_shared<QueryLedger>();
};

// Dense evaluation helper. Refuses to allocate above the cap BEFORE any
// read is charged; charges rows*cols to eval_reads otherwise.
inline Matrix materialize(const DistanceOracle& o, uint64_t cap = 100000000ull,
                          int threads = 1) {
    uint64_t cells = static_cast<uint64_t>(o.rows()) * o.cols();
    if (cells > cap)
        throw CapExceeded("materialize: " + std::to_string(cells) +
                          " entries exceed cap " + std::to_string(cap));
    Matrix m(o.rows(), o.cols());
    parallel_for(o.rows(), threads, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i)
            for (size_t j = 0; j < o.cols(); ++j) m(i, j) = o.entry(i, j, Stage::eval);
    });
    return m;
}

}  // namespace distmat
