#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "distmat/common.hpp"
#include "distmat/matrix.hpp"

namespace distmat {

enum class MetricKind { manhattan, euclidean, chebyshev, canberra };

inline const char* metric_name(MetricKind k) {
    switch (k) {
        case MetricKind::manhattan: return "l1";
        case MetricKind::euclidean: return "l2";
        case MetricKind::chebyshev: return "linf";
        case MetricKind::canberra: return "canberra";
    }
    return "?";
}

inline MetricKind parse_metric(const std::string& s) {
    if (s == "l1" || s == "manhattan") return MetricKind::manhattan;
    if (s == "l2" || s == "euclidean") return MetricKind::euclidean;
    if (s == "linf" || s == "chebyshev") return MetricKind::chebyshev;
    if (s == "canberra") return MetricKind::canberra;
    throw InvalidInput("unknown metric '" + s + "' (expected l1|l2|linf|canberra)");
}

// Pairwise distance. Canberra uses the 0/0-term -> 0 convention and is a
// metric on the nonnegative orthant; callers supplying canberra points are
// validated at oracle construction.
inline double distance(std::span<const double> p, std::span<const double> q, MetricKind kind) {
    if (p.size() != q.size())
        throw InvalidInput("distance: dimension mismatch");
    for (size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]) || !std::isfinite(q[i]))
            throw InvalidInput("distance: non-finite coordinate");
    double acc = 0.0;
    switch (kind) {
        case MetricKind::manhattan:
            for (size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
            return acc;
        case MetricKind::euclidean:
            for (size_t i = 0; i < p.size(); ++i) {
                double d = p[i] - q[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        case MetricKind::chebyshev:
            for (size_t i = 0; i < p.size(); ++i) acc = std::max(acc, std::fabs(p[i] - q[i]));
            return acc;
        case MetricKind::canberra:
            for (size_t i = 0; i < p.size(); ++i) {
                double num = std::fabs(p[i] - q[i]);
                double den = std::fabs(p[i]) + std::fabs(q[i]);
                if (den > 0.0) acc += num / den;
            }
            return acc;
    }
    throw InvalidInput("distance: bad metric kind");
}

// Points stored row-major, one point per row.
struct PointSet {
    size_t n = 0;
    size_t d = 0;
    std::vector<double> coords;

    PointSet() = default;
    PointSet(size_t n_, size_t d_) : n(n_), d(d_), coords(n_ * d_, 0.0) {}

    std::span<const double> point(size_t i) const {
        return {coords.data() + i * d, d};
    }
    double& at(size_t i, size_t j) { return coords[i * d + j]; }
    double at(size_t i, size_t j) const { return coords[i * d + j]; }

    bool operator==(const PointSet& o) const {
        return n == o.n && d == o.d && coords == o.coords;
    }

    // CSV with header x0,...,x{d-1}, one point per line.
    static PointSet from_csv(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw InvalidInput("PointSet::from_csv: cannot open " + path);
        std::string line;
        if (!std::getline(is, line))
            throw InvalidInput("PointSet::from_csv: empty file " + path);
        auto header = detail::split_csv_line(detail::chomp(line), 1);
        size_t dim = header.size();
        for (size_t j = 0; j < dim; ++j)
            if (header[j] != "x" + std::to_string(j))
                throw InvalidInput("PointSet::from_csv: bad header field '" + header[j] +
                                   "' (expected x" + std::to_string(j) + ")");
        std::vector<double> coords;
        size_t lineno = 1, rows = 0;
        while (std::getline(is, line)) {
            ++lineno;
            line = detail::chomp(line);
            if (line.empty()) continue;
            auto fields = detail::split_csv_line(line, lineno);
            if (fields.size() != dim)
                throw InvalidInput("PointSet::from_csv: wrong field count at line " +
                                   std::to_string(lineno));
            for (const auto& f : fields) coords.push_back(detail::parse_num(f, lineno));
            ++rows;
        }
        if (rows == 0) throw InvalidInput("PointSet::from_csv: no points in " + path);
        PointSet ps;
        ps.n = rows;
        ps.d = dim;
        ps.coords = std::move(coords);
        return ps;
    }

    void to_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw InvalidInput("PointSet::to_csv: cannot open " + path);
        for (size_t j = 0; j < d; ++j) {
            if (j) os << ',';
            os << 'x' << j;
        }
        os << '\n';
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < d; ++j) {
                if (j) os << ',';
                os << fmt_double(at(i, j));
            }
            os << '\n';
        }
    }
};

}  // namespace distmat
