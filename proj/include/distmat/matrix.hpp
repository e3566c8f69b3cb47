#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "distmat/common.hpp"

namespace distmat {

// Dense row-major matrix, value semantics. Desk scale by design.
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    double* row(size_t i) { return data_.data() + i * cols_; }
    const double* row(size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double fro_sq(const Matrix& a) {
    double s = 0.0;
    for (size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row(i);
        for (size_t j = 0; j < a.cols(); ++j) s += r[j] * r[j];
    }
    return s;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row(i);
        double* cr = c.row(i);
        for (size_t k = 0; k < a.cols(); ++k) {
            double aik = ar[k];
            if (aik == 0.0) continue;
            const double* br = b.row(k);
            for (size_t j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

// ‖a - b‖_F^2; shapes must match.
inline double diff_fro_sq(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("diff_fro_sq: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row(i);
        const double* br = b.row(i);
        for (size_t j = 0; j < a.cols(); ++j) {
            double d = ar[j] - br[j];
            s += d * d;
        }
    }
    return s;
}

// ---- DMAT binary format ----
// 16-byte header: magic "DMAT", u32 LE rows, u32 LE cols, u32 LE reserved(0);
// then rows*cols little-endian float64, row-major.

namespace detail {
inline void put_u32_le(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}
}  // namespace detail

inline void save_dmat(const std::string& path, const Matrix& m) {
    if (m.rows() > std::numeric_limits<uint32_t>::max() ||
        m.cols() > std::numeric_limits<uint32_t>::max())
        throw InvalidInput("save_dmat: dimensions exceed u32");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("save_dmat: cannot open " + path);
    os.write("DMAT", 4);
    detail::put_u32_le(os, static_cast<uint32_t>(m.rows()));
    detail::put_u32_le(os, static_cast<uint32_t>(m.cols()));
    detail::put_u32_le(os, 0);
    static_assert(sizeof(double) == 8);
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(m.size() * 8));
    if (!os) throw InvalidInput("save_dmat: write failed for " + path);
}

inline Matrix load_dmat(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("load_dmat: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DMAT", 4) != 0)
        throw InvalidInput("load_dmat: bad magic in " + path);
    uint32_t r = detail::get_u32_le(is);
    uint32_t c = detail::get_u32_le(is);
    (void)detail::get_u32_le(is);
    if (!is) throw InvalidInput("load_dmat: truncated header in " + path);
    Matrix m(r, c);
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * 8));
    if (static_cast<size_t>(is.gcount()) != m.size() * 8)
        throw InvalidInput("load_dmat: truncated payload in " + path);
    return m;
}

// ---- numeric formatting ----
// Shortest round-trip decimal; keeps text outputs bit-faithful.
inline std::string fmt_double(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    double back = strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[32];
            snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            if (strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

// ---- CSV (RFC 4180 subset: quoted fields unescaped, CRLF tolerated) ----

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line, size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted)
        throw InvalidInput("csv: unterminated quote at line " + std::to_string(lineno));
    out.push_back(cur);
    return out;
}

inline double parse_num(const std::string& s, size_t lineno) {
    const char* c = s.c_str();
    char* end = nullptr;
    double v = strtod(c, &end);
    while (end && *end == ' ') ++end;
    if (end == c || (end && *end != '\0'))
        throw InvalidInput("csv: malformed number '" + s + "' at line " + std::to_string(lineno));
    return v;
}

inline std::string chomp(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}
}  // namespace detail

inline void save_csv_matrix(const std::string& path, const Matrix& m) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("save_csv_matrix: cannot open " + path);
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << fmt_double(m(i, j));
        }
        os << '\n';
    }
}

inline Matrix load_csv_matrix(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("load_csv_matrix: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = detail::chomp(line);
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line, lineno);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(detail::parse_num(f, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidInput("load_csv_matrix: ragged row at line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput("load_csv_matrix: empty file " + path);
    Matrix m(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

}  // namespace distmat
