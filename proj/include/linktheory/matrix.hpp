// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linktheory/error.hpp"
#include "linktheory/rational.hpp"

namespace lks {

// State vectors are plain rational vectors.
using Vec = std::vector<Rational>;

// A state vector is sharp when exactly one entry is nonzero.
inline bool is_sharp(const Vec& v) {
    int nonzero = 0;
    for (const auto& x : v)
        if (!is_zero(x)) ++nonzero;
    return nonzero == 1;
}

inline Rational total(const Vec& v) { return sum(v); }

// Dense row-major rational matrix, sized for desk-scale exact algebra.
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::size_t rows, std::size_t cols, const Rational& fill = Rational(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static Mat from_rows(const std::vector<Vec>& rows) {
        if (rows.empty()) return Mat();
        Mat m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                fail(ErrorKind::SizeMismatch, "ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Rational& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<Rational>& data() const { return data_; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) fail(ErrorKind::DimMismatch, "matrix product shape");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (is_zero(at(i, k))) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) += at(i, k) * o.at(k, j);
            }
        return r;
    }

    Vec operator*(const Vec& v) const {
        if (cols_ != v.size()) fail(ErrorKind::DimMismatch, "matrix-vector shape");
        Vec r(rows_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += at(i, j) * v[j];
        return r;
    }

    Mat operator*(const Rational& s) const {
        Mat r = *this;
        for (auto& x : r.data_) x *= s;
        return r;
    }

    Mat operator+(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::DimMismatch, "matrix sum shape");
        Mat r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
        return r;
    }

    Mat operator-(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::DimMismatch, "matrix diff shape");
        Mat r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
        return r;
    }

    Rational trace() const {
        Rational t = 0;
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += at(i, i);
        return t;
    }

    Vec column_sums() const {
        Vec s(cols_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) s[j] += at(i, j);
        return s;
    }

    Vec row_sums() const {
        Vec s(rows_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) s[i] += at(i, j);
        return s;
    }

    Mat pow(unsigned e) const {
        if (!square()) fail(ErrorKind::DimMismatch, "power of non-square matrix");
        Mat acc = identity(rows_);
        Mat base = *this;
        while (e > 0) {
            if (e & 1u) acc = acc * base;
            base = base * base;
            e >>= 1u;
        }
        return acc;
    }

    // Exact Gauss-Jordan inverse; nullopt when singular.
    std::optional<Mat> inverse() const {
        if (!square()) return std::nullopt;
        std::size_t n = rows_;
        Mat a = *this;
        Mat inv = identity(n);
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && is_zero(a.at(pivot, col))) ++pivot;
            if (pivot == n) return std::nullopt;
            if (pivot != col) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(a.at(pivot, j), a.at(col, j));
                    std::swap(inv.at(pivot, j), inv.at(col, j));
                }
            }
            Rational p = a.at(col, col);
            for (std::size_t j = 0; j < n; ++j) {
                a.at(col, j) /= p;
                inv.at(col, j) /= p;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col || is_zero(a.at(i, col))) continue;
                Rational f = a.at(i, col);
                for (std::size_t j = 0; j < n; ++j) {
                    a.at(i, j) -= f * a.at(col, j);
                    inv.at(i, j) -= f * inv.at(col, j);
                }
            }
        }
        return inv;
    }

    // Rank via exact Gaussian elimination; the pure-state predicate needs
    // only the rank <= 1 distinction but full rank costs nothing at this size.
    std::size_t rank() const {
        Mat a = *this;
        std::size_t r = 0;
        for (std::size_t col = 0; col < cols_ && r < rows_; ++col) {
            std::size_t pivot = r;
            while (pivot < rows_ && is_zero(a.at(pivot, col))) ++pivot;
            if (pivot == rows_) continue;
            if (pivot != r)
                for (std::size_t j = 0; j < cols_; ++j) std::swap(a.at(pivot, j), a.at(r, j));
            for (std::size_t i = r + 1; i < rows_; ++i) {
                if (is_zero(a.at(i, col))) continue;
                Rational f = a.at(i, col) / a.at(r, col);
                for (std::size_t j = col; j < cols_; ++j) a.at(i, j) -= f * a.at(r, j);
            }
            ++r;
        }
        return r;
    }

    std::string str() const {
        std::string out = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            out += i == 0 ? "[" : ", [";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) out += ", ";
                out += to_string(at(i, j));
            }
            out += "]";
        }
        return out + "]";
    }

  private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

inline Mat operator*(const Rational& s, const Mat& m) { return m * s; }

inline bool is_symmetric(const Mat& m) {
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (m.at(i, j) != m.at(j, i)) return false;
    return true;
}

// Real-orthogonal check: M * M^T == 1. This is what "unitary" means for the
// real-weight matrices here; complex generators go through their 2x2 real
// embedding first.
inline bool is_unitary(const Mat& m) {
    if (!m.square()) return false;
    return m * m.transpose() == Mat::identity(m.rows());
}

inline Mat outer(const Vec& col_factor, const Vec& row_factor) {
    Mat m(col_factor.size(), row_factor.size());
    for (std::size_t i = 0; i < col_factor.size(); ++i)
        for (std::size_t j = 0; j < row_factor.size(); ++j)
            m.at(i, j) = col_factor[i] * row_factor[j];
    return m;
}

}  // namespace lks
