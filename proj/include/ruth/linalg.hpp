#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ruth/error.hpp"
#include "ruth/rat.hpp"

namespace ruth {

// Dense exact rational matrix, row major.  Everything here is plain
// Gauss-Jordan over Rat; sizes in this project are tiny.
class QMat {
public:
    QMat() = default;
    QMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows, std::vector<Rat>(cols, Rat(0))) {}

    static QMat identity(std::size_t n) {
        QMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Rat(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rat& operator()(std::size_t i, std::size_t j) { return a_[i][j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }

    bool is_zero() const {
        for (const auto& row : a_)
            for (const auto& v : row)
                if (!v.is_zero()) return false;
        return true;
    }

    QMat transpose() const {
        QMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = a_[i][j];
        return t;
    }

    friend QMat operator*(const QMat& a, const QMat& b) {
        if (a.cols_ != b.rows_) throw Error("matrix product shape mismatch");
        QMat c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    friend QMat operator+(const QMat& a, const QMat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix sum shape mismatch");
        QMat c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) c(i, j) = a(i, j) + b(i, j);
        return c;
    }

    friend QMat operator-(const QMat& a, const QMat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix diff shape mismatch");
        QMat c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) c(i, j) = a(i, j) - b(i, j);
        return c;
    }

    QMat operator-() const {
        QMat c(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) c(i, j) = -a_[i][j];
        return c;
    }

    friend bool operator==(const QMat& a, const QMat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    std::vector<Rat> apply(const std::vector<Rat>& v) const {
        if (v.size() != cols_) throw Error("matrix apply shape mismatch");
        std::vector<Rat> out(rows_, Rat(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!a_[i][j].is_zero()) out[i] += a_[i][j] * v[j];
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::vector<Rat>> a_;
};

namespace linalg {

// Row echelon reduction in place; returns pivot column indices.
inline std::vector<std::size_t> row_reduce(QMat& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && m(piv, col).is_zero()) ++piv;
        if (piv == m.rows()) continue;
        if (piv != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
        const Rat inv = Rat(1) / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            const Rat f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::size_t rank(QMat m) { return row_reduce(m).size(); }

// Basis of the right kernel, as columns.
inline std::vector<std::vector<Rat>> kernel_basis(QMat m) {
    const std::size_t n = m.cols();
    const auto pivots = row_reduce(m);
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Rat>> basis;
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rat> v(n, Rat(0));
        v[free] = Rat(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of m x = b, if any.
inline std::optional<std::vector<Rat>> solve(const QMat& m, const std::vector<Rat>& b) {
    if (b.size() != m.rows()) throw Error("solve shape mismatch");
    QMat aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    const auto pivots = row_reduce(aug);
    for (auto p : pivots)
        if (p == m.cols()) return std::nullopt;
    std::vector<Rat> x(m.cols(), Rat(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, m.cols());
    return x;
}

// Betti numbers of a finite complex given as the list of differentials
// d[k] : C^k -> C^{k+1}; dims[k] = dim C^k.  d may be shorter than dims by one.
inline std::vector<std::size_t> betti_numbers(const std::vector<std::size_t>& dims,
                                              const std::vector<QMat>& d) {
    std::vector<std::size_t> ranks(dims.size(), 0);
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        if (k < d.size()) {
            if (d[k].cols() != dims[k] || d[k].rows() != dims[k + 1])
                throw Error("betti_numbers: differential shape mismatch at degree " +
                            std::to_string(k));
            ranks[k] = rank(d[k]);
        }
    }
    std::vector<std::size_t> betti(dims.size(), 0);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::size_t rk = k < ranks.size() ? ranks[k] : 0;
        const std::size_t rkm1 = k == 0 ? 0 : ranks[k - 1];
        betti[k] = dims[k] - rk - rkm1;
    }
    return betti;
}

}  // namespace linalg
}  // namespace ruth
