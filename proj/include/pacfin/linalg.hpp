#pragma once

// Small dense numeric matrices for per-point work: inversion, determinants,
// symmetric eigenvalues (cyclic Jacobi), singular values, numeric rank.
// Everything here is desk scale (dimension <= ~8), so simplicity wins.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pacfin {

struct MatD {
    int rows = 0, cols = 0;
    std::vector<double> a;

    MatD() = default;
    MatD(int r, int c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), 0.0) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    static MatD identity(int n) {
        MatD m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline MatD matmul(const MatD& x, const MatD& y) {
    MatD r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            double v = x(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
        }
    return r;
}

inline std::vector<double> matvec(const MatD& m, const std::vector<double>& v) {
    std::vector<double> r(std::size_t(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r[std::size_t(i)] += m(i, j) * v[std::size_t(j)];
    return r;
}

// LU determinant with partial pivoting.
inline double det(MatD m) {
    int n = m.rows;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            d = -d;
        }
        d *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

// Gauss-Jordan inverse; nullopt when a pivot collapses.
inline std::optional<MatD> try_invert(MatD m) {
    int n = m.rows;
    MatD inv = MatD::identity(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (std::abs(m(piv, k)) < 1e-14) return std::nullopt;
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        double d = m(k, k);
        for (int j = 0; j < n; ++j) {
            m(k, j) /= d;
            inv(k, j) /= d;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            double f = m(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

// Eigenvalues (and optional eigenvectors as columns) of a symmetric matrix
// via cyclic Jacobi rotations.
inline std::vector<double> sym_eigen(MatD m, MatD* vectors = nullptr) {
    int n = m.rows;
    MatD v = MatD::identity(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[std::size_t(i)] = m(i, i);
    if (vectors) *vectors = v;
    return eig;
}

inline std::vector<double> singular_values(const MatD& m) {
    MatD ata(m.cols, m.cols);
    for (int i = 0; i < m.cols; ++i)
        for (int j = 0; j < m.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.rows; ++k) s += m(k, i) * m(k, j);
            ata(i, j) = s;
        }
    auto eig = sym_eigen(ata);
    for (auto& e : eig) e = std::sqrt(std::max(e, 0.0));
    return eig;
}

inline int numeric_rank(const MatD& m, double tol = 1e-8) {
    int r = 0;
    for (double s : singular_values(m))
        if (s > tol) ++r;
    return r;
}

}  // namespace pacfin
