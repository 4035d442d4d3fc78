// Copyright 2026 The sdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra sized for the discrimination problems in this
// library (dimension <= 1024): Hermitian eigendecomposition (cyclic Jacobi for
// small matrices, Householder tridiagonalization plus implicit QL for larger
// ones), SVD on top of it, trace norm, Kronecker products and PSD checks.
//
// Storage is row-major. Tensor products use the "left factor is the major
// index" convention, so for n-qubit bit strings x = x1...xn the first bit is
// the most significant index bit.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdlab/error.hpp"

namespace sdlab {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;

/// Global dimension cap. Honors SDLAB_MAX_DIM when set to a positive integer
/// not above 1024.
inline std::size_t max_dim() {
    static const std::size_t cap = [] {
        std::size_t value = 1024;
        if (const char* env = std::getenv("SDLAB_MAX_DIM")) {
            char* end = nullptr;
            const long parsed = std::strtol(env, &end, 10);
            if (end != env && parsed > 0 && parsed <= 1024) value = static_cast<std::size_t>(parsed);
        }
        return value;
    }();
    return cap;
}

namespace detail {

// std::complex operator* goes through the Annex G NaN handling path; the hot
// loops below only see finite values.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline Complex cmul_conj(Complex a, Complex b) {  // conj(a) * b
    return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

}  // namespace detail

class CMatrix {
public:
    CMatrix() = default;

    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        require(data_.size() == rows_ * cols_, ErrorKind::DimensionMismatch,
                "entry count " + std::to_string(data_.size()) + " != rows*cols");
    }

    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            require(row.size() == cols_, ErrorKind::DimensionMismatch, "ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

    static CMatrix diagonal(std::span<const double> values) {
        CMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<Complex>& data() const noexcept { return data_; }
    std::vector<Complex>& data() noexcept { return data_; }

    CMatrix column(std::size_t c) const {
        CMatrix v(rows_, 1);
        for (std::size_t r = 0; r < rows_; ++r) v(r, 0) = (*this)(r, c);
        return v;
    }

    void set_column(std::size_t c, const CMatrix& v) {
        require(v.rows() == rows_ && v.cols() == 1, ErrorKind::DimensionMismatch, "set_column");
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v(r, 0);
    }

    CMatrix adjoint() const {
        CMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    Complex trace() const {
        require(is_square(), ErrorKind::DimensionMismatch, "trace of non-square matrix");
        Complex t = 0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    CMatrix hermitian_part() const {
        require(is_square(), ErrorKind::DimensionMismatch, "hermitian_part of non-square matrix");
        CMatrix out(rows_, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
        return out;
    }

    CMatrix& operator+=(const CMatrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    CMatrix& operator*=(Complex s) {
        for (auto& z : data_) z = detail::cmul(z, s);
        return *this;
    }

    CMatrix& operator*=(double s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, double s) { return a *= s; }
    friend CMatrix operator*(double s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend CMatrix operator-(CMatrix a) { return a *= -1.0; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        require(a.cols_ == b.rows_, ErrorKind::DimensionMismatch,
                "product of " + a.shape() + " and " + b.shape());
        CMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            Complex* orow = out.data_.data() + i * out.cols_;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* brow = b.data_.data() + k * b.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += detail::cmul(aik, brow[j]);
            }
        }
        return out;
    }

    bool operator==(const CMatrix&) const = default;

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void check_same_shape(const CMatrix& o) const {
        require(rows_ == o.rows_ && cols_ == o.cols_, ErrorKind::DimensionMismatch,
                "shape " + shape() + " vs " + o.shape());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

// ---------------------------------------------------------------------------
// Small helpers.

/// Column vector |i> in dimension d.
inline CMatrix basis_ket(std::size_t d, std::size_t i) {
    CMatrix v(d, 1);
    v(i, 0) = 1.0;
    return v;
}

/// |a><b| for column vectors a, b.
inline CMatrix outer(const CMatrix& a, const CMatrix& b) {
    require(a.cols() == 1 && b.cols() == 1, ErrorKind::DimensionMismatch, "outer expects column vectors");
    CMatrix out(a.rows(), b.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < b.rows(); ++c) out(r, c) = a(r, 0) * std::conj(b(c, 0));
    return out;
}

inline CMatrix projector(const CMatrix& ket) { return outer(ket, ket); }

/// <a|b> for column vectors.
inline Complex inner(const CMatrix& a, const CMatrix& b) {
    require(a.cols() == 1 && b.cols() == 1 && a.rows() == b.rows(), ErrorKind::DimensionMismatch,
            "inner expects equal-length column vectors");
    Complex s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::conj(a(i, 0)) * b(i, 0);
    return s;
}

inline double vector_norm(const CMatrix& v) { return v.frobenius_norm(); }

/// Tr(A B) without forming the product.
inline Complex trace_of_product(const CMatrix& a, const CMatrix& b) {
    require(a.cols() == b.rows() && a.rows() == b.cols(), ErrorKind::DimensionMismatch, "trace_of_product");
    Complex s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) s += detail::cmul(a(i, k), b(k, i));
    return s;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// max |A - A^dagger| entry.
inline double hermiticity_error(const CMatrix& a) {
    if (!a.is_square()) return INFINITY;
    double e = 0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = r; c < a.cols(); ++c) e = std::max(e, std::abs(a(r, c) - std::conj(a(c, r))));
    return e;
}

inline void require_hermitian(const CMatrix& a, const char* where) {
    require(a.is_square(), ErrorKind::NotHermitian, std::string(where) + ": matrix is " + a.shape());
    const double err = hermiticity_error(a);
    require(err <= kHermitianTol, ErrorKind::NotHermitian,
            std::string(where) + ": |A - A^dagger|_max = " + std::to_string(err));
}

inline double unitarity_error(const CMatrix& u) {
    if (!u.is_square()) return INFINITY;
    return (u.adjoint() * u - CMatrix::identity(u.rows())).max_abs();
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) { return unitarity_error(u) <= tol; }

inline bool is_projector(const CMatrix& p, double tol = 1e-9) {
    return p.is_square() && hermiticity_error(p) <= tol && (p * p - p).max_abs() <= tol;
}

// ---------------------------------------------------------------------------
// Tensor products.

/// Kronecker product, a-index major.
inline CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    require(rows <= max_dim() && cols <= max_dim(), ErrorKind::DimensionOverflow,
            "tensor product would be " + std::to_string(rows) + "x" + std::to_string(cols));
    CMatrix out(rows, cols);
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex s = a(ar, ac);
            if (s == Complex{}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = detail::cmul(s, b(br, bc));
        }
    return out;
}

inline CMatrix tensor_power(const CMatrix& a, std::size_t n) {
    require(n >= 1, ErrorKind::DimensionMismatch, "tensor_power needs n >= 1");
    CMatrix out = a;
    for (std::size_t i = 1; i < n; ++i) out = tensor_product(out, a);
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition.

struct EigResult {
    std::vector<double> eigenvalues;  ///< descending
    CMatrix eigenvectors;             ///< columns match eigenvalues
};

struct JacobiOptions {
    double relative_tol = 1e-12;
    int max_sweeps = 100;
};

namespace detail {

inline EigResult sorted_result(std::span<const double> values, const std::function<Complex(std::size_t, std::size_t)>& vec,
                               std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
    EigResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors = CMatrix(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        result.eigenvalues[col] = values[order[col]];
        for (std::size_t k = 0; k < n; ++k) result.eigenvectors(k, col) = vec(order[col], k);
    }
    return result;
}

}  // namespace detail

/// Cyclic Jacobi with complex 2x2 rotations. Each rotation removes the phase
/// of a_pq and then applies the real symmetric Jacobi rotation, so the
/// diagonal stays real throughout.
inline EigResult jacobi_eig(const CMatrix& input, JacobiOptions opts = {}) {
    require_hermitian(input, "jacobi_eig");
    const std::size_t n = input.rows();
    require(n <= max_dim(), ErrorKind::SizeLimit, "hermitian_eig dimension " + std::to_string(n));

    CMatrix a = input.hermitian_part();
    // vt holds V^T: row k is eigenvector k, which keeps the rotation updates contiguous.
    CMatrix vt = CMatrix::identity(n);

    const double norm_f = a.frobenius_norm();
    const double target = opts.relative_tol * norm_f;

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2 * std::norm(a(p, q));
        return std::sqrt(s);
    };

    bool converged = n <= 1 || off_norm() <= target;
    for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        const double skip = 1e-300 + 1e-20 * norm_f;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= skip) continue;
                const Complex phase = apq / r;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q); A <- J^dagger A J.
                const Complex sp = s * phase;         // s e^{i phi}
                const Complex cp = c * phase;         // c e^{i phi}
                Complex* row_p = &a(p, 0);
                Complex* row_q = &a(q, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex xp = row_p[k];
                    const Complex xq = row_q[k];
                    row_p[k] = c * xp - detail::cmul(sp, xq);
                    row_q[k] = s * xp + detail::cmul(cp, xq);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    a(k, p) = std::conj(row_p[k]);
                    a(k, q) = std::conj(row_q[k]);
                }
                a(p, p) = app - t * r;
                a(q, q) = aqq + t * r;
                a(p, q) = 0;
                a(q, p) = 0;
                // V <- V J, stored transposed: vt_p = c vt_p - s e^{-i phi} vt_q, vt_q = s vt_p + c e^{-i phi} vt_q.
                const Complex sm = std::conj(sp);
                const Complex cm = std::conj(cp);
                Complex* v_p = &vt(p, 0);
                Complex* v_q = &vt(q, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex xp = v_p[k];
                    const Complex xq = v_q[k];
                    v_p[k] = c * xp - detail::cmul(sm, xq);
                    v_q[k] = s * xp + detail::cmul(cm, xq);
                }
            }
        }
        converged = off_norm() <= target;
    }
    require(converged, ErrorKind::NoConvergence, "Jacobi sweep cap reached at n=" + std::to_string(n));

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
    return detail::sorted_result(values, [&](std::size_t src, std::size_t k) { return vt(src, k); }, n);
}

/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// implicit QL with Wilkinson-type shifts. O(n^3) with a small constant; used
/// for the larger dimensions where Jacobi's strided updates dominate.
inline EigResult tridiagonal_eig(const CMatrix& input) {
    require_hermitian(input, "tridiagonal_eig");
    const std::size_t n = input.rows();
    require(n <= max_dim(), ErrorKind::SizeLimit, "tridiagonal_eig dimension " + std::to_string(n));
    if (n == 0) return {};

    CMatrix a = input.hermitian_part();
    CMatrix q = CMatrix::identity(n);  // a_input = q * t * q^dagger
    std::vector<Complex> v(n), p(n), w(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(xnorm2);
        double tail2 = xnorm2 - std::norm(a(k + 1, k));
        if (xnorm == 0 || tail2 <= 1e-300) continue;
        const Complex x0 = a(k + 1, k);
        const Complex ph = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
        const Complex alpha = -ph * xnorm;
        std::fill(v.begin(), v.end(), Complex{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm2 = 0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        const double vscale = 1 / std::sqrt(vnorm2);
        for (std::size_t i = k + 1; i < n; ++i) v[i] *= vscale;

        // H = I - 2 v v^dagger acts on indices >= k+1. HAH = A - 2 v w^dagger - 2 w v^dagger,
        // with p = A v, beta = v^dagger p, w = p - beta v.
        for (std::size_t i = k; i < n; ++i) {
            Complex s = 0;
            const Complex* row = &a(i, 0);
            for (std::size_t j = k + 1; j < n; ++j) s += detail::cmul(row[j], v[j]);
            p[i] = s;
        }
        Complex beta = 0;
        for (std::size_t i = k + 1; i < n; ++i) beta += detail::cmul_conj(v[i], p[i]);
        for (std::size_t i = k; i < n; ++i) w[i] = p[i] - beta * v[i];
        // Row/column k: only the coupling to k+1.. changes, and becomes (alpha, 0, ...).
        for (std::size_t i = k + 1; i < n; ++i) {
            Complex* row = &a(i, 0);
            const Complex vi2 = 2.0 * v[i];
            const Complex wi2 = 2.0 * w[i];
            for (std::size_t j = k + 1; j < n; ++j)
                row[j] -= detail::cmul(vi2, std::conj(w[j])) + detail::cmul(wi2, std::conj(v[j]));
        }
        a(k + 1, k) = alpha;
        a(k, k + 1) = std::conj(alpha);
        for (std::size_t i = k + 2; i < n; ++i) {
            a(i, k) = 0;
            a(k, i) = 0;
        }
        // q <- q H
        for (std::size_t r = 0; r < n; ++r) {
            Complex* row = &q(r, 0);
            Complex s = 0;
            for (std::size_t j = k + 1; j < n; ++j) s += detail::cmul(row[j], v[j]);
            s *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) row[j] -= detail::cmul(s, std::conj(v[j]));
        }
    }

    // Rotate the complex off-diagonal into non-negative reals: t' = D^dagger t D.
    std::vector<double> diag(n), off(n, 0.0);
    std::vector<Complex> dphase(n, Complex(1.0));
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Complex e = a(i + 1, i);
        const double mag = std::abs(e);
        off[i] = mag;
        dphase[i + 1] = mag > 0 ? dphase[i] * (e / mag) : dphase[i];
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) q(r, c) = detail::cmul(q(r, c), dphase[c]);

    // Implicit QL on (diag, off); zt rows are eigenvectors in the tridiagonal basis.
    std::vector<double> zt(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) zt[i * n + i] = 1.0;
    const double eps = std::numeric_limits<double>::epsilon();
    const long nn = static_cast<long>(n);
    double anorm = 0;
    for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(diag[i]) + off[i] + (i ? off[i - 1] : 0.0));
    // Zero diagonal pairs never satisfy a purely relative test, so deflate at eps * ||T|| as well.
    const double floor = eps * anorm;
    for (long l = 0; l < nn; ++l) {
        int iter = 0;
        long m;
        do {
            for (m = l; m < nn - 1; ++m) {
                const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= eps * dd || std::abs(off[m]) <= floor) break;
            }
            if (m != l) {
                require(iter++ < 60, ErrorKind::NoConvergence, "tridiagonal QL iteration cap");
                double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + off[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, pp = 0.0;
                long i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * off[i];
                    const double b = c * off[i];
                    off[i + 1] = (r = std::hypot(f, g));
                    if (r == 0.0) {
                        diag[i + 1] -= pp;
                        off[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - pp;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    diag[i + 1] = g + (pp = s * r);
                    g = c * r - b;
                    double* zi = &zt[static_cast<std::size_t>(i) * n];
                    double* zi1 = &zt[static_cast<std::size_t>(i + 1) * n];
                    for (std::size_t k = 0; k < n; ++k) {
                        f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                diag[l] -= pp;
                off[l] = g;
                off[m] = 0.0;
            }
        } while (m != l);
    }

    // Eigenvectors in the original basis: q * z.
    CMatrix vecs(n, n);  // row j = eigenvector j
    for (std::size_t j = 0; j < n; ++j) {
        const double* zj = &zt[j * n];
        for (std::size_t r = 0; r < n; ++r) {
            const Complex* qrow = &q(r, 0);
            double re = 0, im = 0;
            for (std::size_t c = 0; c < n; ++c) {
                re += qrow[c].real() * zj[c];
                im += qrow[c].imag() * zj[c];
            }
            vecs(j, r) = {re, im};
        }
    }
    return detail::sorted_result(diag, [&](std::size_t src, std::size_t k) { return vecs(src, k); }, n);
}

/// Dimension at and below which hermitian_eig uses Jacobi.
inline constexpr std::size_t kJacobiMaxDim = 32;

/// Eigenvalues descending with orthonormal eigenvectors. Cyclic Jacobi up to
/// kJacobiMaxDim, tridiagonal QL above.
inline EigResult hermitian_eig(const CMatrix& input) {
    require_hermitian(input, "hermitian_eig");
    return input.rows() <= kJacobiMaxDim ? jacobi_eig(input) : tridiagonal_eig(input);
}

/// f(A) = V f(Lambda) V^dagger for Hermitian A.
inline CMatrix spectral_function(const EigResult& eig, const std::function<double(double)>& f) {
    const std::size_t n = eig.eigenvalues.size();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(eig.eigenvalues[k]);
        if (fk == 0) continue;
        for (std::size_t r = 0; r < n; ++r) {
            const Complex vr = fk * eig.eigenvectors(r, k);
            for (std::size_t c = 0; c < n; ++c)
                out(r, c) += detail::cmul(vr, std::conj(eig.eigenvectors(c, k)));
        }
    }
    return out;
}

inline CMatrix spectral_function(const CMatrix& a, const std::function<double(double)>& f) {
    return spectral_function(hermitian_eig(a), f);
}

/// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
inline CMatrix spectral_projector(const EigResult& eig, const std::function<bool(double)>& keep) {
    return spectral_function(eig, [&](double x) { return keep(x) ? 1.0 : 0.0; });
}

inline double min_eigenvalue(const CMatrix& a) {
    const auto eig = hermitian_eig(a);
    return eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
}

/// Sum of |lambda_i|. Only Hermitian inputs are accepted.
inline double trace_norm(const CMatrix& a) {
    const auto eig = hermitian_eig(a);
    double s = 0;
    for (double x : eig.eigenvalues) s += std::abs(x);
    return s;
}

inline bool psd_check(const CMatrix& a, double tol) { return min_eigenvalue(a) >= -tol; }

/// Number of eigenvalues above `threshold`.
inline std::size_t numerical_rank(const CMatrix& hermitian, double threshold = 1e-9) {
    const auto eig = hermitian_eig(hermitian);
    return static_cast<std::size_t>(
        std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(), [&](double x) { return x > threshold; }));
}

// ---------------------------------------------------------------------------
// Singular value decomposition.

struct SvdResult {
    CMatrix u;                           ///< rows x rows, unitary
    std::vector<double> singular_values; ///< min(rows, cols), descending
    CMatrix v;                           ///< cols x cols, unitary; A = U diag(s) V^dagger
};

namespace detail {

// Makes the first entry with modulus above 1e-10 real and positive.
inline Complex phase_fix(const CMatrix& v, std::size_t col) {
    for (std::size_t r = 0; r < v.rows(); ++r) {
        const Complex z = v(r, col);
        if (std::abs(z) > 1e-10) return std::conj(z) / std::abs(z);
    }
    return 1.0;
}

// Orthonormalizes `candidate` against the first `filled` columns of `basis`;
// returns false when nothing is left.
inline bool orthonormalize_into(CMatrix& basis, std::size_t filled, CMatrix candidate) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < filled; ++j) {
            Complex proj = 0;
            for (std::size_t r = 0; r < basis.rows(); ++r) proj += std::conj(basis(r, j)) * candidate(r, 0);
            for (std::size_t r = 0; r < basis.rows(); ++r) candidate(r, 0) -= proj * basis(r, j);
        }
    }
    const double nrm = candidate.frobenius_norm();
    if (nrm < 1e-6) return false;
    for (std::size_t r = 0; r < basis.rows(); ++r) basis(r, filled) = candidate(r, 0) / nrm;
    return true;
}

}  // namespace detail

/// SVD assembled from hermitian_eig(A^dagger A) for V and hermitian_eig(A A^dagger)
/// for the part of U not reached by A V. Singular values are recomputed as
/// |A v_k| so that small ones keep full absolute accuracy.
inline SvdResult svd(const CMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    require(m <= max_dim() && n <= max_dim(), ErrorKind::SizeLimit, "svd of " + a.shape());
    const std::size_t k = std::min(m, n);
    const double scale = std::max(1.0, a.frobenius_norm());

    SvdResult out;
    out.v = n == 0 ? CMatrix() : hermitian_eig((a.adjoint() * a).hermitian_part()).eigenvectors;
    for (std::size_t j = 0; j < n; ++j) {
        const Complex ph = detail::phase_fix(out.v, j);
        for (std::size_t r = 0; r < n; ++r) out.v(r, j) *= ph;
    }

    const CMatrix av = a * out.v;
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = av.column(j).frobenius_norm();
    // Eigen-order of A^dagger A can disagree with |A v| order at rounding level; re-sort stably.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });
    CMatrix v_sorted(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t r = 0; r < n; ++r) v_sorted(r, j) = out.v(r, order[j]);
    out.v = std::move(v_sorted);

    out.u = CMatrix(m, m);
    out.singular_values.assign(k, 0.0);
    std::size_t filled = 0;
    const double zero_tol = 1e-12 * scale;
    for (std::size_t j = 0; j < k; ++j) {
        const double s = norms[order[j]];
        if (s <= zero_tol) break;
        CMatrix col = av.column(order[j]);
        col *= 1.0 / s;
        if (!detail::orthonormalize_into(out.u, filled, col)) break;
        out.singular_values[j] = s;
        ++filled;
    }
    const std::size_t nonzero = filled;
    if (filled < m) {
        // Complete U from the eigenvectors of A A^dagger, smallest eigenvalues first.
        const auto eig = hermitian_eig((a * a.adjoint()).hermitian_part());
        for (std::size_t c = m; c-- > 0 && filled < m;) {
            if (detail::orthonormalize_into(out.u, filled, eig.eigenvectors.column(c))) ++filled;
        }
        for (std::size_t c = 0; c < m && filled < m; ++c) {
            if (detail::orthonormalize_into(out.u, filled, basis_ket(m, c))) ++filled;
        }
    }
    require(filled == m, ErrorKind::NoConvergence, "svd could not complete U for " + a.shape());
    for (std::size_t j = nonzero; j < m; ++j) {
        const Complex ph = detail::phase_fix(out.u, j);
        for (std::size_t r = 0; r < m; ++r) out.u(r, j) *= ph;
    }
    return out;
}

/// Rebuilds U diag(s) V^dagger.
inline CMatrix svd_reconstruct(const SvdResult& r) {
    CMatrix us(r.u.rows(), r.v.rows());
    for (std::size_t j = 0; j < r.singular_values.size(); ++j)
        for (std::size_t i = 0; i < r.u.rows(); ++i) us(i, j) = r.u(i, j) * r.singular_values[j];
    return us * r.v.adjoint();
}

// ---------------------------------------------------------------------------
// Random instances for property suites. Deterministic for a given engine state.

inline CMatrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix m(rows, cols);
    for (auto& z : m.data()) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = {re, im};
    }
    return m;
}

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
    return random_gaussian(d, d, rng).hermitian_part();
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
inline CMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
    const CMatrix g = random_gaussian(d, d, rng);
    CMatrix q(d, d);
    std::size_t filled = 0;
    for (std::size_t c = 0; c < d; ++c)
        if (detail::orthonormalize_into(q, filled, g.column(c))) ++filled;
    require(filled == d, ErrorKind::NoConvergence, "random_unitary: degenerate Gaussian draw");
    return q;
}

}  // namespace sdlab
