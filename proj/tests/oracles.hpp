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

// Reference computations for tests. Nothing here calls the library's
// eigensolvers, SVD or ensemble builders; inputs and outputs are plain
// std::complex arrays so results can be compared against sdlab independently.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// Dense row-major complex matrix, deliberately separate from sdlab::CMatrix.
struct Mat {
    std::size_t n = 0, m = 0;
    std::vector<Complex> a;

    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : n(rows), m(cols), a(rows * cols) {}
    Complex& operator()(std::size_t r, std::size_t c) { return a[r * m + c]; }
    Complex operator()(std::size_t r, std::size_t c) const { return a[r * m + c]; }
};

inline Mat eye(std::size_t d) {
    Mat out(d, d);
    for (std::size_t i = 0; i < d; ++i) out(i, i) = 1;
    return out;
}

inline Mat mul(const Mat& x, const Mat& y) {
    Mat out(x.n, y.m);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.m; ++k)
            for (std::size_t j = 0; j < y.m; ++j) out(i, j) += x(i, k) * y(k, j);
    return out;
}

inline Mat dagger(const Mat& x) {
    Mat out(x.m, x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.m; ++j) out(j, i) = std::conj(x(i, j));
    return out;
}

inline Mat add(const Mat& x, const Mat& y, double s = 1) {
    Mat out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += s * y.a[i];
    return out;
}

inline Mat scale(const Mat& x, Complex s) {
    Mat out = x;
    for (auto& z : out.a) z *= s;
    return out;
}

inline Mat kron(const Mat& x, const Mat& y) {
    Mat out(x.n * y.n, x.m * y.m);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.m; ++j)
            for (std::size_t k = 0; k < y.n; ++k)
                for (std::size_t l = 0; l < y.m; ++l) out(i * y.n + k, j * y.m + l) = x(i, j) * y(k, l);
    return out;
}

inline Complex trace(const Mat& x) {
    Complex t = 0;
    for (std::size_t i = 0; i < x.n; ++i) t += x(i, i);
    return t;
}

/// Single-qubit gates, written out by hand.
inline Mat hadamard() {
    Mat h(2, 2);
    const double s = 1 / std::sqrt(2.0);
    h(0, 0) = s, h(0, 1) = s, h(1, 0) = s, h(1, 1) = -s;
    return h;
}

inline Mat k_gate() {
    Mat k(2, 2);
    const double s = 1 / std::sqrt(2.0);
    k(0, 0) = s, k(0, 1) = Complex(0, s), k(1, 0) = Complex(0, s), k(1, 1) = s;
    return k;
}

inline Mat power(const Mat& u, int n) {
    Mat out = eye(1);
    for (int i = 0; i < n; ++i) out = kron(out, u);
    return out;
}

/// Eigenvalues of a real symmetric matrix by classical two-sided Jacobi.
inline std::vector<double> real_symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
                const double t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i * n + i];
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// Hermitian eigenvalues through the real embedding [[X, -Y], [Y, X]], whose
/// spectrum is that of X + iY with every eigenvalue doubled.
inline std::vector<double> hermitian_eigenvalues(const Mat& h) {
    const std::size_t n = h.n;
    std::vector<double> r(4 * n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Complex z = 0.5 * (h(i, j) + std::conj(h(j, i)));
            r[i * 2 * n + j] = z.real();
            r[(i + n) * 2 * n + j + n] = z.real();
            r[i * 2 * n + j + n] = -z.imag();
            r[(i + n) * 2 * n + j] = z.imag();
        }
    const auto doubled = real_symmetric_eigenvalues(std::move(r), 2 * n);
    std::vector<double> out;
    for (std::size_t i = 0; i < doubled.size(); i += 2) out.push_back(0.5 * (doubled[i] + doubled[i + 1]));
    return out;
}

inline double trace_norm(const Mat& h) {
    double s = 0;
    for (double x : hermitian_eigenvalues(h)) s += std::abs(x);
    return s;
}

inline double helstrom(double q, const Mat& r0, const Mat& r1) {
    return 0.5 * (1 + trace_norm(add(scale(r0, q), r1, -(1 - q))));
}

/// sigma_y = (1/m) sum_b U_b (sum_{x: f(x)=y} p(x) |x><x|) U_b^dagger, built from scratch.
inline Mat averaged_state(const std::vector<int>& table, const std::vector<double>& p, const std::vector<Mat>& bases,
                          int y) {
    const std::size_t d = table.size();
    Mat diag(d, d);
    double total = 0;
    for (std::size_t x = 0; x < d; ++x)
        if (table[x] == y) {
            diag(x, x) = p[x];
            total += p[x];
        }
    Mat out(d, d);
    for (const auto& u : bases) out = add(out, mul(mul(u, diag), dagger(u)));
    return scale(out, 1.0 / (total * static_cast<double>(bases.size())));
}

/// Dimension of the unital algebra generated by `gens`, by closing the linear
/// span under products with Gram-Schmidt in the d^2-dimensional matrix space.
inline std::size_t algebra_dimension(const std::vector<Mat>& gens) {
    const std::size_t d = gens.front().n;
    std::vector<Mat> basis;
    auto try_add = [&](Mat x) {
        for (const auto& b : basis) {
            Complex c = 0;
            for (std::size_t i = 0; i < x.a.size(); ++i) c += std::conj(b.a[i]) * x.a[i];
            for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= c * b.a[i];
        }
        double nrm = 0;
        for (const auto& z : x.a) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) return false;
        for (auto& z : x.a) z /= nrm;
        basis.push_back(std::move(x));
        return true;
    };
    try_add(eye(d));
    for (const auto& g : gens) try_add(g);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t g = 0; g < gens.size(); ++g) {
            try_add(mul(basis[i], gens[g]));
            try_add(mul(gens[g], basis[i]));
        }
    return basis.size();
}

/// Success of a zero-memory strategy computed input by input:
/// sum_{x,b} p(x) p(b) sum_{tuples t with t_b = f(x)} <x|U_b^dagger M_t U_b|x>.
inline double strategy_success(const std::vector<int>& table, const std::vector<double>& p, const std::vector<Mat>& bases,
                               const std::vector<Mat>& elements, int y_count) {
    const std::size_t d = table.size();
    const std::size_t m = bases.size();
    double total = 0;
    for (std::size_t t = 0; t < elements.size(); ++t) {
        std::vector<int> digits(m);
        std::size_t idx = t;
        for (std::size_t b = m; b-- > 0;) {
            digits[b] = static_cast<int>(idx % static_cast<std::size_t>(y_count));
            idx /= static_cast<std::size_t>(y_count);
        }
        for (std::size_t b = 0; b < m; ++b) {
            const Mat rotated = mul(mul(dagger(bases[b]), elements[t]), bases[b]);
            for (std::size_t x = 0; x < d; ++x)
                if (table[x] == digits[b]) total += p[x] / static_cast<double>(m) * rotated(x, x).real();
        }
    }
    return total;
}

}  // namespace oracle
