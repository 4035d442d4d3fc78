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

// Discrimination instances: qubit MUB unitaries and their tensor powers,
// function truth tables, priors, and the encoded states
//   rho_yb = sum_{x in f^-1(y)} P_X(x|y) U_b |x><x| U_b^dagger
// with their support projectors P_yb.
//
// Bit strings map to indices with x1 as the most significant bit.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sdlab/numkit.hpp"

namespace sdlab {

// ---------------------------------------------------------------------------
// Functions.

enum class FunctionKind { And, Xor, Table };

struct FunctionSpec {
    int n = 0;
    int num_outputs = 0;
    std::vector<int> table;  ///< 2^n labels in [0, num_outputs)
    bool is_balanced = false;

    std::size_t size() const noexcept { return table.size(); }

    std::vector<std::size_t> preimage(int y) const {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < table.size(); ++x)
            if (table[x] == y) out.push_back(x);
        return out;
    }

    std::size_t preimage_size(int y) const {
        return static_cast<std::size_t>(std::count(table.begin(), table.end(), y));
    }
};

inline constexpr int kMaxInputBits = 10;

/// Truth table for AND, XOR or an explicit table. For tables, `num_outputs`
/// of 0 means "one more than the largest label".
inline FunctionSpec boolean_function(FunctionKind kind, int n, std::span<const int> table = {},
                                     int num_outputs = 0) {
    require(n >= 1 && n <= kMaxInputBits, ErrorKind::BadTable, "input bits must be in [1, 10], got " + std::to_string(n));
    const std::size_t size = std::size_t{1} << n;
    FunctionSpec f;
    f.n = n;
    f.table.resize(size);
    switch (kind) {
        case FunctionKind::And:
            f.num_outputs = 2;
            for (std::size_t x = 0; x < size; ++x) f.table[x] = x == size - 1 ? 1 : 0;
            break;
        case FunctionKind::Xor:
            f.num_outputs = 2;
            for (std::size_t x = 0; x < size; ++x) f.table[x] = std::popcount(x) % 2;
            break;
        case FunctionKind::Table: {
            require(table.size() == size, ErrorKind::BadTable,
                    "table length " + std::to_string(table.size()) + " != 2^" + std::to_string(n));
            int top = -1;
            for (int v : table) {
                require(v >= 0, ErrorKind::BadTable, "negative output label");
                top = std::max(top, v);
            }
            f.num_outputs = num_outputs > 0 ? num_outputs : top + 1;
            require(top < f.num_outputs, ErrorKind::BadTable, "label exceeds declared output count");
            f.table.assign(table.begin(), table.end());
            break;
        }
    }
    const std::size_t k0 = f.preimage_size(0);
    f.is_balanced = size % static_cast<std::size_t>(f.num_outputs) == 0;
    for (int y = 0; y < f.num_outputs && f.is_balanced; ++y) f.is_balanced = f.preimage_size(y) == k0;
    return f;
}

inline FunctionSpec table_function(int n, std::span<const int> table, int num_outputs = 0) {
    return boolean_function(FunctionKind::Table, n, table, num_outputs);
}

/// Uniformly random balanced Boolean function on n bits.
inline FunctionSpec random_balanced_function(int n, std::mt19937_64& rng) {
    const std::size_t size = std::size_t{1} << n;
    std::vector<int> table(size, 0);
    std::fill(table.begin() + static_cast<std::ptrdiff_t>(size / 2), table.end(), 1);
    std::shuffle(table.begin(), table.end(), rng);
    return table_function(n, table, 2);
}

// ---------------------------------------------------------------------------
// Bases.

struct BasisSet {
    std::size_t dim = 0;
    std::vector<CMatrix> unitaries;  ///< U_0 = I
    bool mub = false;

    std::size_t count() const noexcept { return unitaries.size(); }
};

namespace gates {

inline CMatrix hadamard() {
    const double s = 1 / std::sqrt(2.0);
    return CMatrix{{s, s}, {s, -s}};
}

/// (I + i sigma_x)/sqrt(2): maps |0> to (|0> + i|1>)/sqrt(2).
inline CMatrix k_gate() {
    const double s = 1 / std::sqrt(2.0);
    return CMatrix{{Complex(s, 0), Complex(0, s)}, {Complex(0, s), Complex(s, 0)}};
}

inline CMatrix pauli_x() { return CMatrix{{0, 1}, {1, 0}}; }
inline CMatrix pauli_z() { return CMatrix{{1, 0}, {0, -1}}; }

/// Unitary DFT matrix F_d.
inline CMatrix fourier(std::size_t d) {
    CMatrix f(d, d);
    const double norm = 1 / std::sqrt(static_cast<double>(d));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const double angle = 2 * std::numbers::pi * static_cast<double>((r * c) % d) / static_cast<double>(d);
            f(r, c) = std::polar(norm, angle);
        }
    return f;
}

}  // namespace gates

/// True iff every cross-basis overlap satisfies |<phi_i|psi_j>|^2 = 1/d within 1e-9.
inline bool verify_mub(const BasisSet& bases) {
    const double target = 1.0 / static_cast<double>(bases.dim);
    for (std::size_t a = 0; a < bases.count(); ++a)
        for (std::size_t b = a + 1; b < bases.count(); ++b) {
            const CMatrix overlap = bases.unitaries[a].adjoint() * bases.unitaries[b];
            for (const auto& z : overlap.data())
                if (std::abs(std::norm(z) - target) > 1e-9) return false;
        }
    return true;
}

/// Validated basis set. The mub flag is computed, never trusted.
inline BasisSet make_basis_set(std::vector<CMatrix> unitaries) {
    require(!unitaries.empty(), ErrorKind::DimensionMismatch, "basis set needs at least one unitary");
    BasisSet out;
    out.dim = unitaries.front().rows();
    for (const auto& u : unitaries) {
        require(u.rows() == out.dim && u.cols() == out.dim, ErrorKind::DimensionMismatch, "basis unitary shape " + u.shape());
        require(is_unitary(u, 1e-10), ErrorKind::NotUnitary, "basis matrix is not unitary");
    }
    require((unitaries.front() - CMatrix::identity(out.dim)).max_abs() <= 1e-10, ErrorKind::NotUnitary,
            "the first basis must be the computational basis");
    out.unitaries = std::move(unitaries);
    out.mub = verify_mub(out);
    return out;
}

/// {I, H} or {I, H, K} on one qubit.
inline BasisSet qubit_mub_bases(int count) {
    require(count == 2 || count == 3, ErrorKind::Usage, "qubit MUB count must be 2 or 3");
    std::vector<CMatrix> us{CMatrix::identity(2), gates::hadamard()};
    if (count == 3) us.push_back(gates::k_gate());
    return make_basis_set(std::move(us));
}

inline BasisSet tensor_power_bases(const BasisSet& base, int n) {
    require(n >= 1, ErrorKind::DimensionMismatch, "tensor power needs n >= 1");
    const double total = std::pow(static_cast<double>(base.dim), n);
    require(total <= static_cast<double>(max_dim()), ErrorKind::DimensionOverflow,
            "tensor power dimension " + std::to_string(total));
    std::vector<CMatrix> us;
    for (const auto& u : base.unitaries) us.push_back(tensor_power(u, static_cast<std::size_t>(n)));
    BasisSet out = make_basis_set(std::move(us));
    require(!base.mub || out.mub, ErrorKind::NotMub, "tensor power lost mutual unbiasedness");
    return out;
}

/// Convenience: {I, H, K}^(n) truncated to `count` bases.
inline BasisSet qubit_tensor_bases(int count, int n) { return tensor_power_bases(qubit_mub_bases(count), n); }

// ---------------------------------------------------------------------------
// Priors.

struct Prior {
    std::vector<double> p_x;
    std::vector<double> p_b;
};

inline void validate_distribution(std::span<const double> p, const char* what) {
    double s = 0;
    for (double v : p) {
        require(std::isfinite(v) && v >= 0, ErrorKind::InvalidPrior, std::string(what) + " has a negative entry");
        s += v;
    }
    require(std::abs(s - 1) <= 1e-12, ErrorKind::InvalidPrior, std::string(what) + " sums to " + std::to_string(s));
}

inline Prior make_prior(std::vector<double> p_x, std::vector<double> p_b) {
    validate_distribution(p_x, "P_X");
    validate_distribution(p_b, "P_B");
    return {std::move(p_x), std::move(p_b)};
}

/// P_X uniform within each preimage, every output equally likely; P_B uniform.
inline Prior standard_prior(const FunctionSpec& f, int m) {
    require(m >= 1, ErrorKind::Usage, "basis count must be positive");
    Prior prior;
    prior.p_x.resize(f.size());
    for (int y = 0; y < f.num_outputs; ++y)
        require(f.preimage_size(y) > 0, ErrorKind::EmptyPreimage, "output " + std::to_string(y) + " is never taken");
    for (std::size_t x = 0; x < f.size(); ++x)
        prior.p_x[x] = 1.0 / (static_cast<double>(f.num_outputs) * static_cast<double>(f.preimage_size(f.table[x])));
    prior.p_b.assign(static_cast<std::size_t>(m), 1.0 / m);
    return prior;
}

// ---------------------------------------------------------------------------
// Ensembles.

struct EncodedState {
    int y = 0;
    int b = 0;
    double p = 0;               ///< p_yb = P_B(b) * P(f(x) = y)
    CMatrix rho;                ///< trace 1 when p > 0, zero otherwise
    CMatrix support_projector;  ///< sum over the preimage, never rank-thresholded
};

struct Ensemble {
    FunctionSpec function;
    BasisSet bases;
    Prior prior;
    std::vector<EncodedState> states;  ///< index y * m + b

    std::size_t dim() const noexcept { return bases.dim; }
    int m() const noexcept { return static_cast<int>(bases.count()); }
    int y_count() const noexcept { return function.num_outputs; }

    const EncodedState& state(int y, int b) const { return states.at(static_cast<std::size_t>(y * m() + b)); }
};

inline Ensemble build_ensemble(const FunctionSpec& f, const BasisSet& bases, const Prior& prior) {
    require(bases.dim == f.size(), ErrorKind::DimensionMismatch,
            "basis dimension " + std::to_string(bases.dim) + " vs 2^n = " + std::to_string(f.size()));
    require(prior.p_x.size() == f.size() && prior.p_b.size() == bases.count(), ErrorKind::DimensionMismatch,
            "prior sizes do not match the instance");
    Ensemble e{f, bases, prior, {}};
    const std::size_t d = bases.dim;
    double total = 0;
    for (int y = 0; y < f.num_outputs; ++y) {
        const auto pre = f.preimage(y);
        double py = 0;
        for (auto x : pre) py += prior.p_x[x];
        for (int b = 0; b < e.m(); ++b) {
            const CMatrix& u = bases.unitaries[static_cast<std::size_t>(b)];
            EncodedState s{y, b, prior.p_b[static_cast<std::size_t>(b)] * py, CMatrix(d, d), CMatrix(d, d)};
            // U W U^dagger with W diagonal over the preimage.
            CMatrix uw(d, d), ud(d, d);
            for (auto x : pre) {
                const double w = py > 0 ? prior.p_x[x] / py : 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    uw(r, x) = w * u(r, x);
                    ud(r, x) = u(r, x);
                }
            }
            const CMatrix u_adj = u.adjoint();
            s.rho = (uw * u_adj).hermitian_part();
            s.support_projector = (ud * u_adj).hermitian_part();
            total += s.p;
            e.states.push_back(std::move(s));
        }
    }
    require(std::abs(total - 1) <= 1e-10, ErrorKind::InvalidPrior, "state probabilities sum to " + std::to_string(total));
    return e;
}

/// Full invariant check; returns a description of the first violation or "".
inline std::string ensemble_violation(const Ensemble& e) {
    const std::size_t d = e.dim();
    double total = 0;
    for (const auto& s : e.states) {
        total += s.p;
        if (s.p > 0) {
            if (std::abs(s.rho.trace().real() - 1) > 1e-10) return "rho trace != 1";
            if (!psd_check(s.rho, 1e-10)) return "rho not PSD";
        }
        if (!is_projector(s.support_projector, 1e-9)) return "support is not a projector";
    }
    if (std::abs(total - 1) > 1e-10) return "probabilities do not sum to 1";
    for (int b = 0; b < e.m(); ++b) {
        CMatrix sum(d, d);
        for (int y = 0; y < e.y_count(); ++y) {
            sum += e.state(y, b).support_projector;
            for (int z = y + 1; z < e.y_count(); ++z)
                if ((e.state(y, b).support_projector * e.state(z, b).support_projector).frobenius_norm() > 1e-9)
                    return "supports not orthogonal";
        }
        if ((sum - CMatrix::identity(d)).max_abs() > 1e-9) return "supports do not sum to I";
    }
    return {};
}

/// sigma_y = sum_b P_B(b) rho_yb, the state seen by a receiver who never learns b.
inline CMatrix averaged_state(const Ensemble& e, int y) {
    CMatrix out(e.dim(), e.dim());
    for (int b = 0; b < e.m(); ++b) out += e.prior.p_b[static_cast<std::size_t>(b)] * e.state(y, b).rho;
    return out;
}

/// Standard-prior ensemble for AND/XOR over the first `m` qubit MUBs.
inline Ensemble standard_ensemble(FunctionKind kind, int n, int m) {
    const FunctionSpec f = boolean_function(kind, n);
    return build_ensemble(f, qubit_tensor_bases(m, n), standard_prior(f, m));
}

// ---------------------------------------------------------------------------
// Bell basis.

/// Phi+, Phi-, Psi+, Psi- as 4x1 column vectors.
inline std::vector<CMatrix> bell_basis() {
    const double s = 1 / std::sqrt(2.0);
    return {CMatrix{{s}, {0}, {0}, {s}}, CMatrix{{s}, {0}, {0}, {-s}}, CMatrix{{0}, {s}, {s}, {0}},
            CMatrix{{0}, {s}, {-s}, {0}}};
}

}  // namespace sdlab
