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

// Zero-memory discrimination with the basis announced after the measurement.
// A strategy is a POVM whose outcomes are tuples (o_1, ..., o_m) in Y^m; once
// b is announced the receiver outputs o_b.
//
// Tuples are indexed lexicographically with o_1 as the most significant digit.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sdlab/ensembles.hpp"
#include "sdlab/optimize.hpp"
#include "sdlab/star.hpp"

namespace sdlab {

struct StrategyPI0 {
    int m = 0;
    int y_count = 0;
    std::vector<CMatrix> elements;  ///< |Y|^m entries, tuple index order

    std::size_t tuple_count() const noexcept { return elements.size(); }
};

inline std::size_t tuple_count(int m, int y_count) {
    std::size_t t = 1;
    for (int i = 0; i < m; ++i) t *= static_cast<std::size_t>(y_count);
    return t;
}

inline std::vector<int> tuple_digits(std::size_t index, int m, int y_count) {
    std::vector<int> digits(static_cast<std::size_t>(m));
    for (int b = m - 1; b >= 0; --b) {
        digits[static_cast<std::size_t>(b)] = static_cast<int>(index % static_cast<std::size_t>(y_count));
        index /= static_cast<std::size_t>(y_count);
    }
    return digits;
}

inline std::size_t tuple_index(const std::vector<int>& digits, int y_count) {
    std::size_t index = 0;
    for (int o : digits) index = index * static_cast<std::size_t>(y_count) + static_cast<std::size_t>(o);
    return index;
}

/// "01" style label; labels are comma separated once |Y| exceeds 10.
inline std::string tuple_label(std::size_t index, int m, int y_count) {
    std::string s;
    for (int o : tuple_digits(index, m, y_count)) {
        if (y_count > 10 && !s.empty()) s += ',';
        s += std::to_string(o);
    }
    return s;
}

inline Povm to_povm(const StrategyPI0& s) {
    Povm p;
    for (std::size_t t = 0; t < s.tuple_count(); ++t) p.elements.push_back({tuple_label(t, s.m, s.y_count), s.elements[t]});
    return p;
}

inline void require_strategy(const StrategyPI0& s, const char* where) {
    const std::string why = povm_violation(to_povm(s), 1e-9);
    require(why.empty(), ErrorKind::VerificationFailure, std::string(where) + ": " + why);
}

/// The tuple SDP of an ensemble. When all p_yb agree they are pulled out as
/// the prefactor c, which reproduces the hand-written normalizations.
inline DiscriminationProblem pi0_problem(const Ensemble& e) {
    const int m = e.m();
    const int y = e.y_count();
    bool uniform = true;
    for (const auto& s : e.states) uniform = uniform && std::abs(s.p - e.states.front().p) <= 1e-12;
    std::vector<Term> terms;
    for (std::size_t t = 0; t < tuple_count(m, y); ++t) {
        const auto digits = tuple_digits(t, m, y);
        CMatrix b(e.dim(), e.dim());
        for (int basis = 0; basis < m; ++basis) {
            const auto& st = e.state(digits[static_cast<std::size_t>(basis)], basis);
            b += uniform ? st.rho : st.p * st.rho;
        }
        terms.push_back({tuple_label(t, m, y), 1.0, b});
    }
    return make_problem(std::move(terms), uniform ? e.states.front().p : 1.0);
}

/// sum_tuple sum_b p_{o_b b} Tr(M_tuple rho_{o_b b}).
inline double strategy_value(const Ensemble& e, const StrategyPI0& s) {
    require(s.m == e.m() && s.y_count == e.y_count(), ErrorKind::LabelMismatch,
            "strategy alphabet does not match the ensemble");
    require(s.tuple_count() == tuple_count(s.m, s.y_count), ErrorKind::LabelMismatch, "strategy tuple count");
    Complex total = 0;
    for (std::size_t t = 0; t < s.tuple_count(); ++t) {
        require(s.elements[t].rows() == e.dim() && s.elements[t].cols() == e.dim(), ErrorKind::DimensionMismatch,
                "strategy element is " + s.elements[t].shape());
        const auto digits = tuple_digits(t, s.m, s.y_count);
        for (int b = 0; b < s.m; ++b) {
            const auto& st = e.state(digits[static_cast<std::size_t>(b)], b);
            if (st.p == 0) continue;
            total += st.p * trace_of_product(s.elements[t], st.rho);
        }
    }
    require(std::abs(total.imag()) <= 1e-9, ErrorKind::NotHermitian, "strategy value has an imaginary part");
    return total.real();
}

/// Q = Herm(sum_t c B_t M_t) built from a strategy. Its trace equals the
/// strategy value, so it certifies optimality whenever it is feasible.
inline DualCertificate strategy_dual_candidate(const Ensemble& e, const StrategyPI0& s) {
    const DiscriminationProblem problem = pi0_problem(e);
    require(s.tuple_count() == problem.terms.size(), ErrorKind::LabelMismatch, "strategy tuple count");
    CMatrix q(e.dim(), e.dim());
    for (std::size_t t = 0; t < s.tuple_count(); ++t)
        q += (problem.scale * problem.terms[t].weight) * (problem.terms[t].op * s.elements[t]);
    DualCertificate cert;
    cert.q = q.hermitian_part();
    cert.claimed_value = cert.q.trace().real();
    cert.dual_scale = 1;
    return cert;
}

// ---------------------------------------------------------------------------
// Square-root measurement.

struct SrmComponents {
    CMatrix s;
    double c_m = 0;
    std::vector<double> g_values;  ///< G_m(1..4)
};

inline constexpr std::size_t kSrmMaxTuples = 4096;

/// G_m(i) = m!/(m-i)! |Y|^(m-i) prod_{j=2}^{i-1} (1 - delta_{mj}); zero for i > m.
inline double srm_g(int m, int y_count, int i) {
    if (i > m) return 0;
    double v = 1;
    for (int j = 0; j < i; ++j) v *= m - j;
    v *= std::pow(static_cast<double>(y_count), m - i);
    for (int j = 2; j <= i - 1; ++j)
        if (m == j) v = 0;
    return v;
}

inline double srm_c(int m, int y_count) {
    return srm_g(m, y_count, 1) + 3 * srm_g(m, y_count, 2) + srm_g(m, y_count, 3);
}

/// The bound in its unsimplified G_m form.
inline double srm_bound_from_g(int m, int y_count) {
    const double y = y_count;
    const double num = srm_g(m, y_count, 1) + (6 + 1 / y) * srm_g(m, y_count, 2) + 6 * srm_g(m, y_count, 3) +
                       srm_g(m, y_count, 4);
    return num / (srm_c(m, y_count) * m);
}

/// The simplified three-case bound, evaluated exactly as displayed.
inline double srm_bound_formula(int m, int y_count) {
    require(m >= 2 && y_count >= 1, ErrorKind::Usage, "srm_bound_formula needs m >= 2");
    const double y = y_count;
    const double base = guessing_bound(m, y_count);
    if (m == 2) return base + (y - 1) / (y * (y + 3));
    if (m == 3) return base + 4 * (y * y - 1) / (3 * y * (2 + y * (y + 6)));
    const double mm = m;
    return base - 2 / (2 * y) + 2 * (y + mm - 1) / (y * y + 3 * y * (mm - 1) + mm * mm - 3 * mm + 2);
}

struct SrmBuild {
    StrategyPI0 strategy;
    SrmComponents components;
};

/// M_tuple = S^-1/2 (sum_b P_{o_b b})^3 S^-1/2.
inline SrmBuild srm_build(const Ensemble& e) {
    require(e.function.is_balanced, ErrorKind::NotBalanced, "srm_build needs a balanced function");
    require(e.bases.mub, ErrorKind::NotMub, "srm_build needs mutually unbiased bases");
    for (double p : e.prior.p_x)
        require(std::abs(p - e.prior.p_x.front()) <= 1e-12, ErrorKind::InvalidPrior, "srm_build needs uniform P_X");
    for (double p : e.prior.p_b)
        require(std::abs(p - e.prior.p_b.front()) <= 1e-12, ErrorKind::InvalidPrior, "srm_build needs uniform P_B");
    const int m = e.m();
    const int y = e.y_count();
    const std::size_t count = tuple_count(m, y);
    require(count <= kSrmMaxTuples, ErrorKind::SizeLimit, "srm_build tuple count " + std::to_string(count));
    const std::size_t d = e.dim();

    std::vector<CMatrix> cubes(count);
    CMatrix s(d, d);
    for (std::size_t t = 0; t < count; ++t) {
        const auto digits = tuple_digits(t, m, y);
        CMatrix a(d, d);
        for (int b = 0; b < m; ++b) a += e.state(digits[static_cast<std::size_t>(b)], b).support_projector;
        cubes[t] = (a * a * a).hermitian_part();
        s += cubes[t];
    }
    SrmBuild out;
    out.components.s = s;
    out.components.c_m = s.trace().real() / static_cast<double>(d);
    for (int i = 1; i <= 4; ++i) out.components.g_values.push_back(srm_g(m, y, i));
    require((s - out.components.c_m * CMatrix::identity(d)).max_abs() <= 1e-8, ErrorKind::VerificationFailure,
            "S is not proportional to the identity");

    const auto eig = hermitian_eig(s.hermitian_part());
    require(eig.eigenvalues.back() > 0, ErrorKind::VerificationFailure, "S is singular");
    const CMatrix inv_sqrt = spectral_function(eig, [](double x) { return 1 / std::sqrt(x); });
    out.strategy.m = m;
    out.strategy.y_count = y;
    for (std::size_t t = 0; t < count; ++t) out.strategy.elements.push_back((inv_sqrt * cubes[t] * inv_sqrt).hermitian_part());
    require_strategy(out.strategy, "srm_build");
    return out;
}

// ---------------------------------------------------------------------------
// AND over {I, H}^(n): the optimal measurement and its dual certificate.

inline constexpr int kAndMaxBits = 9;

/// |c1> = |1...1>, |h1> = H^(n)|c1>, |c0>, |h0> their orthogonal partners in
/// the plane they span, and the projectors onto that plane and its complement.
struct AndGeometry {
    int n = 0;
    std::size_t d = 0;
    CMatrix c1, h1, c0, h0;
    CMatrix pi_par, pi_perp;
};

inline AndGeometry and_geometry(int n) {
    require(n >= 1 && n <= kAndMaxBits, ErrorKind::SizeLimit, "AND construction supports 1 <= n <= 9");
    AndGeometry g;
    g.n = n;
    g.d = std::size_t{1} << n;
    g.c1 = basis_ket(g.d, g.d - 1);
    CMatrix h1_qubit{{1 / std::sqrt(2.0)}, {-1 / std::sqrt(2.0)}};
    g.h1 = tensor_power(h1_qubit, static_cast<std::size_t>(n));
    const double sign = n % 2 == 0 ? -1.0 : 1.0;  // (-1)^(n+1)
    const double root = std::sqrt(std::ldexp(1.0, n) - 1);
    const double half = std::pow(2.0, n / 2.0);
    g.c0 = (1 / root) * (sign * g.c1 + half * g.h1);
    g.h0 = (1 / root) * (half * g.c1 + sign * g.h1);
    g.pi_par = projector(g.c0) + projector(g.c1);
    g.pi_perp = CMatrix::identity(g.d) - g.pi_par;
    return g;
}

/// p = 1/2 [2 + 1/(2^n + 2^(n/2) - 2) - 1/(2^n - 1)].
inline double and_pistar_value(int n) {
    require(n >= 1, ErrorKind::Usage, "n must be positive");
    const double two_n = std::ldexp(1.0, n);
    return 0.5 * (2 + 1 / (two_n + std::pow(2.0, n / 2.0) - 2) - 1 / (two_n - 1));
}

struct AndMeasurementParts {
    double alpha = 0;
    double beta = 0;
    double eta = 0;
    double lambda = 0;
};

/// Closed-form alpha and beta; eta and lambda need the vectors and are set by
/// and_pistar_measurement_with_parts.
inline AndMeasurementParts and_measurement_parts(int n) {
    AndMeasurementParts p;
    const double sign = n % 2 == 0 ? 1.0 : -1.0;  // (-1)^n
    p.beta = sign / std::sqrt(std::ldexp(1.0, 2 * n) + std::pow(2.0, 1.5 * n + 1) - std::pow(2.0, n / 2.0 + 1));
    p.alpha = std::sqrt(1 - p.beta * p.beta);
    return p;
}

/// |1 - 2 beta^2 + (-1)^(n+1) 2 beta sqrt(1 - beta^2) sqrt(2^n - 1)| / 2^(n/2).
inline double and_eta_formula(int n) {
    const double beta = and_measurement_parts(n).beta;
    const double sign = n % 2 == 0 ? -1.0 : 1.0;
    return std::abs(1 - 2 * beta * beta + sign * 2 * beta * std::sqrt(1 - beta * beta) * std::sqrt(std::ldexp(1.0, n) - 1)) /
           std::pow(2.0, n / 2.0);
}

struct AndMeasurement {
    StrategyPI0 strategy;
    AndMeasurementParts parts;
};

/// M00 = Pi_perp, M01 = lambda |psi01><psi01|, M10 = lambda |psi10><psi10|,
/// M11 = I - M00 - M01 - M10. Tuples are (o_computational, o_hadamard).
inline AndMeasurement and_pistar_measurement_with_parts(int n) {
    const AndGeometry g = and_geometry(n);
    AndMeasurementParts parts = and_measurement_parts(n);
    const CMatrix psi01 = parts.alpha * g.c0 + parts.beta * g.c1;
    const CMatrix psi10 = parts.alpha * g.h0 + parts.beta * g.h1;
    parts.eta = std::abs(inner(psi10, psi01));
    parts.lambda = 1 / (1 + parts.eta);
    AndMeasurement out;
    out.parts = parts;
    out.strategy.m = 2;
    out.strategy.y_count = 2;
    CMatrix m00 = g.pi_perp;
    CMatrix m01 = parts.lambda * projector(psi01);
    CMatrix m10 = parts.lambda * projector(psi10);
    CMatrix m11 = CMatrix::identity(g.d) - m00 - m01 - m10;
    out.strategy.elements = {m00, m01, m10, m11.hermitian_part()};
    // Only M11 can fail positivity; the other three are PSD by construction.
    require(psd_check(out.strategy.elements[3], 1e-9), ErrorKind::VerificationFailure, "M11 is not PSD");
    CMatrix sum(g.d, g.d);
    for (const auto& e : out.strategy.elements) sum += e;
    require((sum - CMatrix::identity(g.d)).max_abs() <= 1e-9, ErrorKind::VerificationFailure, "AND POVM does not sum to I");
    return out;
}

inline StrategyPI0 and_pistar_measurement(int n) { return and_pistar_measurement_with_parts(n).strategy; }

/// Dual certificate for the AND tuple SDP in the Q >= b/4, value Tr(Q) normalization.
/// The off-diagonal term uses the Hermitian pair |c1><h1| + |h1><c1|.
inline DualCertificate and_pistar_certificate(int n) {
    const AndGeometry g = and_geometry(n);
    const double two_n = std::ldexp(1.0, n);
    const double r = std::pow(2.0, n / 2.0);
    const double r3 = std::pow(2.0, 1.5 * n);
    const double diag = 0.25 * (2 - 2 * r + r3) / (2 - 3 * r + r3);
    const double cross = 1 / (4 * (2 / r + two_n - 3));
    const double sign = n % 2 == 0 ? 1.0 : -1.0;  // (-1)^n
    DualCertificate cert;
    cert.q = (1 / (2 * (two_n - 1))) * g.pi_perp + diag * (projector(g.c1) + projector(g.h1)) -
             (sign * cross) * (outer(g.c1, g.h1) + outer(g.h1, g.c1));
    cert.q = cert.q.hermitian_part();
    cert.claimed_value = cert.q.trace().real();
    cert.dual_scale = 1;
    return cert;
}

inline Ensemble and_ensemble(int n) { return standard_ensemble(FunctionKind::And, n, 2); }

// ---------------------------------------------------------------------------
// XOR: Bell strategies for even n, certificates for odd n.

inline constexpr int kXorMaxBits = 8;

/// Per-pair parity read off a Bell outcome (Phi+, Phi-, Psi+, Psi-) for each basis.
inline int bell_pair_parity(int basis, int outcome) {
    static constexpr int kTable[3][4] = {
        {0, 0, 1, 1},  // computational: parity 0 on Phi+-
        {0, 1, 0, 1},  // Hadamard: parity 0 on Phi+, Psi+
        {1, 0, 0, 1},  // K: parity 0 on Phi-, Psi+
    };
    return kTable[basis][outcome];
}

namespace detail {

// Bell measurement on the first `pairs` qubit pairs, tensored with `tail`
// (a two-outcome measurement {tail, I - tail} on the remaining qubit, or
// nothing when tail is empty). Outcomes are folded into tuple elements.
inline StrategyPI0 bell_composed_strategy(int pairs, int m, const CMatrix* tail) {
    const auto bell = bell_basis();
    const std::size_t raw = std::size_t{1} << (2 * pairs);
    const std::size_t tail_dim = tail ? tail->rows() : 1;
    const std::size_t d = (std::size_t{1} << (2 * pairs)) * tail_dim;
    require(d <= max_dim(), ErrorKind::SizeLimit, "Bell strategy dimension " + std::to_string(d));
    StrategyPI0 s;
    s.m = m;
    s.y_count = 2;
    s.elements.assign(tuple_count(m, 2), CMatrix(d, d));
    const int tail_outcomes = tail ? 2 : 1;
    for (std::size_t r = 0; r < raw; ++r) {
        CMatrix ket = CMatrix{{1.0}};
        std::vector<int> parity(static_cast<std::size_t>(m), 0);
        for (int p = 0; p < pairs; ++p) {
            const int outcome = static_cast<int>((r >> (2 * (pairs - 1 - p))) & 3);
            ket = tensor_product(ket, bell[static_cast<std::size_t>(outcome)]);
            for (int b = 0; b < m; ++b) parity[static_cast<std::size_t>(b)] ^= bell_pair_parity(b, outcome);
        }
        const CMatrix pair_proj = projector(ket);
        for (int g = 0; g < tail_outcomes; ++g) {
            std::vector<int> digits(parity);
            for (auto& bit : digits) bit ^= g;
            CMatrix element = pair_proj;
            if (tail) element = tensor_product(pair_proj, g == 0 ? *tail : CMatrix::identity(tail_dim) - *tail);
            s.elements[tuple_index(digits, 2)] += element;
        }
    }
    for (auto& e : s.elements) e = e.hermitian_part();
    return s;
}

}  // namespace detail

inline StrategyPI0 xor_bell_strategy(int n, int m) {
    require(n % 2 == 0, ErrorKind::OddLength, "Bell strategy needs an even number of bits");
    require(n >= 2 && n <= kXorMaxBits, ErrorKind::SizeLimit, "Bell strategy supports 2 <= n <= 8");
    require(m == 2 || m == 3, ErrorKind::Usage, "Bell strategy supports 2 or 3 bases");
    StrategyPI0 s = detail::bell_composed_strategy(n / 2, m, nullptr);
    require_strategy(s, "xor_bell_strategy");
    return s;
}

/// Odd n: Bell measurement on the first n - 1 bits and the single-qubit
/// Helstrom measurement on the last bit, reused for every basis.
inline StrategyPI0 xor_odd_strategy(int n, int m) {
    require(n % 2 == 1, ErrorKind::EvenLength, "odd-length strategy needs an odd number of bits");
    require(n >= 1 && n <= 7, ErrorKind::SizeLimit, "odd-length strategy supports 1 <= n <= 7");
    require(m == 2 || m == 3, ErrorKind::Usage, "odd-length strategy supports 2 or 3 bases");
    const Ensemble one = standard_ensemble(FunctionKind::Xor, 1, m);
    const CMatrix tail = *helstrom(0.5, averaged_state(one, 0), averaged_state(one, 1)).witness;
    StrategyPI0 s = detail::bell_composed_strategy((n - 1) / 2, m, &tail);
    require_strategy(s, "xor_odd_strategy");
    return s;
}

/// Q^1 = m p I_2, Q^(k+2) = Q^k (x) I_4 / 4, value Tr(Q^n)/(2m) against Q >= b.
inline DualCertificate xor_pistar_certificate(int n, int m) {
    require(n % 2 == 1, ErrorKind::EvenLength, "XOR certificate needs an odd number of bits");
    require(n >= 1 && n <= 7, ErrorKind::SizeLimit, "XOR certificate supports 1 <= n <= 7");
    require(m == 2 || m == 3, ErrorKind::Usage, "XOR certificate supports 2 or 3 bases");
    const double p = 0.5 * (1 + 1 / std::sqrt(static_cast<double>(m)));
    CMatrix q = (m * p) * CMatrix::identity(2);
    const CMatrix quarter = 0.25 * CMatrix::identity(4);
    for (int k = 1; k < n; k += 2) q = tensor_product(q, quarter);
    DualCertificate cert;
    cert.dual_scale = 1.0 / (2 * m);
    cert.q = q;
    cert.claimed_value = cert.dual_scale * q.trace().real();
    return cert;
}

inline Ensemble xor_ensemble(int n, int m) { return standard_ensemble(FunctionKind::Xor, n, m); }

}  // namespace sdlab
