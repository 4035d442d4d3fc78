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

// Discrimination without post-measurement information: the receiver only
// ever sees the basis-averaged states sigma_y, so two-outcome problems reduce
// to the Helstrom measurement.

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "sdlab/ensembles.hpp"
#include "sdlab/numkit.hpp"

namespace sdlab {

enum class Method { ClosedForm, Helstrom, Sdp, Explicit, Srm, Certificate };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::ClosedForm: return "closed_form";
        case Method::Helstrom: return "helstrom";
        case Method::Sdp: return "sdp";
        case Method::Explicit: return "explicit";
        case Method::Srm: return "srm";
        case Method::Certificate: return "certificate";
    }
    return "unknown";
}

struct StarResult {
    double value = 0;
    Method method = Method::ClosedForm;
    std::optional<CMatrix> witness;  ///< projector M_0 when available
};

/// Guess the basis, then measure in it: 1/m + (1 - 1/m)/|Y|.
inline double guessing_bound(int m, int y_count) {
    require(m >= 1 && y_count >= 1, ErrorKind::Usage, "guessing_bound needs m, |Y| >= 1");
    return 1.0 / m + (1.0 - 1.0 / m) / y_count;
}

inline void require_density_matrix(const CMatrix& rho, const char* name) {
    require(rho.is_square() && hermiticity_error(rho) <= 1e-9, ErrorKind::NotDensityMatrix,
            std::string(name) + " is not Hermitian");
    require(std::abs(rho.trace().real() - 1) <= 1e-9, ErrorKind::NotDensityMatrix, std::string(name) + " trace != 1");
    require(psd_check(rho.hermitian_part(), 1e-9), ErrorKind::NotDensityMatrix, std::string(name) + " is not PSD");
}

/// Optimal two-state discrimination with priors q, 1 - q. The witness is the
/// projector onto eigenvalues of q rho0 - (1-q) rho1 above 1e-12.
inline StarResult helstrom(double q, const CMatrix& rho0, const CMatrix& rho1) {
    require(q >= 0 && q <= 1, ErrorKind::Usage, "prior q must be in [0, 1]");
    require_density_matrix(rho0, "rho0");
    require_density_matrix(rho1, "rho1");
    require(rho0.rows() == rho1.rows(), ErrorKind::DimensionMismatch, "rho0 and rho1 differ in dimension");
    const CMatrix gamma = (q * rho0 - (1 - q) * rho1).hermitian_part();
    const auto eig = hermitian_eig(gamma);
    double norm1 = 0;
    for (double x : eig.eigenvalues) norm1 += std::abs(x);
    StarResult r;
    r.value = 0.5 * (1 + norm1);
    r.method = Method::Helstrom;
    r.witness = spectral_projector(eig, [](double x) { return x > 1e-12; });
    return r;
}

/// 1/2 + 1/(2 sqrt(m)) for any balanced Boolean function.
inline double boolean_star_upper_bound(int n, int m) {
    (void)n;
    require(m >= 1, ErrorKind::Usage, "m must be positive");
    return 0.5 + 0.5 / std::sqrt(static_cast<double>(m));
}

inline constexpr int kStarMaxBits = 9;
inline constexpr int kXorStateMaxBits = 6;

inline double and_star_closed_form(int n) {
    if (n == 1) return 0.5 + 0.5 / std::sqrt(2.0);
    return 1 - 1 / (2 * (std::ldexp(1.0, n) - 1));
}

/// AND over {I, H}^(n) with the standard prior, checked against Helstrom on
/// the basis-averaged states.
inline StarResult and_star_optimum(int n) {
    require(n >= 1 && n <= kStarMaxBits, ErrorKind::SizeLimit, "and_star_optimum supports 1 <= n <= 9");
    const Ensemble e = standard_ensemble(FunctionKind::And, n, 2);
    StarResult h = helstrom(0.5, averaged_state(e, 0), averaged_state(e, 1));
    const double closed = and_star_closed_form(n);
    require(std::abs(h.value - closed) <= 1e-8, ErrorKind::VerificationFailure,
            "AND STAR closed form " + std::to_string(closed) + " vs Helstrom " + std::to_string(h.value));
    h.value = closed;
    h.method = Method::ClosedForm;
    return h;
}

inline double xor_star_closed_form(int n, int m) {
    return n % 2 == 0 ? 0.75 : 0.5 * (1 + 1 / std::sqrt(static_cast<double>(m)));
}

/// ||sigma_0 - sigma_1||_1 for XOR on n bits over the first m qubit MUBs.
inline double xor_trace_distance(int n, int m) {
    const Ensemble e = standard_ensemble(FunctionKind::Xor, n, m);
    return trace_norm((averaged_state(e, 0) - averaged_state(e, 1)).hermitian_part());
}

inline StarResult xor_star_optimum(int n, int m) {
    require(n >= 1 && n <= kStarMaxBits, ErrorKind::SizeLimit, "xor_star_optimum supports 1 <= n <= 9");
    require(m == 2 || m == 3, ErrorKind::Usage, "xor_star_optimum supports 2 or 3 bases");
    StarResult r;
    r.value = xor_star_closed_form(n, m);
    r.method = Method::ClosedForm;
    if (n <= kXorStateMaxBits) {
        const double built = 0.5 * (1 + 0.5 * xor_trace_distance(n, m));
        require(std::abs(built - r.value) <= 1e-8, ErrorKind::VerificationFailure,
                "XOR STAR closed form " + std::to_string(r.value) + " vs constructed " + std::to_string(built));
    }
    return r;
}

/// Two-bit XOR with P(XOR = 0) = q, each parity class uniform, over the first
/// m qubit MUBs. The default uses all three bases, where q = 1/3 is the worst prior.
inline double xor_two_bit_prior(double q, int m = 3) {
    require(q >= 0 && q <= 1, ErrorKind::Usage, "prior q must be in [0, 1]");
    const Ensemble e = standard_ensemble(FunctionKind::Xor, 2, m);
    return helstrom(q, averaged_state(e, 0), averaged_state(e, 1)).value;
}

}  // namespace sdlab
