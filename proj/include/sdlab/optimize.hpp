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

// Multi-hypothesis discrimination as an SDP:
//
//   maximize  c * sum_i w_i Tr(B_i M_i)   over POVMs {M_i}
//   dual:     minimize s * Tr(Q)          subject to Q >= (c/s) w_i B_i
//
// The dual scale s lives on the certificate so that hand-built certificates
// can be checked in whichever normalization they were written in.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdlab/numkit.hpp"

namespace sdlab {

struct Term {
    std::string label;
    double weight = 1;
    CMatrix op;  ///< Hermitian
};

struct DiscriminationProblem {
    std::vector<Term> terms;
    std::size_t dim = 0;
    double scale = 1;  ///< overall prefactor c
};

struct PovmElement {
    std::string label;
    CMatrix op;
};

struct Povm {
    std::vector<PovmElement> elements;

    const CMatrix* find(const std::string& label) const {
        for (const auto& e : elements)
            if (e.label == label) return &e.op;
        return nullptr;
    }
};

struct DualCertificate {
    CMatrix q;
    double claimed_value = 0;
    double dual_scale = 1;
};

struct CertReport {
    bool feasible = false;
    double min_slack = 0;  ///< most negative eigenvalue over Q - (c/s) w_i B_i
    double primal_value = 0;
    double dual_value = 0;
    double gap = 0;  ///< dual - primal
    double dual_scale = 1;
};

inline DiscriminationProblem make_problem(std::vector<Term> terms, double scale = 1) {
    require(!terms.empty(), ErrorKind::DimensionMismatch, "problem without terms");
    DiscriminationProblem p{std::move(terms), 0, scale};
    p.dim = p.terms.front().op.rows();
    std::unordered_map<std::string, int> seen;
    for (const auto& t : p.terms) {
        require(t.op.rows() == p.dim, ErrorKind::DimensionMismatch, "term " + t.label + " has shape " + t.op.shape());
        require_hermitian(t.op, "discrimination term");
        require(std::isfinite(t.weight), ErrorKind::DimensionMismatch, "non-finite weight");
        require(seen[t.label]++ == 0, ErrorKind::LabelMismatch, "duplicate label " + t.label);
    }
    return p;
}

/// Two-hypothesis problem with priors q, 1 - q.
inline DiscriminationProblem two_state_problem(double q, const CMatrix& rho0, const CMatrix& rho1) {
    return make_problem({{"0", q, rho0}, {"1", 1 - q, rho1}});
}

/// Empty string when the POVM is valid within `tol`, otherwise the reason.
inline std::string povm_violation(const Povm& povm, double tol = 1e-9) {
    if (povm.elements.empty()) return "empty POVM";
    const std::size_t d = povm.elements.front().op.rows();
    CMatrix sum(d, d);
    for (const auto& e : povm.elements) {
        if (e.op.rows() != d || !e.op.is_square()) return "element " + e.label + " has wrong shape";
        if (hermiticity_error(e.op) > tol) return "element " + e.label + " not Hermitian";
        if (!psd_check(e.op.hermitian_part(), tol)) return "element " + e.label + " not PSD";
        sum += e.op;
    }
    if ((sum - CMatrix::identity(d)).max_abs() > tol) return "elements do not sum to I";
    return {};
}

inline double povm_success(const DiscriminationProblem& problem, const Povm& povm) {
    Complex total = 0;
    for (const auto& t : problem.terms) {
        const CMatrix* m = povm.find(t.label);
        require(m != nullptr, ErrorKind::LabelMismatch, "POVM has no element for " + t.label);
        require(m->rows() == problem.dim && m->cols() == problem.dim, ErrorKind::DimensionMismatch,
                "POVM element " + t.label + " is " + m->shape());
        total += t.weight * trace_of_product(t.op, *m);
    }
    total *= problem.scale;
    require(std::abs(total.imag()) <= 1e-9, ErrorKind::NotHermitian,
            "success probability has imaginary part " + std::to_string(total.imag()));
    return total.real();
}

/// Smallest eigenvalue of Q - (c/s) w_i B_i over all terms.
inline double certificate_slack(const DiscriminationProblem& problem, const CMatrix& q, double dual_scale) {
    require(q.rows() == problem.dim && q.cols() == problem.dim, ErrorKind::DimensionMismatch,
            "certificate is " + q.shape());
    double slack = std::numeric_limits<double>::infinity();
    const double factor = problem.scale / dual_scale;
    for (const auto& t : problem.terms) {
        CMatrix diff = q - (factor * t.weight) * t.op;
        slack = std::min(slack, min_eigenvalue(diff.hermitian_part()));
    }
    return slack;
}

inline CertReport verify_certificate(const DiscriminationProblem& problem, const Povm& povm,
                                     const DualCertificate& cert, double tol) {
    require_hermitian(cert.q, "dual certificate");
    CertReport r;
    r.dual_scale = cert.dual_scale;
    r.min_slack = certificate_slack(problem, cert.q, cert.dual_scale);
    r.feasible = r.min_slack >= -tol;
    r.primal_value = povm_success(problem, povm);
    r.dual_value = cert.dual_scale * cert.q.trace().real();
    r.gap = r.dual_value - r.primal_value;
    return r;
}

// ---------------------------------------------------------------------------
// Solver.

struct SolveOptions {
    double tol = 1e-6;
    int max_iterations = 200000;
    int stall_window = 50;
    int projection_sweeps = 2000;
    double projection_tol = 1e-13;
};

struct SolveResult {
    Povm povm;
    double value = 0;
    double certificate_slack = 0;  ///< of Q_hat = Herm(sum_i c w_i B_i M_i)
    bool certified = false;
    int iterations = 0;
};

inline constexpr std::size_t kSolverMaxDim = 64;
inline constexpr std::size_t kSolverMaxOutcomes = 16;

namespace detail {

inline CMatrix psd_part(const CMatrix& a) {
    return spectral_function(hermitian_eig(a.hermitian_part()), [](double x) { return x > 0 ? x : 0.0; });
}

// Dykstra's alternating projection of y onto PSD^K intersected with {sum M_i = I}.
inline std::vector<CMatrix> project_povm(const std::vector<CMatrix>& y, const SolveOptions& opts) {
    const std::size_t k = y.size();
    const std::size_t d = y.front().rows();
    const CMatrix id = CMatrix::identity(d);
    std::vector<CMatrix> x = y;
    std::vector<CMatrix> p(k, CMatrix(d, d)), q(k, CMatrix(d, d));
    std::vector<CMatrix> a(k);
    for (int sweep = 0; sweep < opts.projection_sweeps; ++sweep) {
        CMatrix total(d, d);
        for (std::size_t i = 0; i < k; ++i) total += x[i] + p[i];
        const CMatrix correction = (1.0 / static_cast<double>(k)) * (id - total);
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = x[i] + p[i] + correction;
            p[i] = x[i] + p[i] - a[i];
        }
        double change = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const CMatrix w = a[i] + q[i];
            CMatrix next = psd_part(w);
            q[i] = w - next;
            change = std::max(change, (next - x[i]).max_abs());
            x[i] = std::move(next);
        }
        if (change < opts.projection_tol) break;
    }
    return x;
}

}  // namespace detail

/// Projected gradient ascent over the POVM set. Optimality is judged by the
/// candidate dual Q_hat; `certified` is set when its slack is within 10 tol.
inline SolveResult solve_discrimination(const DiscriminationProblem& problem, SolveOptions opts = {}) {
    const std::size_t d = problem.dim;
    const std::size_t k = problem.terms.size();
    require(d <= kSolverMaxDim, ErrorKind::SizeLimit, "solver dimension " + std::to_string(d) + " > 64");
    require(k >= 1 && k <= kSolverMaxOutcomes, ErrorKind::SizeLimit, "solver outcome count " + std::to_string(k));

    std::vector<CMatrix> grad(k);
    double op_norm = 0;
    for (std::size_t i = 0; i < k; ++i) {
        grad[i] = (problem.scale * problem.terms[i].weight) * problem.terms[i].op;
        const auto eig = hermitian_eig(grad[i]);
        for (double x : eig.eigenvalues) op_norm = std::max(op_norm, std::abs(x));
    }

    auto value_of = [&](const std::vector<CMatrix>& m) {
        double v = 0;
        for (std::size_t i = 0; i < k; ++i) v += trace_of_product(grad[i], m[i]).real();
        return v;
    };

    std::vector<CMatrix> m(k, (1.0 / static_cast<double>(k)) * CMatrix::identity(d));
    SolveResult result;
    if (k > 1 && op_norm > 0) {
        double step = 1 / op_norm;
        const double min_step = step * 1e-12;
        double value = value_of(m);
        int stall = 0;
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            result.iterations = it + 1;
            std::vector<CMatrix> trial(k);
            for (std::size_t i = 0; i < k; ++i) trial[i] = m[i] + step * grad[i];
            trial = detail::project_povm(trial, opts);
            const double next = value_of(trial);
            if (next < value - 1e-15) {
                step /= 2;
                if (step < min_step) {
                    converged = true;
                    break;
                }
                continue;
            }
            const double improvement = next - value;
            m = std::move(trial);
            value = next;
            stall = improvement < opts.tol / 10 ? stall + 1 : 0;
            if (stall >= opts.stall_window) {
                converged = true;
                break;
            }
        }
        require(converged, ErrorKind::NoConvergence, "projected gradient hit the iteration cap");
    }

    for (std::size_t i = 0; i < k; ++i)
        result.povm.elements.push_back({problem.terms[i].label, m[i].hermitian_part()});
    result.value = povm_success(problem, result.povm);

    CMatrix q_hat(d, d);
    for (std::size_t i = 0; i < k; ++i) q_hat += grad[i] * m[i];
    q_hat = q_hat.hermitian_part();
    result.certificate_slack = certificate_slack(problem, q_hat, 1.0);
    result.certified = result.certificate_slack >= -10 * opts.tol;
    return result;
}

}  // namespace sdlab
