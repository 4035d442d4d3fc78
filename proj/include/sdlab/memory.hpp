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

// Perfect prediction with bounded quantum memory.
//
// A measurement keeps enough information iff every element commutes with all
// support projectors P_yb. The algebra generated by the P_yb splits the space
// as H = (+)_j J_j (x) K_j, acting as B(J_j) (x) I on each block, and the
// smallest memory that still allows perfect prediction has dimension
// max_j dim J_j.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sdlab/ensembles.hpp"
#include "sdlab/optimize.hpp"

namespace sdlab {

struct FamilyMember {
    int y = 0;
    int b = 0;
    CMatrix p;
};

struct ProjectorFamily {
    std::size_t dim = 0;
    std::vector<FamilyMember> projectors;
};

/// Validates projector-ness and, per basis label b, completeness and orthogonality.
inline ProjectorFamily make_projector_family(std::vector<FamilyMember> members) {
    require(!members.empty(), ErrorKind::DimensionMismatch, "empty projector family");
    ProjectorFamily fam{members.front().p.rows(), std::move(members)};
    int max_b = 0;
    for (const auto& mbr : fam.projectors) {
        require(mbr.p.rows() == fam.dim && mbr.p.cols() == fam.dim, ErrorKind::DimensionMismatch,
                "family member is " + mbr.p.shape());
        require(is_projector(mbr.p, 1e-9), ErrorKind::NotProjector, "family member is not a projector");
        max_b = std::max(max_b, mbr.b);
    }
    for (int b = 0; b <= max_b; ++b) {
        CMatrix sum(fam.dim, fam.dim);
        std::vector<const CMatrix*> group;
        for (const auto& mbr : fam.projectors)
            if (mbr.b == b) group.push_back(&mbr.p);
        if (group.empty()) continue;
        for (std::size_t i = 0; i < group.size(); ++i) {
            sum += *group[i];
            for (std::size_t j = i + 1; j < group.size(); ++j)
                require((*group[i] * *group[j]).frobenius_norm() <= 1e-9, ErrorKind::NotProjector,
                        "projectors of one basis are not orthogonal");
        }
        require((sum - CMatrix::identity(fam.dim)).max_abs() <= 1e-9, ErrorKind::NotProjector,
                "projectors of one basis do not sum to I");
    }
    return fam;
}

inline ProjectorFamily projector_family(const Ensemble& e) {
    std::vector<FamilyMember> members;
    for (const auto& s : e.states) members.push_back({s.y, s.b, s.support_projector});
    return make_projector_family(std::move(members));
}

/// Family {P_yb} of f under the bases {U_b}; U_0 need not be the identity here.
inline ProjectorFamily family_from_bases(const FunctionSpec& f, const std::vector<CMatrix>& unitaries) {
    std::vector<FamilyMember> members;
    for (std::size_t b = 0; b < unitaries.size(); ++b) {
        const CMatrix& u = unitaries[b];
        require(u.rows() == f.size(), ErrorKind::DimensionMismatch, "basis dimension vs 2^n");
        for (int y = 0; y < f.num_outputs; ++y) {
            CMatrix ud(f.size(), f.size());
            for (auto x : f.preimage(y))
                for (std::size_t r = 0; r < f.size(); ++r) ud(r, x) = u(r, x);
            members.push_back({y, static_cast<int>(b), (ud * u.adjoint()).hermitian_part()});
        }
    }
    return make_projector_family(std::move(members));
}

// ---------------------------------------------------------------------------
// Perfect-prediction check.

struct InstrumentCheck {
    bool rank_ok = false;
    bool commute_ok = false;
    double max_commutator_norm = 0;

    bool perfect() const noexcept { return rank_ok && commute_ok; }
};

inline InstrumentCheck check_perfect_instrument(const Povm& povm, const ProjectorFamily& family, int q) {
    require(q >= 0 && q < 31, ErrorKind::Usage, "memory qubits out of range");
    InstrumentCheck out;
    out.rank_ok = true;
    const std::size_t cap = std::size_t{1} << q;
    for (const auto& e : povm.elements) {
        require(e.op.rows() == family.dim && e.op.cols() == family.dim, ErrorKind::DimensionMismatch,
                "POVM element is " + e.op.shape());
        if (numerical_rank(e.op.hermitian_part(), 1e-9) > cap) out.rank_ok = false;
        for (const auto& mbr : family.projectors)
            out.max_commutator_norm = std::max(out.max_commutator_norm, commutator(e.op, mbr.p).frobenius_norm());
    }
    out.commute_ok = out.max_commutator_norm <= 1e-8;
    return out;
}

// ---------------------------------------------------------------------------
// Commutant.

/// Hilbert-Schmidt orthonormal basis of {M : [P, M] = 0 for all P in the family}.
/// Uses the Gram operator sum_P L_P^dagger L_P of L_P(M) = PM - MP on the
/// d^2-dimensional matrix space, so d^2 must fit under the dimension cap.
inline std::vector<CMatrix> commutant_basis(const ProjectorFamily& family) {
    const std::size_t d = family.dim;
    require(d * d <= max_dim(), ErrorKind::SizeLimit,
            "commutant needs d^2 <= " + std::to_string(max_dim()) + ", got d = " + std::to_string(d));
    const std::size_t n = d * d;
    const CMatrix id = CMatrix::identity(d);
    CMatrix gram(n, n);
    for (const auto& mbr : family.projectors) {
        CMatrix pt(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) pt(r, c) = mbr.p(c, r);
        // L_P is Hermitian and L_P^2 = P (x) I + I (x) P^T - 2 P (x) P^T for a projector P.
        gram += tensor_product(mbr.p, id);
        gram += tensor_product(id, pt);
        gram -= 2.0 * tensor_product(mbr.p, pt);
    }
    const auto eig = hermitian_eig(gram.hermitian_part());
    std::vector<CMatrix> basis;
    for (std::size_t k = n; k-- > 0;) {
        if (eig.eigenvalues[k] > 1e-10) break;
        CMatrix m(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) m(r, c) = eig.eigenvectors(r * d + c, k);
        double residual2 = 0;
        for (const auto& mbr : family.projectors) residual2 += std::pow(commutator(mbr.p, m).frobenius_norm(), 2);
        require(std::sqrt(residual2) < 1e-9, ErrorKind::NumericalRankAmbiguity,
                "near-null commutator direction with singular value " + std::to_string(std::sqrt(residual2)));
        basis.push_back(std::move(m));
    }
    // Eigenvalues ascend towards the front here; restore eigen order for reproducibility.
    std::reverse(basis.begin(), basis.end());
    return basis;
}

// ---------------------------------------------------------------------------
// Block decomposition.

struct Block {
    std::size_t dim_j = 0;
    std::size_t dim_k = 0;
    CMatrix isometry;  ///< d x (dim_j * dim_k); column a * dim_k + k spans |a> (x) |k>
};

struct BlockDecomposition {
    std::vector<Block> blocks;
    std::size_t min_memory_dim = 0;
};

inline double memory_qubits(const BlockDecomposition& dec) {
    return std::log2(static_cast<double>(dec.min_memory_dim));
}

/// Empty if the decomposition is consistent with the family within `tol`,
/// otherwise a description of the first problem found.
inline std::string decomposition_violation(const BlockDecomposition& dec, const ProjectorFamily& family,
                                           double tol = 1e-8) {
    std::size_t total = 0, max_j = 0;
    for (const auto& b : dec.blocks) {
        total += b.dim_j * b.dim_k;
        max_j = std::max(max_j, b.dim_j);
        if (b.isometry.cols() != b.dim_j * b.dim_k || b.isometry.rows() != family.dim) return "isometry shape";
    }
    if (total != family.dim) return "block dimensions do not add up to d";
    if (max_j != dec.min_memory_dim) return "min_memory_dim != max dim J";
    for (std::size_t i = 0; i < dec.blocks.size(); ++i)
        for (std::size_t j = i; j < dec.blocks.size(); ++j) {
            const CMatrix g = dec.blocks[i].isometry.adjoint() * dec.blocks[j].isometry;
            const CMatrix target = i == j ? CMatrix::identity(g.rows()) : CMatrix(g.rows(), g.cols());
            if ((g - target).max_abs() > tol) return "isometries not orthonormal";
        }
    for (const auto& mbr : family.projectors) {
        for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
            const Block& blk = dec.blocks[i];
            const CMatrix pw = mbr.p * blk.isometry;
            for (std::size_t j = 0; j < dec.blocks.size(); ++j) {
                if (j == i) continue;
                if ((dec.blocks[j].isometry.adjoint() * pw).max_abs() > tol) return "projector mixes blocks";
            }
            const CMatrix x = blk.isometry.adjoint() * pw;
            for (std::size_t a = 0; a < blk.dim_j; ++a)
                for (std::size_t a2 = 0; a2 < blk.dim_j; ++a2) {
                    const Complex ref = x(a * blk.dim_k, a2 * blk.dim_k);
                    for (std::size_t k = 0; k < blk.dim_k; ++k)
                        for (std::size_t k2 = 0; k2 < blk.dim_k; ++k2) {
                            const Complex want = k == k2 ? ref : Complex{};
                            if (std::abs(x(a * blk.dim_k + k, a2 * blk.dim_k + k2) - want) > tol)
                                return "projector is not of the form X (x) I on a block";
                        }
                }
        }
    }
    return {};
}

namespace detail {

struct Cluster {
    std::size_t begin = 0;
    std::size_t size = 0;
};

// Groups descending eigenvalues whose neighbours are closer than `gap`.
// Returns false when some neighbour distance falls in [gap, ambiguous_above).
inline bool cluster_spectrum(const std::vector<double>& values, double gap, double ambiguous_above,
                             std::vector<Cluster>& out) {
    out.clear();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            const double diff = values[i - 1] - values[i];
            if (diff >= gap && diff < ambiguous_above) return false;
            if (diff < gap) {
                ++out.back().size;
                continue;
            }
        }
        out.push_back({i, 1});
    }
    return true;
}

inline CMatrix columns(const CMatrix& m, std::size_t begin, std::size_t count) {
    CMatrix out(m.rows(), count);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, begin + c);
    return out;
}

inline CMatrix hstack(const std::vector<CMatrix>& parts, std::size_t rows) {
    std::size_t cols = 0;
    for (const auto& p : parts) cols += p.cols();
    CMatrix out(rows, cols);
    std::size_t at = 0;
    for (const auto& p : parts) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < p.cols(); ++c) out(r, at + c) = p(r, c);
        at += p.cols();
    }
    return out;
}

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

inline CMatrix random_commutant_element(const std::vector<CMatrix>& basis, std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix out(d, d);
    for (const auto& c : basis) {
        const double re = normal(rng);
        const double im = normal(rng);
        out += Complex(re, im) * c;
    }
    return out;
}

// One attempt with a given generator; returns false on any numerical ambiguity.
inline bool try_decompose(const ProjectorFamily& family, const std::vector<CMatrix>& commutant, std::uint64_t seed,
                          BlockDecomposition& out) {
    const std::size_t d = family.dim;
    std::mt19937_64 rng(seed);
    CMatrix x = random_commutant_element(commutant, d, rng).hermitian_part();
    const CMatrix y = random_commutant_element(commutant, d, rng);
    const double xs = std::max(x.frobenius_norm(), 1e-300);
    x *= 1.0 / xs;

    const auto eig = hermitian_eig(x);
    std::vector<Cluster> clusters;
    if (!cluster_spectrum(eig.eigenvalues, 1e-7, 1e-5, clusters)) return false;
    std::vector<CMatrix> spaces;
    for (const auto& c : clusters) spaces.push_back(columns(eig.eigenvectors, c.begin, c.size));

    // Eigenspaces of one block are linked by the generic element y.
    const double ys = std::max(y.frobenius_norm(), 1e-300);
    std::vector<std::size_t> parent(spaces.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t a = 0; a < spaces.size(); ++a)
        for (std::size_t b = a + 1; b < spaces.size(); ++b) {
            const double link = (spaces[b].adjoint() * y * spaces[a]).frobenius_norm() / ys;
            if (link > 1e-6) parent[find_root(parent, b)] = find_root(parent, a);
            else if (link > 1e-10) return false;
        }

    out.blocks.clear();
    out.min_memory_dim = 0;
    std::vector<bool> done(spaces.size(), false);
    for (std::size_t a = 0; a < spaces.size(); ++a) {
        if (done[a]) continue;
        std::vector<std::size_t> members;
        for (std::size_t b = a; b < spaces.size(); ++b)
            if (find_root(parent, b) == find_root(parent, a)) members.push_back(b);
        const std::size_t dim_j = spaces[a].cols();
        const std::size_t dim_k = members.size();
        Block blk{dim_j, dim_k, CMatrix(d, dim_j * dim_k)};
        for (std::size_t k = 0; k < dim_k; ++k) {
            const std::size_t idx = members[k];
            done[idx] = true;
            if (spaces[idx].cols() != dim_j) return false;
            CMatrix image = spaces[a];
            if (k > 0) {
                CMatrix t = spaces[idx].adjoint() * y * spaces[a];
                const double scale = t.frobenius_norm() / std::sqrt(static_cast<double>(dim_j));
                t *= 1.0 / scale;
                if (unitarity_error(t) > 1e-6) return false;
                image = spaces[idx] * t;
            }
            for (std::size_t col = 0; col < dim_j; ++col)
                for (std::size_t r = 0; r < d; ++r) blk.isometry(r, col * dim_k + k) = image(r, col);
        }
        out.min_memory_dim = std::max(out.min_memory_dim, dim_j);
        out.blocks.push_back(std::move(blk));
    }
    return decomposition_violation(out, family).empty();
}

}  // namespace detail

/// Splits H into blocks J_j (x) K_j on which the algebra generated by the
/// family acts as B(J_j) (x) I. Generic elements of the commutant expose the
/// K factors; ambiguous spectra are retried with fresh seeds.
inline BlockDecomposition decompose_algebra(const ProjectorFamily& family, std::uint64_t seed = 0) {
    const auto commutant = commutant_basis(family);
    BlockDecomposition dec;
    for (std::uint64_t attempt = 0; attempt < 4; ++attempt)
        if (detail::try_decompose(family, commutant, seed + 0x9e3779b97f4a7c15ULL * attempt, dec)) return dec;
    fail(ErrorKind::NumericalRankAmbiguity, "could not separate the commutant spectrum");
}

// ---------------------------------------------------------------------------
// Two projectors: blocks of dimension at most two.

namespace detail {

// Eigenvectors of the Hermitian compression basis^dagger a basis, mapped back.
inline CMatrix diagonalize_within(const CMatrix& a, const CMatrix& basis) {
    if (basis.cols() == 0) return basis;
    const auto eig = hermitian_eig((basis.adjoint() * a * basis).hermitian_part());
    return basis * eig.eigenvectors;
}

}  // namespace detail

/// Direct sum of subspaces of dimension <= 2, each invariant under p00 and p01,
/// built from the SVD of the off-diagonal block of p01 in the eigenbasis of p00.
/// Blocks are returned with dim_k = 1.
inline BlockDecomposition two_projector_blocks(const CMatrix& p00, const CMatrix& p01) {
    require(is_projector(p00, 1e-9) && is_projector(p01, 1e-9), ErrorKind::NotProjector,
            "two_projector_blocks needs two projectors");
    require(p00.rows() == p01.rows(), ErrorKind::DimensionMismatch, "projector dimensions differ");
    const std::size_t d = p00.rows();
    const auto e0 = hermitian_eig(p00.hermitian_part());
    std::size_t r0 = 0;
    while (r0 < d && e0.eigenvalues[r0] > 0.5) ++r0;
    const CMatrix range = detail::columns(e0.eigenvectors, 0, r0);
    const CMatrix kernel = detail::columns(e0.eigenvectors, r0, d - r0);
    const std::size_t r1 = d - r0;

    std::vector<CMatrix> blocks;
    auto add_lines = [&](const CMatrix& vecs) {
        for (std::size_t c = 0; c < vecs.cols(); ++c) blocks.push_back(detail::columns(vecs, c, 1));
    };

    if (r0 == 0 || r1 == 0) {
        add_lines(detail::diagonalize_within(p01, r0 == 0 ? kernel : range));
    } else {
        const CMatrix a00 = range.adjoint() * p01 * range;
        const CMatrix a01 = range.adjoint() * p01 * kernel;
        const SvdResult s = svd(a01);
        std::size_t nonzero = 0;
        while (nonzero < s.singular_values.size() && s.singular_values[nonzero] > 1e-9) ++nonzero;

        // Equal singular values leave a unitary freedom; fix it by diagonalizing A00 there.
        std::vector<double> sv(s.singular_values.begin(), s.singular_values.begin() + static_cast<std::ptrdiff_t>(nonzero));
        std::vector<detail::Cluster> clusters;
        require(detail::cluster_spectrum(sv, 1e-7, 1e-5, clusters), ErrorKind::NumericalRankAmbiguity,
                "singular values of the off-diagonal block are nearly degenerate");
        for (const auto& c : clusters) {
            const CMatrix u = detail::columns(s.u, c.begin, c.size);
            const CMatrix u_rot = detail::diagonalize_within(a00, u);
            const CMatrix v_raw = a01.adjoint() * u_rot;
            for (std::size_t k = 0; k < c.size; ++k) {
                CMatrix uk = detail::columns(u_rot, k, 1);
                CMatrix vk = detail::columns(v_raw, k, 1);
                vk *= 1.0 / vk.frobenius_norm();
                blocks.push_back(detail::hstack({range * uk, kernel * vk}, d));
            }
        }
        const CMatrix a11 = kernel.adjoint() * p01 * kernel;
        add_lines(range * detail::diagonalize_within(a00, detail::columns(s.u, nonzero, r0 - nonzero)));
        add_lines(kernel * detail::diagonalize_within(a11, detail::columns(s.v, nonzero, r1 - nonzero)));
    }

    BlockDecomposition dec;
    CMatrix rebuilt00(d, d), rebuilt01(d, d);
    for (auto& w : blocks) {
        dec.min_memory_dim = std::max(dec.min_memory_dim, w.cols());
        const CMatrix pi = w * w.adjoint();
        rebuilt00 += pi * p00 * pi;
        rebuilt01 += pi * p01 * pi;
        dec.blocks.push_back({w.cols(), 1, std::move(w)});
    }
    require((rebuilt00 - p00).max_abs() <= 1e-8 && (rebuilt01 - p01).max_abs() <= 1e-8, ErrorKind::VerificationFailure,
            "block projections do not reconstruct the inputs");
    return dec;
}

/// Family {P_yb} for a Boolean function under the bases {I, u}.
inline std::pair<CMatrix, CMatrix> support_pair(const FunctionSpec& f, const CMatrix& u) {
    const std::size_t d = f.size();
    CMatrix p00(d, d);
    for (auto x : f.preimage(0)) p00(x, x) = 1;
    return {p00, (u * p00 * u.adjoint()).hermitian_part()};
}

/// max |<x|U_b^dagger Pi_i U_b|x'>| over blocks i, bases b and pairs with f(x) != f(x').
inline double posterior_overlap(const FunctionSpec& f, const CMatrix& u, const BlockDecomposition& dec) {
    double worst = 0;
    const std::size_t d = f.size();
    for (int b = 0; b < 2; ++b) {
        const CMatrix ub = b == 0 ? CMatrix::identity(d) : u;
        for (const auto& blk : dec.blocks) {
            const CMatrix coords = blk.isometry.adjoint() * ub;  // column x = W^dagger U_b |x>
            const CMatrix gram = coords.adjoint() * coords;
            for (std::size_t x = 0; x < d; ++x)
                for (std::size_t x2 = 0; x2 < d; ++x2)
                    if (f.table[x] != f.table[x2]) worst = std::max(worst, std::abs(gram(x, x2)));
        }
    }
    return worst;
}

inline constexpr int kProtocolMaxBits = 8;

namespace detail {

// Average success per basis of: measure the blocks, keep the block-local
// state, then measure {W^dagger P_0b W, W^dagger P_1b W} once b is known.
inline std::vector<double> protocol_success_by_basis(const FunctionSpec& f, const CMatrix& u,
                                                     const BlockDecomposition& dec) {
    const std::size_t d = f.size();
    const Prior prior = standard_prior(f, 2);
    const auto [p00, p01] = support_pair(f, u);
    std::vector<double> out;
    for (int b = 0; b < 2; ++b) {
        const CMatrix ub = b == 0 ? CMatrix::identity(d) : u;
        const CMatrix p0 = b == 0 ? p00 : p01;
        double total = 0;
        for (const auto& blk : dec.blocks) {
            const CMatrix wa = blk.isometry.adjoint();
            const CMatrix r0 = wa * p0 * blk.isometry;
            const CMatrix r1 = CMatrix::identity(blk.isometry.cols()) - r0;
            const CMatrix coords = wa * ub;
            for (std::size_t x = 0; x < d; ++x) {
                const CMatrix phi = columns(coords, x, 1);
                const CMatrix& r = f.table[x] == 0 ? r0 : r1;
                total += prior.p_x[x] * inner(phi, r * phi).real();
            }
        }
        out.push_back(total);
    }
    return out;
}

}  // namespace detail

/// Average success of the one-qubit-memory protocol for f under bases {I, u}.
inline double one_qubit_protocol_sim(const FunctionSpec& f, const CMatrix& u) {
    require(f.n <= kProtocolMaxBits, ErrorKind::SizeLimit, "protocol simulation supports n <= 8");
    require(f.num_outputs == 2, ErrorKind::BadTable, "protocol simulation needs a Boolean function");
    require(u.rows() == f.size() && u.is_square(), ErrorKind::DimensionMismatch, "unitary shape " + u.shape());
    require(is_unitary(u, 1e-9), ErrorKind::NotUnitary, "protocol basis is not unitary");
    const auto [p00, p01] = support_pair(f, u);
    const BlockDecomposition dec = two_projector_blocks(p00, p01);
    require(dec.min_memory_dim <= 2, ErrorKind::VerificationFailure, "a block exceeds one qubit");
    const auto per_basis = detail::protocol_success_by_basis(f, u, dec);
    return 0.5 * (per_basis[0] + per_basis[1]);
}

// ---------------------------------------------------------------------------
// Three bases that force full memory.

struct AdversarialBases {
    CMatrix u1, u2;
    std::vector<std::size_t> zeros, ones;  ///< s maps zeros[i] to ones[i]
    std::vector<CMatrix> u_vecs, v_vecs;   ///< Fourier vectors over zeros and ones
    std::vector<double> a;
};

inline constexpr std::size_t kAdversarialMaxDim = 64;

inline AdversarialBases adversarial_bases(const FunctionSpec& f) {
    require(f.num_outputs == 2 && f.is_balanced, ErrorKind::NotBalanced, "adversarial bases need a balanced Boolean f");
    const std::size_t d = f.size();
    require(d <= kAdversarialMaxDim, ErrorKind::SizeLimit, "adversarial bases support d <= 64");
    AdversarialBases out;
    out.zeros = f.preimage(0);
    out.ones = f.preimage(1);
    const std::size_t h = d / 2;
    out.u1 = CMatrix(d, d);
    out.u2 = CMatrix(d, d);
    for (std::size_t i = 0; i < h; ++i) {
        CMatrix uv(d, 1), vv(d, 1);
        for (std::size_t j = 0; j < h; ++j) {
            const double angle = 2 * std::numbers::pi * static_cast<double>((i * j) % h) / static_cast<double>(h);
            const Complex w = std::polar(1 / std::sqrt(static_cast<double>(h)), angle);
            uv(out.zeros[j], 0) = w;
            vv(out.ones[j], 0) = w;
        }
        out.u_vecs.push_back(uv);
        out.v_vecs.push_back(vv);
        out.a.push_back(static_cast<double>(i + 1) / static_cast<double>(h + 1));
    }
    auto rotation = [](const CMatrix& p, const CMatrix& q, double a) {
        const double c = std::sqrt(1 - a * a);
        return a * (outer(p, p) + outer(q, q)) + c * (outer(p, q) - outer(q, p));
    };
    for (std::size_t i = 0; i < h; ++i) {
        out.u1 += rotation(basis_ket(d, out.zeros[i]), basis_ket(d, out.ones[i]), out.a[i]);
        out.u2 += rotation(out.u_vecs[i], out.v_vecs[i], out.a[i]);
    }
    require(is_unitary(out.u1, 1e-9) && is_unitary(out.u2, 1e-9), ErrorKind::VerificationFailure,
            "adversarial construction is not unitary");
    return out;
}

/// Largest violation of <x|v_x'> = <s_x|u_x'> = 0 and |<x|u_x'>|^2 = |<s_x|v_x'>|^2 = 2/d.
inline double adversarial_condition_error(const AdversarialBases& ab) {
    const std::size_t h = ab.zeros.size();
    const double target = 1.0 / static_cast<double>(h);
    double worst = 0;
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j) {
            worst = std::max(worst, std::abs(ab.v_vecs[j](ab.zeros[i], 0)));
            worst = std::max(worst, std::abs(ab.u_vecs[j](ab.ones[i], 0)));
            worst = std::max(worst, std::abs(std::norm(ab.u_vecs[j](ab.zeros[i], 0)) - target));
            worst = std::max(worst, std::abs(std::norm(ab.v_vecs[j](ab.ones[i], 0)) - target));
        }
    return worst;
}

/// One-qubit protocol on the first two bases, coin flip on the third.
inline double partial_strategy_value(const FunctionSpec& f, const AdversarialBases& ab) {
    const auto [p00, p01] = support_pair(f, ab.u1);
    const BlockDecomposition dec = two_projector_blocks(p00, p01);
    require(dec.min_memory_dim <= 2, ErrorKind::VerificationFailure, "a block exceeds one qubit");
    const auto per_basis = detail::protocol_success_by_basis(f, ab.u1, dec);
    return (per_basis[0] + per_basis[1] + 0.5) / 3.0;
}

// ---------------------------------------------------------------------------
// Diagonal in two MUBs.

namespace detail {

inline double off_diagonal_mass(const CMatrix& m) {
    double s = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (r != c) s += std::norm(m(r, c));
    return std::sqrt(s);
}

}  // namespace detail

/// True iff m is diagonal in both bases; in that case m must be a multiple of I.
inline bool prop_identity_check(const CMatrix& m, const CMatrix& basis1, const CMatrix& basis2) {
    require_hermitian(m, "prop_identity_check");
    require(basis1.rows() == m.rows() && basis2.rows() == m.rows(), ErrorKind::DimensionMismatch, "basis shapes");
    require(is_unitary(basis1, 1e-9) && is_unitary(basis2, 1e-9), ErrorKind::NotMub, "bases must be unitary");
    const double target = 1.0 / static_cast<double>(m.rows());
    const CMatrix overlaps = basis1.adjoint() * basis2;
    for (const auto& z : overlaps.data())
        require(std::abs(std::norm(z) - target) <= 1e-9, ErrorKind::NotMub, "bases are not mutually unbiased");
    const bool diag1 = detail::off_diagonal_mass(basis1.adjoint() * m * basis1) <= 1e-9;
    const bool diag2 = detail::off_diagonal_mass(basis2.adjoint() * m * basis2) <= 1e-9;
    if (!(diag1 && diag2)) return false;
    const double mean = m.trace().real() / static_cast<double>(m.rows());
    require((m - mean * CMatrix::identity(m.rows())).max_abs() <= 1e-8, ErrorKind::VerificationFailure,
            "diagonal in two MUBs but not proportional to I");
    return true;
}

}  // namespace sdlab
