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

#include <cmath>
#include <random>

#include "sdlab/memory.hpp"
#include "support.hpp"

using namespace sdlab;

namespace {

FunctionSpec identity_fn() { return table_function(1, std::vector<int>{0, 1}); }

ProjectorFamily two_basis_family(const FunctionSpec& f, const CMatrix& u) {
    return family_from_bases(f, {CMatrix::identity(f.size()), u});
}

ProjectorFamily adversarial_family(const FunctionSpec& f) {
    const AdversarialBases ab = adversarial_bases(f);
    return family_from_bases(f, {CMatrix::identity(f.size()), ab.u1, ab.u2});
}

std::size_t sum_of_squares(const BlockDecomposition& dec) {
    std::size_t s = 0;
    for (const auto& b : dec.blocks) s += b.dim_j * b.dim_j;
    return s;
}

std::size_t oracle_algebra_dim(const ProjectorFamily& fam) {
    std::vector<oracle::Mat> gens;
    for (const auto& m : fam.projectors) gens.push_back(sdtest::to_oracle(m.p));
    return oracle::algebra_dimension(gens);
}

}  // namespace

TEST(Family, RejectsBadMembers) {
    EXPECT_SDLAB_ERROR(make_projector_family({{0, 0, 0.5 * CMatrix::identity(2)}}), ErrorKind::NotProjector);
    const CMatrix p0 = projector(basis_ket(2, 0));
    EXPECT_SDLAB_ERROR(make_projector_family({{0, 0, p0}, {1, 0, p0}}), ErrorKind::NotProjector);
    EXPECT_SDLAB_ERROR(make_projector_family({{0, 0, p0}}), ErrorKind::NotProjector);
    EXPECT_NO_THROW(make_projector_family({{0, 0, p0}, {1, 0, projector(basis_ket(2, 1))}}));
}

TEST(Family, FromEnsembleMatchesBases) {
    const FunctionSpec f = boolean_function(FunctionKind::And, 2);
    const Ensemble e = build_ensemble(f, qubit_tensor_bases(2, 2), standard_prior(f, 2));
    const ProjectorFamily a = projector_family(e);
    const ProjectorFamily b = two_basis_family(f, tensor_power(gates::hadamard(), 2));
    ASSERT_EQ(a.projectors.size(), b.projectors.size());
    for (const auto& pa : a.projectors)
        for (const auto& pb : b.projectors)
            if (pa.y == pb.y && pa.b == pb.b) EXPECT_LE((pa.p - pb.p).max_abs(), 1e-12);
}

TEST(Instrument, IdentityCommutes) {
    const ProjectorFamily fam = two_basis_family(identity_fn(), gates::hadamard());
    const InstrumentCheck c = check_perfect_instrument(Povm{{{"i", CMatrix::identity(2)}}}, fam, 1);
    EXPECT_TRUE(c.rank_ok);
    EXPECT_TRUE(c.commute_ok);
    EXPECT_TRUE(c.perfect());
}

TEST(Instrument, AndPlaneSplit) {
    const FunctionSpec f = boolean_function(FunctionKind::And, 2);
    const ProjectorFamily fam = two_basis_family(f, tensor_power(gates::hadamard(), 2));
    const CMatrix h1 = tensor_power(CMatrix{{1 / std::sqrt(2.0)}, {-1 / std::sqrt(2.0)}}, 2);
    const CMatrix c1 = basis_ket(4, 3);
    // Orthonormal basis of span{|c1>, |h1>}.
    const CMatrix w = (1 / std::sqrt(1 - std::norm(inner(c1, h1)))) * (h1 - inner(c1, h1) * c1);
    const CMatrix par = projector(c1) + projector(w);
    const Povm povm{{{"par", par}, {"perp", CMatrix::identity(4) - par}}};
    const InstrumentCheck c = check_perfect_instrument(povm, fam, 1);
    EXPECT_TRUE(c.rank_ok);
    EXPECT_TRUE(c.commute_ok);
}

TEST(Instrument, ComputationalBasisFailsToCommute) {
    const ProjectorFamily fam = two_basis_family(identity_fn(), gates::hadamard());
    const Povm povm{{{"0", projector(basis_ket(2, 0))}, {"1", projector(basis_ket(2, 1))}}};
    const InstrumentCheck c = check_perfect_instrument(povm, fam, 0);
    EXPECT_TRUE(c.rank_ok);
    EXPECT_FALSE(c.commute_ok);
    EXPECT_NEAR(c.max_commutator_norm, 1 / std::sqrt(2.0), 1e-12);
}

TEST(Instrument, DimensionMismatch) {
    const ProjectorFamily fam = two_basis_family(identity_fn(), gates::hadamard());
    EXPECT_SDLAB_ERROR(check_perfect_instrument(Povm{{{"i", CMatrix::identity(4)}}}, fam, 1), ErrorKind::DimensionMismatch);
}

TEST(Instrument, NonCommutingElementsLeakInformation) {
    // If [M, P] != 0 then P M (I - P) != 0, so the outcome mixes the two preimages.
    std::mt19937_64 rng(51);
    for (int n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 5; ++trial) {
            const FunctionSpec f = random_balanced_function(n, rng);
            const ProjectorFamily fam = two_basis_family(f, tensor_power(gates::hadamard(), static_cast<std::size_t>(n)));
            CMatrix g = random_gaussian(f.size(), f.size(), rng);
            const CMatrix m = (g * g.adjoint()).hermitian_part();
            for (const auto& py : fam.projectors) {
                if (commutator(m, py.p).frobenius_norm() <= 1e-6) continue;
                double leak = 0;
                for (const auto& pz : fam.projectors)
                    if (pz.b == py.b && pz.y != py.y)
                        leak = std::max(leak, std::abs(trace_of_product(m * py.p * m, pz.p)));
                EXPECT_GT(leak, 1e-12);
            }
        }
}

TEST(Commutant, TrivialFamily) {
    const ProjectorFamily fam = make_projector_family({{0, 0, CMatrix::identity(3)}});
    const auto basis = commutant_basis(fam);
    EXPECT_EQ(basis.size(), 9u);
}

TEST(Commutant, ElementsCommute) {
    const FunctionSpec f = boolean_function(FunctionKind::And, 2);
    const ProjectorFamily fam = two_basis_family(f, tensor_power(gates::hadamard(), 2));
    const auto basis = commutant_basis(fam);
    for (const auto& m : basis)
        for (const auto& p : fam.projectors) EXPECT_LE(commutator(m, p.p).frobenius_norm(), 1e-8);
    const BlockDecomposition dec = decompose_algebra(fam);
    std::size_t commutant_dim = 0;
    for (const auto& b : dec.blocks) commutant_dim += b.dim_k * b.dim_k;
    EXPECT_EQ(basis.size(), commutant_dim);
}

TEST(Commutant, AdversarialIsScalar) {
    std::mt19937_64 rng(61);
    for (int n = 2; n <= 3; ++n) {
        const FunctionSpec f = random_balanced_function(n, rng);
        EXPECT_EQ(commutant_basis(adversarial_family(f)).size(), 1u);
    }
}

TEST(Commutant, SizeLimit) {
    const ProjectorFamily fam = make_projector_family({{0, 0, CMatrix::identity(64)}});
    EXPECT_SDLAB_ERROR(commutant_basis(fam), ErrorKind::SizeLimit);
}

TEST(Decompose, TrivialAlgebra) {
    const BlockDecomposition dec = decompose_algebra(make_projector_family({{0, 0, CMatrix::identity(4)}}));
    ASSERT_EQ(dec.blocks.size(), 1u);
    EXPECT_EQ(dec.blocks[0].dim_j, 1u);
    EXPECT_EQ(dec.blocks[0].dim_k, 4u);
    EXPECT_EQ(dec.min_memory_dim, 1u);
    EXPECT_DOUBLE_EQ(memory_qubits(dec), 0);
}

TEST(Decompose, TwoBasesNeedOneQubit) {
    std::mt19937_64 rng(71);
    for (int n = 1; n <= 4; ++n) {
        const FunctionSpec f = random_balanced_function(n, rng);
        for (const CMatrix& u : {tensor_power(gates::hadamard(), static_cast<std::size_t>(n)), random_unitary(f.size(), rng)}) {
            const ProjectorFamily fam = two_basis_family(f, u);
            const BlockDecomposition dec = decompose_algebra(fam);
            EXPECT_LE(dec.min_memory_dim, 2u);
            EXPECT_EQ(decomposition_violation(dec, fam), "");
            EXPECT_EQ(sum_of_squares(dec), oracle_algebra_dim(fam));
        }
    }
    const FunctionSpec and3 = boolean_function(FunctionKind::And, 3);
    const ProjectorFamily fam = two_basis_family(and3, tensor_power(gates::hadamard(), 3));
    const BlockDecomposition dec = decompose_algebra(fam);
    EXPECT_EQ(dec.min_memory_dim, 2u);
    EXPECT_EQ(sum_of_squares(dec), oracle_algebra_dim(fam));
}

TEST(Decompose, AdversarialNeedsFullMemory) {
    std::mt19937_64 rng(81);
    for (int n = 2; n <= 3; ++n) {
        const FunctionSpec f = random_balanced_function(n, rng);
        const ProjectorFamily fam = adversarial_family(f);
        const BlockDecomposition dec = decompose_algebra(fam);
        ASSERT_EQ(dec.blocks.size(), 1u);
        EXPECT_EQ(dec.blocks[0].dim_j, f.size());
        EXPECT_EQ(dec.blocks[0].dim_k, 1u);
        EXPECT_EQ(dec.min_memory_dim, f.size());
        EXPECT_DOUBLE_EQ(memory_qubits(dec), n);
        EXPECT_EQ(decomposition_violation(dec, fam), "");
        EXPECT_EQ(sum_of_squares(dec), oracle_algebra_dim(fam));
    }
}

TEST(Decompose, ThreeMubFamilyMatchesOracle) {
    const FunctionSpec f = boolean_function(FunctionKind::Xor, 2);
    const ProjectorFamily fam = projector_family(standard_ensemble(FunctionKind::Xor, 2, 3));
    const BlockDecomposition dec = decompose_algebra(fam);
    EXPECT_EQ(decomposition_violation(dec, fam), "");
    EXPECT_EQ(sum_of_squares(dec), oracle_algebra_dim(fam));
    (void)f;
}

TEST(TwoProjector, CommutingCase) {
    const FunctionSpec f = boolean_function(FunctionKind::Xor, 2);
    const auto [p00, unused] = support_pair(f, CMatrix::identity(4));
    const BlockDecomposition dec = two_projector_blocks(p00, p00);
    for (const auto& b : dec.blocks) EXPECT_EQ(b.dim_j * b.dim_k, 1u);
    EXPECT_EQ(dec.min_memory_dim, 1u);
}

TEST(TwoProjector, AndTwoBitsPosteriors) {
    const FunctionSpec f = boolean_function(FunctionKind::And, 2);
    const CMatrix h = tensor_power(gates::hadamard(), 2);
    const auto [p00, p01] = support_pair(f, h);
    const BlockDecomposition dec = two_projector_blocks(p00, p01);
    std::size_t total = 0;
    for (const auto& b : dec.blocks) {
        EXPECT_LE(b.dim_j * b.dim_k, 2u);
        total += b.dim_j * b.dim_k;
    }
    EXPECT_EQ(total, 4u);
    EXPECT_LE(posterior_overlap(f, h, dec), 1e-8);
}

TEST(TwoProjector, RandomBalancedReconstruction) {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 10; ++trial) {
        const FunctionSpec f = random_balanced_function(3, rng);
        const CMatrix h = tensor_power(gates::hadamard(), 3);
        const auto [p00, p01] = support_pair(f, h);
        const BlockDecomposition dec = two_projector_blocks(p00, p01);
        const ProjectorFamily fam = two_basis_family(f, h);
        EXPECT_EQ(decomposition_violation(dec, fam), "");
        for (const auto& b : dec.blocks) {
            EXPECT_LE(b.dim_j * b.dim_k, 2u);
            if (b.dim_j != 2) continue;
            // A two-dimensional block meets both the support of P00 and its complement.
            const CMatrix r = b.isometry.adjoint() * p00 * b.isometry;
            EXPECT_NEAR(r.trace().real(), 1, 1e-8);
        }
    }
}

TEST(TwoProjector, RejectsNonProjector) {
    EXPECT_SDLAB_ERROR(two_projector_blocks(0.5 * CMatrix::identity(2), CMatrix::identity(2)), ErrorKind::NotProjector);
}

TEST(Protocol, Examples) {
    EXPECT_NEAR(one_qubit_protocol_sim(boolean_function(FunctionKind::And, 2), tensor_power(gates::hadamard(), 2)), 1, 1e-9);
    EXPECT_NEAR(one_qubit_protocol_sim(boolean_function(FunctionKind::Xor, 3), tensor_power(gates::hadamard(), 3)), 1, 1e-9);
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const FunctionSpec f = random_balanced_function(3, rng);
        EXPECT_NEAR(one_qubit_protocol_sim(f, random_unitary(8, rng)), 1, 1e-9);
        EXPECT_NEAR(one_qubit_protocol_sim(f, tensor_power(gates::hadamard(), 3)), 1, 1e-9);
    }
}

TEST(Protocol, Errors) {
    const FunctionSpec f = boolean_function(FunctionKind::Xor, 2);
    EXPECT_SDLAB_ERROR(one_qubit_protocol_sim(f, CMatrix{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}),
                       ErrorKind::NotUnitary);
    EXPECT_SDLAB_ERROR(one_qubit_protocol_sim(boolean_function(FunctionKind::Xor, 9), CMatrix::identity(512)),
                       ErrorKind::SizeLimit);
}

TEST(Adversarial, Conditions) {
    std::mt19937_64 rng(111);
    for (int n = 2; n <= 4; ++n) {
        const FunctionSpec f = random_balanced_function(n, rng);
        const AdversarialBases ab = adversarial_bases(f);
        EXPECT_LE(adversarial_condition_error(ab), 1e-9);
        for (std::size_t i = 0; i < ab.a.size(); ++i) {
            EXPECT_GT(ab.a[i], 0);
            EXPECT_LT(ab.a[i], 1);
            if (i > 0) EXPECT_NE(ab.a[i], ab.a[i - 1]);
        }
        EXPECT_NEAR(partial_strategy_value(f, ab), 5.0 / 6, 1e-9);
    }
}

TEST(Adversarial, RejectsUnbalanced) {
    EXPECT_SDLAB_ERROR(adversarial_bases(boolean_function(FunctionKind::And, 2)), ErrorKind::NotBalanced);
}

TEST(PropIdentity, Examples) {
    EXPECT_TRUE(prop_identity_check(3.0 * CMatrix::identity(2), CMatrix::identity(2), gates::hadamard()));
    EXPECT_FALSE(prop_identity_check(gates::pauli_z(), CMatrix::identity(2), gates::hadamard()));
    const CMatrix diag = CMatrix::diagonal(std::vector<double>{0.1, 0.7, -0.2, 1.3, 0.4});
    EXPECT_FALSE(prop_identity_check(diag, CMatrix::identity(5), gates::fourier(5)));
}

TEST(PropIdentity, Errors) {
    EXPECT_SDLAB_ERROR(prop_identity_check(CMatrix{{0, 1}, {0, 0}}, CMatrix::identity(2), gates::hadamard()),
                       ErrorKind::NotHermitian);
    EXPECT_SDLAB_ERROR(prop_identity_check(CMatrix::identity(2), CMatrix::identity(2), CMatrix::identity(2)),
                       ErrorKind::NotMub);
}
