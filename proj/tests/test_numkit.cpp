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

#include "sdlab/ensembles.hpp"
#include "sdlab/numkit.hpp"
#include "sdlab/pistar.hpp"
#include "support.hpp"

using namespace sdlab;

namespace {

const CMatrix kX{{0, 1}, {1, 0}};

void expect_eig_invariants(const CMatrix& a, const EigResult& r) {
    const double scale = std::max(1.0, a.frobenius_norm());
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const CMatrix v = r.eigenvectors.column(i);
        EXPECT_LE((a * v - r.eigenvalues[i] * v).frobenius_norm(), 1e-9 * scale);
        if (i > 0) EXPECT_GE(r.eigenvalues[i - 1], r.eigenvalues[i]);
    }
    EXPECT_LE(unitarity_error(r.eigenvectors), 1e-10);
}

void expect_svd_invariants(const CMatrix& a, const SvdResult& s) {
    EXPECT_LE((a - svd_reconstruct(s)).frobenius_norm(), 1e-9 * std::max(1.0, a.frobenius_norm()));
    EXPECT_LE(unitarity_error(s.u), 1e-10);
    EXPECT_LE(unitarity_error(s.v), 1e-10);
    for (std::size_t i = 0; i < s.singular_values.size(); ++i) {
        EXPECT_GE(s.singular_values[i], 0);
        if (i > 0) EXPECT_GE(s.singular_values[i - 1], s.singular_values[i]);
    }
}

}  // namespace

TEST(CMatrix, ShapeAndAccess) {
    CMatrix m(2, 3);
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m.data().size(), 6u);
    m(1, 2) = {1, 2};
    EXPECT_EQ(m.data()[5], Complex(1, 2));
    EXPECT_EQ(m.adjoint()(2, 1), Complex(1, -2));
    EXPECT_SDLAB_ERROR(CMatrix(2, 2) + CMatrix(3, 3), ErrorKind::DimensionMismatch);
}

TEST(HermitianEig, Identity) {
    const auto r = hermitian_eig(CMatrix::identity(2));
    EXPECT_NEAR(r.eigenvalues[0], 1, 1e-12);
    EXPECT_NEAR(r.eigenvalues[1], 1, 1e-12);
}

TEST(HermitianEig, PauliX) {
    const auto r = hermitian_eig(kX);
    EXPECT_NEAR(r.eigenvalues[0], 1, 1e-12);
    EXPECT_NEAR(r.eigenvalues[1], -1, 1e-12);
    expect_eig_invariants(kX, r);
}

TEST(HermitianEig, SingleQubitTwoBasisDifference) {
    const CMatrix h = gates::hadamard();
    const CMatrix p0 = projector(basis_ket(2, 0)), p1 = projector(basis_ket(2, 1));
    const CMatrix a = 0.5 * (p0 + h * p0 * h) - 0.5 * (p1 + h * p1 * h);
    const auto r = hermitian_eig(a);
    EXPECT_NEAR(r.eigenvalues[0], 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.eigenvalues[1], -1 / std::sqrt(2.0), 1e-12);
}

TEST(HermitianEig, RejectsNonHermitian) {
    EXPECT_SDLAB_ERROR(hermitian_eig(CMatrix{{0, 1}, {0, 0}}), ErrorKind::NotHermitian);
}

TEST(HermitianEig, RandomMatchesOracleAndTraces) {
    std::mt19937_64 rng(7);
    for (std::size_t d : {1u, 3u, 8u, 17u, 40u}) {
        const CMatrix a = random_hermitian(d, rng);
        const auto r = hermitian_eig(a);
        expect_eig_invariants(a, r);
        const auto ref = oracle::hermitian_eigenvalues(sdtest::to_oracle(a));
        double sum = 0, sum2 = 0;
        for (std::size_t i = 0; i < d; ++i) {
            EXPECT_NEAR(r.eigenvalues[i], ref[i], 1e-9 * a.frobenius_norm());
            sum += r.eigenvalues[i];
            sum2 += r.eigenvalues[i] * r.eigenvalues[i];
        }
        EXPECT_NEAR(sum, a.trace().real(), 1e-9 * a.frobenius_norm());
        EXPECT_NEAR(sum2, trace_of_product(a, a).real(), 1e-9 * a.frobenius_norm() * a.frobenius_norm());
    }
}

TEST(HermitianEig, JacobiAndTridiagonalAgree) {
    std::mt19937_64 rng(11);
    for (std::size_t d : {5u, 33u, 70u}) {
        const CMatrix a = random_hermitian(d, rng);
        const auto j = jacobi_eig(a);
        const auto t = tridiagonal_eig(a);
        expect_eig_invariants(a, j);
        expect_eig_invariants(a, t);
        for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(j.eigenvalues[i], t.eigenvalues[i], 1e-10 * a.frobenius_norm());
    }
}

TEST(HermitianEig, DegenerateLargeSpectrum) {
    // Many exactly repeated and zero eigenvalues above the Jacobi cutoff.
    const CMatrix p = tensor_power(projector(basis_ket(2, 0)), 6);
    const CMatrix u = tensor_power(gates::hadamard(), 6);
    const CMatrix a = (p + u * p * u.adjoint()).hermitian_part();
    const auto r = hermitian_eig(a);
    expect_eig_invariants(a, r);
    EXPECT_NEAR(r.eigenvalues.back(), 0, 1e-12);
}

TEST(HermitianEig, DiagonalInputExact) {
    const CMatrix a = CMatrix::diagonal(std::vector<double>{0.3, -2.0, 5.0, 1.0});
    const auto r = hermitian_eig(a);
    const std::vector<double> want{5.0, 1.0, 0.3, -2.0};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.eigenvalues[i], want[i], 1e-12);
}

TEST(HermitianEig, Deterministic) {
    std::mt19937_64 rng(3);
    const CMatrix a = random_hermitian(50, rng);
    const auto r1 = hermitian_eig(a), r2 = hermitian_eig(a);
    EXPECT_EQ(r1.eigenvalues, r2.eigenvalues);
    EXPECT_TRUE(r1.eigenvectors == r2.eigenvectors);
}

TEST(Svd, ZeroMatrix) {
    const auto s = svd(CMatrix(3, 2));
    ASSERT_EQ(s.singular_values.size(), 2u);
    EXPECT_NEAR(s.singular_values[0], 0, 1e-15);
    EXPECT_NEAR(s.singular_values[1], 0, 1e-15);
    expect_svd_invariants(CMatrix(3, 2), s);
}

TEST(Svd, UnitaryHasUnitSingularValues) {
    std::mt19937_64 rng(5);
    const CMatrix u = random_unitary(6, rng);
    const auto s = svd(u);
    for (double x : s.singular_values) EXPECT_NEAR(x, 1, 1e-10);
    expect_svd_invariants(u, s);
}

TEST(Svd, AndOffDiagonalBlockMatchesEigenOracle) {
    // P01 = H P00 H for AND on two bits, P00 = span{00, 01, 10}.
    const CMatrix h = tensor_power(gates::hadamard(), 2);
    const CMatrix p00 = CMatrix::diagonal(std::vector<double>{1, 1, 1, 0});
    const CMatrix p01 = h * p00 * h;
    CMatrix a01(3, 1);
    for (std::size_t r = 0; r < 3; ++r) a01(r, 0) = p01(r, 3);
    const auto s = svd(a01);
    expect_svd_invariants(a01, s);
    const auto ev = oracle::hermitian_eigenvalues(sdtest::to_oracle(a01 * a01.adjoint()));
    EXPECT_NEAR(s.singular_values[0], std::sqrt(ev[0]), 1e-10);
}

TEST(Svd, RandomRectangular) {
    std::mt19937_64 rng(9);
    for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 7}, {9, 3}, {6, 6}}) {
        const CMatrix a = random_gaussian(r, c, rng);
        const auto s = svd(a);
        expect_svd_invariants(a, s);
    }
}

TEST(Svd, RankDeficient) {
    std::mt19937_64 rng(21);
    const CMatrix a = random_gaussian(6, 2, rng) * random_gaussian(2, 5, rng);
    const auto s = svd(a);
    expect_svd_invariants(a, s);
    EXPECT_NEAR(s.singular_values[2], 0, 1e-10);
}

TEST(TraceNorm, Identity) { EXPECT_NEAR(trace_norm(CMatrix::identity(5)), 5, 1e-12); }

TEST(TraceNorm, SingleQubitTwoBasisStates) {
    const Ensemble e = build_ensemble(table_function(1, std::vector<int>{0, 1}), qubit_mub_bases(2),
                                      standard_prior(table_function(1, std::vector<int>{0, 1}), 2));
    EXPECT_NEAR(trace_norm(averaged_state(e, 0) - averaged_state(e, 1)), std::sqrt(2.0), 1e-12);
}

TEST(TraceNorm, TwoBitXorTwoBases) {
    const Ensemble e = standard_ensemble(FunctionKind::Xor, 2, 2);
    EXPECT_NEAR(trace_norm(averaged_state(e, 0) - averaged_state(e, 1)), 1, 1e-12);
}

TEST(TraceNorm, EqualsSumOfSingularValues) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 5; ++i) {
        const CMatrix a = random_hermitian(7, rng);
        const auto s = svd(a);
        double sum = 0;
        for (double x : s.singular_values) sum += x;
        EXPECT_NEAR(trace_norm(a), sum, 1e-8);
    }
}

TEST(TraceNorm, RejectsNonHermitian) {
    EXPECT_SDLAB_ERROR(trace_norm(CMatrix{{0, 1}, {0, 0}}), ErrorKind::NotHermitian);
}

TEST(Tensor, IdentityProduct) {
    EXPECT_TRUE(tensor_product(CMatrix::identity(2), CMatrix::identity(2)) == CMatrix::identity(4));
}

TEST(Tensor, PauliXOnZeroZero) {
    const CMatrix out = tensor_product(kX, kX) * basis_ket(4, 0);
    EXPECT_TRUE(out == basis_ket(4, 3));
}

TEST(Tensor, HadamardColumnUniform) {
    const CMatrix hh = tensor_product(gates::hadamard(), gates::hadamard());
    for (std::size_t r = 0; r < 4; ++r) EXPECT_NEAR(std::abs(hh(r, 0) - 0.5), 0, 1e-15);
}

TEST(Tensor, Associative) {
    std::mt19937_64 rng(17);
    const CMatrix a = random_gaussian(2, 3, rng), b = random_gaussian(3, 2, rng), c = random_gaussian(2, 2, rng);
    EXPECT_LE((tensor_product(tensor_product(a, b), c) - tensor_product(a, tensor_product(b, c))).max_abs(), 1e-14);
}

TEST(Tensor, MatchesOracleConvention) {
    std::mt19937_64 rng(19);
    const CMatrix a = random_gaussian(2, 2, rng), b = random_gaussian(3, 3, rng);
    EXPECT_LE(sdtest::max_diff(tensor_product(a, b), oracle::kron(sdtest::to_oracle(a), sdtest::to_oracle(b))), 0);
}

TEST(Tensor, Overflow) {
    EXPECT_SDLAB_ERROR(tensor_product(CMatrix::identity(64), CMatrix::identity(32)), ErrorKind::DimensionOverflow);
}

TEST(PsdCheck, Examples) {
    EXPECT_TRUE(psd_check(CMatrix::identity(2), 1e-9));
    EXPECT_FALSE(psd_check(-CMatrix::identity(2), 1e-9));
    const auto meas = and_pistar_measurement(2);
    EXPECT_TRUE(psd_check(meas.elements[3], 1e-9));
    EXPECT_GE(oracle::hermitian_eigenvalues(sdtest::to_oracle(meas.elements[3])).back(), -1e-9);
}

TEST(PsdCheck, RejectsNonHermitian) {
    EXPECT_SDLAB_ERROR(psd_check(CMatrix{{1, 1}, {0, 1}}, 1e-9), ErrorKind::NotHermitian);
}

TEST(Spectral, ProjectorAndRank) {
    const CMatrix a = CMatrix::diagonal(std::vector<double>{2, -1, 0});
    const CMatrix p = spectral_projector(hermitian_eig(a), [](double x) { return x > 0; });
    EXPECT_TRUE(is_projector(p));
    EXPECT_NEAR(p.trace().real(), 1, 1e-12);
    EXPECT_EQ(numerical_rank(CMatrix::diagonal(std::vector<double>{2, 1e-3, 1e-12})), 2u);
}

TEST(RandomUnitary, IsUnitaryAndSeeded) {
    std::mt19937_64 r1(1), r2(1);
    const CMatrix u1 = random_unitary(10, r1), u2 = random_unitary(10, r2);
    EXPECT_TRUE(is_unitary(u1));
    EXPECT_TRUE(u1 == u2);
}
