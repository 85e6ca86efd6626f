// Copyright 2026 The cssmetro Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "cssmetro/error.hpp"
#include "cssmetro/oracle.hpp"
#include "cssmetro/quantum_ops.hpp"
#include "test_support.hpp"

using namespace cssmetro;

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix single(char which) {
    ComplexMatrix m(2, 2);
    switch (which) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -kI, kI, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

// Kronecker product of single-qubit Paulis, qubit 1 leftmost.
ComplexMatrix kron_string(const std::string &letters) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (char c : letters) {
        const ComplexMatrix p = single(c);
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * p;
        }
        out = next;
    }
    return out;
}

}  // namespace

TEST_CASE("Pauli operators follow the E(a,b) phase convention") {
    // E(a,b) with a_i = b_i = 1 is Y on qubit i.
    const std::string letters[] = {"XZ", "YI", "IY", "ZZY", "XYZ", "YYY"};
    for (const std::string &s : letters) {
        std::string a, b;
        for (char c : s) {
            a += (c == 'X' || c == 'Y') ? '1' : '0';
            b += (c == 'Z' || c == 'Y') ? '1' : '0';
        }
        const ComplexMatrix e = pauli_operator({BitVector::parse(a), BitVector::parse(b)});
        CHECK((e - kron_string(s)).norm() < 1e-14);
    }
    CHECK_THROWS_AS(pauli_operator({BitVector::parse("10"), BitVector::parse("101")}), Error);
}

TEST_CASE("Hamiltonian, probe and projector agree with Kronecker constructions") {
    std::mt19937_64 rng(11);
    std::vector<BinaryCode> cases{codes::repetition(3), codes::steane_x(), codes::trivial(2)};
    for (int i = 0; i < 6; ++i) {
        const int n = 2 + i % 4;
        cases.push_back(testing::random_code(rng, n, 1 + i % n));
    }
    for (const BinaryCode &code : cases) {
        const int n = code.length();
        CHECK((hamiltonian(n) - oracle::kron_hamiltonian(n)).norm() < 1e-12);
        const DensityMatrix rho = probe_state(code);
        CHECK((rho.matrix() - oracle::outer_probe(code)).norm() < 1e-12);
        CHECK(rho.purity() == Catch::Approx(1.0).epsilon(1e-12));
        const ComplexMatrix pi = stabilizer_projector(code);
        CHECK((pi - oracle::kron_projector(code)).norm() < 1e-12);
        CHECK((pi * pi - pi).norm() < 1e-12);
        CHECK(measure_plus_probability(rho, pi) == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(4, 4), 2), Error);  // trace 4
    ComplexMatrix skew = ComplexMatrix::Identity(2, 2) / 2.0;
    skew(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(skew, 1), Error);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(3, 3) / 3.0, 1), Error);
    CHECK_THROWS_AS(check_qubits(kMaxQubits + 1), Error);

    ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    const DensityMatrix bad(negative, 1);
    CHECK(bad.min_eigenvalue() == Catch::Approx(-0.5));
    try {
        bad.require_positive();
        FAIL("negative state accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NumericalInvariant);
    }

    const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
    CHECK(mixed.purity() == Catch::Approx(1.0 / 8.0));
    CHECK(qubits_for_dim(16) == 4);
    CHECK_THROWS_AS(qubits_for_dim(12), Error);
}

TEST_CASE("trace of a product") {
    const ComplexMatrix a = kron_string("XZ");
    const ComplexMatrix b = kron_string("XZ");
    CHECK(std::abs(trace_product(a, b) - Complex(4.0)) < 1e-14);
    CHECK(std::abs(trace_product(a, kron_string("ZX"))) < 1e-14);
}
