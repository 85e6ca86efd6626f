// Copyright 2026 The cssmetro Authors
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

#include "cssmetro/quantum_ops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cssmetro/error.hpp"

namespace cssmetro {

void check_qubits(int n) {
    if (n < 1 || n > kMaxQubits) {
        fail(ErrorKind::Size, "qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
}

int qubits_for_dim(Eigen::Index dim) {
    if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
        fail(ErrorKind::InvalidArgument, "operator dimension " + std::to_string(dim) + " is not a power of two");
    }
    int n = std::countr_zero(static_cast<std::uint64_t>(dim));
    check_qubits(n);
    return n;
}

double hermiticity_defect(const ComplexMatrix &a) {
    if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "matrix is not square");
    double defect = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) defect = std::max(defect, std::abs(a(i, j) - std::conj(a(j, i))));
    }
    return defect;
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, int n_qubits) : matrix_(std::move(matrix)), n_(n_qubits) {
    check_qubits(n_);
    if (matrix_.rows() != (Eigen::Index{1} << n_) || matrix_.cols() != matrix_.rows()) {
        fail(ErrorKind::InvalidArgument, "density matrix shape does not match 2^" + std::to_string(n_));
    }
    if (!matrix_.allFinite()) fail(ErrorKind::NumericalInvariant, "density matrix has non-finite entries");
    if (hermiticity_defect(matrix_) > kHermitianTol) {
        fail(ErrorKind::NumericalInvariant, "density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > kTraceTol) {
        fail(ErrorKind::NumericalInvariant, "density matrix trace differs from 1");
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    check_qubits(n_qubits);
    const Eigen::Index d = Eigen::Index{1} << n_qubits;
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d), n_qubits);
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return trace_product(matrix_, matrix_).real(); }

void DensityMatrix::require_positive() const {
    const double lo = min_eigenvalue();
    if (lo < -kPositivityTol) {
        fail(ErrorKind::NumericalInvariant, "density matrix has eigenvalue " + std::to_string(lo));
    }
}

ComplexMatrix pauli_operator(const PauliLabel &label) {
    const int n = label.x_part.size();
    if (label.z_part.size() != n) fail(ErrorKind::InvalidArgument, "Pauli label parts differ in length");
    check_qubits(n);
    const std::uint32_t a = label.x_part.mask();
    const std::uint32_t b = label.z_part.mask();
    // E(a,b)|x> = i^{|a&b|} (-1)^{<b,x>} |x ^ a>
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex phase = kIPow[std::popcount(a & b) % 4];
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(d); ++x) {
        const double sign = (std::popcount(b & x) & 1) ? -1.0 : 1.0;
        out(x ^ a, x) = phase * sign;
    }
    return out;
}

DensityMatrix probe_state(const BinaryCode &code) {
    const int n = code.length();
    check_qubits(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    const double amp = 1.0 / static_cast<double>(code.size());
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    for (const BitVector &x : code.codewords()) {
        for (const BitVector &y : code.codewords()) rho(x.mask(), y.mask()) = amp;
    }
    return DensityMatrix(std::move(rho), n);
}

ComplexMatrix hamiltonian(int n) {
    check_qubits(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (Eigen::Index x = 0; x < d; ++x) h(x, x) = n - 2 * std::popcount(static_cast<std::uint32_t>(x));
    return h;
}

ComplexMatrix stabilizer_projector(const BinaryCode &code) {
    const int n = code.length();
    check_qubits(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    const double amp = 1.0 / static_cast<double>(code.size());
    ComplexMatrix pi = ComplexMatrix::Zero(d, d);
    // E(s,0) is the permutation |x> -> |x ^ s>.
    for (const BitVector &s : code.codewords()) {
        for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(d); ++x) pi(x ^ s.mask(), x) += amp;
    }
    return pi;
}

Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) fail(ErrorKind::InvalidArgument, "dimension mismatch in trace");
    // Tr(AB) = sum_ij A_ij B_ji
    return (a.array() * b.transpose().array()).sum();
}

double measure_plus_probability(const DensityMatrix &rho, const ComplexMatrix &projector) {
    if (projector.rows() != rho.dim() || projector.cols() != rho.dim()) {
        fail(ErrorKind::InvalidArgument, "projector dimension does not match the state");
    }
    const double value = trace_product(rho.matrix(), projector).real();
    if (value < -1e-9 || value > 1.0 + 1e-9) {
        fail(ErrorKind::NumericalInvariant, "Tr(rho Pi) = " + std::to_string(value) + " outside [0, 1]");
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace cssmetro
