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

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cssmetro/gf2.hpp"

namespace cssmetro {

/// Largest register the dense simulator accepts (4096 x 4096 operators).
inline constexpr int kMaxQubits = 12;

using Complex = std::complex<double>;
/// Dense operator on N qubits. Basis index = integer value of the bit string
/// with qubit 1 as the most significant bit.
using ComplexMatrix = Eigen::MatrixXcd;

void check_qubits(int n);
int qubits_for_dim(Eigen::Index dim);

/// Hermiticity defect max |A - A^dagger|.
double hermiticity_defect(const ComplexMatrix &a);

/// A validated N-qubit state. Construction checks shape, Hermiticity (1e-10)
/// and unit trace (1e-10); positivity is checked on demand because it needs a
/// full eigendecomposition.
class DensityMatrix {
  public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    DensityMatrix(ComplexMatrix matrix, int n_qubits);

    static DensityMatrix maximally_mixed(int n_qubits);

    const ComplexMatrix &matrix() const noexcept { return matrix_; }
    int qubits() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    double min_eigenvalue() const;
    double purity() const;
    /// Throws NumericalInvariant when min_eigenvalue() < -kPositivityTol.
    void require_positive() const;

  private:
    ComplexMatrix matrix_;
    int n_;
};

struct PauliLabel {
    BitVector x_part;
    BitVector z_part;
};

/// E(a,b) = (i^{a1 b1} X^{a1} Z^{b1}) ⊗ ... ⊗ (i^{aN bN} X^{aN} Z^{bN}).
ComplexMatrix pauli_operator(const PauliLabel &label);

/// (1/|C|) sum_{x,y in C} |x><y|.
DensityMatrix probe_state(const BinaryCode &code);

/// sum_j Z_j, diagonal with entry N - 2 weight(x).
ComplexMatrix hamiltonian(int n);

/// Π = (1/|C|) sum_{s in C} E(s, 0).
ComplexMatrix stabilizer_projector(const BinaryCode &code);

/// Tr(ρ Π) clamped to [0,1]. Values outside [-1e-9, 1 + 1e-9] before clamping
/// indicate a broken state and raise NumericalInvariant.
double measure_plus_probability(const DensityMatrix &rho, const ComplexMatrix &projector);

/// Tr(A B) without forming the product.
Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b);

}  // namespace cssmetro
