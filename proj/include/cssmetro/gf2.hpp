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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cssmetro {

/// Longest code the explicit 2^k enumeration accepts.
inline constexpr int kMaxCodeLength = 24;

/// A length-n binary word. Position 0 is the leftmost character of the
/// textual form and is stored in the most significant of the n low bits, so
/// `mask()` doubles as the computational-basis index of |x>.
class BitVector {
  public:
    BitVector() = default;
    BitVector(std::uint32_t mask, int n);

    static BitVector parse(std::string_view text);
    static BitVector unit(int position, int n);

    int size() const noexcept { return n_; }
    std::uint32_t mask() const noexcept { return mask_; }
    int weight() const noexcept { return weight_; }
    bool operator[](int position) const noexcept { return (mask_ >> (n_ - 1 - position)) & 1u; }

    BitVector operator^(const BitVector &other) const;
    /// Binary inner product <this, other> mod 2.
    int dot(const BitVector &other) const;

    std::string str() const;

    friend bool operator==(const BitVector &, const BitVector &) = default;
    friend auto operator<=>(const BitVector &a, const BitVector &b) { return a.mask_ <=> b.mask_; }

  private:
    std::uint32_t mask_ = 0;
    int n_ = 0;
    int weight_ = 0;
};

/// Coefficients W_0..W_n of a weight enumerator.
class WeightEnumerator {
  public:
    WeightEnumerator() = default;
    explicit WeightEnumerator(std::vector<std::uint64_t> coefficients);

    int length() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::uint64_t operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
    std::span<const std::uint64_t> coefficients() const noexcept { return coeffs_; }
    std::uint64_t total() const;

    friend bool operator==(const WeightEnumerator &, const WeightEnumerator &) = default;

  private:
    std::vector<std::uint64_t> coeffs_;
};

/// An [n,k] binary linear code: a reduced generator basis plus the cached
/// 2^k codewords. Immutable after construction.
class BinaryCode {
  public:
    int length() const noexcept { return n_; }
    int dimension() const noexcept { return static_cast<int>(generators_.size()); }
    std::size_t size() const noexcept { return codewords_.size(); }

    /// Generators in reduced row echelon form.
    std::span<const BitVector> generators() const noexcept { return generators_; }
    /// Sorted by mask; codewords().front() is the zero word.
    std::span<const BitVector> codewords() const noexcept { return codewords_; }

    bool contains(const BitVector &v) const;

    friend bool operator==(const BinaryCode &a, const BinaryCode &b) {
        return a.n_ == b.n_ && a.codewords_ == b.codewords_;
    }

  private:
    friend BinaryCode enumerate_codewords(std::span<const BitVector>, int);

    int n_ = 0;
    std::vector<BitVector> generators_;
    std::vector<BitVector> codewords_;
};

/// Row-reduces the generators and spans them. Dependent rows, mismatched
/// lengths and k > n are errors.
BinaryCode enumerate_codewords(std::span<const BitVector> generators, int n);

BinaryCode dual_code(const BinaryCode &code);

WeightEnumerator weight_enumerator(const BinaryCode &code);

/// Dual enumerator via the MacWilliams identity in exact integer arithmetic.
/// Throws if the result is not a non-negative integer vector.
WeightEnumerator macwilliams_transform(const WeightEnumerator &w, int n, std::uint64_t code_size);

/// sum_{k>0} (1-pθ)^{n-k} (pθ)^k W_k. Both the termwise sum and the
/// generating-function form are evaluated and must agree.
double robustness(const WeightEnumerator &w_dual, double p, double theta, int n);

/// [1 - (1-pθ)^n] - robustness, evaluated termwise so it is never negative.
double robustness_bound_slack(const WeightEnumerator &w_dual, double p, double theta, int n);

/// Coordinates on which every codeword is zero. These are exactly the weight-1
/// dual codewords.
std::vector<int> zero_coordinates(const BinaryCode &code);

namespace codes {

BinaryCode repetition(int n);
BinaryCode trivial(int n);
/// The [7,3] code whose words are the X stabilizers of the Steane code.
BinaryCode steane_x();

/// Resolves fixture names: "ghz<N>" / "rep<N>", "trivial<N>", "steane".
BinaryCode by_name(std::string_view name);

}  // namespace codes

/// Parses the one-row-per-line text format. See README for the grammar.
BinaryCode parse_code(std::string_view text);
BinaryCode load_code_file(const std::string &path);
std::string format_code(const BinaryCode &code);

double binomial(int n, int k);
std::uint64_t binomial_u64(int n, int k);

}  // namespace cssmetro
