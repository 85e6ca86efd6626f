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

#include "cssmetro/gf2.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cssmetro/error.hpp"

namespace cssmetro {

namespace {

std::uint32_t low_mask(int n) { return n >= 32 ? 0xffffffffu : ((1u << n) - 1u); }

void check_length(int n) {
    if (n < 1 || n > kMaxCodeLength) {
        fail(ErrorKind::Size, "code length " + std::to_string(n) + " outside [1, " +
                                  std::to_string(kMaxCodeLength) + "]");
    }
}

// Index of the leading (leftmost) set position, or -1.
int leading_position(std::uint32_t mask, int n) {
    if (mask == 0) return -1;
    return n - 1 - (31 - std::countl_zero(mask));
}

std::uint32_t position_bit(int position, int n) { return 1u << (n - 1 - position); }

// Incremental echelon basis keyed by pivot position. Returns false when
// `row` reduces to zero against the rows already present.
bool insert_row(std::vector<std::uint32_t> &basis, std::uint32_t row, int n) {
    for (std::uint32_t b : basis) {
        int lead = leading_position(b, n);
        if (row & position_bit(lead, n)) row ^= b;
    }
    if (row == 0) return false;
    int lead = leading_position(row, n);
    for (std::uint32_t &b : basis) {
        if (b & position_bit(lead, n)) b ^= row;
    }
    basis.push_back(row);
    std::sort(basis.begin(), basis.end(), std::greater<>());
    return true;
}

std::string_view trim(std::string_view s) {
    const char *ws = " \t\r\n";
    auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

}  // namespace

BitVector::BitVector(std::uint32_t mask, int n) : mask_(mask), n_(n) {
    if (n < 1 || n > 32) fail(ErrorKind::Size, "bit vector length must be in [1, 32]");
    if (mask & ~low_mask(n)) fail(ErrorKind::InvalidArgument, "bit vector has bits beyond its length");
    weight_ = std::popcount(mask);
}

BitVector BitVector::parse(std::string_view text) {
    if (text.empty() || text.size() > 32) {
        fail(ErrorKind::Parse, "bit string must have between 1 and 32 characters");
    }
    std::uint32_t mask = 0;
    for (char c : text) {
        if (c != '0' && c != '1') fail(ErrorKind::Parse, "invalid character '" + std::string(1, c) + "' in bit string");
        mask = (mask << 1) | static_cast<std::uint32_t>(c == '1');
    }
    return BitVector(mask, static_cast<int>(text.size()));
}

BitVector BitVector::unit(int position, int n) {
    if (position < 0 || position >= n) fail(ErrorKind::InvalidArgument, "unit vector position out of range");
    return BitVector(position_bit(position, n), n);
}

BitVector BitVector::operator^(const BitVector &other) const {
    if (n_ != other.n_) fail(ErrorKind::InvalidArgument, "length mismatch in xor");
    return BitVector(mask_ ^ other.mask_, n_);
}

int BitVector::dot(const BitVector &other) const {
    if (n_ != other.n_) fail(ErrorKind::InvalidArgument, "length mismatch in inner product");
    return std::popcount(mask_ & other.mask_) & 1;
}

std::string BitVector::str() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i) s[static_cast<std::size_t>(i)] = (*this)[i] ? '1' : '0';
    return s;
}

WeightEnumerator::WeightEnumerator(std::vector<std::uint64_t> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) fail(ErrorKind::InvalidArgument, "weight enumerator needs at least one coefficient");
}

std::uint64_t WeightEnumerator::total() const { return std::accumulate(coeffs_.begin(), coeffs_.end(), std::uint64_t{0}); }

bool BinaryCode::contains(const BitVector &v) const {
    return v.size() == n_ && std::binary_search(codewords_.begin(), codewords_.end(), v);
}

BinaryCode enumerate_codewords(std::span<const BitVector> generators, int n) {
    check_length(n);
    if (static_cast<int>(generators.size()) > n) {
        fail(ErrorKind::RankDeficient, "k = " + std::to_string(generators.size()) + " generators exceed length n = " +
                                           std::to_string(n));
    }
    std::vector<std::uint32_t> basis;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i].size() != n) {
            fail(ErrorKind::InvalidArgument, "generator " + std::to_string(i + 1) + " has length " +
                                                 std::to_string(generators[i].size()) + ", expected " +
                                                 std::to_string(n));
        }
        if (!insert_row(basis, generators[i].mask(), n)) {
            fail(ErrorKind::RankDeficient,
                 "generator " + std::to_string(i + 1) + " is linearly dependent on the preceding rows");
        }
    }

    BinaryCode code;
    code.n_ = n;
    for (std::uint32_t row : basis) code.generators_.emplace_back(row, n);

    std::vector<std::uint32_t> span{0};
    span.reserve(std::size_t{1} << basis.size());
    for (std::uint32_t row : basis) {
        std::size_t m = span.size();
        for (std::size_t i = 0; i < m; ++i) span.push_back(span[i] ^ row);
    }
    std::sort(span.begin(), span.end());
    code.codewords_.reserve(span.size());
    for (std::uint32_t w : span) code.codewords_.emplace_back(w, n);
    return code;
}

BinaryCode dual_code(const BinaryCode &code) {
    const int n = code.length();
    std::vector<int> pivot_of_row;
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (const BitVector &g : code.generators()) {
        int p = leading_position(g.mask(), n);
        pivot_of_row.push_back(p);
        is_pivot[static_cast<std::size_t>(p)] = true;
    }
    // Null-space basis of the reduced generator matrix: one vector per free
    // column f, with the pivot coordinates copied from column f.
    std::vector<BitVector> dual_generators;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        std::uint32_t v = position_bit(f, n);
        auto gens = code.generators();
        for (std::size_t r = 0; r < gens.size(); ++r) {
            if (gens[r][f]) v |= position_bit(pivot_of_row[r], n);
        }
        dual_generators.emplace_back(v, n);
    }
    return enumerate_codewords(dual_generators, n);
}

WeightEnumerator weight_enumerator(const BinaryCode &code) {
    std::vector<std::uint64_t> w(static_cast<std::size_t>(code.length()) + 1, 0);
    for (const BitVector &c : code.codewords()) ++w[static_cast<std::size_t>(c.weight())];
    return WeightEnumerator(std::move(w));
}

WeightEnumerator macwilliams_transform(const WeightEnumerator &w, int n, std::uint64_t code_size) {
    check_length(n);
    if (w.length() != n) fail(ErrorKind::InvalidArgument, "enumerator length does not match n");
    if (code_size == 0 || w.total() != code_size) {
        fail(ErrorKind::InvalidArgument, "enumerator coefficients do not sum to the stated code size");
    }
    // Row k holds the coefficients of (1 - z)^k (1 + z)^(n - k).
    std::vector<__int128> acc(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 0; k <= n; ++k) {
        if (w[k] == 0) continue;
        std::vector<__int128> poly{1};
        for (int i = 0; i < n; ++i) {
            const __int128 sign = i < k ? -1 : 1;
            std::vector<__int128> next(poly.size() + 1, 0);
            for (std::size_t j = 0; j < poly.size(); ++j) {
                next[j] += poly[j];
                next[j + 1] += sign * poly[j];
            }
            poly = std::move(next);
        }
        for (int j = 0; j <= n; ++j) acc[static_cast<std::size_t>(j)] += static_cast<__int128>(w[k]) * poly[static_cast<std::size_t>(j)];
    }
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n) + 1);
    const auto size = static_cast<__int128>(code_size);
    for (int j = 0; j <= n; ++j) {
        __int128 v = acc[static_cast<std::size_t>(j)];
        if (v < 0 || v % size != 0) {
            fail(ErrorKind::InvalidArgument,
                 "MacWilliams transform produced a non-integer or negative coefficient at weight " + std::to_string(j) +
                     "; input is not the enumerator of a linear code");
        }
        out[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(v / size);
    }
    return WeightEnumerator(std::move(out));
}

namespace {

double check_noise(double p, double theta) {
    const double pt = p * theta;
    if (!std::isfinite(pt) || pt < 0.0 || pt >= 1.0) {
        fail(ErrorKind::Domain, "noise rate p*theta = " + std::to_string(pt) + " must lie in [0, 1)");
    }
    return pt;
}

}  // namespace

double robustness(const WeightEnumerator &w_dual, double p, double theta, int n) {
    const double pt = check_noise(p, theta);
    if (w_dual.length() != n) fail(ErrorKind::InvalidArgument, "enumerator length does not match n");

    double termwise = 0.0;
    for (int k = 1; k <= n; ++k) {
        termwise += std::pow(1.0 - pt, n - k) * std::pow(pt, k) * static_cast<double>(w_dual[k]);
    }

    // (1-pθ)^n [W(x) - 1] with x = pθ/(1-pθ); the constant W_0 = 1 is
    // dropped before evaluation so small x does not cancel.
    const double x = pt / (1.0 - pt);
    double horner = 0.0;
    for (int k = n; k >= 1; --k) horner = (horner + static_cast<double>(w_dual[k])) * x;
    const double closed = std::pow(1.0 - pt, n) * horner;

    const double scale = std::max(std::abs(termwise), std::abs(closed));
    if (scale > 0.0 && std::abs(termwise - closed) > 1e-12 * scale) {
        fail(ErrorKind::NumericalInvariant, "robustness forms disagree beyond 1e-12 relative");
    }
    return termwise;
}

double robustness_bound_slack(const WeightEnumerator &w_dual, double p, double theta, int n) {
    const double pt = check_noise(p, theta);
    if (w_dual.length() != n) fail(ErrorKind::InvalidArgument, "enumerator length does not match n");
    double slack = 0.0;
    for (int k = 1; k <= n; ++k) {
        const auto full = binomial_u64(n, k);
        if (w_dual[k] > full) fail(ErrorKind::InvalidArgument, "enumerator coefficient exceeds binomial(n, k)");
        slack += std::pow(1.0 - pt, n - k) * std::pow(pt, k) * static_cast<double>(full - w_dual[k]);
    }
    return slack;
}

std::vector<int> zero_coordinates(const BinaryCode &code) {
    std::uint32_t support = 0;
    for (const BitVector &g : code.generators()) support |= g.mask();
    std::vector<int> out;
    for (int i = 0; i < code.length(); ++i) {
        if (!(support & position_bit(i, code.length()))) out.push_back(i);
    }
    return out;
}

namespace codes {

BinaryCode repetition(int n) {
    check_length(n);
    const BitVector ones(low_mask(n), n);
    return enumerate_codewords(std::span(&ones, 1), n);
}

BinaryCode trivial(int n) {
    check_length(n);
    return enumerate_codewords({}, n);
}

BinaryCode steane_x() {
    const std::vector<BitVector> rows{BitVector::parse("1110100"), BitVector::parse("0111010"),
                                      BitVector::parse("0011101")};
    return enumerate_codewords(rows, 7);
}

BinaryCode by_name(std::string_view name) {
    auto numeric_suffix = [&](std::string_view prefix) -> int {
        std::string_view digits = name.substr(prefix.size());
        int value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
            fail(ErrorKind::Parse, "unknown code name '" + std::string(name) + "'");
        }
        return value;
    };
    if (name == "steane") return steane_x();
    if (name.starts_with("ghz")) return repetition(numeric_suffix("ghz"));
    if (name.starts_with("rep")) return repetition(numeric_suffix("rep"));
    if (name.starts_with("trivial")) return trivial(numeric_suffix("trivial"));
    fail(ErrorKind::Parse, "unknown code name '" + std::string(name) + "'");
}

}  // namespace codes

BinaryCode parse_code(std::string_view text) {
    int declared_n = -1;
    std::vector<BitVector> rows;
    std::vector<std::uint32_t> basis;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.empty() || line.front() == '#') continue;
        if (line.starts_with("n=")) {
            std::string_view digits = trim(line.substr(2));
            int value = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
            if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
                fail(ErrorKind::Parse, where + "malformed header '" + std::string(line) + "'");
            }
            if (declared_n != -1 || !rows.empty()) fail(ErrorKind::Parse, where + "header must precede all rows");
            check_length(value);
            declared_n = value;
            continue;
        }
        BitVector row;
        try {
            row = BitVector::parse(line);
        } catch (const Error &e) {
            fail(ErrorKind::Parse, where + e.what());
        }
        const int n = declared_n != -1 ? declared_n : (rows.empty() ? row.size() : rows.front().size());
        if (row.size() != n) {
            fail(ErrorKind::Parse, where + "row has length " + std::to_string(row.size()) + ", expected " +
                                       std::to_string(n));
        }
        if (n > kMaxCodeLength) fail(ErrorKind::Size, where + "code length exceeds " + std::to_string(kMaxCodeLength));
        if (!insert_row(basis, row.mask(), n)) {
            fail(ErrorKind::RankDeficient, where + "row is linearly dependent on the preceding rows");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        if (declared_n == -1) fail(ErrorKind::Parse, "no generator rows and no n=<N> header");
        return codes::trivial(declared_n);
    }
    return enumerate_codewords(rows, rows.front().size());
}

BinaryCode load_code_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open code file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_code(buffer.str());
    } catch (const Error &e) {
        fail(e.kind(), path + ": " + e.what());
    }
}

std::string format_code(const BinaryCode &code) {
    std::string out = "n=" + std::to_string(code.length()) + "\n";
    for (const BitVector &g : code.generators()) out += g.str() + "\n";
    return out;
}

std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

double binomial(int n, int k) { return static_cast<double>(binomial_u64(n, k)); }

}  // namespace cssmetro
