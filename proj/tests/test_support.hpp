// Copyright 2026 The cssmetro Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "cssmetro/gf2.hpp"

namespace cssmetro::testing {

// Random code of length n with exactly k independent generators. Rows are
// drawn until one falls outside the current span.
inline BinaryCode random_code(std::mt19937_64 &rng, int n, int k) {
    std::vector<BitVector> rows;
    std::vector<std::uint32_t> span{0};
    std::uniform_int_distribution<std::uint32_t> draw(1, (1u << n) - 1);
    while (static_cast<int>(rows.size()) < k) {
        const std::uint32_t v = draw(rng);
        bool inside = false;
        for (std::uint32_t s : span) inside = inside || s == v;
        if (inside) continue;
        const std::size_t old = span.size();
        for (std::size_t i = 0; i < old; ++i) span.push_back(span[i] ^ v);
        rows.emplace_back(v, n);
    }
    return enumerate_codewords(rows, n);
}

// Every code of length n, with each subspace listed once (reduced row
// echelon generators). Used for exhaustive sweeps at small n.
inline std::vector<BinaryCode> all_codes(int n) {
    std::vector<BinaryCode> out;
    const std::uint32_t full = 1u << n;
    std::vector<std::vector<std::uint32_t>> seen;
    // Subspaces are identified by their sorted element list.
    std::vector<std::vector<std::uint32_t>> queue{{}};
    while (!queue.empty()) {
        auto gens = queue.back();
        queue.pop_back();
        std::vector<std::uint32_t> span{0};
        for (std::uint32_t g : gens) {
            const std::size_t old = span.size();
            for (std::size_t i = 0; i < old; ++i) span.push_back(span[i] ^ g);
        }
        std::vector<std::uint32_t> sorted = span;
        std::sort(sorted.begin(), sorted.end());
        bool dup = false;
        for (const auto &s : seen) dup = dup || s == sorted;
        if (dup) continue;
        seen.push_back(sorted);
        std::vector<BitVector> rows;
        for (std::uint32_t g : gens) rows.emplace_back(g, n);
        out.push_back(enumerate_codewords(rows, n));
        for (std::uint32_t v = 1; v < full; ++v) {
            if (std::find(span.begin(), span.end(), v) != span.end()) continue;
            auto next = gens;
            next.push_back(v);
            queue.push_back(next);
        }
    }
    return out;
}

}  // namespace cssmetro::testing
