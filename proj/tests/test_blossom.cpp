// Copyright 2026 Erasim Contributors
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

#include "erasim/blossom.hpp"

#include "catch2/catch_amalgamated.hpp"
#include "erasim/rng.hpp"

using namespace erasim;

namespace {

int64_t matching_weight(const std::vector<std::vector<int64_t>>& w,
                        const std::vector<std::pair<int, int>>& pairs) {
    int64_t total = 0;
    for (auto& [a, b] : pairs) total += w[a][b];
    return total;
}

}  // namespace

TEST_CASE("tiny instances") {
    std::vector<std::vector<int64_t>> w = {{0, 5}, {5, 0}};
    auto pairs = min_weight_perfect_matching(w);
    REQUIRE(pairs.size() == 1);
    REQUIRE(matching_weight(w, pairs) == 5);

    // Square with one cheap diagonal pairing.
    std::vector<std::vector<int64_t>> w4 = {
        {0, 1, 9, 9},
        {1, 0, 9, 9},
        {9, 9, 0, 2},
        {9, 9, 2, 0},
    };
    auto p4 = min_weight_perfect_matching(w4);
    REQUIRE(matching_weight(w4, p4) == 3);
}

TEST_CASE("odd count is rejected") {
    std::vector<std::vector<int64_t>> w(3, std::vector<int64_t>(3, 1));
    REQUIRE_THROWS_AS(min_weight_perfect_matching(w), std::invalid_argument);
}

TEST_CASE("matches brute force on random complete graphs") {
    SubstreamRng rng(4242, 0, 0);
    const int kTrials = 10000;
    for (int trial = 0; trial < kTrials; trial++) {
        int n = 2 * (1 + rng.next_below(5));  // up to 10 nodes
        std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, 0));
        // Mix of magnitudes plus frequent zero-weight ties.
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                int64_t v = rng.next_below(3) == 0 ? 0 : (int64_t)rng.next_below(1000);
                w[i][j] = w[j][i] = v;
            }
        }
        auto pairs = min_weight_perfect_matching(w);
        REQUIRE((int)pairs.size() * 2 == n);
        std::vector<uint8_t> seen(n, 0);
        for (auto& [a, b] : pairs) {
            REQUIRE(!seen[a]);
            REQUIRE(!seen[b]);
            seen[a] = seen[b] = 1;
        }
        int64_t got = matching_weight(w, pairs);
        int64_t best = brute_force_min_weight_pairing(w);
        INFO("trial " << trial << " n=" << n);
        REQUIRE(got == best);
    }
}

TEST_CASE("handles larger structured instances") {
    // Path-like costs: optimal pairs adjacent nodes.
    const int n = 64;
    std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, 0));
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            w[i][j] = w[j][i] = (int64_t)(j - i) * 10;
        }
    }
    auto pairs = min_weight_perfect_matching(w);
    REQUIRE(matching_weight(w, pairs) == 10 * (n / 2));
}
