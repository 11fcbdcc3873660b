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

#ifndef ERASIM_RNG_H
#define ERASIM_RNG_H

#include <cstdint>

namespace erasim {

// SplitMix64 finalizer. Good enough avalanche for Monte Carlo substreams.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream keyed by (seed, shot, site). Streams for distinct keys
// are independent, so shots can be distributed across workers in any order and
// still reproduce bit-identical results.
struct SubstreamRng {
    uint64_t state;
    uint64_t ctr = 0;

    SubstreamRng(uint64_t seed, uint64_t shot, uint64_t site) {
        state = mix64(mix64(mix64(seed) ^ shot) ^ (site * 0xd1342543de82ef95ULL));
    }

    uint64_t next_u64() {
        return mix64(state + (++ctr) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in [0, 1) with 53 bits.
    double next_double() {
        return (double)(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bool() {
        return next_u64() & 1;
    }

    // Uniform in [0, n). n is tiny in practice, modulo bias is negligible but
    // we reject anyway to keep draws exact.
    uint32_t next_below(uint32_t n) {
        if (n <= 1) {
            return 0;
        }
        uint64_t threshold = (~uint64_t{0} / n) * n;
        uint64_t v = next_u64();
        while (v >= threshold) {
            v = next_u64();
        }
        return (uint32_t)(v % n);
    }
};

}  // namespace erasim

#endif
