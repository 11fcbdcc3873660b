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

#ifndef ERASIM_TABLEAU_H
#define ERASIM_TABLEAU_H

#include <cassert>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "erasim/pauli.hpp"
#include "erasim/rng.hpp"

namespace erasim {

// Aaronson-Gottesman stabilizer tableau. This is the validation oracle the
// frame simulator is checked against; it is deliberately simple (dense rows,
// O(n^2) measurements) and only meant for small circuits.
struct Tableau {
    size_t n;
    size_t w;  // words per row half
    // Rows 0..n-1 are destabilizers, n..2n-1 stabilizers.
    std::vector<uint64_t> xs, zs;
    std::vector<uint8_t> rs;

    explicit Tableau(size_t num_qubits) : n(num_qubits), w((num_qubits + 63) / 64) {
        xs.assign(2 * n * w, 0);
        zs.assign(2 * n * w, 0);
        rs.assign(2 * n, 0);
        for (size_t i = 0; i < n; i++) {
            set_x(i, i, true);        // destabilizer i = X_i
            set_z(n + i, i, true);    // stabilizer i = Z_i
        }
    }

    bool get_x(size_t row, size_t q) const {
        return (xs[row * w + (q >> 6)] >> (q & 63)) & 1;
    }
    bool get_z(size_t row, size_t q) const {
        return (zs[row * w + (q >> 6)] >> (q & 63)) & 1;
    }
    void set_x(size_t row, size_t q, bool v) {
        uint64_t m = uint64_t{1} << (q & 63);
        if (v) {
            xs[row * w + (q >> 6)] |= m;
        } else {
            xs[row * w + (q >> 6)] &= ~m;
        }
    }
    void set_z(size_t row, size_t q, bool v) {
        uint64_t m = uint64_t{1} << (q & 63);
        if (v) {
            zs[row * w + (q >> 6)] |= m;
        } else {
            zs[row * w + (q >> 6)] &= ~m;
        }
    }

    void h(size_t q) {
        for (size_t row = 0; row < 2 * n; row++) {
            bool x = get_x(row, q), z = get_z(row, q);
            rs[row] ^= x && z;
            set_x(row, q, z);
            set_z(row, q, x);
        }
    }

    void cx(size_t c, size_t t) {
        for (size_t row = 0; row < 2 * n; row++) {
            bool xc = get_x(row, c), zc = get_z(row, c);
            bool xt = get_x(row, t), zt = get_z(row, t);
            rs[row] ^= xc && zt && (xt == zc);
            set_x(row, t, xt ^ xc);
            set_z(row, c, zc ^ zt);
        }
    }

    void cz(size_t a, size_t b) {
        h(b);
        cx(a, b);
        h(b);
    }

    // Exponent-of-i contribution when left-multiplying a row containing
    // (x1,z1) on some qubit by one containing (x2,z2).
    static int phase_g(bool x1, bool z1, bool x2, bool z2) {
        if (!x1 && !z1) return 0;
        if (x1 && z1) return (int)z2 - (int)x2;
        if (x1) return (int)z2 * (2 * (int)x2 - 1);
        return (int)x2 * (1 - 2 * (int)z2);
    }

    // row_h := row_i * row_h (phases tracked mod 4; result must be Hermitian).
    void rowsum(size_t hrow, size_t irow) {
        int phase = 2 * (int)rs[hrow] + 2 * (int)rs[irow];
        for (size_t q = 0; q < n; q++) {
            phase += phase_g(get_x(irow, q), get_z(irow, q), get_x(hrow, q), get_z(hrow, q));
        }
        phase = ((phase % 4) + 4) % 4;
        assert(phase == 0 || phase == 2);
        rs[hrow] = phase == 2;
        for (size_t k = 0; k < w; k++) {
            xs[hrow * w + k] ^= xs[irow * w + k];
            zs[hrow * w + k] ^= zs[irow * w + k];
        }
    }

    bool row_anticommutes(size_t row, const SparsePauli& p) const {
        int a = 0;
        for (auto& [q, op] : p) {
            bool px = pauli_has_x(op), pz = pauli_has_z(op);
            a ^= (get_x(row, q) && pz) ^ (get_z(row, q) && px);
        }
        return a;
    }

    // Applies a Pauli unitary: flips the sign of every row that anticommutes.
    void apply_pauli(const SparsePauli& p) {
        for (size_t row = 0; row < 2 * n; row++) {
            rs[row] ^= row_anticommutes(row, p);
        }
    }

    struct MeasureResult {
        bool outcome;
        bool deterministic;
    };

    // Projective measurement of a (Hermitian, phase-free) Pauli product. When
    // the outcome is random it is taken from `random_bit`.
    MeasureResult measure_pauli(const SparsePauli& p, const std::function<bool()>& random_bit) {
        size_t pivot = 2 * n;
        for (size_t row = n; row < 2 * n; row++) {
            if (row_anticommutes(row, p)) {
                pivot = row;
                break;
            }
        }
        if (pivot < 2 * n) {
            // Random outcome.
            for (size_t row = 0; row < 2 * n; row++) {
                if (row != pivot && row_anticommutes(row, p)) {
                    rowsum(row, pivot);
                }
            }
            // Destabilizer partner becomes old stabilizer; stabilizer becomes P.
            size_t d = pivot - n;
            for (size_t k = 0; k < w; k++) {
                xs[d * w + k] = xs[pivot * w + k];
                zs[d * w + k] = zs[pivot * w + k];
            }
            rs[d] = rs[pivot];
            for (size_t k = 0; k < w; k++) {
                xs[pivot * w + k] = 0;
                zs[pivot * w + k] = 0;
            }
            for (auto& [q, op] : p) {
                set_x(pivot, q, pauli_has_x(op));
                set_z(pivot, q, pauli_has_z(op));
            }
            bool out = random_bit();
            rs[pivot] = out;
            return {out, false};
        }
        // Deterministic: accumulate the stabilizer product matching P into a
        // scratch row appended past the end.
        size_t scratch = 2 * n;
        xs.resize((2 * n + 1) * w, 0);
        zs.resize((2 * n + 1) * w, 0);
        rs.resize(2 * n + 1, 0);
        for (size_t k = 0; k < w; k++) {
            xs[scratch * w + k] = 0;
            zs[scratch * w + k] = 0;
        }
        rs[scratch] = 0;
        for (size_t i = 0; i < n; i++) {
            if (row_anticommutes(i, p)) {
                rowsum(scratch, i + n);
            }
        }
        bool out = rs[scratch];
        xs.resize(2 * n * w);
        zs.resize(2 * n * w);
        rs.resize(2 * n);
        return {out, true};
    }

    MeasureResult measure_z(size_t q, const std::function<bool()>& random_bit) {
        return measure_pauli({{(uint32_t)q, Pauli::Z}}, random_bit);
    }

    MeasureResult measure_x(size_t q, const std::function<bool()>& random_bit) {
        return measure_pauli({{(uint32_t)q, Pauli::X}}, random_bit);
    }

    void reset_zero(size_t q, const std::function<bool()>& random_bit) {
        auto m = measure_z(q, random_bit);
        if (m.outcome) {
            apply_pauli({{(uint32_t)q, Pauli::X}});
        }
    }

    void reset_plus(size_t q, const std::function<bool()>& random_bit) {
        auto m = measure_x(q, random_bit);
        if (m.outcome) {
            apply_pauli({{(uint32_t)q, Pauli::Z}});
        }
    }

    // True iff P (with sign +1) is in the stabilizer group.
    bool has_stabilizer(const SparsePauli& p) {
        Tableau copy = *this;
        auto m = copy.measure_pauli(p, [] { return false; });
        return m.deterministic && !m.outcome;
    }

    // True iff both tableaus describe the same pure stabilizer state: every
    // stabilizer generator of one (with sign) stabilizes the other. Equal
    // generator counts make one direction sufficient.
    bool same_state(const Tableau& other) const {
        if (n != other.n) return false;
        for (size_t r = n; r < 2 * n; r++) {
            SparsePauli p;
            for (size_t q = 0; q < n; q++) {
                bool x = get_x(r, q), z = get_z(r, q);
                if (x && z) p.push_back({(uint32_t)q, Pauli::Y});
                else if (x) p.push_back({(uint32_t)q, Pauli::X});
                else if (z) p.push_back({(uint32_t)q, Pauli::Z});
            }
            Tableau copy = other;
            auto m = copy.measure_pauli(p, [] { return false; });
            if (!m.deterministic || m.outcome != (bool)rs[r]) return false;
        }
        return true;
    }

    // Canonical (RREF) stabilizer list for state equality checks.
    std::vector<std::pair<std::vector<uint8_t>, bool>> canonical_stabilizers() {
        Tableau t = *this;
        size_t row = n;
        for (size_t q = 0; q < t.n && row < 2 * n; q++) {
            for (int pass = 0; pass < 2; pass++) {
                // pass 0 pivots on X, pass 1 on Z.
                size_t found = 2 * n;
                for (size_t r = row; r < 2 * n; r++) {
                    bool hit = pass == 0 ? t.get_x(r, q) : (!t.get_x(r, q) && t.get_z(r, q));
                    if (hit) {
                        found = r;
                        break;
                    }
                }
                if (found == 2 * n) {
                    continue;
                }
                if (found != row) {
                    for (size_t k = 0; k < t.w; k++) {
                        std::swap(t.xs[found * t.w + k], t.xs[row * t.w + k]);
                        std::swap(t.zs[found * t.w + k], t.zs[row * t.w + k]);
                    }
                    std::swap(t.rs[found], t.rs[row]);
                }
                for (size_t r = n; r < 2 * n; r++) {
                    if (r == row) continue;
                    bool hit = pass == 0 ? t.get_x(r, q) : (!t.get_x(r, q) && t.get_z(r, q));
                    if (pass == 0 ? hit : (hit && !t.get_x(r, q))) {
                        t.rowsum(r, row);
                    }
                }
                row++;
                if (row >= 2 * n) break;
            }
        }
        std::vector<std::pair<std::vector<uint8_t>, bool>> out;
        for (size_t r = n; r < 2 * n; r++) {
            std::vector<uint8_t> ops(t.n);
            for (size_t q = 0; q < t.n; q++) {
                ops[q] = (uint8_t)(t.get_x(r, q) | (t.get_z(r, q) << 1));
            }
            out.push_back({ops, (bool)t.rs[r]});
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

}  // namespace erasim

#endif
