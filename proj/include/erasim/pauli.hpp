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

#ifndef ERASIM_PAULI_H
#define ERASIM_PAULI_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace erasim {

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) {
    return "IXYZ"[(int)p];
}

inline Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("not a Pauli: ") + c);
    }
}

inline bool pauli_has_x(Pauli p) {
    return p == Pauli::X || p == Pauli::Y;
}

inline bool pauli_has_z(Pauli p) {
    return p == Pauli::Z || p == Pauli::Y;
}

// Sparse Pauli product without phase, e.g. a sampled error fragment.
using SparsePauli = std::vector<std::pair<uint32_t, Pauli>>;

// X/Z flip bits per qubit, tracking how a sampled error propagates through a
// Clifford circuit. Phase is not tracked; detectors and observables are parity
// functions and never see it.
struct PauliFrame {
    size_t n = 0;
    std::vector<uint64_t> x_words;
    std::vector<uint64_t> z_words;

    PauliFrame() = default;
    explicit PauliFrame(size_t num_qubits)
        : n(num_qubits), x_words((num_qubits + 63) / 64), z_words((num_qubits + 63) / 64) {
    }

    bool x(uint32_t q) const {
        return (x_words[q >> 6] >> (q & 63)) & 1;
    }
    bool z(uint32_t q) const {
        return (z_words[q >> 6] >> (q & 63)) & 1;
    }
    void flip_x(uint32_t q) {
        x_words[q >> 6] ^= uint64_t{1} << (q & 63);
    }
    void flip_z(uint32_t q) {
        z_words[q >> 6] ^= uint64_t{1} << (q & 63);
    }
    void clear_qubit(uint32_t q) {
        x_words[q >> 6] &= ~(uint64_t{1} << (q & 63));
        z_words[q >> 6] &= ~(uint64_t{1} << (q & 63));
    }
    void clear() {
        std::fill(x_words.begin(), x_words.end(), 0);
        std::fill(z_words.begin(), z_words.end(), 0);
    }
    bool is_zero() const {
        for (uint64_t w : x_words) {
            if (w) return false;
        }
        for (uint64_t w : z_words) {
            if (w) return false;
        }
        return true;
    }

    void apply(const SparsePauli& p) {
        for (auto& [q, op] : p) {
            if (q >= n) {
                throw std::out_of_range("pauli qubit out of range");
            }
            if (pauli_has_x(op)) flip_x(q);
            if (pauli_has_z(op)) flip_z(q);
        }
    }

    Pauli get(uint32_t q) const {
        bool bx = x(q), bz = z(q);
        if (bx && bz) return Pauli::Y;
        if (bx) return Pauli::X;
        if (bz) return Pauli::Z;
        return Pauli::I;
    }
};

enum class Gate : uint8_t {
    H,
    CZ,
    CX,
    RESET_PLUS,
    RESET_ZERO,
    MEASURE_X,
    MEASURE_Z,
};

inline size_t gate_arity(Gate g) {
    return (g == Gate::CZ || g == Gate::CX) ? 2 : 1;
}

inline bool gate_is_measurement(Gate g) {
    return g == Gate::MEASURE_X || g == Gate::MEASURE_Z;
}

inline bool gate_is_reset(Gate g) {
    return g == Gate::RESET_PLUS || g == Gate::RESET_ZERO;
}

inline const char* gate_name(Gate g) {
    switch (g) {
        case Gate::H: return "H";
        case Gate::CZ: return "CZ";
        case Gate::CX: return "CX";
        case Gate::RESET_PLUS: return "RESET_PLUS";
        case Gate::RESET_ZERO: return "RESET_ZERO";
        case Gate::MEASURE_X: return "MEASURE_X";
        case Gate::MEASURE_Z: return "MEASURE_Z";
    }
    return "?";
}

// Conjugates the frame by a Clifford gate (Heisenberg propagation). H swaps
// X<->Z on its target; CZ maps X(a)->X(a)Z(b), X(b)->Z(a)X(b) and leaves Z
// alone; CX maps X(c)->X(c)X(t), Z(t)->Z(c)Z(t) and leaves Z(c), X(t) alone.
inline void apply_clifford(PauliFrame& f, Gate g, const uint32_t* targets, size_t count) {
    if (count != gate_arity(g)) {
        throw std::invalid_argument("gate arity mismatch");
    }
    for (size_t i = 0; i < count; i++) {
        if (targets[i] >= f.n) {
            throw std::out_of_range("gate target out of range");
        }
    }
    switch (g) {
        case Gate::H: {
            uint32_t q = targets[0];
            bool bx = f.x(q), bz = f.z(q);
            if (bx != bz) {
                f.flip_x(q);
                f.flip_z(q);
            }
            break;
        }
        case Gate::CZ: {
            uint32_t a = targets[0], b = targets[1];
            if (a == b) throw std::invalid_argument("CZ targets must be distinct");
            if (f.x(a)) f.flip_z(b);
            if (f.x(b)) f.flip_z(a);
            break;
        }
        case Gate::CX: {
            uint32_t c = targets[0], t = targets[1];
            if (c == t) throw std::invalid_argument("CX targets must be distinct");
            if (f.x(c)) f.flip_x(t);
            if (f.z(t)) f.flip_z(c);
            break;
        }
        case Gate::RESET_PLUS:
        case Gate::RESET_ZERO:
            f.clear_qubit(targets[0]);
            break;
        case Gate::MEASURE_X:
        case Gate::MEASURE_Z:
            // Measurement does not alter the frame; the caller reads the flip.
            break;
    }
}

inline void apply_clifford(PauliFrame& f, Gate g, const std::vector<uint32_t>& targets) {
    apply_clifford(f, g, targets.data(), targets.size());
}

}  // namespace erasim

#endif
