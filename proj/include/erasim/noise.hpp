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

#ifndef ERASIM_NOISE_H
#define ERASIM_NOISE_H

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "erasim/pauli.hpp"
#include "erasim/rng.hpp"

namespace erasim {

// ---------------------------------------------------------------------------
// Exact Pauli-twirl oracle.
//
// Channels are given as Kraus operators on the qubit subspace (recovery from
// the leaked level already composed in). Twirling a channel {W_k} gives the
// Pauli channel with p_P = sum_k |tr(P W_k)|^2 / 4^n.
// ---------------------------------------------------------------------------

struct KrausSpec {
    size_t num_qubits = 1;  // 1 or 2
    std::vector<std::vector<std::complex<double>>> operators;  // row-major dim x dim

    size_t dim() const {
        return size_t{1} << num_qubits;
    }
};

struct PauliChannel {
    size_t num_qubits = 1;
    std::vector<double> probabilities;  // indexed by base-4 Pauli label, qubit 0 most significant

    double prob(const std::string& label) const {
        size_t idx = 0;
        for (char c : label) {
            idx = idx * 4 + (size_t)pauli_from_char(c);
        }
        return probabilities.at(idx);
    }

    static std::string label_of(size_t idx, size_t n) {
        std::string s(n, 'I');
        for (size_t q = n; q-- > 0;) {
            s[q] = pauli_char((Pauli)(idx & 3));
            idx >>= 2;
        }
        return s;
    }
};

namespace detail {

inline std::vector<std::complex<double>> pauli_matrix(size_t idx, size_t n) {
    static const std::complex<double> single[4][4] = {
        {1, 0, 0, 1},                                        // I
        {0, 1, 1, 0},                                        // X
        {0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0},  // Y
        {1, 0, 0, -1},                                       // Z
    };
    size_t dim = size_t{1} << n;
    std::vector<std::complex<double>> m(dim * dim);
    for (size_t r = 0; r < dim; r++) {
        for (size_t c = 0; c < dim; c++) {
            std::complex<double> v = 1;
            size_t rem = idx;
            for (size_t q = 0; q < n; q++) {
                size_t p = (rem >> (2 * (n - 1 - q))) & 3;
                size_t rb = (r >> (n - 1 - q)) & 1;
                size_t cb = (c >> (n - 1 - q)) & 1;
                v *= single[p][rb * 2 + cb];
                if (v == std::complex<double>(0, 0)) break;
            }
            (void)rem;
            m[r * dim + c] = v;
        }
    }
    return m;
}

}  // namespace detail

// Verifies sum_k W_k^dag W_k = I to `tol`.
inline double kraus_completeness_defect(const KrausSpec& spec) {
    size_t dim = spec.dim();
    std::vector<std::complex<double>> acc(dim * dim, 0);
    for (auto& op : spec.operators) {
        if (op.size() != dim * dim) {
            throw std::invalid_argument("Kraus operator dimension mismatch");
        }
        for (size_t r = 0; r < dim; r++) {
            for (size_t c = 0; c < dim; c++) {
                std::complex<double> v = 0;
                for (size_t k = 0; k < dim; k++) {
                    v += std::conj(op[k * dim + r]) * op[k * dim + c];
                }
                acc[r * dim + c] += v;
            }
        }
    }
    double defect = 0;
    for (size_t r = 0; r < dim; r++) {
        for (size_t c = 0; c < dim; c++) {
            std::complex<double> want = (r == c) ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(acc[r * dim + c] - want));
        }
    }
    return defect;
}

// Exact twirl, no small-p expansion. With require_complete=false the raw
// twirled weights of a sub-channel are returned (they then sum to less than
// one); that mode exists to isolate e.g. the no-jump contribution.
inline PauliChannel twirl_kraus(const KrausSpec& spec, bool require_complete = true) {
    if (spec.num_qubits != 1 && spec.num_qubits != 2) {
        throw std::invalid_argument("twirl supports 1 or 2 qubits");
    }
    if (require_complete && kraus_completeness_defect(spec) > 1e-12) {
        throw std::invalid_argument("Kraus set is not trace preserving");
    }
    size_t n = spec.num_qubits;
    size_t dim = spec.dim();
    size_t npaulis = dim * dim;
    PauliChannel out;
    out.num_qubits = n;
    out.probabilities.assign(npaulis, 0.0);
    for (size_t pi = 0; pi < npaulis; pi++) {
        auto pm = detail::pauli_matrix(pi, n);
        double total = 0;
        for (auto& op : spec.operators) {
            // tr(P^dag W) with P Hermitian: sum_{r,c} conj(P[c,r]) W[c,r].
            std::complex<double> tr = 0;
            for (size_t r = 0; r < dim; r++) {
                for (size_t c = 0; c < dim; c++) {
                    tr += std::conj(pm[c * dim + r]) * op[c * dim + r];
                }
            }
            total += std::norm(tr);
        }
        out.probabilities[pi] = total / (double)(dim * dim);
    }
    return out;
}

// Single-qubit biased erasure with recovery composed:
//   W0 = |0><0| + sqrt(1-2 pe) |1><1|,  We = sqrt(2 pe) |1><1|.
inline KrausSpec single_qubit_biased_erasure(double p_e) {
    if (p_e < 0 || p_e > 0.5) {
        throw std::invalid_argument("p_e out of range");
    }
    KrausSpec s;
    s.num_qubits = 1;
    s.operators = {
        {1, 0, 0, std::sqrt(1 - 2 * p_e)},
        {0, 0, 0, std::sqrt(2 * p_e)},
    };
    return s;
}

// Two-qubit gate channel with decay probabilities p1 (from |10>,|01>) and p2
// (from |11>), recovery composed. Basis order |00>,|01>,|10>,|11>.
inline KrausSpec two_qubit_biased_erasure(double p1, double p2) {
    auto diag = [](double a, double b, double c, double d) {
        std::vector<std::complex<double>> m(16, 0);
        m[0] = a;
        m[5] = b;
        m[10] = c;
        m[15] = d;
        return m;
    };
    KrausSpec s;
    s.num_qubits = 2;
    s.operators.push_back(diag(1, std::sqrt(1 - p1), std::sqrt(1 - p1), std::sqrt(1 - p2)));  // W0
    s.operators.push_back(diag(0, 0, std::sqrt(p1), 0));                                      // q1 decay
    s.operators.push_back(diag(0, std::sqrt(p1), 0, 0));                                      // q2 decay
    for (int k = 0; k < 3; k++) {
        s.operators.push_back(diag(0, 0, 0, std::sqrt(p2 / 3)));                              // |11> decays
    }
    return s;
}

// The no-erasure (no-jump) piece of the two-qubit channel, as a sub-channel.
inline KrausSpec two_qubit_no_jump(double p1, double p2) {
    auto full = two_qubit_biased_erasure(p1, p2);
    KrausSpec s;
    s.num_qubits = 2;
    s.operators = {full.operators[0]};
    return s;
}

// ---------------------------------------------------------------------------
// Phenomenological biased-erasure model.
// ---------------------------------------------------------------------------

enum class GateSet { NATIVE, BIAS_PRESERVING_CX };

struct NoiseParams {
    double p = 0;                    // total error probability per two-qubit gate
    double r_e = 0;                  // erasure fraction of all errors
    double eta_e = std::numeric_limits<double>::infinity();  // erasure bias
    GateSet gate_set = GateSet::NATIVE;
    bool conditional_pauli = false;  // Pauli rate p_p/(1-p_e) on the no-erasure branch
    double no_jump_a = 1.0 / 12.0;   // two-qubit no-jump coefficient

    double p_e() const { return p * r_e; }
    double p_p() const { return p * (1 - r_e); }

    void validate() const {
        if (p < 0 || p > 1) throw std::invalid_argument("p out of range");
        if (r_e < 0 || r_e > 1) throw std::invalid_argument("R_e out of range");
        if (!(eta_e > 0)) throw std::invalid_argument("eta_e must be positive");
    }
};

// Effective erasure fraction from the physical branching ratio: the no-jump
// evolution adds A R^2 p of Pauli weight, R_e = R / (1 + A R^2 p).
inline double effective_re(double branching_ratio, double p, double a) {
    if (branching_ratio < 0 || branching_ratio > 1) {
        throw std::invalid_argument("branching ratio out of range");
    }
    if (p < 0 || p > 1) {
        throw std::invalid_argument("p out of range");
    }
    return branching_ratio / (1 + a * branching_ratio * branching_ratio * p);
}

// Per-qubit Pauli distribution conditioned on an erasure: {I,Z} with weight
// p_a each and {X,Y} with weight p_b each, p_a = eta/(1+2 eta),
// p_b = 0.5/(1+2 eta). eta = inf gives (1/2, 0): fully biased.
inline std::array<double, 4> erasure_single_qubit_dist(double eta_e) {
    if (!(eta_e > 0)) {
        throw std::invalid_argument("eta_e must be positive");
    }
    if (std::isinf(eta_e)) {
        return {0.5, 0.0, 0.0, 0.5};  // I, X, Y, Z
    }
    double pa = eta_e / (1 + 2 * eta_e);
    double pb = 0.5 / (1 + 2 * eta_e);
    return {pa, pb, pb, pa};
}

// Conditional two-qubit Pauli distribution given an erasure (product of the
// single-qubit marginals).
inline PauliChannel erasure_component_channel(const NoiseParams& params) {
    auto d1 = erasure_single_qubit_dist(params.eta_e);
    PauliChannel out;
    out.num_qubits = 2;
    out.probabilities.assign(16, 0.0);
    for (size_t a = 0; a < 4; a++) {
        for (size_t b = 0; b < 4; b++) {
            out.probabilities[a * 4 + b] = d1[a] * d1[b];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-gate sampling tables.
// ---------------------------------------------------------------------------

// One entry of the per-gate probability table. `erasure_paulis` is the
// conditional Pauli distribution given a herald, over the gate's two targets
// plus any auxiliary targets (used for fusion byproduct randomness). `p_pauli`
// is the branch probability of an unheralded Pauli, drawn uniformly from the
// 15 non-identity two-qubit Paulis on the gate's targets, applied only when no
// erasure occurred.
struct GateNoiseSpec {
    double p_erasure = 0;
    double p_pauli = 0;
    size_t aux_count = 0;
    std::vector<std::pair<std::vector<Pauli>, double>> erasure_paulis;

    void validate() const {
        if (p_erasure < 0 || p_erasure > 1 || p_pauli < 0 || p_pauli > 1) {
            throw std::invalid_argument("noise spec branch probability out of range");
        }
        double total = 0;
        for (auto& [ops, pr] : erasure_paulis) {
            total += pr;
        }
        if (p_erasure > 0 && std::abs(total - 1.0) > 1e-9) {
            throw std::invalid_argument("erasure Pauli distribution must sum to 1");
        }
    }
};

struct NoiseEvent {
    enum class Kind { NONE, PAULI, ERASURE } kind = Kind::NONE;
    std::vector<Pauli> ops;  // over targets (PAULI: 2 entries; ERASURE: 2+aux)
};

// The phenomenological sampler: flip a coin for an erasure with probability
// p_e; otherwise a uniform non-identity Pauli with the branch probability.
inline NoiseEvent sample_gate_noise(const GateNoiseSpec& spec, SubstreamRng& rng) {
    NoiseEvent ev;
    if (spec.p_erasure > 0 && rng.next_double() < spec.p_erasure) {
        ev.kind = NoiseEvent::Kind::ERASURE;
        double u = rng.next_double();
        double acc = 0;
        for (auto& [ops, pr] : spec.erasure_paulis) {
            acc += pr;
            if (u < acc) {
                ev.ops = ops;
                return ev;
            }
        }
        ev.ops = spec.erasure_paulis.back().first;
        return ev;
    }
    if (spec.p_pauli > 0 && rng.next_double() < spec.p_pauli) {
        ev.kind = NoiseEvent::Kind::PAULI;
        uint32_t idx = rng.next_below(15) + 1;  // skip II
        ev.ops = {(Pauli)(idx >> 2), (Pauli)(idx & 3)};
        return ev;
    }
    return ev;
}

// Builds the standard two-qubit erasure distribution for a gate whose noise is
// expressed in the CZ frame (native CZ, or the CZ inside an H-conjugated CX).
inline std::vector<std::pair<std::vector<Pauli>, double>> erasure_paulis_two_qubit(double eta_e) {
    auto d1 = erasure_single_qubit_dist(eta_e);
    std::vector<std::pair<std::vector<Pauli>, double>> out;
    for (size_t a = 0; a < 4; a++) {
        for (size_t b = 0; b < 4; b++) {
            double pr = d1[a] * d1[b];
            if (pr > 0) {
                out.push_back({{(Pauli)a, (Pauli)b}, pr});
            }
        }
    }
    return out;
}

// Same distribution with the second qubit's component conjugated by H
// ({I,Z} -> {I,X}), the effective channel of a native CX at the CX level.
inline std::vector<std::pair<std::vector<Pauli>, double>> erasure_paulis_native_cx(double eta_e) {
    auto out = erasure_paulis_two_qubit(eta_e);
    for (auto& [ops, pr] : out) {
        if (ops[1] == Pauli::Z) {
            ops[1] = Pauli::X;
        } else if (ops[1] == Pauli::X) {
            ops[1] = Pauli::Z;
        }
    }
    return out;
}

// Standard gate spec for a noisy two-qubit gate under `params`.
inline GateNoiseSpec make_gate_noise(const NoiseParams& params) {
    params.validate();
    GateNoiseSpec spec;
    spec.p_erasure = params.p_e();
    double pp = params.p_p();
    spec.p_pauli = params.conditional_pauli && spec.p_erasure < 1 ? pp / (1 - spec.p_erasure) : pp;
    if (spec.p_pauli > 1) {
        throw std::invalid_argument("conditioned Pauli probability exceeds 1");
    }
    if (spec.p_erasure > 0) {
        spec.erasure_paulis = erasure_paulis_two_qubit(params.eta_e);
    }
    return spec;
}

// Pauli-only spec for postselected gates (no heralds; rate conditioned on no
// erasure having occurred).
inline GateNoiseSpec make_postselected_noise(const NoiseParams& params) {
    params.validate();
    GateNoiseSpec spec;
    spec.p_erasure = 0;
    double pe = params.p_e();
    spec.p_pauli = pe < 1 ? params.p_p() / (1 - pe) : 0;
    if (spec.p_pauli > 1) {
        throw std::invalid_argument("conditioned Pauli probability exceeds 1");
    }
    return spec;
}

}  // namespace erasim

#endif
