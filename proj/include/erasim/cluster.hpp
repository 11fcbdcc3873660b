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

#ifndef ERASIM_CLUSTER_H
#define ERASIM_CLUSTER_H

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "erasim/circuit.hpp"
#include "erasim/noise.hpp"

namespace erasim {

// ---------------------------------------------------------------------------
// Hybrid-fusion cluster-state experiment.
//
// Geometry in doubled coordinates, x in [0, 2(dx-1)], y in [0, 2(dz-1)]:
//   - X-type qubits ("mids") live where exactly one coordinate is odd; the
//     same sites repeat in every layer, joined by inter-layer CZ columns.
//   - Z-type qubits ("corners") live at (even,even) on even layers and
//     (odd,odd) on odd layers.
//   - Resource structures tile each layer's faces on a checkerboard: bulk
//     faces carry 8-rings, boundary-cut faces carry open chains of 3 or 5
//     qubits. Interior corners host two structures and are fused; boundary
//     corners host one and are measured directly in Z.
//   - Cell detectors: the four mids around a face plus the fused ZZ outcomes
//     of the vertex above and below the face center, with fusion XX outcomes
//     folded in where the tracked byproduct correction touches the face.
// ---------------------------------------------------------------------------

struct RingResource {
    int size = 8;
    bool open_chain = false;
    std::vector<bool> is_x_type;  // per qubit in ring order
    CircuitIR fragment;
    std::vector<GateNoiseSpec> noise_specs;
    double acceptance_probability = 1.0;  // (1-p_e)^{#CZ}
};

// Standalone resource-state builder: even sizes are closed rings, odd sizes
// open chains ending on X-type qubits. Sampling is conditioned on no erasure
// (postselection handled analytically), so CZ sites carry only the Pauli
// component at rate p_p/(1-p_e).
inline RingResource build_ring_resource(int size, const NoiseParams& params) {
    if (size != 3 && size != 4 && size != 5 && size != 6 && size != 8) {
        throw std::invalid_argument("supported resource sizes: 3,5 (chains), 4,6,8 (rings)");
    }
    RingResource r;
    r.size = size;
    r.open_chain = size % 2 == 1;
    r.fragment.qubit_count = (uint32_t)size;
    r.noise_specs.push_back(make_postselected_noise(params));

    // Rings alternate X/Z starting from X; odd chains start and end on X.
    for (int k = 0; k < size; k++) {
        r.is_x_type.push_back(k % 2 == 0);
    }
    for (int k = 0; k < size; k++) {
        r.fragment.add(Gate::RESET_PLUS, {(uint32_t)k});
    }
    int num_cz = r.open_chain ? size - 1 : size;
    for (int k = 0; k < num_cz; k++) {
        uint32_t a = (uint32_t)k, b = (uint32_t)((k + 1) % size);
        uint32_t cz = r.fragment.add(Gate::CZ, {a, b});
        r.fragment.attach_noise(cz, 0);
    }
    for (int k = 0; k < size; k++) {
        if (!r.is_x_type[k]) {
            r.fragment.add(Gate::H, {(uint32_t)k});
        }
    }
    r.fragment.finalize();
    double pe = params.p_e();
    r.acceptance_probability = std::pow(1 - pe, num_cz);
    return r;
}

// Slot bookkeeping returned by the fusion emitter.
struct FusionSlots {
    std::vector<uint32_t> zz;  // m_a, m'_i, m'_j (branch-complementary)
    std::vector<uint32_t> xx;  // m_i, m_j
    int32_t herald_first = -1;
    int32_t herald_second = -1;
};

// Emits the adaptive bias-preserving fusion of qubits i and j through a fresh
// ancilla. If either CZ heralds, the X measurements are skipped and both
// fusion qubits are measured in Z instead (an erased fusion qubit counts as
// measured 1; constants drop out of detector parities). The erased XX outcome
// is a lost byproduct correction, carried as a 1/2-probability Z product on
// `correction_targets` inside the heralding gate's erasure distribution.
inline FusionSlots append_fusion(CircuitIR& c, uint32_t qi, uint32_t qj, uint32_t ancilla,
                                 uint32_t noise_spec, const std::vector<uint32_t>& correction_targets,
                                 uint32_t& next_slot, int layer = -1) {
    FusionSlots slots;
    c.add(Gate::RESET_PLUS, {ancilla}, layer);
    uint32_t cz1 = c.add(Gate::CZ, {qi, ancilla}, layer);
    slots.herald_first = c.new_herald();
    c.attach_noise(cz1, noise_spec, slots.herald_first, std::nullopt, correction_targets);
    uint32_t cz2 = c.add(Gate::CZ, {qj, ancilla}, layer);
    slots.herald_second = c.new_herald();
    c.attach_noise(cz2, noise_spec, slots.herald_second,
                   Condition{{(uint32_t)slots.herald_first}, false}, correction_targets);

    Condition no_erasure{{(uint32_t)slots.herald_first, (uint32_t)slots.herald_second}, true};
    Condition erased{{(uint32_t)slots.herald_first, (uint32_t)slots.herald_second}, false};

    uint32_t m = c.add(Gate::MEASURE_X, {ancilla}, layer);
    c.instructions[m].condition = no_erasure;
    slots.zz.push_back(next_slot++);
    m = c.add(Gate::MEASURE_X, {qi}, layer);
    c.instructions[m].condition = no_erasure;
    slots.xx.push_back(next_slot++);
    m = c.add(Gate::MEASURE_X, {qj}, layer);
    c.instructions[m].condition = no_erasure;
    slots.xx.push_back(next_slot++);
    m = c.add(Gate::MEASURE_Z, {qi}, layer);
    c.instructions[m].condition = erased;
    slots.zz.push_back(next_slot++);
    m = c.add(Gate::MEASURE_Z, {qj}, layer);
    c.instructions[m].condition = erased;
    slots.zz.push_back(next_slot++);
    return slots;
}

struct ClusterExperiment {
    int dx = 0, dz = 0, dt = 0;
    CircuitIR circuit;
    std::vector<GateNoiseSpec> noise_specs;

    struct Structure {
        int cx, cy, layer;
        bool closed;
        std::vector<std::pair<int, int>> positions;  // arc order
        std::vector<uint32_t> qubits;
    };
    std::vector<Structure> structures;
    std::map<std::tuple<int, int, int>, uint32_t> cell_of;  // (cx, cy, t) -> detector id
    std::vector<int> detector_layer;                        // detector id -> t
    double ring_acceptance_probability = 1.0;
    size_t fusion_count = 0;
    size_t unfused_count = 0;
    size_t interlayer_cz_count = 0;
};

namespace cluster_detail {

inline bool is_mid(int x, int y) {
    return (x % 2 != 0) != (y % 2 != 0);
}

// Checkerboard phase per layer parity. The even-layer phase is chosen so the
// face at (1,1) hosts a ring (the observable's cut column must contain rings).
inline bool colored(int cx, int cy, int t) {
    int phase = t % 2 == 0 ? 1 : 0;
    int v = ((cx + cy) / 2) % 2;
    if (v < 0) v += 2;
    return v == phase;
}

}  // namespace cluster_detail

// Builds the contracted hybrid-fusion experiment: postselected resource
// structures per layer, adaptive fusions at shared corners, inter-layer CZ
// columns ordered above-first with the conditional noise-skip rule, and final
// X measurements of all X-type qubits. Declares six-body (boundary-truncated)
// cell detectors and, for odd dt, one membrane observable.
inline ClusterExperiment build_cluster_experiment(int dx, int dz, int dt, const NoiseParams& params) {
    using cluster_detail::colored;
    using cluster_detail::is_mid;
    if (dx < 2 || dz < 2 || dt < 2) {
        throw std::invalid_argument("cluster dims must each be at least 2");
    }
    params.validate();

    ClusterExperiment exp;
    exp.dx = dx;
    exp.dz = dz;
    exp.dt = dt;
    const int xmax = 2 * (dx - 1), ymax = 2 * (dz - 1);
    auto in_bounds = [&](int x, int y) { return x >= 0 && x <= xmax && y >= 0 && y <= ymax; };

    // Noise specs: 0 = postselected ring CZ; 1 = inter-layer CZ; 2/3 = fusion
    // CZ with 2/1 correction targets. All hybrid gates use the conditioned
    // Pauli rate p_p/(1-p_e).
    NoiseParams cond = params;
    cond.conditional_pauli = true;
    exp.noise_specs.push_back(make_postselected_noise(params));
    exp.noise_specs.push_back(make_gate_noise(cond));
    for (size_t aux_count : {2u, 1u}) {
        GateNoiseSpec spec = make_gate_noise(cond);
        spec.aux_count = aux_count;
        std::vector<std::pair<std::vector<Pauli>, double>> with_coin;
        for (auto& [ops, pr] : spec.erasure_paulis) {
            for (int coin = 0; coin < 2; coin++) {
                auto full = ops;
                for (size_t k = 0; k < aux_count; k++) {
                    full.push_back(coin ? Pauli::Z : Pauli::I);
                }
                with_coin.push_back({full, pr / 2});
            }
        }
        spec.erasure_paulis = std::move(with_coin);
        exp.noise_specs.push_back(spec);
    }

    CircuitIR& c = exp.circuit;
    uint32_t next_qubit = 0;
    uint32_t next_slot = 0;

    // --- Structures per layer -------------------------------------------
    // position (x, y, t) of X-type qubits -> qubit id
    std::map<std::tuple<int, int, int>, uint32_t> mid_qubit;
    // corner registry: (x, y, t) -> list of (qubit, structure index)
    std::map<std::tuple<int, int, int>, std::vector<std::pair<uint32_t, size_t>>> corner_hosts;

    const int ring_dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    const int ring_dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};

    for (int t = 0; t < dt; t++) {
        bool even = t % 2 == 0;
        // Face centers: (odd,odd) extended one step outside for even layers,
        // (even,even) in bounds for odd layers.
        int c0 = even ? -1 : 0;
        int cx_hi = even ? xmax + 1 : xmax;
        int cy_hi = even ? ymax + 1 : ymax;
        for (int cx = c0; cx <= cx_hi; cx += 2) {
            for (int cy = c0; cy <= cy_hi; cy += 2) {
                if (!colored(cx, cy, t)) continue;
                // Collect the in-bounds arc of the ring around (cx, cy).
                std::vector<int> keep;
                for (int k = 0; k < 8; k++) {
                    if (in_bounds(cx + ring_dx[k], cy + ring_dy[k])) keep.push_back(k);
                }
                if (keep.size() < 3) continue;
                bool closed = keep.size() == 8;
                int start = 0;
                if (!closed) {
                    // Rotate to the contiguous arc start (predecessor absent).
                    for (int k : keep) {
                        bool prev_in = in_bounds(cx + ring_dx[(k + 7) % 8], cy + ring_dy[(k + 7) % 8]);
                        if (!prev_in) {
                            start = k;
                            break;
                        }
                    }
                }
                ClusterExperiment::Structure st;
                st.cx = cx;
                st.cy = cy;
                st.layer = t;
                st.closed = closed;
                bool gap_seen = false;
                for (int off = 0; off < 8; off++) {
                    int k = (start + off) % 8;
                    int x = cx + ring_dx[k], y = cy + ring_dy[k];
                    if (!in_bounds(x, y)) {
                        gap_seen = true;
                        continue;
                    }
                    if (gap_seen) {
                        throw std::logic_error("boundary structure arc is not contiguous");
                    }
                    st.positions.push_back({x, y});
                }
                size_t sidx = exp.structures.size();
                for (auto& [x, y] : st.positions) {
                    uint32_t q = next_qubit++;
                    st.qubits.push_back(q);
                    if (is_mid(x, y)) {
                        mid_qubit[{x, y, t}] = q;
                    } else {
                        corner_hosts[{x, y, t}].push_back({q, sidx});
                    }
                }
                exp.structures.push_back(std::move(st));
            }
        }
    }
    c.qubit_count = next_qubit;  // grows later with fusion ancillas

    // --- Resource-state circuits ----------------------------------------
    for (auto& st : exp.structures) {
        for (uint32_t q : st.qubits) {
            c.add(Gate::RESET_PLUS, {q}, st.layer);
        }
        size_t n = st.positions.size();
        size_t num_cz = st.closed ? n : n - 1;
        for (size_t k = 0; k < num_cz; k++) {
            uint32_t cz = c.add(Gate::CZ, {st.qubits[k], st.qubits[(k + 1) % n]}, st.layer);
            c.attach_noise(cz, 0);
        }
        for (size_t k = 0; k < n; k++) {
            if (!is_mid(st.positions[k].first, st.positions[k].second)) {
                c.add(Gate::H, {st.qubits[k]}, st.layer);
            }
        }
    }
    double pe = params.p_e();
    exp.ring_acceptance_probability = std::pow(1 - pe, 8);

    // --- Fusions and direct Z measurements at corners --------------------
    // vertex (x,y,t) -> zz slot set; mid (x,y,t) -> fusion xx slots XORed in
    // by the byproduct correction.
    std::map<std::tuple<int, int, int>, std::vector<uint32_t>> vertex_zz;
    std::map<std::tuple<int, int, int>, std::vector<std::vector<uint32_t>>> mid_xx_corrections;
    std::map<std::tuple<int, int, int>, FusionSlots> fusion_at;

    auto structure_neighbor_mids = [&](size_t sidx, uint32_t corner_qubit) {
        const auto& st = exp.structures[sidx];
        size_t n = st.positions.size();
        std::vector<uint32_t> mids;
        for (size_t k = 0; k < n; k++) {
            if (st.qubits[k] != corner_qubit) continue;
            if (st.closed) {
                mids.push_back(st.qubits[(k + n - 1) % n]);
                mids.push_back(st.qubits[(k + 1) % n]);
            } else {
                if (k > 0) mids.push_back(st.qubits[k - 1]);
                if (k + 1 < n) mids.push_back(st.qubits[k + 1]);
            }
            break;
        }
        return mids;
    };
    auto position_of = [&](size_t sidx, uint32_t q) -> std::pair<int, int> {
        const auto& st = exp.structures[sidx];
        for (size_t k = 0; k < st.qubits.size(); k++) {
            if (st.qubits[k] == q) return st.positions[k];
        }
        throw std::logic_error("qubit not in structure");
    };

    for (auto& [key, hosts] : corner_hosts) {
        auto [x, y, t] = key;
        if (hosts.size() == 1) {
            uint32_t m = c.add(Gate::MEASURE_Z, {hosts[0].first}, t);
            (void)m;
            vertex_zz[key] = {next_slot++};
            exp.unfused_count++;
            continue;
        }
        if (hosts.size() != 2) {
            throw std::logic_error("corner hosted by more than two structures");
        }
        uint32_t qi = hosts[0].first, qj = hosts[1].first;
        std::vector<uint32_t> corr = structure_neighbor_mids(hosts[0].second, qi);
        uint32_t anc = next_qubit++;
        c.qubit_count = next_qubit;
        uint32_t spec = corr.size() == 2 ? 2 : 3;
        auto slots = append_fusion(c, qi, qj, anc, spec, corr, next_slot, t);
        vertex_zz[key] = slots.zz;
        for (uint32_t mq : corr) {
            auto pos = position_of(hosts[0].second, mq);
            mid_xx_corrections[{pos.first, pos.second, t}].push_back(slots.xx);
        }
        fusion_at[key] = slots;
        exp.fusion_count++;
    }
    c.qubit_count = next_qubit;

    // --- Inter-layer CZ columns (above-layer first, noise-skip rule) -----
    for (int x = 0; x <= xmax; x++) {
        for (int y = 0; y <= ymax; y++) {
            if (!is_mid(x, y)) continue;
            int32_t herald_above = -1;
            for (int k = dt - 2; k >= 0; k--) {
                uint32_t qa = mid_qubit.at({x, y, k});
                uint32_t qb = mid_qubit.at({x, y, k + 1});
                uint32_t cz = c.add(Gate::CZ, {qa, qb}, dt + k);
                int32_t h = c.new_herald();
                std::optional<Condition> nsup;
                if (herald_above >= 0) {
                    nsup = Condition{{(uint32_t)herald_above}, false};
                }
                c.attach_noise(cz, 1, h, nsup);
                herald_above = h;
                exp.interlayer_cz_count++;
            }
        }
    }

    // --- Final X measurements of all mids --------------------------------
    std::map<std::tuple<int, int, int>, uint32_t> mid_slot;
    for (int t = 0; t < dt; t++) {
        for (int x = 0; x <= xmax; x++) {
            for (int y = 0; y <= ymax; y++) {
                if (!is_mid(x, y)) continue;
                c.add(Gate::MEASURE_X, {mid_qubit.at({x, y, t})}, 2 * dt + t);
                mid_slot[{x, y, t}] = next_slot++;
            }
        }
    }

    // --- Cell detectors ---------------------------------------------------
    auto toggle = [](std::set<uint32_t>& s, uint32_t v) {
        auto [it, inserted] = s.insert(v);
        if (!inserted) s.erase(it);
    };
    for (int t = 0; t < dt; t++) {
        bool even = t % 2 == 0;
        int c0 = even ? 1 : 0;
        int cx_hi = even ? xmax - 1 : xmax;
        int cy_hi = even ? ymax - 1 : ymax;
        for (int cx = c0; cx <= cx_hi; cx += 2) {
            for (int cy = c0; cy <= cy_hi; cy += 2) {
                std::set<uint32_t> slots;
                const int ndx[4] = {1, -1, 0, 0};
                const int ndy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; k++) {
                    int x = cx + ndx[k], y = cy + ndy[k];
                    if (!in_bounds(x, y)) continue;
                    toggle(slots, mid_slot.at({x, y, t}));
                    auto corr = mid_xx_corrections.find({x, y, t});
                    if (corr != mid_xx_corrections.end()) {
                        for (auto& xx : corr->second) {
                            for (uint32_t s : xx) toggle(slots, s);
                        }
                    }
                }
                for (int tt : {t - 1, t + 1}) {
                    if (tt < 0 || tt >= dt) continue;
                    auto it = vertex_zz.find({cx, cy, tt});
                    if (it == vertex_zz.end()) {
                        throw std::logic_error("missing vertex under cell");
                    }
                    for (uint32_t s : it->second) toggle(slots, s);
                }
                exp.cell_of[{cx, cy, t}] = (uint32_t)c.detectors.size();
                exp.detector_layer.push_back(t);
                c.detectors.push_back(std::vector<uint32_t>(slots.begin(), slots.end()));
            }
        }
    }

    // --- Membrane observable (odd dt) -------------------------------------
    // Product over even layers of the X outcomes of every mid belonging to a
    // ring in face column cx = 1. Per structure the corner factors of the
    // constituent stabilizers cancel pairwise, and identical even layers make
    // the vertical factors telescope, so no other slots are needed.
    if (dt % 2 == 1) {
        std::set<uint32_t> obs;
        for (auto& st : exp.structures) {
            if (st.layer % 2 != 0 || st.cx != 1) continue;
            for (size_t k = 0; k < st.positions.size(); k++) {
                auto [x, y] = st.positions[k];
                if (is_mid(x, y)) {
                    toggle(obs, mid_slot.at({x, y, st.layer}));
                }
            }
        }
        if (obs.empty()) {
            throw std::logic_error("membrane observable is empty");
        }
        c.observables.push_back(std::vector<uint32_t>(obs.begin(), obs.end()));
    }

    c.finalize();
    return exp;
}

// SVG of one layer: structures, fusions, inter-layer CZ sites.
inline std::string cluster_svg(const ClusterExperiment& exp, int layer) {
    const int xmax = 2 * (exp.dx - 1), ymax = 2 * (exp.dz - 1);
    double scale = 36, margin = 30;
    auto px = [&](double v) { return margin + (v + 1) * scale; };
    auto py = [&](double v) { return margin + (ymax + 1 - v) * scale; };
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)(2 * margin + (xmax + 3) * scale)
      << "' height='" << (int)(2 * margin + (ymax + 3) * scale) << "'>\n";
    for (auto& st : exp.structures) {
        if (st.layer != layer) continue;
        size_t n = st.positions.size();
        size_t num_cz = st.closed ? n : n - 1;
        for (size_t k = 0; k < num_cz; k++) {
            auto [x1, y1] = st.positions[k];
            auto [x2, y2] = st.positions[(k + 1) % n];
            s << "<line x1='" << px(x1) << "' y1='" << py(y1) << "' x2='" << px(x2) << "' y2='"
              << py(y2) << "' stroke='#8888cc' stroke-width='2'/>\n";
        }
    }
    for (auto& st : exp.structures) {
        if (st.layer != layer) continue;
        for (auto& [x, y] : st.positions) {
            if (cluster_detail::is_mid(x, y)) {
                s << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='6' fill='black'/>\n";
            } else {
                s << "<circle cx='" << px(x) << "' cy='" << py(y)
                  << "' r='6' fill='white' stroke='black' stroke-width='2'/>\n";
            }
        }
    }
    // Inter-layer CZ sites marked on mids.
    for (int x = 0; x <= xmax; x++) {
        for (int y = 0; y <= ymax; y++) {
            if (cluster_detail::is_mid(x, y)) {
                s << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='2' fill='#cc3333'/>\n";
            }
        }
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace erasim

#endif
