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

#ifndef ERASIM_SURFACE_CODE_H
#define ERASIM_SURFACE_CODE_H

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "erasim/circuit.hpp"
#include "erasim/noise.hpp"

namespace erasim {

enum class CodeFamily { XZZX, CSS };

// Unrotated surface-code lattice on the (2d-1)x(2d-1) grid: data qubits where
// i+j is even (d^2 + (d-1)^2 of them), ancillas where i+j is odd (2d(d-1)).
// The XZZX family couples horizontal neighbors in X and vertical neighbors in
// Z, the same plaquette pattern everywhere; the CSS family alternates all-X
// and all-Z plaquettes by ancilla sublattice.
struct SurfaceLattice {
    int distance = 0;
    CodeFamily family = CodeFamily::XZZX;

    struct Coupling {
        uint32_t data;   // data qubit index
        Pauli basis;     // X or Z
        int step;        // 0..3 schedule position (N, E, W, S)
    };
    struct Ancilla {
        int x, y;
        std::vector<Coupling> couplings;  // schedule order
    };

    std::vector<std::pair<int, int>> data_coords;   // index -> (x, y)
    std::vector<Ancilla> ancillas;
    std::map<std::pair<int, int>, uint32_t> data_index;

    size_t data_count() const { return data_coords.size(); }
    size_t ancilla_count() const { return ancillas.size(); }
    size_t coupling_count() const {
        size_t n = 0;
        for (auto& a : ancillas) n += a.couplings.size();
        return n;
    }
};

inline SurfaceLattice build_lattice(int d, CodeFamily family = CodeFamily::XZZX) {
    if (d < 2) {
        throw std::invalid_argument("distance must be at least 2");
    }
    SurfaceLattice lat;
    lat.distance = d;
    lat.family = family;
    int span = 2 * d - 1;
    for (int x = 0; x < span; x++) {
        for (int y = 0; y < span; y++) {
            if ((x + y) % 2 == 0) {
                lat.data_index[{x, y}] = (uint32_t)lat.data_coords.size();
                lat.data_coords.push_back({x, y});
            }
        }
    }
    // Schedule steps: N, E, W, S. Within a step every ancilla touches a
    // distinct data qubit, so the step is a valid parallel layer.
    const int dirs[4][2] = {{0, 1}, {1, 0}, {-1, 0}, {0, -1}};
    for (int x = 0; x < span; x++) {
        for (int y = 0; y < span; y++) {
            if ((x + y) % 2 == 0) continue;
            SurfaceLattice::Ancilla a;
            a.x = x;
            a.y = y;
            for (int s = 0; s < 4; s++) {
                int nx = x + dirs[s][0], ny = y + dirs[s][1];
                if (nx < 0 || ny < 0 || nx >= span || ny >= span) continue;
                Pauli basis;
                if (family == CodeFamily::XZZX) {
                    basis = dirs[s][1] == 0 ? Pauli::X : Pauli::Z;
                } else {
                    // CSS: ancillas with odd x measure X plaquettes.
                    basis = (x % 2 == 1) ? Pauli::X : Pauli::Z;
                }
                a.couplings.push_back({lat.data_index.at({nx, ny}), basis, s});
            }
            lat.ancillas.push_back(std::move(a));
        }
    }
    return lat;
}

struct MemoryExperiment {
    CircuitIR circuit;
    SurfaceLattice lattice;
    int rounds = 0;
    GateSet gate_set = GateSet::NATIVE;
    CodeFamily family = CodeFamily::XZZX;
    std::vector<GateNoiseSpec> noise_specs;
};

// Memory experiment: all qubits initialized in |+>, one noiseless stabilizer
// round, `rounds` noisy rounds where every two-qubit gate carries a noise and
// herald site, one final noiseless round, then a noiseless X readout of the
// left data column whose parity is the logical observable. Detectors compare
// consecutive ancilla measurements.
inline MemoryExperiment build_memory(int d, int rounds, const NoiseParams& params,
                                     CodeFamily family = CodeFamily::XZZX) {
    if (rounds < 1) {
        throw std::invalid_argument("at least one noisy round required");
    }
    params.validate();
    if (params.gate_set == GateSet::BIAS_PRESERVING_CX && family == CodeFamily::CSS) {
        // Nothing forbids it physically, but it is untested territory; the
        // supported matrix is {XZZX,CSS} x native and XZZX x BCX.
        throw std::invalid_argument("unsupported gate_set/code_family combination");
    }

    MemoryExperiment exp;
    exp.lattice = build_lattice(d, family);
    exp.rounds = rounds;
    exp.gate_set = params.gate_set;
    exp.family = family;
    exp.noise_specs.push_back(make_gate_noise(params));

    CircuitIR& c = exp.circuit;
    const SurfaceLattice& lat = exp.lattice;
    uint32_t n_data = (uint32_t)lat.data_count();
    c.qubit_count = n_data + (uint32_t)lat.ancilla_count();
    auto anc_qubit = [&](size_t a) { return n_data + (uint32_t)a; };

    int layer = 0;
    for (uint32_t q = 0; q < n_data; q++) {
        c.add(Gate::RESET_PLUS, {q}, layer);
    }

    // measurement slot bookkeeping: slots are assigned in instruction order,
    // ancilla a of round r is measured in one block per round.
    std::vector<std::vector<uint32_t>> round_slots;
    uint32_t next_slot = 0;

    int total_rounds = rounds + 2;  // noiseless init + noisy + noiseless final
    for (int r = 0; r < total_rounds; r++) {
        bool noisy = r >= 1 && r <= rounds;
        layer++;
        for (size_t a = 0; a < lat.ancilla_count(); a++) {
            c.add(Gate::RESET_PLUS, {anc_qubit(a)}, layer);
        }
        for (int step = 0; step < 4; step++) {
            layer++;
            for (size_t a = 0; a < lat.ancilla_count(); a++) {
                for (auto& cpl : lat.ancillas[a].couplings) {
                    if (cpl.step != step) continue;
                    uint32_t aq = anc_qubit(a), dq = cpl.data;
                    uint32_t gate_instr;
                    if (cpl.basis == Pauli::Z) {
                        gate_instr = c.add(Gate::CZ, {aq, dq}, layer);
                    } else if (params.gate_set == GateSet::BIAS_PRESERVING_CX) {
                        gate_instr = c.add(Gate::CX, {aq, dq}, layer);
                    } else {
                        c.add(Gate::H, {dq}, layer);
                        gate_instr = c.add(Gate::CZ, {aq, dq}, layer);
                        c.add(Gate::H, {dq}, layer);
                    }
                    if (noisy) {
                        c.attach_noise(gate_instr, 0, c.new_herald());
                    }
                }
            }
        }
        layer++;
        std::vector<uint32_t> slots;
        for (size_t a = 0; a < lat.ancilla_count(); a++) {
            c.add(Gate::MEASURE_X, {anc_qubit(a)}, layer);
            slots.push_back(next_slot++);
        }
        round_slots.push_back(std::move(slots));
    }

    // Logical X readout: left data column, x = 0.
    layer++;
    std::vector<uint32_t> obs;
    for (uint32_t q = 0; q < n_data; q++) {
        if (lat.data_coords[q].first == 0) {
            c.add(Gate::MEASURE_X, {q}, layer);
            obs.push_back(next_slot++);
        }
    }

    for (int r = 1; r < total_rounds; r++) {
        for (size_t a = 0; a < lat.ancilla_count(); a++) {
            c.detectors.push_back({round_slots[r - 1][a], round_slots[r][a]});
        }
    }
    c.observables.push_back(obs);
    c.finalize();
    return exp;
}

// SVG rendering of the lattice with schedule arrows, for documentation.
inline std::string lattice_svg(const SurfaceLattice& lat) {
    int span = 2 * lat.distance - 1;
    double scale = 40, margin = 30;
    std::ostringstream s;
    auto px = [&](double v) { return margin + v * scale; };
    auto py = [&](double v) { return margin + (span - 1 - v) * scale; };
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)(2 * margin + (span - 1) * scale)
      << "' height='" << (int)(2 * margin + (span - 1) * scale) << "'>\n";
    const int dirs[4][2] = {{0, 1}, {1, 0}, {-1, 0}, {0, -1}};
    for (auto& a : lat.ancillas) {
        for (auto& cpl : a.couplings) {
            auto [dx, dy] = lat.data_coords[cpl.data];
            s << "<line x1='" << px(a.x) << "' y1='" << py(a.y) << "' x2='" << px(dx) << "' y2='"
              << py(dy) << "' stroke='#bbbbbb'/>\n";
        }
    }
    for (auto& a : lat.ancillas) {
        for (auto& cpl : a.couplings) {
            // Arrow head a fraction along the coupling, labeled by step order.
            int s_i = cpl.step;
            double fx = a.x + dirs[s_i][0] * (0.25 + 0.12 * s_i);
            double fy = a.y + dirs[s_i][1] * (0.25 + 0.12 * s_i);
            s << "<circle cx='" << px(fx) << "' cy='" << py(fy) << "' r='2.5' fill='#cc3333'/>\n";
            s << "<text x='" << px(fx) + 3 << "' y='" << py(fy) - 3 << "' font-size='9'>" << s_i + 1
              << "</text>\n";
        }
    }
    for (auto& [x, y] : lat.data_coords) {
        s << "<circle cx='" << px(x) << "' cy='" << py(y)
          << "' r='7' fill='white' stroke='green' stroke-width='2'/>\n";
    }
    for (auto& a : lat.ancillas) {
        s << "<circle cx='" << px(a.x) << "' cy='" << py(a.y) << "' r='6' fill='black'/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace erasim

#endif
