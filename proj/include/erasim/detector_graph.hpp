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

#ifndef ERASIM_DETECTOR_GRAPH_H
#define ERASIM_DETECTOR_GRAPH_H

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "erasim/circuit.hpp"

namespace erasim {

// Combines probabilities of independent flip mechanisms acting on one edge.
inline double xor_probability(double p, double q) {
    return p * (1 - q) + q * (1 - p);
}

struct DetectorGraph {
    static constexpr int32_t kBoundary = -1;
    // Fixed-point scale for edge weights; decoding arithmetic is exact in
    // integers so results do not depend on summation order.
    static constexpr double kWeightScale = 65536.0;

    struct Edge {
        int32_t u = 0;
        int32_t v = kBoundary;
        double p = 0;
        double weight = 0;
        int64_t weight_int = 0;
        uint32_t obs_mask = 0;
        std::vector<uint32_t> source_sites;  // herald ids whose erasure can flip this edge
    };

    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<uint32_t>> adjacency;     // detector -> incident edge ids
    std::vector<uint32_t> boundary_edges;             // edge ids with v == kBoundary
    std::vector<std::vector<uint32_t>> herald_edges;  // herald id -> edge ids

    void finalize(uint32_t herald_count) {
        adjacency.assign(num_detectors, {});
        boundary_edges.clear();
        herald_edges.assign(herald_count, {});
        for (uint32_t e = 0; e < edges.size(); e++) {
            Edge& ed = edges[e];
            double p = std::min(ed.p, 0.5);
            ed.weight = p <= 0 ? std::numeric_limits<double>::infinity() : std::log((1 - p) / p);
            ed.weight_int = (int64_t)std::llround(std::min(ed.weight, 1e6) * kWeightScale);
            adjacency[ed.u].push_back(e);
            if (ed.v == kBoundary) {
                boundary_edges.push_back(e);
            } else {
                adjacency[ed.v].push_back(e);
            }
            std::sort(ed.source_sites.begin(), ed.source_sites.end());
            ed.source_sites.erase(std::unique(ed.source_sites.begin(), ed.source_sites.end()),
                                  ed.source_sites.end());
            for (uint32_t h : ed.source_sites) {
                herald_edges[h].push_back(e);
            }
        }
    }
};

// Per-shot syndrome handed to the decoders.
struct Syndrome {
    std::vector<uint32_t> flipped_detectors;  // ascending
    std::vector<uint32_t> erased_edges;       // edge ids, ascending
};

inline Syndrome syndrome_from_shot(const DetectorGraph& g, const ShotRecord& shot) {
    Syndrome s;
    for (uint32_t d = 0; d < shot.detector_bits.size(); d++) {
        if (shot.detector_bits[d]) s.flipped_detectors.push_back(d);
    }
    std::set<uint32_t> erased;
    for (uint32_t h : shot.erased_sites) {
        if (h < g.herald_edges.size()) {
            erased.insert(g.herald_edges[h].begin(), g.herald_edges[h].end());
        }
    }
    s.erased_edges.assign(erased.begin(), erased.end());
    return s;
}

// Per-shot edge weights: an edge whose source sites intersect the shot's
// erased sites has its flip probability XOR-combined with 1/2, i.e. weight
// exactly zero; everything else keeps its static weight.
struct ErasureOverlay {
    const DetectorGraph* graph;
    std::vector<uint8_t> erased;  // per edge

    int64_t weight(uint32_t e) const {
        return erased[e] ? 0 : graph->edges[e].weight_int;
    }
};

inline ErasureOverlay overlay_erasures(const DetectorGraph& g, const Syndrome& s) {
    ErasureOverlay o;
    o.graph = &g;
    o.erased.assign(g.edges.size(), 0);
    for (uint32_t e : s.erased_edges) {
        if (e >= g.edges.size()) {
            throw std::invalid_argument("erased edge id out of range");
        }
        o.erased[e] = 1;
    }
    return o;
}

// ---------------------------------------------------------------------------
// Graph construction by single-error enumeration.
// ---------------------------------------------------------------------------

namespace detail {

// Light-cone propagation of one event through the circuit: only instructions
// touching the frame's support are visited.
struct SparsePropagator {
    const CircuitIR& c;
    std::vector<std::vector<uint32_t>> qubit_instrs;
    std::vector<std::vector<uint32_t>> slot_detectors;
    std::vector<uint32_t> slot_obs;

    explicit SparsePropagator(const CircuitIR& circuit) : c(circuit) {
        qubit_instrs.resize(c.qubit_count);
        for (uint32_t i = 0; i < c.instructions.size(); i++) {
            for (uint32_t q : c.instructions[i].targets) {
                qubit_instrs[q].push_back(i);
            }
        }
        slot_detectors.resize(c.measurement_count);
        slot_obs.assign(c.measurement_count, 0);
        for (uint32_t d = 0; d < c.detectors.size(); d++) {
            for (uint32_t m : c.detectors[d]) slot_detectors[m].push_back(d);
        }
        for (uint32_t o = 0; o < c.observables.size(); o++) {
            for (uint32_t m : c.observables[o]) slot_obs[m] ^= 1u << o;
        }
    }

    struct Result {
        std::vector<uint32_t> flips;  // sorted detector ids
        uint32_t obs_mask = 0;
    };

    Result propagate(const Event& ev) const {
        std::vector<uint8_t> fired(c.herald_count, 0);
        if (ev.erasure) {
            fired[c.sites[c.instructions[ev.instruction].noise_site].herald] = 1;
        }
        std::map<uint32_t, std::pair<bool, bool>> frame;  // qubit -> (x, z)
        auto touch = [&](uint32_t q) -> std::pair<bool, bool>& {
            return frame.try_emplace(q, std::make_pair(false, false)).first->second;
        };
        for (auto& [q, op] : ev.pauli) {
            auto& f = touch(q);
            f.first ^= pauli_has_x(op);
            f.second ^= pauli_has_z(op);
        }
        // (instruction index, qubit) heap of pending visits.
        std::priority_queue<std::pair<uint32_t, uint32_t>, std::vector<std::pair<uint32_t, uint32_t>>,
                            std::greater<>> heap;
        auto push_next = [&](uint32_t q, uint32_t after) {
            const auto& list = qubit_instrs[q];
            auto it = std::upper_bound(list.begin(), list.end(), after);
            if (it != list.end()) heap.push({*it, q});
        };
        for (auto& [q, f] : frame) {
            push_next(q, ev.instruction);
        }

        std::set<uint32_t> det_flips;
        uint32_t obs = 0;
        while (!heap.empty()) {
            auto [i, q0] = heap.top();
            heap.pop();
            if (!frame.count(q0)) continue;  // dropped by a reset
            // Collapse duplicate entries for the same instruction.
            std::vector<uint32_t> qs{q0};
            while (!heap.empty() && heap.top().first == i) {
                qs.push_back(heap.top().second);
                heap.pop();
            }
            const Instruction& ins = c.instructions[i];
            bool executes = !ins.condition || ins.condition->satisfied(fired);
            if (executes) {
                switch (ins.gate) {
                    case Gate::H: {
                        auto& f = touch(ins.targets[0]);
                        std::swap(f.first, f.second);
                        break;
                    }
                    case Gate::CZ: {
                        auto fa = touch(ins.targets[0]);
                        auto fb = touch(ins.targets[1]);
                        if (fa.first) touch(ins.targets[1]).second ^= 1;
                        if (fb.first) touch(ins.targets[0]).second ^= 1;
                        break;
                    }
                    case Gate::CX: {
                        auto fc = touch(ins.targets[0]);
                        auto ft = touch(ins.targets[1]);
                        if (fc.first) touch(ins.targets[1]).first ^= 1;
                        if (ft.second) touch(ins.targets[0]).second ^= 1;
                        break;
                    }
                    case Gate::RESET_PLUS:
                    case Gate::RESET_ZERO:
                        frame.erase(ins.targets[0]);
                        break;
                    case Gate::MEASURE_X:
                    case Gate::MEASURE_Z: {
                        auto it = frame.find(ins.targets[0]);
                        bool flip = false;
                        if (it != frame.end()) {
                            flip = ins.gate == Gate::MEASURE_X ? it->second.second : it->second.first;
                        }
                        if (flip) {
                            uint32_t slot = c.measurement_slot[i];
                            for (uint32_t d : slot_detectors[slot]) {
                                auto [dit, inserted] = det_flips.insert(d);
                                if (!inserted) det_flips.erase(dit);
                            }
                            obs ^= slot_obs[slot];
                        }
                        break;
                    }
                }
            }
            // Schedule follow-ups for every target still carrying frame.
            for (uint32_t q : ins.targets) {
                if (frame.count(q)) push_next(q, i);
            }
        }
        Result r;
        r.flips.assign(det_flips.begin(), det_flips.end());
        r.obs_mask = obs;
        return r;
    }
};

}  // namespace detail

// Enumerates every (noise site, error component) pair, propagates it, and
// accumulates the weighted decoder graph. Events flipping more than two
// detectors are decomposed into products of already-declared edges; an event
// that cannot be decomposed is a construction failure and throws.
inline DetectorGraph build_detector_graph(const CircuitIR& c, const std::vector<GateNoiseSpec>& specs) {
    detail::SparsePropagator prop(c);
    DetectorGraph g;
    g.num_detectors = (uint32_t)c.detectors.size();
    g.num_observables = (uint32_t)c.observables.size();

    struct Mechanism {
        std::vector<uint32_t> flips;
        uint32_t obs = 0;
        double p = 0;
        std::vector<uint32_t> sources;
    };
    // Key: flips + mask.
    std::map<std::pair<std::vector<uint32_t>, uint32_t>, Mechanism> mechs;

    auto add_mech = [&](const std::vector<uint32_t>& flips, uint32_t obs, double p, int32_t herald) {
        if (p <= 0) return;
        if (flips.empty()) {
            if (obs != 0) {
                throw std::runtime_error("error mechanism flips an observable but no detectors");
            }
            return;
        }
        auto& m = mechs[{flips, obs}];
        if (m.flips.empty()) {
            m.flips = flips;
            m.obs = obs;
        }
        m.p = xor_probability(m.p, p);
        if (herald >= 0) m.sources.push_back((uint32_t)herald);
    };

    for (uint32_t s = 0; s < c.sites.size(); s++) {
        const NoiseSite& site = c.sites[s];
        const GateNoiseSpec& spec = specs[site.spec];
        const Instruction& ins = c.instructions[site.instruction];
        auto make_event = [&](const std::vector<Pauli>& ops, bool erasure) {
            Event ev;
            ev.instruction = site.instruction;
            ev.erasure = erasure;
            size_t nt = ins.targets.size();
            for (size_t k = 0; k < ops.size(); k++) {
                if (ops[k] == Pauli::I) continue;
                uint32_t q = k < nt ? ins.targets[k] : site.aux[k - nt];
                ev.pauli.push_back({q, ops[k]});
            }
            return ev;
        };
        double p_pauli_marg = (1 - spec.p_erasure) * spec.p_pauli / 15.0;
        if (p_pauli_marg > 0) {
            for (uint32_t idx = 1; idx < 16; idx++) {
                auto ev = make_event({(Pauli)(idx >> 2), (Pauli)(idx & 3)}, false);
                auto res = prop.propagate(ev);
                add_mech(res.flips, res.obs_mask, p_pauli_marg, -1);
            }
        }
        if (spec.p_erasure > 0) {
            for (auto& [ops, pr] : spec.erasure_paulis) {
                auto ev = make_event(ops, true);
                auto res = prop.propagate(ev);
                double p = spec.p_erasure * pr;
                if (res.flips.empty() && res.obs_mask == 0) {
                    // Heralded but harmless component; still marks the site as a
                    // source only through its harmful siblings.
                    continue;
                }
                add_mech(res.flips, res.obs_mask, p, site.herald);
            }
        }
    }

    // First pass: primitive (<= 2 detector) mechanisms become edges.
    std::map<std::tuple<int32_t, int32_t, uint32_t>, uint32_t> edge_index;
    std::map<int32_t, std::vector<uint32_t>> det_edges;
    auto upsert_edge = [&](int32_t u, int32_t v, uint32_t obs, double p,
                           const std::vector<uint32_t>& sources) -> uint32_t {
        if (v != DetectorGraph::kBoundary && u > v) std::swap(u, v);
        auto key = std::make_tuple(u, v, obs);
        auto it = edge_index.find(key);
        if (it == edge_index.end()) {
            DetectorGraph::Edge e;
            e.u = u;
            e.v = v;
            e.obs_mask = obs;
            e.p = p;
            e.source_sites = sources;
            g.edges.push_back(std::move(e));
            uint32_t idx = (uint32_t)(g.edges.size() - 1);
            edge_index[key] = idx;
            det_edges[u].push_back(idx);
            if (v != DetectorGraph::kBoundary) det_edges[v].push_back(idx);
            return idx;
        }
        auto& e = g.edges[it->second];
        e.p = xor_probability(e.p, p);
        e.source_sites.insert(e.source_sites.end(), sources.begin(), sources.end());
        return it->second;
    };

    std::vector<Mechanism> composite;
    for (auto& [key, m] : mechs) {
        if (m.flips.size() == 1) {
            upsert_edge((int32_t)m.flips[0], DetectorGraph::kBoundary, m.obs, m.p, m.sources);
        } else if (m.flips.size() == 2) {
            upsert_edge((int32_t)m.flips[0], (int32_t)m.flips[1], m.obs, m.p, m.sources);
        } else {
            composite.push_back(m);
        }
    }

    // Second pass: decompose composite mechanisms into declared edges.
    // Backtracking over edges covering the lowest remaining detector.
    for (auto& m : composite) {
        std::set<uint32_t> remaining(m.flips.begin(), m.flips.end());
        std::vector<uint32_t> chosen;
        uint32_t obs_left = m.obs;
        std::function<bool()> solve = [&]() -> bool {
            if (remaining.empty()) {
                return obs_left == 0;
            }
            uint32_t d = *remaining.begin();
            auto it_d = det_edges.find((int32_t)d);
            if (it_d == det_edges.end()) return false;
            // Pair d with another remaining detector (or boundary) via a
            // declared edge.
            for (uint32_t eidx : it_d->second) {
                int32_t u = g.edges[eidx].u, v = g.edges[eidx].v;
                uint32_t obs = g.edges[eidx].obs_mask;
                int32_t other = u == (int32_t)d ? v : u;
                if (other == DetectorGraph::kBoundary) {
                    remaining.erase(d);
                    chosen.push_back(eidx);
                    obs_left ^= obs;
                    if (solve()) return true;
                    obs_left ^= obs;
                    chosen.pop_back();
                    remaining.insert(d);
                } else if (remaining.count((uint32_t)other)) {
                    remaining.erase(d);
                    remaining.erase((uint32_t)other);
                    chosen.push_back(eidx);
                    obs_left ^= obs;
                    if (solve()) return true;
                    obs_left ^= obs;
                    chosen.pop_back();
                    remaining.insert(d);
                    remaining.insert((uint32_t)other);
                }
            }
            return false;
        };
        if (!solve()) {
            std::ostringstream msg;
            msg << "cannot decompose error mechanism over detectors {";
            for (uint32_t d : m.flips) msg << d << " ";
            msg << "} with observable mask " << m.obs;
            throw std::runtime_error(msg.str());
        }
        for (uint32_t eidx : chosen) {
            auto& e = g.edges[eidx];
            e.p = xor_probability(e.p, m.p);
            e.source_sites.insert(e.source_sites.end(), m.sources.begin(), m.sources.end());
        }
    }

    g.finalize(c.herald_count);
    return g;
}

// Minimum number of graph edges forming an undetectable logical error (empty
// syndrome, odd observable mask): shortest odd-mask boundary-to-boundary path
// or cycle, via Dijkstra on (node, mask parity) with unit edge weights.
inline uint32_t min_logical_error_weight(const DetectorGraph& g) {
    uint32_t n = g.num_detectors + 1;  // + boundary
    uint32_t bd = g.num_detectors;
    auto run_from = [&](uint32_t src) -> uint32_t {
        // dist[(node, parity)], parity = accumulated obs mask bit 0
        std::vector<uint32_t> dist(2 * n, UINT32_MAX);
        using Item = std::pair<uint32_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[2 * src] = 0;
        heap.push({0, 2 * src});
        while (!heap.empty()) {
            auto [d, key] = heap.top();
            heap.pop();
            if (d > dist[key]) continue;
            uint32_t x = key / 2, par = key & 1;
            const auto& inc = x == bd ? g.boundary_edges : g.adjacency[x];
            for (uint32_t e : inc) {
                const auto& ed = g.edges[e];
                uint32_t u = (uint32_t)ed.u;
                uint32_t v = ed.v == DetectorGraph::kBoundary ? bd : (uint32_t)ed.v;
                uint32_t y = u == x ? v : u;
                uint32_t npar = par ^ (ed.obs_mask & 1);
                uint32_t nkey = 2 * y + npar;
                if (d + 1 < dist[nkey]) {
                    dist[nkey] = d + 1;
                    heap.push({d + 1, nkey});
                }
            }
        }
        return dist[2 * src + 1];
    };
    uint32_t best = UINT32_MAX;
    // Boundary-to-boundary strings.
    if (!g.boundary_edges.empty()) {
        best = std::min(best, run_from(bd));
    }
    // Odd-mask cycles: any such cycle passes through an endpoint of an
    // odd-mask edge.
    std::set<uint32_t> starts;
    for (auto& e : g.edges) {
        if (e.obs_mask & 1) {
            starts.insert((uint32_t)e.u);
        }
    }
    for (uint32_t x : starts) {
        best = std::min(best, run_from(x));
    }
    return best;
}

// Documented CSV dump for external decoder interop: one header line, then one
// row per edge: u,v(-1=boundary),p,weight,obs_mask,source_sites(;-separated).
inline std::string detector_graph_csv(const DetectorGraph& g) {
    std::ostringstream out;
    out.precision(17);
    out << "num_detectors," << g.num_detectors << ",num_observables," << g.num_observables << "\n";
    out << "u,v,p,weight,obs_mask,source_sites\n";
    for (auto& e : g.edges) {
        out << e.u << "," << e.v << "," << e.p << "," << e.weight << "," << e.obs_mask << ",";
        for (size_t k = 0; k < e.source_sites.size(); k++) {
            if (k) out << ";";
            out << e.source_sites[k];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace erasim

#endif
