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

#ifndef ERASIM_CIRCUIT_H
#define ERASIM_CIRCUIT_H

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "erasim/noise.hpp"
#include "erasim/pauli.hpp"
#include "erasim/rng.hpp"
#include "erasim/tableau.hpp"

namespace erasim {

// Classical condition on previously declared heralds: satisfied when any
// listed herald fired, inverted by `negate`.
struct Condition {
    std::vector<uint32_t> heralds;
    bool negate = false;

    bool satisfied(const std::vector<uint8_t>& fired) const {
        bool any = false;
        for (uint32_t h : heralds) {
            any |= fired[h] != 0;
        }
        return negate ? !any : any;
    }
};

// A noise location. `herald >= 0` marks the site's erasures as heralded.
// `suppress_if` disables sampling for the shot (the omitted-second-gate rule).
// `aux` lists extra qubits the erasure Pauli distribution may act on.
struct NoiseSite {
    uint32_t instruction = 0;
    uint32_t spec = 0;
    int32_t herald = -1;
    std::optional<Condition> suppress_if;
    std::vector<uint32_t> aux;
};

struct Instruction {
    Gate gate;
    std::vector<uint32_t> targets;
    int32_t noise_site = -1;
    std::optional<Condition> condition;
    int32_t layer = -1;
};

// A sampled error event: a Pauli fragment inserted immediately after the
// instruction at a declared noise site, optionally heralding the site.
struct Event {
    uint32_t instruction = 0;
    SparsePauli pauli;
    bool erasure = false;
};

struct ShotRecord {
    std::vector<uint8_t> detector_bits;
    std::vector<uint8_t> observable_bits;
    std::vector<uint32_t> erased_sites;  // herald ids, ascending
};

struct CircuitIR {
    uint32_t qubit_count = 0;
    std::vector<Instruction> instructions;
    std::vector<NoiseSite> sites;
    uint32_t herald_count = 0;
    std::vector<std::vector<uint32_t>> detectors;
    std::vector<std::vector<uint32_t>> observables;

    // Derived by finalize().
    std::vector<int32_t> measurement_slot;  // per instruction, -1 if none
    uint32_t measurement_count = 0;

    uint32_t add(Gate g, std::vector<uint32_t> targets, int layer = -1) {
        Instruction ins;
        ins.gate = g;
        ins.targets = std::move(targets);
        ins.layer = layer;
        instructions.push_back(std::move(ins));
        return (uint32_t)(instructions.size() - 1);
    }

    uint32_t attach_noise(uint32_t instr, uint32_t spec, int32_t herald = -1,
                          std::optional<Condition> suppress_if = std::nullopt,
                          std::vector<uint32_t> aux = {}) {
        NoiseSite s;
        s.instruction = instr;
        s.spec = spec;
        s.herald = herald;
        s.suppress_if = std::move(suppress_if);
        s.aux = std::move(aux);
        sites.push_back(std::move(s));
        instructions[instr].noise_site = (int32_t)(sites.size() - 1);
        if (herald >= 0) {
            herald_count = std::max(herald_count, (uint32_t)(herald + 1));
        }
        return (uint32_t)(sites.size() - 1);
    }

    int32_t new_herald() {
        return (int32_t)herald_count++;
    }

    void finalize() {
        measurement_slot.assign(instructions.size(), -1);
        measurement_count = 0;
        for (size_t i = 0; i < instructions.size(); i++) {
            if (gate_is_measurement(instructions[i].gate)) {
                measurement_slot[i] = (int32_t)measurement_count++;
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Frame propagation.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_event_targets(const CircuitIR& c, const Event& ev) {
    const Instruction& ins = c.instructions[ev.instruction];
    if (ins.noise_site < 0) {
        throw std::invalid_argument("event at instruction " + std::to_string(ev.instruction) +
                                    " which is not a noise site");
    }
    const NoiseSite& site = c.sites[ins.noise_site];
    for (auto& [q, op] : ev.pauli) {
        bool ok = std::find(ins.targets.begin(), ins.targets.end(), q) != ins.targets.end() ||
                  std::find(site.aux.begin(), site.aux.end(), q) != site.aux.end();
        if (!ok) {
            throw std::invalid_argument("event fragment touches qubit " + std::to_string(q) +
                                        " which is not a target of instruction " +
                                        std::to_string(ev.instruction));
        }
    }
    if (ev.erasure && site.herald < 0) {
        throw std::invalid_argument("erasure event at unheralded site");
    }
}

}  // namespace detail

// Deterministic propagation of sampled events. Inserts each fragment after
// its instruction, carries the frame forward (with conditional instructions
// skipped when their herald condition is unsatisfied), flips measurement
// outcomes where the frame anticommutes with the measured basis and clears
// the frame on resets.
inline ShotRecord propagate_shot(const CircuitIR& c, const std::vector<Event>& events) {
    std::vector<std::pair<uint32_t, const Event*>> by_instr;
    by_instr.reserve(events.size());
    for (auto& ev : events) {
        if (ev.instruction >= c.instructions.size()) {
            throw std::invalid_argument("event instruction index out of range");
        }
        detail::check_event_targets(c, ev);
        by_instr.push_back({ev.instruction, &ev});
    }
    std::stable_sort(by_instr.begin(), by_instr.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });

    PauliFrame frame(c.qubit_count);
    std::vector<uint8_t> fired(c.herald_count, 0);
    std::vector<uint8_t> flips(c.measurement_count, 0);
    std::vector<uint32_t> erased;
    size_t ep = 0;

    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& ins = c.instructions[i];
        bool executes = !ins.condition || ins.condition->satisfied(fired);
        if (executes) {
            apply_clifford(frame, ins.gate, ins.targets);
            if (ins.gate == Gate::MEASURE_X) {
                flips[c.measurement_slot[i]] = frame.z(ins.targets[0]);
            } else if (ins.gate == Gate::MEASURE_Z) {
                flips[c.measurement_slot[i]] = frame.x(ins.targets[0]);
            }
        }
        while (ep < by_instr.size() && by_instr[ep].first == i) {
            const Event& ev = *by_instr[ep].second;
            if (!executes) {
                throw std::invalid_argument("event at skipped instruction " + std::to_string(i));
            }
            frame.apply(ev.pauli);
            if (ev.erasure) {
                int32_t h = c.sites[ins.noise_site].herald;
                if (!fired[h]) {
                    fired[h] = 1;
                    erased.push_back((uint32_t)h);
                }
            }
            ep++;
        }
    }

    ShotRecord rec;
    rec.detector_bits.resize(c.detectors.size());
    for (size_t d = 0; d < c.detectors.size(); d++) {
        uint8_t v = 0;
        for (uint32_t m : c.detectors[d]) {
            v ^= flips[m];
        }
        rec.detector_bits[d] = v;
    }
    rec.observable_bits.resize(c.observables.size());
    for (size_t o = 0; o < c.observables.size(); o++) {
        uint8_t v = 0;
        for (uint32_t m : c.observables[o]) {
            v ^= flips[m];
        }
        rec.observable_bits[o] = v;
    }
    std::sort(erased.begin(), erased.end());
    rec.erased_sites = std::move(erased);
    return rec;
}

// Samples one shot's noise events. Draws come from counter-based substreams
// keyed by (seed, shot, site), so results do not depend on worker scheduling.
inline std::vector<Event> sample_events(const CircuitIR& c, const std::vector<GateNoiseSpec>& specs,
                                        uint64_t seed, uint64_t shot) {
    std::vector<Event> events;
    std::vector<uint8_t> fired(c.herald_count, 0);
    for (size_t s = 0; s < c.sites.size(); s++) {
        const NoiseSite& site = c.sites[s];
        const Instruction& ins = c.instructions[site.instruction];
        if (ins.condition && !ins.condition->satisfied(fired)) {
            continue;
        }
        if (site.suppress_if && site.suppress_if->satisfied(fired)) {
            continue;
        }
        SubstreamRng rng(seed, shot, s);
        NoiseEvent ev = sample_gate_noise(specs[site.spec], rng);
        if (ev.kind == NoiseEvent::Kind::NONE) {
            continue;
        }
        Event out;
        out.instruction = site.instruction;
        out.erasure = ev.kind == NoiseEvent::Kind::ERASURE;
        size_t nt = ins.targets.size();
        for (size_t k = 0; k < ev.ops.size(); k++) {
            if (ev.ops[k] == Pauli::I) continue;
            uint32_t q = k < nt ? ins.targets[k] : site.aux[k - nt];
            out.pauli.push_back({q, ev.ops[k]});
        }
        if (out.erasure) {
            fired[site.herald] = 1;
            events.push_back(std::move(out));
        } else if (!out.pauli.empty()) {
            events.push_back(std::move(out));
        }
    }
    return events;
}

// Note: sample_events assumes sites appear in instruction order so that
// herald-dependent suppression sees earlier outcomes; builders guarantee this
// and validate_circuit checks it.

inline ShotRecord simulate_shot(const CircuitIR& c, const std::vector<GateNoiseSpec>& specs,
                                uint64_t seed, uint64_t shot) {
    return propagate_shot(c, sample_events(c, specs, seed, shot));
}

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

struct ValidationIssue {
    std::string message;
    int64_t instruction = -1;
    int64_t detector = -1;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool tableau_checked = false;

    bool ok() const {
        return issues.empty();
    }
    std::string to_string() const {
        std::ostringstream ss;
        for (auto& i : issues) {
            ss << i.message;
            if (i.instruction >= 0) ss << " (instruction " << i.instruction << ")";
            if (i.detector >= 0) ss << " (detector " << i.detector << ")";
            ss << "\n";
        }
        return ss.str();
    }
};

// Structural checks plus, for small circuits, a full stabilizer-tableau check
// that every detector parity is deterministic under noiseless execution (the
// observable too). A nondeterministic detector never passes silently.
inline ValidationReport validate_circuit(const CircuitIR& c, size_t max_tableau_qubits = 24) {
    ValidationReport rep;
    auto issue = [&](std::string msg, int64_t instr = -1, int64_t det = -1) {
        rep.issues.push_back({std::move(msg), instr, det});
    };

    std::vector<uint8_t> herald_seen(c.herald_count, 0);
    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& ins = c.instructions[i];
        if (ins.targets.size() != gate_arity(ins.gate)) {
            issue("gate arity mismatch", i);
            continue;
        }
        for (uint32_t q : ins.targets) {
            if (q >= c.qubit_count) issue("target out of range", i);
        }
        if (ins.targets.size() == 2 && ins.targets[0] == ins.targets[1]) {
            issue("two-qubit gate with repeated target", i);
        }
        auto check_condition = [&](const Condition& cond, const char* what) {
            for (uint32_t h : cond.heralds) {
                if (h >= c.herald_count) {
                    issue(std::string(what) + " references undeclared herald", i);
                } else if (!herald_seen[h]) {
                    issue(std::string(what) + " references herald from a later instruction", i);
                }
            }
        };
        if (ins.condition) check_condition(*ins.condition, "condition");
        if (ins.noise_site >= 0) {
            const NoiseSite& site = c.sites[ins.noise_site];
            if (site.instruction != i) issue("noise site instruction mismatch", i);
            if (site.suppress_if) check_condition(*site.suppress_if, "noise suppression");
            for (uint32_t q : site.aux) {
                if (q >= c.qubit_count) issue("noise aux target out of range", i);
            }
            if (site.herald >= 0) {
                if ((uint32_t)site.herald >= c.herald_count) {
                    issue("herald id out of range", i);
                } else if (herald_seen[site.herald]) {
                    issue("herald id reused", i);
                } else {
                    herald_seen[site.herald] = 1;
                }
            }
        }
    }
    for (size_t d = 0; d < c.detectors.size(); d++) {
        for (uint32_t m : c.detectors[d]) {
            if (m >= c.measurement_count) {
                issue("detector references measurement beyond circuit end", -1, d);
            }
        }
    }
    for (auto& obs : c.observables) {
        for (uint32_t m : obs) {
            if (m >= c.measurement_count) issue("observable references measurement beyond circuit end");
        }
    }
    if (!rep.ok() || c.qubit_count > max_tableau_qubits) {
        return rep;
    }

    // Noiseless tableau runs with independent random measurement outcomes; a
    // detector is deterministic iff its parity agrees across all runs.
    rep.tableau_checked = true;
    const int kRuns = 32;
    std::vector<std::vector<uint8_t>> det_runs, obs_runs;
    for (int run = 0; run < kRuns; run++) {
        Tableau t(c.qubit_count);
        SubstreamRng rng(0x5eed5eedULL, (uint64_t)run, 0);
        auto rb = [&] { return rng.next_bool(); };
        std::vector<uint8_t> outcomes(c.measurement_count, 0);
        for (size_t i = 0; i < c.instructions.size(); i++) {
            const Instruction& ins = c.instructions[i];
            if (ins.condition && !ins.condition->satisfied(std::vector<uint8_t>(c.herald_count, 0))) {
                continue;
            }
            switch (ins.gate) {
                case Gate::H: t.h(ins.targets[0]); break;
                case Gate::CZ: t.cz(ins.targets[0], ins.targets[1]); break;
                case Gate::CX: t.cx(ins.targets[0], ins.targets[1]); break;
                case Gate::RESET_PLUS: t.reset_plus(ins.targets[0], rb); break;
                case Gate::RESET_ZERO: t.reset_zero(ins.targets[0], rb); break;
                case Gate::MEASURE_X:
                    outcomes[c.measurement_slot[i]] = t.measure_x(ins.targets[0], rb).outcome;
                    break;
                case Gate::MEASURE_Z:
                    outcomes[c.measurement_slot[i]] = t.measure_z(ins.targets[0], rb).outcome;
                    break;
            }
        }
        std::vector<uint8_t> dets(c.detectors.size(), 0), obs(c.observables.size(), 0);
        for (size_t d = 0; d < c.detectors.size(); d++) {
            for (uint32_t m : c.detectors[d]) dets[d] ^= outcomes[m];
        }
        for (size_t o = 0; o < c.observables.size(); o++) {
            for (uint32_t m : c.observables[o]) obs[o] ^= outcomes[m];
        }
        det_runs.push_back(std::move(dets));
        obs_runs.push_back(std::move(obs));
    }
    for (size_t d = 0; d < c.detectors.size(); d++) {
        for (int run = 1; run < kRuns; run++) {
            if (det_runs[run][d] != det_runs[0][d]) {
                issue("detector is not deterministic under noiseless execution", -1, d);
                break;
            }
        }
    }
    for (size_t o = 0; o < c.observables.size(); o++) {
        for (int run = 1; run < kRuns; run++) {
            if (obs_runs[run][o] != obs_runs[0][o]) {
                issue("observable is not deterministic under noiseless execution");
                break;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Plain-text format. One instruction per line:
//   GATE q [q2] [@noise=<spec>] [@herald=<h>] [@aux=q,q] [@nsup=<cond>]
//         [@if=<cond>] [@layer=<n>]
// where <cond> is h|h|... or !h|h|... (negated disjunction). DETECTOR and
// OBSERVABLE lines list measurement back-references. Round-trippable.
// ---------------------------------------------------------------------------

inline std::string condition_to_string(const Condition& cond) {
    std::string s = cond.negate ? "!" : "";
    for (size_t k = 0; k < cond.heralds.size(); k++) {
        if (k) s += "|";
        s += "h" + std::to_string(cond.heralds[k]);
    }
    return s;
}

inline Condition condition_from_string(std::string s) {
    Condition cond;
    if (!s.empty() && s[0] == '!') {
        cond.negate = true;
        s = s.substr(1);
    }
    size_t pos = 0;
    while (pos < s.size()) {
        size_t bar = s.find('|', pos);
        std::string tok = s.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
        if (tok.empty() || tok[0] != 'h') {
            throw std::invalid_argument("bad condition token: " + tok);
        }
        cond.heralds.push_back((uint32_t)std::stoul(tok.substr(1)));
        if (bar == std::string::npos) break;
        pos = bar + 1;
    }
    return cond;
}

inline std::string circuit_to_text(const CircuitIR& c) {
    std::ostringstream out;
    out << "QUBITS " << c.qubit_count << "\n";
    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& ins = c.instructions[i];
        out << gate_name(ins.gate);
        for (uint32_t q : ins.targets) out << " " << q;
        if (ins.noise_site >= 0) {
            const NoiseSite& s = c.sites[ins.noise_site];
            out << " @noise=" << s.spec;
            if (s.herald >= 0) out << " @herald=" << s.herald;
            if (!s.aux.empty()) {
                out << " @aux=";
                for (size_t k = 0; k < s.aux.size(); k++) {
                    if (k) out << ",";
                    out << s.aux[k];
                }
            }
            if (s.suppress_if) out << " @nsup=" << condition_to_string(*s.suppress_if);
        }
        if (ins.condition) out << " @if=" << condition_to_string(*ins.condition);
        if (ins.layer >= 0) out << " @layer=" << ins.layer;
        out << "\n";
    }
    for (auto& det : c.detectors) {
        out << "DETECTOR";
        for (uint32_t m : det) out << " " << m;
        out << "\n";
    }
    for (auto& obs : c.observables) {
        out << "OBSERVABLE";
        for (uint32_t m : obs) out << " " << m;
        out << "\n";
    }
    return out.str();
}

inline CircuitIR circuit_from_text(const std::string& text) {
    CircuitIR c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "QUBITS") {
            ls >> c.qubit_count;
            continue;
        }
        if (word == "DETECTOR" || word == "OBSERVABLE") {
            std::vector<uint32_t> refs;
            uint32_t m;
            while (ls >> m) refs.push_back(m);
            (word == "DETECTOR" ? c.detectors : c.observables).push_back(std::move(refs));
            continue;
        }
        Gate g;
        if (word == "H") g = Gate::H;
        else if (word == "CZ") g = Gate::CZ;
        else if (word == "CX") g = Gate::CX;
        else if (word == "RESET_PLUS") g = Gate::RESET_PLUS;
        else if (word == "RESET_ZERO") g = Gate::RESET_ZERO;
        else if (word == "MEASURE_X") g = Gate::MEASURE_X;
        else if (word == "MEASURE_Z") g = Gate::MEASURE_Z;
        else throw std::invalid_argument("unknown gate: " + word);

        std::vector<uint32_t> targets;
        std::vector<std::string> attrs;
        while (ls >> word) {
            if (word[0] == '@') {
                attrs.push_back(word);
            } else {
                targets.push_back((uint32_t)std::stoul(word));
            }
        }
        uint32_t idx = c.add(g, std::move(targets));
        int64_t spec = -1, herald = -1, layer = -1;
        std::optional<Condition> nsup, iff;
        std::vector<uint32_t> aux;
        for (auto& a : attrs) {
            size_t eq = a.find('=');
            std::string key = a.substr(0, eq), val = a.substr(eq + 1);
            if (key == "@noise") spec = std::stol(val);
            else if (key == "@herald") herald = std::stol(val);
            else if (key == "@layer") layer = std::stol(val);
            else if (key == "@nsup") nsup = condition_from_string(val);
            else if (key == "@if") iff = condition_from_string(val);
            else if (key == "@aux") {
                size_t pos = 0;
                while (pos < val.size()) {
                    size_t comma = val.find(',', pos);
                    aux.push_back((uint32_t)std::stoul(val.substr(pos, comma - pos)));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            } else {
                throw std::invalid_argument("unknown attribute: " + key);
            }
        }
        c.instructions[idx].layer = (int32_t)layer;
        c.instructions[idx].condition = iff;
        if (spec >= 0) {
            c.attach_noise(idx, (uint32_t)spec, (int32_t)herald, nsup, aux);
        } else if (herald >= 0 || nsup || !aux.empty()) {
            throw std::invalid_argument("noise attributes without @noise");
        }
    }
    c.finalize();
    return c;
}

}  // namespace erasim

#endif
