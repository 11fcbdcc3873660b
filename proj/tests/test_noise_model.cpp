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

#include <cmath>

#include "catch2/catch_amalgamated.hpp"
#include "erasim/noise.hpp"

using namespace erasim;

TEST_CASE("twirl of the zero-rate channel is the identity channel") {
    auto ch = twirl_kraus(single_qubit_biased_erasure(0.0));
    REQUIRE(ch.prob("I") == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(ch.prob("Z") == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("single-qubit biased erasure twirl matches the closed form") {
    // P(Z) = ((1 - sqrt(1-2 pe))/2)^2 + pe/2, exactly.
    for (double pe : {0.001, 0.01, 0.02, 0.1}) {
        auto ch = twirl_kraus(single_qubit_biased_erasure(pe));
        double want = std::pow((1 - std::sqrt(1 - 2 * pe)) / 2, 2) + pe / 2;
        REQUIRE(std::abs(ch.prob("Z") - want) < 1e-12);
        REQUIRE(ch.prob("X") == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(ch.prob("Y") == Catch::Approx(0.0).margin(1e-14));
        double sum = 0;
        for (double p : ch.probabilities) sum += p;
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
    }
    auto ch = twirl_kraus(single_qubit_biased_erasure(0.02));
    REQUIRE(ch.prob("Z") == Catch::Approx(0.0101021).margin(1e-6));
}

TEST_CASE("two-qubit erasure part twirls to uniform {I,Z}x{I,Z}") {
    auto full = two_qubit_biased_erasure(0.01, 0.01);
    KrausSpec jumps;
    jumps.num_qubits = 2;
    jumps.operators.assign(full.operators.begin() + 1, full.operators.end());
    auto ch = twirl_kraus(jumps, false);
    double pe = (2 * 0.01 + 0.01) / 4;
    for (const char* lbl : {"II", "IZ", "ZI", "ZZ"}) {
        REQUIRE(ch.prob(lbl) == Catch::Approx(pe / 4).margin(1e-12));
    }
    REQUIRE(ch.prob("XX") == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("no-jump channel weight is pe^2/12 with equal IZ, ZI, ZZ parts") {
    for (double p : {0.01, 0.05, 0.12}) {
        auto ch = twirl_kraus(two_qubit_no_jump(p, p), false);
        double pe = 3 * p / 4;
        double izz = ch.prob("IZ");
        REQUIRE(std::abs(ch.prob("ZI") - izz) < 1e-12);
        REQUIRE(std::abs(ch.prob("ZZ") - izz) < 1e-12);
        double total = ch.prob("IZ") + ch.prob("ZI") + ch.prob("ZZ");
        double want = pe * pe / 12;
        REQUIRE(std::abs(total - want) / want < 10 * pe);
    }
}

TEST_CASE("incomplete Kraus sets are rejected in strict mode") {
    REQUIRE_THROWS_AS(twirl_kraus(two_qubit_no_jump(0.1, 0.1)), std::invalid_argument);
    REQUIRE_NOTHROW(twirl_kraus(two_qubit_biased_erasure(0.1, 0.1)));
}

TEST_CASE("effective erasure fraction") {
    REQUIRE(effective_re(0.98, 0.08, 1.0 / 12) == Catch::Approx(0.9738).margin(5e-4));
    REQUIRE(effective_re(0.0, 0.5, 1.0 / 12) == 0.0);
    REQUIRE(effective_re(0.7, 0.3, 0.0) == 0.7);
}

TEST_CASE("erasure component distributions") {
    NoiseParams inf_bias{.p = 0.1, .r_e = 1.0};
    auto ch = erasure_component_channel(inf_bias);
    for (const char* lbl : {"II", "IZ", "ZI", "ZZ"}) {
        REQUIRE(ch.prob(lbl) == Catch::Approx(0.25).margin(1e-14));
    }
    REQUIRE(ch.prob("XI") == 0.0);

    NoiseParams unbiased{.p = 0.1, .r_e = 1.0, .eta_e = 0.5};
    auto chu = erasure_component_channel(unbiased);
    for (size_t i = 0; i < 16; i++) {
        REQUIRE(chu.probabilities[i] == Catch::Approx(1.0 / 16).margin(1e-14));
    }

    auto d1 = erasure_single_qubit_dist(1.0);
    REQUIRE(d1[0] == Catch::Approx(1.0 / 3));
    REQUIRE(d1[1] == Catch::Approx(1.0 / 6));

    REQUIRE_THROWS_AS(erasure_single_qubit_dist(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(erasure_single_qubit_dist(0.0), std::invalid_argument);
}

TEST_CASE("native CX erasure set is {I,Z}x{I,X}") {
    auto dist = erasure_paulis_native_cx(std::numeric_limits<double>::infinity());
    REQUIRE(dist.size() == 4);
    double total = 0;
    for (auto& [ops, pr] : dist) {
        REQUIRE((ops[0] == Pauli::I || ops[0] == Pauli::Z));
        REQUIRE((ops[1] == Pauli::I || ops[1] == Pauli::X));
        total += pr;
    }
    REQUIRE(total == Catch::Approx(1.0));
}

TEST_CASE("sampler matches analytic branch probabilities within 4 sigma") {
    NoiseParams params{.p = 0.1, .r_e = 0.98};
    auto spec = make_gate_noise(params);
    spec.validate();
    const int n = 1000000;
    int erasures = 0, paulis = 0;
    std::array<int, 16> erasure_counts{};
    for (int i = 0; i < n; i++) {
        SubstreamRng rng(123, (uint64_t)i, 0);
        auto ev = sample_gate_noise(spec, rng);
        if (ev.kind == NoiseEvent::Kind::ERASURE) {
            erasures++;
            erasure_counts[(int)ev.ops[0] * 4 + (int)ev.ops[1]]++;
        } else if (ev.kind == NoiseEvent::Kind::PAULI) {
            paulis++;
        }
    }
    auto within = [&](double observed, double expected_p, int trials) {
        double sigma = std::sqrt(expected_p * (1 - expected_p) * trials);
        return std::abs(observed - expected_p * trials) <= 4 * sigma + 1;
    };
    REQUIRE(within(erasures, params.p_e(), n));
    REQUIRE(within(paulis, (1 - params.p_e()) * params.p_p(), n));
    // Heralded component: uniform over {I,Z}^2.
    for (int a : {0, 3}) {
        for (int b : {0, 3}) {
            REQUIRE(within(erasure_counts[a * 4 + b], 0.25, erasures));
        }
    }
    REQUIRE(erasure_counts[1] == 0);  // no X components at infinite bias
}

TEST_CASE("conditional Pauli branch uses p_p/(1-p_e)") {
    NoiseParams params{.p = 0.2, .r_e = 0.5, .conditional_pauli = true};
    auto spec = make_gate_noise(params);
    REQUIRE(spec.p_pauli == Catch::Approx(0.1 / 0.9));
    NoiseParams plain{.p = 0.2, .r_e = 0.5};
    REQUIRE(make_gate_noise(plain).p_pauli == Catch::Approx(0.1));
}

TEST_CASE("eta = 1/2 biased sampler equals the unbiased erasure model exactly") {
    NoiseParams params{.p = 0.3, .r_e = 1.0, .eta_e = 0.5};
    auto spec = make_gate_noise(params);
    REQUIRE(spec.erasure_paulis.size() == 16);
    for (auto& [ops, pr] : spec.erasure_paulis) {
        REQUIRE(pr == Catch::Approx(1.0 / 16).margin(1e-14));
    }
}

TEST_CASE("p = 0 never produces events") {
    NoiseParams params{.p = 0.0, .r_e = 0.5};
    auto spec = make_gate_noise(params);
    for (int i = 0; i < 1000; i++) {
        SubstreamRng rng(9, (uint64_t)i, 4);
        REQUIRE(sample_gate_noise(spec, rng).kind == NoiseEvent::Kind::NONE);
    }
}
