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

#ifndef ERASIM_PEELING_H
#define ERASIM_PEELING_H

#include <optional>
#include <vector>

#include "erasim/detector_graph.hpp"

namespace erasim {

// Shared peeling core: builds a spanning forest of the erased subgraph and
// peels leaves so the residual syndrome inside each cluster is empty. Odd
// non-boundary clusters leave one residual flip at their root (used by the
// matching reduction); flips outside the erased support are reported back.
struct PeelOutcome {
    uint32_t obs_mask = 0;
    std::vector<uint32_t> selected_edges;
    std::vector<uint32_t> residual_flips;   // one representative per odd cluster
    std::vector<uint32_t> unpeeled_flips;   // flips outside the erased support
};

inline PeelOutcome peel_erased_clusters(const DetectorGraph& g, const Syndrome& s) {
    uint32_t boundary = g.num_detectors;  // virtual node id
    std::vector<uint8_t> flip(g.num_detectors + 1, 0);
    for (uint32_t d : s.flipped_detectors) flip[d] = 1;

    // Adjacency restricted to erased edges.
    std::vector<std::vector<uint32_t>> adj(g.num_detectors + 1);
    auto end_of = [&](uint32_t e, bool second) -> uint32_t {
        const auto& ed = g.edges[e];
        int32_t v = second ? ed.v : ed.u;
        return v == DetectorGraph::kBoundary ? boundary : (uint32_t)v;
    };
    for (uint32_t e : s.erased_edges) {
        adj[end_of(e, false)].push_back(e);
        adj[end_of(e, true)].push_back(e);
    }

    PeelOutcome out;
    std::vector<uint8_t> visited(g.num_detectors + 1, 0);
    std::vector<uint32_t> order;
    std::vector<uint32_t> parent_edge(g.num_detectors + 1, UINT32_MAX);

    auto bfs_component = [&](uint32_t root) {
        order.clear();
        visited[root] = 1;
        parent_edge[root] = UINT32_MAX;
        order.push_back(root);
        for (size_t head = 0; head < order.size(); head++) {
            uint32_t x = order[head];
            for (uint32_t e : adj[x]) {
                uint32_t a = end_of(e, false), b = end_of(e, true);
                uint32_t y = a == x ? b : a;
                if (visited[y]) continue;
                visited[y] = 1;
                parent_edge[y] = e;
                order.push_back(y);
            }
        }
    };

    auto peel_component = [&](uint32_t root) {
        for (size_t k = order.size(); k-- > 1;) {
            uint32_t x = order[k];
            if (x == boundary || !flip[x]) continue;
            uint32_t e = parent_edge[x];
            const auto& ed = g.edges[e];
            uint32_t a = end_of(e, false), b = end_of(e, true);
            uint32_t p = a == x ? b : a;
            out.selected_edges.push_back(e);
            out.obs_mask ^= ed.obs_mask;
            flip[x] = 0;
            if (p != boundary) flip[p] ^= 1;
        }
        if (root != boundary && flip[root]) {
            out.residual_flips.push_back(root);
            flip[root] = 0;
        }
    };

    // Boundary-connected clusters peel toward the boundary, which absorbs any
    // leftover parity.
    if (!adj[boundary].empty()) {
        bfs_component(boundary);
        peel_component(boundary);
    }
    for (uint32_t e : s.erased_edges) {
        for (bool second : {false, true}) {
            uint32_t x = end_of(e, second);
            if (!visited[x]) {
                bfs_component(x);
                peel_component(x);
            }
        }
    }
    for (uint32_t d : s.flipped_detectors) {
        if (flip[d]) out.unpeeled_flips.push_back(d);
    }
    return out;
}

struct PeelingResult {
    uint32_t obs_mask = 0;
    std::vector<uint32_t> selected_edges;
};

// Linear-time erasure decoder. Applicable when every flipped detector lies in
// the subgraph spanned by erased edges and each non-boundary cluster has even
// flip parity; otherwise returns nullopt and the caller falls back to MWPM.
inline std::optional<PeelingResult> decode_peeling(const DetectorGraph& g, const Syndrome& s) {
    auto out = peel_erased_clusters(g, s);
    if (!out.unpeeled_flips.empty() || !out.residual_flips.empty()) {
        return std::nullopt;
    }
    return PeelingResult{out.obs_mask, std::move(out.selected_edges)};
}

}  // namespace erasim

#endif
