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

#ifndef ERASIM_MATCHING_H
#define ERASIM_MATCHING_H

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "erasim/blossom.hpp"
#include "erasim/detector_graph.hpp"
#include "erasim/peeling.hpp"

namespace erasim {

struct MwpmOptions {
    // Approximation knob: keep only the k nearest candidate partners per
    // flipped detector. 0 = off (exact complete-graph semantics); the safe
    // boundary-domination pruning stays exact either way.
    uint32_t neighbor_cutoff = 0;
    bool collect_edges = false;
};

struct DecodeResult {
    uint32_t obs_mask = 0;
    int64_t weight_scaled = 0;  // total matched weight (fixed point)
    std::vector<uint32_t> edges;
};

constexpr int64_t kDistInf = INT64_C(1) << 56;

// Decoder working over one DetectorGraph. Holds per-shot scratch; results are
// pure functions of (graph, syndrome). A single instance is not thread-safe,
// use one per worker.
class MwpmDecoder {
  public:
    explicit MwpmDecoder(const DetectorGraph& g) : g_(g) {
        uint32_t n = g.num_detectors + 1;  // + virtual boundary node
        dist_.assign(n, 0);
        dist_version_.assign(n, 0);
        parent_.assign(n, UINT32_MAX);
        bd_dist_.assign(n, 0);
        bd_parent_.assign(n, UINT32_MAX);
        bd_version_.assign(n, 0);
        version_ = 0;
        static_assert(kDistInf > 0, "sentinel");
    }

    const DetectorGraph& graph() const { return g_; }

    DecodeResult decode(const Syndrome& syndrome, const MwpmOptions& opts = {}) {
        ErasureOverlay overlay = overlay_erasures(g_, syndrome);
        DecodeResult result;

        // Zero-weight erased clusters are resolved by peeling first; this is
        // weight-exact (all moves inside a cluster cost zero) and leaves at
        // most one representative flip per odd cluster for the matcher.
        PeelOutcome peel = peel_erased_clusters(g_, syndrome);
        result.obs_mask = peel.obs_mask;
        if (opts.collect_edges) {
            result.edges = peel.selected_edges;
        }
        std::vector<uint32_t> terminals = peel.residual_flips;
        terminals.insert(terminals.end(), peel.unpeeled_flips.begin(), peel.unpeeled_flips.end());
        std::sort(terminals.begin(), terminals.end());
        if (terminals.empty()) {
            return result;
        }

        bool have_boundary = !g_.boundary_edges.empty();
        if (terminals.size() % 2 == 1 && !have_boundary) {
            throw std::runtime_error("odd syndrome parity with no boundary (graph construction bug)");
        }

        // Per-shot distances to the boundary (erasures may change them).
        if (have_boundary) {
            boundary_dijkstra(overlay);
        }

        size_t t_count = terminals.size();
        bool use_dummy = t_count % 2 == 1;
        size_t m_count = t_count + (use_dummy ? 1 : 0);

        const int64_t kUnset = std::numeric_limits<int64_t>::max();
        std::vector<std::vector<int64_t>> pairwise(t_count, std::vector<int64_t>(t_count, kUnset));
        std::vector<int64_t> to_boundary(t_count, kUnset);
        for (size_t i = 0; i < t_count; i++) {
            if (have_boundary && bd_dist_[terminals[i]] < kDistInf) {
                to_boundary[i] = bd_dist_[terminals[i]];
            }
            terminal_dijkstra(overlay, terminals, i, pairwise[i], opts.neighbor_cutoff);
        }
        // Symmetrize: keep the smaller of the two directed searches (they can
        // differ only by pruning).
        for (size_t i = 0; i < t_count; i++) {
            for (size_t j = i + 1; j < t_count; j++) {
                int64_t d = std::min(pairwise[i][j], pairwise[j][i]);
                pairwise[i][j] = pairwise[j][i] = d;
            }
        }

        // Complete matrix with boundary routing folded in:
        //   w(i,j) = min(d(i,j), d(i,bd) + d(j,bd)), dummy column = d(i,bd).
        // +1 keeps genuine zero-distance pairs distinct from absent edges.
        std::vector<std::vector<int64_t>> w(m_count, std::vector<int64_t>(m_count, 0));
        std::vector<std::vector<uint8_t>> via_boundary(m_count, std::vector<uint8_t>(m_count, 0));
        int64_t infeasible = std::numeric_limits<int64_t>::max();
        for (size_t i = 0; i < t_count; i++) {
            for (size_t j = i + 1; j < t_count; j++) {
                int64_t direct = pairwise[i][j];
                int64_t via = (to_boundary[i] == kUnset || to_boundary[j] == kUnset)
                                  ? kUnset
                                  : to_boundary[i] + to_boundary[j];
                int64_t best = std::min(direct, via);
                if (best == kUnset) continue;  // leave absent
                w[i][j] = w[j][i] = best + 1;
                via_boundary[i][j] = via_boundary[j][i] = via < direct;
            }
            if (use_dummy && to_boundary[i] != kUnset) {
                w[i][t_count] = w[t_count][i] = to_boundary[i] + 1;
                via_boundary[i][t_count] = via_boundary[t_count][i] = 1;
            }
        }
        (void)infeasible;

        auto pairs = blossom_pairs(w);
        for (auto& [a, b] : pairs) {
            size_t i = (size_t)a, j = (size_t)b;
            if (use_dummy && (i == t_count || j == t_count)) {
                size_t t = i == t_count ? j : i;
                result.weight_scaled += to_boundary[t];
                trace_boundary_path(terminals[t], result, opts.collect_edges);
                continue;
            }
            if (via_boundary[i][j]) {
                result.weight_scaled += to_boundary[i] + to_boundary[j];
                trace_boundary_path(terminals[i], result, opts.collect_edges);
                trace_boundary_path(terminals[j], result, opts.collect_edges);
            } else {
                result.weight_scaled += pairwise[i][j];
                trace_pair_path(overlay, terminals[i], terminals[j], result, opts.collect_edges);
            }
        }
        return result;
    }

  private:
    const DetectorGraph& g_;
    std::vector<int64_t> dist_;
    std::vector<uint32_t> dist_version_;
    std::vector<uint32_t> parent_;  // edge id used to reach the node
    std::vector<int64_t> bd_dist_;
    std::vector<uint32_t> bd_parent_;
    std::vector<uint32_t> bd_version_;
    uint32_t version_ = 0;
    uint32_t bd_version_token_ = 0;

    uint32_t other_end(uint32_t e, uint32_t x) const {
        const auto& ed = g_.edges[e];
        uint32_t u = (uint32_t)ed.u;
        uint32_t v = ed.v == DetectorGraph::kBoundary ? g_.num_detectors : (uint32_t)ed.v;
        return u == x ? v : u;
    }

    void boundary_dijkstra(const ErasureOverlay& overlay) {
        bd_version_token_++;
        uint32_t bd = g_.num_detectors;
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        bd_dist_[bd] = 0;
        bd_parent_[bd] = UINT32_MAX;
        bd_version_[bd] = bd_version_token_;
        heap.push({0, bd});
        while (!heap.empty()) {
            auto [d, x] = heap.top();
            heap.pop();
            if (bd_version_[x] != bd_version_token_ || d > bd_dist_[x]) continue;
            const auto& inc = x == bd ? g_.boundary_edges : g_.adjacency[x];
            for (uint32_t e : inc) {
                uint32_t y = other_end(e, x);
                int64_t nd = d + overlay.weight(e);
                if (bd_version_[y] != bd_version_token_ || nd < bd_dist_[y]) {
                    bd_version_[y] = bd_version_token_;
                    bd_dist_[y] = nd;
                    bd_parent_[y] = e;
                    heap.push({nd, y});
                }
            }
        }
        // Unreached nodes keep a stale version; treat as infinity.
        for (uint32_t x = 0; x <= g_.num_detectors; x++) {
            if (bd_version_[x] != bd_version_token_) {
                bd_dist_[x] = kDistInf;
                bd_version_[x] = bd_version_token_;
                bd_parent_[x] = UINT32_MAX;
            }
        }
    }

    // Dijkstra from one terminal, recording scaled distances to the others.
    // Expansion stops at nodes dominated by boundary routing:
    //   dist(x) >= d(u,bd) + d(x,bd)  (exact pruning by the triangle rule).
    void terminal_dijkstra(const ErasureOverlay& overlay, const std::vector<uint32_t>& terminals,
                           size_t u_idx, std::vector<int64_t>& out, uint32_t cutoff) {
        version_++;
        uint32_t u = terminals[u_idx];
        bool have_bd = !g_.boundary_edges.empty();
        int64_t bd_u = have_bd ? bd_dist_[u] : kDistInf;
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist_[u] = 0;
        dist_version_[u] = version_;
        heap.push({0, u});
        uint32_t found = 0;
        while (!heap.empty()) {
            auto [d, x] = heap.top();
            heap.pop();
            if (dist_version_[x] != version_ || d > dist_[x]) continue;
            if (have_bd && bd_u < kDistInf && bd_dist_[x] < kDistInf && d >= bd_u + bd_dist_[x] &&
                x != u) {
                continue;
            }
            if (x != u && x != g_.num_detectors) {
                // Is this node one of the terminals?
                auto it = std::lower_bound(terminals.begin(), terminals.end(), x);
                if (it != terminals.end() && *it == x) {
                    size_t j = (size_t)(it - terminals.begin());
                    if (out[j] > d) out[j] = d;
                    found++;
                    if (cutoff > 0 && found >= cutoff) break;
                }
            }
            if (x == g_.num_detectors) continue;  // do not route through the boundary
            for (uint32_t e : g_.adjacency[x]) {
                uint32_t y = other_end(e, x);
                int64_t nd = d + overlay.weight(e);
                if (dist_version_[y] != version_ || nd < dist_[y]) {
                    dist_version_[y] = version_;
                    dist_[y] = nd;
                    parent_[y] = e;
                    heap.push({nd, y});
                }
            }
        }
    }

    void trace_boundary_path(uint32_t t, DecodeResult& result, bool collect) {
        uint32_t x = t;
        uint32_t bd = g_.num_detectors;
        while (x != bd) {
            uint32_t e = bd_parent_[x];
            if (e == UINT32_MAX) {
                throw std::runtime_error("boundary path trace failed");
            }
            result.obs_mask ^= g_.edges[e].obs_mask;
            if (collect) result.edges.push_back(e);
            x = other_end(e, x);
        }
    }

    void trace_pair_path(const ErasureOverlay& overlay, uint32_t a, uint32_t b, DecodeResult& result,
                         bool collect) {
        // Re-run a targeted Dijkstra from a to b with parents.
        version_++;
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist_[a] = 0;
        dist_version_[a] = version_;
        parent_[a] = UINT32_MAX;
        heap.push({0, a});
        while (!heap.empty()) {
            auto [d, x] = heap.top();
            heap.pop();
            if (dist_version_[x] != version_ || d > dist_[x]) continue;
            if (x == b) break;
            if (x == g_.num_detectors) continue;
            for (uint32_t e : g_.adjacency[x]) {
                uint32_t y = other_end(e, x);
                int64_t nd = d + overlay.weight(e);
                if (dist_version_[y] != version_ || nd < dist_[y]) {
                    dist_version_[y] = version_;
                    dist_[y] = nd;
                    parent_[y] = e;
                    heap.push({nd, y});
                }
            }
        }
        if (dist_version_[b] != version_) {
            throw std::runtime_error("matched pair is unreachable");
        }
        uint32_t x = b;
        while (x != a) {
            uint32_t e = parent_[x];
            result.obs_mask ^= g_.edges[e].obs_mask;
            if (collect) result.edges.push_back(e);
            x = other_end(e, x);
        }
    }

    static std::vector<std::pair<int, int>> blossom_pairs(const std::vector<std::vector<int64_t>>& w) {
        int n = (int)w.size();
        if (n == 0) return {};
        int64_t w_max = 1;
        for (auto& row : w) {
            for (int64_t v : row) w_max = std::max(w_max, v);
        }
        int64_t big = w_max + 1;
        DenseBlossom solver(n);
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                if (w[i][j] > 0) {
                    solver.set_weight(i, j, big - w[i][j]);
                }
            }
        }
        auto pairs = solver.solve();
        if ((int)pairs.size() * 2 != n) {
            throw std::runtime_error("incomplete matching (disconnected syndrome graph)");
        }
        return pairs;
    }
};

// One-shot convenience wrapper.
inline DecodeResult decode_mwpm(const DetectorGraph& g, const Syndrome& syndrome,
                                const MwpmOptions& opts = {}) {
    MwpmDecoder dec(g);
    return dec.decode(syndrome, opts);
}

// Exhaustive matching oracle: exact all-pairs Dijkstra distances (no pruning)
// plus brute-force enumeration of all pairings including boundary routes.
// Only usable for small flip counts; exists to check decode_mwpm.
inline int64_t brute_force_matching_weight(const DetectorGraph& g, const Syndrome& syndrome) {
    ErasureOverlay overlay = overlay_erasures(g, syndrome);
    PeelOutcome peel = peel_erased_clusters(g, syndrome);
    std::vector<uint32_t> terminals = peel.residual_flips;
    terminals.insert(terminals.end(), peel.unpeeled_flips.begin(), peel.unpeeled_flips.end());
    std::sort(terminals.begin(), terminals.end());
    size_t t = terminals.size();
    if (t == 0) return 0;

    uint32_t n = g.num_detectors + 1;
    uint32_t bd = g.num_detectors;
    auto dijkstra_from = [&](uint32_t src, bool src_is_boundary) {
        std::vector<int64_t> dist(n, kDistInf);
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[src] = 0;
        heap.push({0, src});
        while (!heap.empty()) {
            auto [d, x] = heap.top();
            heap.pop();
            if (d > dist[x]) continue;
            if (x == bd && !src_is_boundary) continue;
            const auto& inc = x == bd ? g.boundary_edges : g.adjacency[x];
            for (uint32_t e : inc) {
                const auto& ed = g.edges[e];
                uint32_t u = (uint32_t)ed.u;
                uint32_t v = ed.v == DetectorGraph::kBoundary ? bd : (uint32_t)ed.v;
                uint32_t y = u == x ? v : u;
                int64_t nd = d + overlay.weight(e);
                if (nd < dist[y]) {
                    dist[y] = nd;
                    heap.push({nd, y});
                }
            }
        }
        return dist;
    };

    std::vector<int64_t> bd_dist(n, kDistInf);
    if (!g.boundary_edges.empty()) {
        bd_dist = dijkstra_from(bd, true);
    }
    std::vector<std::vector<int64_t>> w(t, std::vector<int64_t>(t, 0));
    for (size_t i = 0; i < t; i++) {
        auto dist = dijkstra_from(terminals[i], false);
        for (size_t j = 0; j < t; j++) {
            if (i == j) continue;
            int64_t direct = dist[terminals[j]];
            int64_t via = bd_dist[terminals[i]] >= kDistInf || bd_dist[terminals[j]] >= kDistInf
                              ? kDistInf
                              : bd_dist[terminals[i]] + bd_dist[terminals[j]];
            w[i][j] = std::min(direct, via);
        }
    }
    // Enumerate pairings; odd terminal goes to the boundary.
    std::vector<uint8_t> used(t, 0);
    int64_t best = -1;
    std::function<void(int64_t)> rec = [&](int64_t acc) {
        size_t first = t;
        for (size_t i = 0; i < t; i++) {
            if (!used[i]) {
                first = i;
                break;
            }
        }
        if (first == t) {
            if (best < 0 || acc < best) best = acc;
            return;
        }
        used[first] = 1;
        // Boundary option.
        if (!g.boundary_edges.empty() && bd_dist[terminals[first]] < kDistInf) {
            rec(acc + bd_dist[terminals[first]]);
        }
        for (size_t j = first + 1; j < t; j++) {
            if (used[j]) continue;
            used[j] = 1;
            rec(acc + w[first][j]);
            used[j] = 0;
        }
        used[first] = 0;
    };
    rec(0);
    return best;
}

}  // namespace erasim

#endif
