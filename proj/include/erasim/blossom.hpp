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

#ifndef ERASIM_BLOSSOM_H
#define ERASIM_BLOSSOM_H

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace erasim {

// Maximum-weight matching on a dense graph via the O(n^3) primal-dual blossom
// algorithm (Galil's formulation). Weights are non-negative integers; a zero
// weight means "no edge". Deterministic for a fixed input matrix.
//
// Used by the decoder through `min_weight_perfect_matching`, which flips the
// sign convention so that a minimum-weight perfect matching of the candidate
// graph is returned.
class DenseBlossom {
  public:
    explicit DenseBlossom(int n) : n_(n) {
        int cap = 2 * n_ + 1;
        g_.assign(cap, std::vector<EdgeT>(cap));
        for (int u = 0; u < cap; u++) {
            for (int v = 0; v < cap; v++) {
                g_[u][v] = {u, v, 0};
            }
        }
        flower_from_.assign(cap, std::vector<int>(n_ + 1, 0));
    }

    void set_weight(int u, int v, int64_t w) {
        // Doubled internally so duals stay integral.
        g_[u + 1][v + 1].w = g_[v + 1][u + 1].w = 2 * w;
    }

    // Returns pairs (u, v) of the maximum weight matching.
    std::vector<std::pair<int, int>> solve() {
        int cap = 2 * n_ + 1;
        n_x_ = n_;
        match_.assign(cap, 0);
        slack_.assign(cap, 0);
        st_.assign(cap, 0);
        pa_.assign(cap, 0);
        s_.assign(cap, -1);
        vis_.assign(cap, 0);
        lab_.assign(cap, 0);
        flower_.assign(cap, {});
        vis_token_ = 0;

        int64_t w_max = 0;
        for (int u = 1; u <= n_; u++) {
            st_[u] = u;
            for (int v = 1; v <= n_; v++) {
                flower_from_[u][v] = u == v ? u : 0;
                w_max = std::max(w_max, g_[u][v].w);
            }
        }
        for (int u = 1; u <= n_; u++) {
            lab_[u] = w_max;  // stored weights are doubled, so w_max is even
        }
        while (run_phase()) {
        }
        std::vector<std::pair<int, int>> out;
        for (int u = 1; u <= n_; u++) {
            if (match_[u] > u) {
                out.push_back({u - 1, match_[u] - 1});
            }
        }
        return out;
    }

  private:
    struct EdgeT {
        int u, v;
        int64_t w;
    };

    int n_;
    int n_x_ = 0;
    std::vector<std::vector<EdgeT>> g_;
    std::vector<int64_t> lab_;
    std::vector<int> match_, slack_, st_, pa_, s_, vis_;
    std::vector<std::vector<int>> flower_;
    std::vector<std::vector<int>> flower_from_;
    std::queue<int> q_;
    int vis_token_ = 0;

    int64_t e_delta(const EdgeT& e) const {
        return lab_[e.u] + lab_[e.v] - g_[e.u][e.v].w;
    }

    void update_slack(int u, int x) {
        if (!slack_[x] || e_delta(g_[u][x]) < e_delta(g_[slack_[x]][x])) {
            slack_[x] = u;
        }
    }

    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n_; u++) {
            if (g_[u][x].w > 0 && st_[u] != x && s_[st_[u]] == 0) {
                update_slack(u, x);
            }
        }
    }

    void q_push(int x) {
        if (x <= n_) {
            q_.push(x);
        } else {
            for (int t : flower_[x]) {
                q_push(t);
            }
        }
    }

    void set_st(int x, int b) {
        st_[x] = b;
        if (x > n_) {
            for (int t : flower_[x]) {
                set_st(t, b);
            }
        }
    }

    int get_pr(int b, int xr) {
        int pr = (int)(std::find(flower_[b].begin(), flower_[b].end(), xr) - flower_[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower_[b].begin() + 1, flower_[b].end());
            return (int)flower_[b].size() - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match_[u] = g_[u][v].v;
        if (u > n_) {
            EdgeT e = g_[u][v];
            int xr = flower_from_[u][e.u];
            int pr = get_pr(u, xr);
            for (int i = 0; i < pr; i++) {
                set_match(flower_[u][i], flower_[u][i ^ 1]);
            }
            set_match(xr, v);
            std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
        }
    }

    void augment(int u, int v) {
        for (;;) {
            int xnv = st_[match_[u]];
            set_match(u, v);
            if (!xnv) {
                return;
            }
            set_match(xnv, st_[pa_[xnv]]);
            u = st_[pa_[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        for (++vis_token_; u || v; std::swap(u, v)) {
            if (u == 0) {
                continue;
            }
            if (vis_[u] == vis_token_) {
                return u;
            }
            vis_[u] = vis_token_;
            u = st_[match_[u]];
            if (u) {
                u = st_[pa_[u]];
            }
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n_ + 1;
        while (b <= n_x_ && st_[b]) {
            b++;
        }
        if (b > n_x_) {
            n_x_++;
        }
        lab_[b] = 0;
        s_[b] = 0;
        match_[b] = match_[lca];
        flower_[b].clear();
        flower_[b].push_back(lca);
        for (int x = u, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            y = st_[match_[x]];
            flower_[b].push_back(y);
            q_push(y);
        }
        std::reverse(flower_[b].begin() + 1, flower_[b].end());
        for (int x = v, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            y = st_[match_[x]];
            flower_[b].push_back(y);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x_; x++) {
            g_[b][x].w = g_[x][b].w = 0;
        }
        for (int x = 1; x <= n_; x++) {
            flower_from_[b][x] = 0;
        }
        for (int xs : flower_[b]) {
            for (int x = 1; x <= n_x_; x++) {
                if (g_[b][x].w == 0 || e_delta(g_[xs][x]) < e_delta(g_[b][x])) {
                    g_[b][x] = g_[xs][x];
                    g_[x][b] = g_[x][xs];
                }
            }
            for (int x = 1; x <= n_; x++) {
                if (flower_from_[xs][x]) {
                    flower_from_[b][x] = xs;
                }
            }
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int t : flower_[b]) {
            set_st(t, t);
        }
        int xr = flower_from_[b][g_[b][pa_[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower_[b][i];
            int xns = flower_[b][i + 1];
            pa_[xs] = g_[xns][xs].u;
            s_[xs] = 1;
            s_[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        s_[xr] = 1;
        pa_[xr] = pa_[b];
        for (size_t i = pr + 1; i < flower_[b].size(); i++) {
            int xs = flower_[b][i];
            s_[xs] = -1;
            set_slack(xs);
        }
        st_[b] = 0;
    }

    bool on_found_edge(const EdgeT& e) {
        int u = st_[e.u], v = st_[e.v];
        if (s_[v] == -1) {
            pa_[v] = e.u;
            s_[v] = 1;
            int nu = st_[match_[v]];
            slack_[v] = slack_[nu] = 0;
            s_[nu] = 0;
            q_push(nu);
        } else if (s_[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool run_phase() {
        std::fill(s_.begin() + 1, s_.begin() + n_x_ + 1, -1);
        std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
        q_ = {};
        for (int x = 1; x <= n_x_; x++) {
            if (st_[x] == x && !match_[x]) {
                pa_[x] = 0;
                s_[x] = 0;
                q_push(x);
            }
        }
        if (q_.empty()) {
            return false;
        }
        for (;;) {
            while (!q_.empty()) {
                int u = q_.front();
                q_.pop();
                if (s_[st_[u]] == 1) {
                    continue;
                }
                for (int v = 1; v <= n_; v++) {
                    if (g_[u][v].w > 0 && st_[u] != st_[v]) {
                        if (e_delta(g_[u][v]) == 0) {
                            if (on_found_edge(g_[u][v])) {
                                return true;
                            }
                        } else {
                            update_slack(u, st_[v]);
                        }
                    }
                }
            }
            int64_t d = kInf;
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b && s_[b] == 1) {
                    d = std::min(d, lab_[b] / 2);
                }
            }
            for (int x = 1; x <= n_x_; x++) {
                if (st_[x] == x && slack_[x]) {
                    if (s_[x] == -1) {
                        d = std::min(d, e_delta(g_[slack_[x]][x]));
                    } else if (s_[x] == 0) {
                        d = std::min(d, e_delta(g_[slack_[x]][x]) / 2);
                    }
                }
            }
            for (int u = 1; u <= n_; u++) {
                if (s_[st_[u]] == 0) {
                    if (lab_[u] <= d) {
                        return false;  // dual exhausted; vertex stays unmatched
                    }
                    lab_[u] -= d;
                } else if (s_[st_[u]] == 1) {
                    lab_[u] += d;
                }
            }
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b && s_[st_[b]] != -1) {
                    lab_[b] += s_[st_[b]] == 0 ? 2 * d : -2 * d;
                }
            }
            q_ = {};
            for (int x = 1; x <= n_x_; x++) {
                if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
                    e_delta(g_[slack_[x]][x]) == 0) {
                    if (on_found_edge(g_[slack_[x]][x])) {
                        return true;
                    }
                }
            }
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b && s_[b] == 1 && lab_[b] == 0) {
                    expand_blossom(b);
                }
            }
        }
    }

    static constexpr int64_t kInf = INT64_C(1) << 60;
};

// Minimum-weight perfect matching on a complete graph given by a weight
// matrix; `weights[i][j]` must be finite and non-negative. Throws when no
// perfect matching exists (odd node count).
inline std::vector<std::pair<int, int>> min_weight_perfect_matching(
    const std::vector<std::vector<int64_t>>& weights) {
    int n = (int)weights.size();
    if (n == 0) {
        return {};
    }
    if (n % 2 == 1) {
        throw std::invalid_argument("perfect matching needs an even node count");
    }
    int64_t w_max = 1;
    for (auto& row : weights) {
        for (int64_t w : row) {
            if (w < 0) throw std::invalid_argument("negative weight");
            w_max = std::max(w_max, w);
        }
    }
    int64_t big = w_max + 1;
    DenseBlossom solver(n);
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            solver.set_weight(i, j, big - weights[i][j]);
        }
    }
    auto pairs = solver.solve();
    if ((int)pairs.size() * 2 != n) {
        throw std::runtime_error("perfect matching not found");
    }
    return pairs;
}

// Exhaustive minimum-weight pairing oracle for small instances.
inline int64_t brute_force_min_weight_pairing(const std::vector<std::vector<int64_t>>& weights) {
    int n = (int)weights.size();
    if (n % 2 == 1) {
        throw std::invalid_argument("odd node count");
    }
    std::vector<int> nodes(n);
    for (int i = 0; i < n; i++) nodes[i] = i;
    std::vector<uint8_t> used(n, 0);
    int64_t best = -1;
    std::function<void(int64_t)> rec = [&](int64_t acc) {
        int first = -1;
        for (int i = 0; i < n; i++) {
            if (!used[i]) {
                first = i;
                break;
            }
        }
        if (first < 0) {
            if (best < 0 || acc < best) best = acc;
            return;
        }
        used[first] = 1;
        for (int j = first + 1; j < n; j++) {
            if (used[j]) continue;
            used[j] = 1;
            if (best < 0 || acc + weights[first][j] < best) {
                rec(acc + weights[first][j]);
            }
            used[j] = 0;
        }
        used[first] = 0;
    };
    rec(0);
    return best;
}

}  // namespace erasim

#endif
