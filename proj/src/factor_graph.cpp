#include "stochldpc/factor_graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stochldpc/errors.hpp"
#include "stochldpc/rng.hpp"

namespace stochldpc {

FactorGraph::FactorGraph(int n_vars, int n_chks, std::vector<std::pair<int, int>> edges)
    : n_vars_(n_vars), n_chks_(n_chks), var_adj_(n_vars), chk_adj_(n_chks) {
    for (auto [i, a] : edges) {
        if (i < 0 || i >= n_vars || a < 0 || a >= n_chks)
            raise(errc::dimension_mismatch, "edge endpoint out of range");
        var_adj_[i].push_back(a);
        chk_adj_[a].push_back(i);
    }
    for (auto& v : var_adj_) std::sort(v.begin(), v.end());
    for (auto& v : chk_adj_) std::sort(v.begin(), v.end());
    for (int i = 0; i < n_vars; ++i)
        if (std::adjacent_find(var_adj_[i].begin(), var_adj_[i].end()) != var_adj_[i].end())
            raise(errc::construction_failure, "duplicate edge at variable " + std::to_string(i));

    var_off_.assign(n_vars + 1, 0);
    for (int i = 0; i < n_vars; ++i) var_off_[i + 1] = var_off_[i] + var_adj_[i].size();
    chk_off_.assign(n_chks + 1, 0);
    for (int a = 0; a < n_chks; ++a) chk_off_[a + 1] = chk_off_[a] + chk_adj_[a].size();

    std::size_t E = var_off_[n_vars];
    v2c_to_c2v_.assign(E, 0);
    c2v_to_v2c_.assign(E, 0);
    v2c_var_.assign(E, 0);
    c2v_chk_.assign(E, 0);
    for (int a = 0; a < n_chks; ++a)
        for (std::size_t s = 0; s < chk_adj_[a].size(); ++s) c2v_chk_[chk_off_[a] + s] = a;
    for (int i = 0; i < n_vars; ++i) {
        for (std::size_t s = 0; s < var_adj_[i].size(); ++s) {
            std::size_t v2c = var_off_[i] + s;
            int a = var_adj_[i][s];
            v2c_var_[v2c] = i;
            auto& ca = chk_adj_[a];
            std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
            std::size_t c2v = chk_off_[a] + slot;
            v2c_to_c2v_[v2c] = c2v;
            c2v_to_v2c_[c2v] = v2c;
        }
    }
}

std::vector<std::vector<int>> FactorGraph::to_dense() const {
    std::vector<std::vector<int>> H(n_chks_, std::vector<int>(n_vars_, 0));
    for (int a = 0; a < n_chks_; ++a)
        for (int i : chk_adj_[a]) H[a][i] = 1;
    return H;
}

FactorGraph from_dense_matrix(const std::vector<std::vector<int>>& H) {
    if (H.empty() || H[0].empty()) raise(errc::dimension_mismatch, "empty matrix");
    int m = static_cast<int>(H.size());
    int n = static_cast<int>(H[0].size());
    std::vector<std::pair<int, int>> edges;
    std::vector<int> col_weight(n, 0);
    for (int a = 0; a < m; ++a) {
        if (static_cast<int>(H[a].size()) != n) raise(errc::dimension_mismatch, "ragged matrix");
        int row_weight = 0;
        for (int i = 0; i < n; ++i) {
            int e = H[a][i];
            if (e != 0 && e != 1) raise(errc::config_invalid, "matrix entry not in {0,1}");
            if (e) {
                edges.emplace_back(i, a);
                ++row_weight;
                ++col_weight[i];
            }
        }
        if (row_weight == 0) raise(errc::empty_row_or_column, "check " + std::to_string(a) + " has no variables");
    }
    for (int i = 0; i < n; ++i)
        if (col_weight[i] == 0)
            raise(errc::empty_row_or_column, "variable " + std::to_string(i) + " has no checks");
    return FactorGraph(n, m, std::move(edges));
}

FactorGraph gallager_construct(int n, int dv, int dc, std::uint64_t seed) {
    if (dv < 2 || dc < 2) raise(errc::divisibility_violation, "degrees must be at least 2");
    long long sockets = static_cast<long long>(n) * dv;
    if (sockets % dc != 0) raise(errc::divisibility_violation, "n*dv not divisible by dc");
    int m = static_cast<int>(sockets / dc);

    rng::Sequential r(rng::derive(rng::root_key(seed), rng::tag("gallager")));
    std::vector<int> perm(sockets);
    std::vector<std::pair<int, int>> edges(sockets);
    std::vector<long long> seen(sockets);
    constexpr int kMaxAttempts = 5000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (long long s = 0; s < sockets; ++s) perm[s] = static_cast<int>(s);
        for (long long s = sockets - 1; s > 0; --s) {
            long long j = static_cast<long long>(r.next_u64() % static_cast<std::uint64_t>(s + 1));
            std::swap(perm[s], perm[j]);
        }
        for (long long s = 0; s < sockets; ++s) {
            int var = static_cast<int>(s / dv);
            int chk = perm[s] / dc;
            edges[s] = {var, chk};
            seen[s] = static_cast<long long>(var) * m + chk;
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) == seen.end())
            return FactorGraph(n, m, edges);
    }
    raise(errc::construction_failure, "no double-edge-free permutation found");
}

namespace {

// Bipartite BFS; node ids: vars 0..n-1, checks n..n+m-1. Returns distances
// in edges, -1 for unreached.
std::vector<int> bfs(const FactorGraph& g, int start) {
    int n = g.n_vars(), total = n + g.n_chks();
    std::vector<int> dist(total, -1);
    std::deque<int> q;
    dist[start] = 0;
    q.push_back(start);
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        auto visit = [&](int v) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        };
        if (u < n)
            for (int a : g.var_neighbors(u)) visit(n + a);
        else
            for (int i : g.chk_neighbors(u - n)) visit(i);
    }
    return dist;
}

} // namespace

GraphStats analyze(const FactorGraph& g) {
    GraphStats st;
    st.n_directed_edges = 2 * g.n_edges();
    for (int i = 0; i < g.n_vars(); ++i)
        st.max_var_degree = std::max(st.max_var_degree, static_cast<int>(g.var_neighbors(i).size()));
    for (int a = 0; a < g.n_chks(); ++a)
        st.max_chk_degree = std::max(st.max_chk_degree, static_cast<int>(g.chk_neighbors(a).size()));

    int total = g.n_vars() + g.n_chks();
    std::vector<int> comp(total, -1);
    int n_comps = 0;
    std::vector<int> comp_root;
    for (int s = 0; s < total; ++s) {
        if (comp[s] >= 0) continue;
        auto dist = bfs(g, s);
        for (int v = 0; v < total; ++v)
            if (dist[v] >= 0) comp[v] = n_comps;
        comp_root.push_back(s);
        ++n_comps;
    }
    st.is_tree =
        g.n_edges() == static_cast<std::size_t>(g.n_vars()) + g.n_chks() - n_comps;
    if (!st.is_tree) return st;

    // Double BFS sweep per component, endpoints restricted to variables.
    int diam = 0;
    for (int c = 0; c < n_comps; ++c) {
        int start = comp_root[c];
        auto d0 = bfs(g, start);
        int u = -1, best = -1;
        for (int i = 0; i < g.n_vars(); ++i)
            if (d0[i] >= 0 && comp[i] == c && d0[i] > best) best = d0[i], u = i;
        if (u < 0) continue; // component without variables cannot occur for valid graphs
        auto d1 = bfs(g, u);
        int far = 0;
        for (int i = 0; i < g.n_vars(); ++i)
            if (d1[i] > far) far = d1[i];
        diam = std::max(diam, far);
    }
    st.diameter = diam;
    return st;
}

FactorGraph random_tree(int n_vars, int n_chks, std::uint64_t seed, int min_check_degree) {
    if (n_vars < 1 || n_chks < 1) raise(errc::dimension_mismatch, "need at least one of each node kind");
    if (min_check_degree != 1 && min_check_degree != 2)
        raise(errc::dimension_mismatch, "min_check_degree must be 1 or 2");
    if (min_check_degree == 2 && n_chks > n_vars - 1)
        raise(errc::dimension_mismatch, "degree-2 checks need n_chks <= n_vars - 1");
    rng::Sequential r(rng::derive(rng::root_key(seed), rng::tag("random-tree")));
    std::vector<int> vars_in{0}, chks_in;
    std::vector<std::pair<int, int>> edges;

    if (min_check_degree == 2) {
        // moves: 'pair' introduces a check between an existing variable and
        // a fresh one (degree starts at 2); 'leaf' hangs a fresh variable
        // off an existing check
        int next_var = 1, next_chk = 0;
        std::vector<int> moves(n_chks, 0);
        moves.resize(n_chks + (n_vars - 1 - n_chks), 1);
        for (std::size_t s = moves.size(); s > 1; --s)
            std::swap(moves[s - 1], moves[r.next_u64() % s]);
        // the first move must create a check
        for (std::size_t s = 0; s < moves.size(); ++s)
            if (moves[s] == 0) {
                std::swap(moves[0], moves[s]);
                break;
            }
        for (int mv : moves) {
            if (mv == 0) {
                int a = next_chk++;
                int u = vars_in[r.next_u64() % vars_in.size()];
                int w = next_var++;
                edges.emplace_back(u, a);
                edges.emplace_back(w, a);
                vars_in.push_back(w);
                chks_in.push_back(a);
            } else {
                int a = chks_in[r.next_u64() % chks_in.size()];
                int w = next_var++;
                edges.emplace_back(w, a);
                vars_in.push_back(w);
            }
        }
        return FactorGraph(n_vars, n_chks, std::move(edges));
    }

    // attach order: one check first (the root variable needs a neighbor),
    // then a shuffled mix of the remaining nodes
    std::vector<int> pending; // vars as i, checks as n_vars + a
    for (int a = 1; a < n_chks; ++a) pending.push_back(n_vars + a);
    for (int i = 1; i < n_vars; ++i) pending.push_back(i);
    for (std::size_t s = pending.size(); s > 1; --s)
        std::swap(pending[s - 1], pending[r.next_u64() % s]);

    auto attach = [&](int node) {
        if (node >= n_vars) {
            int a = node - n_vars;
            int i = vars_in[r.next_u64() % vars_in.size()];
            edges.emplace_back(i, a);
            chks_in.push_back(a);
        } else {
            int a = chks_in[r.next_u64() % chks_in.size()];
            edges.emplace_back(node, a);
            vars_in.push_back(node);
        }
    };
    attach(n_vars + 0);
    for (std::size_t p = 0; p < pending.size(); ++p) attach(pending[p]);
    return FactorGraph(n_vars, n_chks, std::move(edges));
}

FactorGraph cycle_graph(int k) {
    if (k < 2) raise(errc::dimension_mismatch, "cycle needs k >= 2");
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < k; ++j) {
        edges.emplace_back(j, j);
        edges.emplace_back((j + 1) % k, j);
    }
    return FactorGraph(k, k, std::move(edges));
}

bool syndrome_ok(const FactorGraph& g, const std::vector<std::uint8_t>& bits) {
    if (bits.size() != static_cast<std::size_t>(g.n_vars()))
        raise(errc::length_mismatch, "bit vector length != n_vars");
    for (int a = 0; a < g.n_chks(); ++a) {
        int parity = 0;
        for (int i : g.chk_neighbors(a)) parity ^= bits[i] & 1;
        if (parity) return false;
    }
    return true;
}

FactorGraph read_alist(std::istream& in) {
    auto next_line_tokens = [&](std::vector<long>& out) {
        std::string line;
        out.clear();
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            long v;
            while (ls >> v) out.push_back(v);
            if (!out.empty()) return true;
        }
        return false;
    };
    std::vector<long> t;
    if (!next_line_tokens(t) || t.size() < 2) raise(errc::io_error, "alist: missing n m header");
    long n = t[0], m = t[1];
    if (n <= 0 || m <= 0) raise(errc::io_error, "alist: nonpositive dimensions");
    if (!next_line_tokens(t) || t.size() < 2) raise(errc::io_error, "alist: missing max degrees");
    if (!next_line_tokens(t) || static_cast<long>(t.size()) != n)
        raise(errc::io_error, "alist: bad variable degree list");
    std::vector<long> var_deg = t;
    if (!next_line_tokens(t) || static_cast<long>(t.size()) != m)
        raise(errc::io_error, "alist: bad check degree list");
    std::vector<long> chk_deg = t;

    std::vector<std::pair<int, int>> edges;
    for (long i = 0; i < n; ++i) {
        if (!next_line_tokens(t)) raise(errc::io_error, "alist: missing variable neighbor list");
        std::vector<long> nb;
        for (long v : t)
            if (v != 0) nb.push_back(v); // zero padding tolerated
        if (static_cast<long>(nb.size()) != var_deg[i])
            raise(errc::io_error, "alist: variable degree mismatch");
        for (long a : nb) {
            if (a < 1 || a > m) raise(errc::io_error, "alist: check index out of range");
            edges.emplace_back(static_cast<int>(i), static_cast<int>(a - 1));
        }
    }
    // check-side lists are redundant given the variable side; validate only.
    for (long a = 0; a < m; ++a) {
        if (!next_line_tokens(t)) raise(errc::io_error, "alist: missing check neighbor list");
        long nonzero = 0;
        for (long v : t)
            if (v != 0) ++nonzero;
        if (nonzero != chk_deg[a]) raise(errc::io_error, "alist: check degree mismatch");
    }
    return FactorGraph(static_cast<int>(n), static_cast<int>(m), std::move(edges));
}

FactorGraph read_alist_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) raise(errc::io_error, "cannot open " + path);
    return read_alist(f);
}

void write_alist(const FactorGraph& g, std::ostream& out) {
    GraphStats st = analyze(g);
    out << g.n_vars() << ' ' << g.n_chks() << '\n';
    out << st.max_var_degree << ' ' << st.max_chk_degree << '\n';
    for (int i = 0; i < g.n_vars(); ++i) out << (i ? " " : "") << g.var_neighbors(i).size();
    out << '\n';
    for (int a = 0; a < g.n_chks(); ++a) out << (a ? " " : "") << g.chk_neighbors(a).size();
    out << '\n';
    for (int i = 0; i < g.n_vars(); ++i) {
        const auto& nb = g.var_neighbors(i);
        for (std::size_t s = 0; s < nb.size(); ++s) out << (s ? " " : "") << nb[s] + 1;
        out << '\n';
    }
    for (int a = 0; a < g.n_chks(); ++a) {
        const auto& nb = g.chk_neighbors(a);
        for (std::size_t s = 0; s < nb.size(); ++s) out << (s ? " " : "") << nb[s] + 1;
        out << '\n';
    }
}

void write_alist_file(const FactorGraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) raise(errc::io_error, "cannot open " + path);
    write_alist(g, f);
}

} // namespace stochldpc
