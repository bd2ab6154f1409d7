#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stochldpc {

// Bipartite variable/check graph of an LDPC code.
//
// Directed-edge indexing: the edge i->a gets the position of (i, a) in
// (var, chk) lexicographic order, in [0, E); the edge a->i gets E plus the
// position of (a, i) in (chk, var) order, so the full directed space is
// dense in [0, 2E). Modules below mostly work with the family-local
// positions ("v2c id" and "c2v id", each in [0, E)).
class FactorGraph {
public:
    FactorGraph() = default;

    // edges as (var, chk) pairs; duplicates are rejected by the builders.
    FactorGraph(int n_vars, int n_chks, std::vector<std::pair<int, int>> edges);

    int n_vars() const { return n_vars_; }
    int n_chks() const { return n_chks_; }
    std::size_t n_edges() const { return v2c_to_c2v_.size(); }

    const std::vector<int>& var_neighbors(int i) const { return var_adj_[i]; }
    const std::vector<int>& chk_neighbors(int a) const { return chk_adj_[a]; }

    // CSR bases of the per-node edge id ranges
    std::size_t v2c_begin(int i) const { return var_off_[i]; }
    std::size_t c2v_begin(int a) const { return chk_off_[a]; }
    std::size_t v2c_id(int i, int slot) const { return var_off_[i] + slot; }
    std::size_t c2v_id(int a, int slot) const { return chk_off_[a] + slot; }

    std::size_t v2c_to_c2v(std::size_t v2c) const { return v2c_to_c2v_[v2c]; }
    std::size_t c2v_to_v2c(std::size_t c2v) const { return c2v_to_v2c_[c2v]; }

    int v2c_var(std::size_t v2c) const { return v2c_var_[v2c]; }
    int c2v_var(std::size_t c2v) const { return chk_adj_[c2v_chk_[c2v]][c2v - chk_off_[c2v_chk_[c2v]]]; }
    int c2v_chk(std::size_t c2v) const { return c2v_chk_[c2v]; }

    std::vector<std::vector<int>> to_dense() const;

private:
    int n_vars_ = 0;
    int n_chks_ = 0;
    std::vector<std::vector<int>> var_adj_;
    std::vector<std::vector<int>> chk_adj_;
    std::vector<std::size_t> var_off_;
    std::vector<std::size_t> chk_off_;
    std::vector<std::size_t> v2c_to_c2v_;
    std::vector<std::size_t> c2v_to_v2c_;
    std::vector<int> v2c_var_;
    std::vector<int> c2v_chk_;
};

struct GraphStats {
    bool is_tree = false;
    std::optional<int> diameter; // edge count, trees only; max over components
    int max_var_degree = 0;
    int max_chk_degree = 0;
    std::size_t n_directed_edges = 0;
};

FactorGraph from_dense_matrix(const std::vector<std::vector<int>>& H);

// Regular (dv, dc) ensemble via a random matching of variable and check
// sockets; permutations producing double edges are rejected and resampled.
FactorGraph gallager_construct(int n, int dv, int dc, std::uint64_t seed);

GraphStats analyze(const FactorGraph& g);

// Uniform-ish random bipartite tree (n_vars + n_chks nodes, connected);
// handy as a fixture where message passing is exact. min_check_degree = 2
// (needs n_chks <= n_vars - 1) avoids degree-1 checks, whose exact-zero
// marginals cannot be represented under the probability floor.
FactorGraph random_tree(int n_vars, int n_chks, std::uint64_t seed, int min_check_degree = 1);

// Alternating variable/check ring: the smallest loopy graphs.
FactorGraph cycle_graph(int k);

bool syndrome_ok(const FactorGraph& g, const std::vector<std::uint8_t>& bits);

// alist interchange format (1-based neighbor lists; zero padding tolerated
// on read, never written).
FactorGraph read_alist(std::istream& in);
FactorGraph read_alist_file(const std::string& path);
void write_alist(const FactorGraph& g, std::ostream& out);
void write_alist_file(const FactorGraph& g, const std::string& path);

} // namespace stochldpc
