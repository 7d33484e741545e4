#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "waffle/errors.hpp"
#include "waffle/lowpower.hpp"

// Quotient-graph combinatorics: augmentations over trees, weights/coweights,
// cycle balance, sheet propagation and the grouping certificate. Everything
// here is exact integer/rational arithmetic.

namespace waffle {

struct Rational {
    long long num = 0, den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        require(den != 0, errc::non_positive_length, "zero denominator");
        if (den < 0) {
            den = -den;
            num = -num;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rational operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
    Rational operator/(const Rational& o) const { return Rational(num * o.den, den * o.num); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

enum class VertexKind { waffle, churro };

struct QuotientEdge {
    int waffle = -1;             // index of the waffle endpoint
    int churro = -1;             // index of the churro endpoint
    bool reflective = false;
    unsigned long long coweight = 1; // flap-family cardinality == |L(e)|
};

struct QuotientGraph {
    std::vector<VertexKind> kinds;   // by vertex index
    std::vector<QuotientEdge> edges; // edge id = index

    int vertex_count() const { return static_cast<int>(kinds.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }

    void validate() const {
        for (const auto& e : edges) {
            require(e.waffle >= 0 && e.waffle < vertex_count() && e.churro >= 0 &&
                        e.churro < vertex_count(),
                    errc::schema_error, "edge endpoint out of range");
            require(kinds[e.waffle] == VertexKind::waffle, errc::orientation_violation,
                    "edge does not start at a waffle vertex");
            require(kinds[e.churro] == VertexKind::churro, errc::bipartite_violation,
                    "edge does not end at a churro vertex");
            require(e.coweight >= 1, errc::non_positive_length, "coweights must be positive");
        }
    }

    bool connected() const {
        if (kinds.empty()) return true;
        std::vector<char> seen(kinds.size(), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& e : edges) {
                int other = -1;
                if (e.waffle == v) other = e.churro;
                else if (e.churro == v) other = e.waffle;
                if (other >= 0 && !seen[other]) {
                    seen[other] = 1;
                    stack.push_back(other);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    }

    // product of coweights over the star of a churro vertex
    unsigned long long star_order(int churro_vertex) const {
        unsigned long long n = 1;
        for (const auto& e : edges)
            if (e.churro == churro_vertex) n *= e.coweight;
        return n;
    }
};

// weight of an edge: 1/2 when reflective, 1 otherwise
inline Rational weight(const QuotientEdge& e) { return e.reflective ? Rational(1, 2) : Rational(1); }

inline Rational nu(const QuotientEdge& e) {
    return Rational(static_cast<long long>(e.coweight)) / weight(e);
}

// ---------------------------------------------------------------------------
// Tree augmentations

struct VertexAugmentation {
    LowPowerGroup flap_contribution;
    int reflector_bank = 0;
};

struct Augmentation {
    std::vector<VertexAugmentation> by_vertex;
    std::vector<int> tree_edges; // the edges the augmentation was computed over
};

namespace detail {

// Pointing data for a spanning tree: points_to[e] is the set of vertices v
// with "e points to v" (v on the churro side of e), encoded via Euler stamps.
struct TreePointing {
    std::vector<int> tin, tout;     // per vertex
    std::vector<int> churro_anchor; // per tree-edge slot: subtree vertex, or ~vertex for complement
    std::vector<int> edge_ids;

    bool in_subtree(int root, int v) const { return tin[v] >= tin[root] && tout[v] <= tout[root]; }

    bool points_to(std::size_t slot, int v) const {
        int a = churro_anchor[slot];
        if (a >= 0) return in_subtree(a, v);
        return !in_subtree(~a, v);
    }
};

inline TreePointing build_pointing(const QuotientGraph& X, const std::vector<int>& tree_edges) {
    const int n = X.vertex_count();
    std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbor, edge id)
    for (int id : tree_edges) {
        const auto& e = X.edges[id];
        adj[e.waffle].push_back({e.churro, id});
        adj[e.churro].push_back({e.waffle, id});
    }
    TreePointing tp;
    tp.tin.assign(n, -1);
    tp.tout.assign(n, -1);
    std::vector<int> parent(n, -1), parent_edge(n, -1), order;
    // iterative DFS from vertex 0
    std::vector<std::pair<int, std::size_t>> stack = {{0, 0}};
    int clock = 0;
    tp.tin[0] = clock++;
    while (!stack.empty()) {
        auto& [v, idx] = stack.back();
        if (idx < adj[v].size()) {
            auto [u, id] = adj[v][idx++];
            if (tp.tin[u] < 0) {
                tp.tin[u] = clock++;
                parent[u] = v;
                parent_edge[u] = id;
                stack.push_back({u, 0});
            }
        } else {
            tp.tout[v] = clock++;
            stack.pop_back();
        }
    }
    require(std::all_of(tp.tin.begin(), tp.tin.end(), [](int t) { return t >= 0; }),
            errc::disconnected, "spanning tree does not reach every vertex");
    tp.churro_anchor.resize(tree_edges.size());
    tp.edge_ids = tree_edges;
    for (std::size_t slot = 0; slot < tree_edges.size(); ++slot) {
        const auto& e = X.edges[tree_edges[slot]];
        // child endpoint of the tree edge (the one whose parent_edge is this edge)
        int child = (parent_edge[e.waffle] == tree_edges[slot]) ? e.waffle : e.churro;
        // churro side is subtree(child) iff the churro endpoint is the child
        if (child == e.churro) tp.churro_anchor[slot] = e.churro;
        else tp.churro_anchor[slot] = ~child; // complement of subtree(child)
    }
    return tp;
}

// Core of augment_tree / augment_graph: augmentation over the given spanning
// edges, with churro contributions L(N_c) taken over the full star of c.
inline Augmentation augment_over_tree(const QuotientGraph& X, const std::vector<int>& tree_edges) {
    const int n = X.vertex_count();
    TreePointing tp = build_pointing(X, tree_edges);

    // per tree edge: the quotient contribution L(N_{t(e)}) / L(cowt e),
    // assembled from the star's small factors (L(ab) = L(a) + L(b))
    std::vector<LowPowerGroup> quotient_term(tree_edges.size());
    for (std::size_t slot = 0; slot < tree_edges.size(); ++slot) {
        const auto& e = X.edges[tree_edges[slot]];
        LowPowerGroup term;
        for (int id = 0; id < X.edge_count(); ++id) {
            if (id == tree_edges[slot]) continue;
            if (X.edges[id].churro == e.churro)
                term = lp_sum(term, lowpower(X.edges[id].coweight));
        }
        quotient_term[slot] = term;
    }

    Augmentation aug;
    aug.tree_edges = tree_edges;
    aug.by_vertex.resize(n);
    for (int v = 0; v < n; ++v) {
        VertexAugmentation& av = aug.by_vertex[v];
        for (std::size_t slot = 0; slot < tree_edges.size(); ++slot) {
            const auto& e = X.edges[tree_edges[slot]];
            if (tp.points_to(slot, v)) {
                if (e.reflective) av.reflector_bank += 1;
            } else {
                av.flap_contribution = lp_sum(av.flap_contribution, quotient_term[slot]);
            }
        }
    }
    return aug;
}

} // namespace detail

inline Augmentation augment_tree(const QuotientGraph& X) {
    X.validate();
    require(X.connected(), errc::disconnected, "quotient graph must be connected");
    require(X.edge_count() == X.vertex_count() - 1, errc::not_a_tree,
            "augment_tree needs a tree");
    std::vector<int> all(X.edge_count());
    std::iota(all.begin(), all.end(), 0);
    return detail::augment_over_tree(X, all);
}

// ---------------------------------------------------------------------------
// Edge stabilizers

// The two stabilizer descriptors attached to a tree edge: the strand side in
// the waffle piece and the flap side in the churro piece.
inline std::pair<StabilizerDescriptor, StabilizerDescriptor>
edge_stabilizer_pair(int edge_id, const QuotientGraph& X, const Augmentation& A) {
    const auto& e = X.edges.at(edge_id);
    require(std::find(A.tree_edges.begin(), A.tree_edges.end(), edge_id) != A.tree_edges.end(),
            errc::index_out_of_range, "edge stabilizers are defined for tree edges");

    StabilizerDescriptor waffle_side;
    waffle_side.tau_flag = e.reflective;
    waffle_side.lp_part = A.by_vertex[e.waffle].flap_contribution;
    waffle_side.reflector_count = A.by_vertex[e.waffle].reflector_bank;

    StabilizerDescriptor churro_side;
    churro_side.tau_flag = e.reflective; // tau_e sits inside the churro bank; split out
    churro_side.reflector_count =
        A.by_vertex[e.churro].reflector_bank - (e.reflective ? 1 : 0);
    churro_side.lp_part = A.by_vertex[e.churro].flap_contribution;
    for (int id = 0; id < X.edge_count(); ++id) {
        if (id == edge_id) continue;
        const auto& f = X.edges[id];
        if (f.churro == e.churro)
            churro_side.lp_part = lp_sum(churro_side.lp_part, lowpower(f.coweight));
    }
    return {waffle_side, churro_side};
}

inline bool check_edge_iso(const std::pair<StabilizerDescriptor, StabilizerDescriptor>& pair) {
    const auto& [w, c] = pair;
    return w.lp_part.order() == c.lp_part.order() && w.reflector_count == c.reflector_count &&
           w.tau_flag == c.tau_flag;
}

// ---------------------------------------------------------------------------
// Cycles and balance

struct CycleWitness {
    std::vector<int> edge_ids;       // cycle edges, starting with the chord
    unsigned long long lhs = 1, rhs = 1; // the two products of the balance equality
};

struct BalanceReport {
    bool balanced = true;
    std::vector<CycleWitness> witnesses; // violating cycles
    std::vector<CycleWitness> cycles;    // every fundamental cycle, for reports
};

namespace detail {

// deterministic spanning tree: scan edges in id order, keep those joining new
// components (lexicographically-least spanning tree for the edge-id order)
inline std::vector<int> spanning_tree(const QuotientGraph& X) {
    std::vector<int> parent(X.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<int> tree;
    for (int id = 0; id < X.edge_count(); ++id) {
        int a = find(X.edges[id].waffle), b = find(X.edges[id].churro);
        if (a != b) {
            parent[a] = b;
            tree.push_back(id);
        }
    }
    return tree;
}

// path of edge ids between two vertices inside the tree
inline std::vector<int> tree_path(const QuotientGraph& X, const std::vector<int>& tree, int from,
                                  int to) {
    const int n = X.vertex_count();
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int id : tree) {
        adj[X.edges[id].waffle].push_back({X.edges[id].churro, id});
        adj[X.edges[id].churro].push_back({X.edges[id].waffle, id});
    }
    std::vector<int> prev_edge(n, -1), prev_vertex(n, -1);
    std::vector<char> seen(n, 0);
    std::vector<int> queue = {from};
    seen[from] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        if (v == to) break;
        for (auto [u, id] : adj[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                prev_edge[u] = id;
                prev_vertex[u] = v;
                queue.push_back(u);
            }
        }
    }
    std::vector<int> path;
    for (int v = to; v != from; v = prev_vertex[v]) {
        require(prev_edge[v] >= 0, errc::disconnected, "tree path not found");
        path.push_back(prev_edge[v]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// The fundamental cycle of a chord, listed from the chord's churro endpoint.
// Position parity drives the balance products: odd positions contribute their
// coweight to the left side, even positions to the right side; each
// reflective edge contributes a factor 2 on its own side (the 1/wt factor).
inline CycleWitness evaluate_cycle(const QuotientGraph& X, const std::vector<int>& tree,
                                   int chord_id) {
    const auto& chord = X.edges[chord_id];
    CycleWitness w;
    w.edge_ids.push_back(chord_id);
    auto path = tree_path(X, tree, chord.waffle, chord.churro);
    w.edge_ids.insert(w.edge_ids.end(), path.begin(), path.end());
    for (std::size_t pos = 0; pos < w.edge_ids.size(); ++pos) {
        const auto& e = X.edges[w.edge_ids[pos]];
        bool odd = (pos % 2 == 0); // 1-based odd positions
        unsigned long long& side = odd ? w.lhs : w.rhs;
        side *= e.coweight;
        if (e.reflective) side *= 2;
    }
    return w;
}

} // namespace detail

inline BalanceReport cycle_balance(const QuotientGraph& X) {
    X.validate();
    require(X.connected(), errc::disconnected, "balance needs a connected graph");
    BalanceReport report;
    auto tree = detail::spanning_tree(X);
    std::vector<char> in_tree(X.edge_count(), 0);
    for (int id : tree) in_tree[id] = 1;
    for (int id = 0; id < X.edge_count(); ++id) {
        if (in_tree[id]) continue;
        CycleWitness w = detail::evaluate_cycle(X, tree, id);
        report.cycles.push_back(w);
        if (w.lhs != w.rhs) {
            report.balanced = false;
            report.witnesses.push_back(w);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sheet numbers

struct SheetAssignment {
    std::vector<unsigned long long> by_vertex;
};

inline bool sheet_relation_check(const QuotientGraph& X, const SheetAssignment& S) {
    X.validate();
    for (const auto& e : X.edges) {
        // sht(waffle) * wt(e) == sht(churro) * cowt(e), both sides scaled by 2
        unsigned long long lhs = S.by_vertex[e.waffle] * (e.reflective ? 1ull : 2ull);
        unsigned long long rhs = S.by_vertex[e.churro] * e.coweight * 2ull;
        if (lhs != rhs) return false;
    }
    return true;
}

struct SheetSolveResult {
    bool ok = false;
    SheetAssignment sheets;
    std::vector<int> violating_cycle;
};

// Propagate sheet numbers from vertex `root` (value 1, then rescaled to the
// least positive integer solution); fails on unbalanced cycles.
inline SheetSolveResult solve_sheets(const QuotientGraph& X, int root = 0) {
    X.validate();
    require(X.connected(), errc::disconnected, "sheet propagation needs a connected graph");
    const int n = X.vertex_count();
    std::vector<Rational> value(n, Rational(0));
    std::vector<char> known(n, 0);
    value[root] = Rational(1);
    known[root] = 1;
    auto tree = detail::spanning_tree(X);
    // BFS over tree edges
    bool progress = true;
    while (progress) {
        progress = false;
        for (int id : tree) {
            const auto& e = X.edges[id];
            // d_w = d_c * nu(e)
            if (known[e.churro] && !known[e.waffle]) {
                value[e.waffle] = value[e.churro] * nu(e);
                known[e.waffle] = 1;
                progress = true;
            } else if (known[e.waffle] && !known[e.churro]) {
                value[e.churro] = value[e.waffle] / nu(e);
                known[e.churro] = 1;
                progress = true;
            }
        }
    }
    SheetSolveResult out;
    // chords must agree
    std::vector<char> in_tree(X.edge_count(), 0);
    for (int id : tree) in_tree[id] = 1;
    for (int id = 0; id < X.edge_count(); ++id) {
        if (in_tree[id]) continue;
        const auto& e = X.edges[id];
        if (!(value[e.waffle] == value[e.churro] * nu(e))) {
            out.ok = false;
            out.violating_cycle = detail::evaluate_cycle(X, tree, id).edge_ids;
            return out;
        }
    }
    // rescale to integers
    long long scale = 1;
    for (int v = 0; v < n; ++v) scale = std::lcm(scale, value[v].den);
    out.sheets.by_vertex.resize(n);
    for (int v = 0; v < n; ++v)
        out.sheets.by_vertex[v] =
            static_cast<unsigned long long>(value[v].num * (scale / value[v].den));
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// Graph grouping: certificate or obstruction

struct ChordCheck {
    int edge_id = -1;
    LowPowerGroup waffle_lp, churro_lp; // finite parts with reflector C2s folded in
    bool tau_flag = false;
    bool matched = false;
};

struct VertexAugSummary {
    int vertex = -1;
    unsigned long long flap_order = 1;
    int reflector_bank = 0;
};

struct GroupingCertificate {
    std::vector<int> tree_edges;
    std::vector<VertexAugSummary> augmentations;
    std::vector<ChordCheck> chords;
    // every matched edge exposes the distinguished "Z_e + trivial augmentation"
    // part on both sides; recorded once since it is structural
    std::string flatness_witness = "Z_e (+) {1} distinguished on both sides of every edge";
};

struct GroupingResult {
    bool success = false;
    Augmentation augmentation;
    GroupingCertificate certificate;
    std::vector<CycleWitness> obstruction; // unbalanced cycles when !success
};

namespace detail {

inline LowPowerGroup with_reflectors(const LowPowerGroup& lp, int twos) {
    LowPowerGroup out = lp;
    for (int i = 0; i < twos; ++i) out.primes.insert(out.primes.begin(), 2);
    std::sort(out.primes.begin(), out.primes.end());
    return out;
}

} // namespace detail

inline GroupingResult augment_graph(const QuotientGraph& X) {
    X.validate();
    require(X.connected(), errc::disconnected, "grouping needs a connected graph");
    GroupingResult out;
    auto tree = detail::spanning_tree(X);
    out.augmentation = detail::augment_over_tree(X, tree);
    out.certificate.tree_edges = tree;
    for (int v = 0; v < X.vertex_count(); ++v) {
        out.certificate.augmentations.push_back(
            {v, out.augmentation.by_vertex[v].flap_contribution.order(),
             out.augmentation.by_vertex[v].reflector_bank});
    }

    // tree edges satisfy the stabilizer isomorphism by construction; assert it
    for (int id : tree) {
        auto pair = edge_stabilizer_pair(id, X, out.augmentation);
        require(check_edge_iso(pair), errc::not_divisible,
                "tree-edge stabilizers failed to match; augmentation invariant broken");
    }

    std::vector<char> in_tree(X.edge_count(), 0);
    for (int id : tree) in_tree[id] = 1;
    bool all_matched = true;
    for (int id = 0; id < X.edge_count(); ++id) {
        if (in_tree[id]) continue;
        const auto& e = X.edges[id];
        ChordCheck check;
        check.edge_id = id;
        check.tau_flag = e.reflective;
        const auto& aw = out.augmentation.by_vertex[e.waffle];
        const auto& ac = out.augmentation.by_vertex[e.churro];
        // waffle side: Z_e + <tau_e> + A_w ; churro side: Z_e + allbut(e) + A_c
        check.waffle_lp =
            detail::with_reflectors(aw.flap_contribution, aw.reflector_bank + (e.reflective ? 1 : 0));
        LowPowerGroup allbut;
        for (int id2 = 0; id2 < X.edge_count(); ++id2) {
            if (id2 == id) continue;
            const auto& f = X.edges[id2];
            if (f.churro == e.churro) allbut = lp_sum(allbut, lowpower(f.coweight));
        }
        check.churro_lp =
            detail::with_reflectors(lp_sum(allbut, ac.flap_contribution), ac.reflector_bank);
        check.matched = lp_iso(check.waffle_lp, check.churro_lp);
        all_matched = all_matched && check.matched;
        out.certificate.chords.push_back(check);
    }
    out.success = all_matched;
    if (!out.success) {
        BalanceReport balance = cycle_balance(X);
        // failure can only come from unbalanced cycles; cross-check it
        require(!balance.balanced, errc::not_divisible,
                "grouping failed on a balanced graph; invariant broken");
        out.obstruction = balance.witnesses;
    }
    return out;
}

} // namespace waffle
