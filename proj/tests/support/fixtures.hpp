#pragma once

// Shared test fixtures and independent oracles. Everything here is
// deliberately naive: enumeration without pruning and literal evaluation of
// the squared penalty terms, so library results can be checked against an
// implementation that shares no code with them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tangle/graph.hpp"
#include "tangle/problems.hpp"
#include "tangle/qubo.hpp"
#include "tangle/rng.hpp"

namespace tangle::testsupport {

inline std::string random_dna(Rng& rng, int64_t length) {
    static const char bases[4] = {'A', 'C', 'G', 'T'};
    std::string s(static_cast<size_t>(length), 'A');
    for (auto& c : s) c = bases[rng.below(4)];
    return s;
}

struct EdgeSpec {
    std::string from;
    char from_orient;
    std::string to;
    char to_orient;
    int64_t ec = 0;
};

// Small-graph builder: node weights given directly, sequences random unless
// supplied.
inline AnnotatedGraph make_graph(const std::vector<std::pair<std::string, double>>& nodes,
                                 const std::vector<EdgeSpec>& edges, uint64_t seed = 7,
                                 int64_t seq_len = 40,
                                 const std::vector<std::string>& seqs = {}) {
    Rng rng = Rng::keyed({seed, 0x9e0d});
    AnnotatedGraph g;
    g.set_kmer_size(5);
    size_t i = 0;
    for (const auto& [id, w] : nodes) {
        NodeRecord rec;
        rec.id = id;
        rec.sequence = i < seqs.size() ? seqs[i] : random_dna(rng, seq_len);
        rec.weight = w;
        g.add_node(std::move(rec));
        ++i;
    }
    for (const auto& e : edges) {
        g.add_edge({g.require_node(e.from), e.from_orient == '+' ? Strand::fwd : Strand::rev},
                   {g.require_node(e.to), e.to_orient == '+' ? Strand::fwd : Strand::rev}, e.ec);
    }
    return g;
}

// Exhaustive walk enumeration with no pruning; the oracle the solver's
// branch-and-bound is checked against.
inline void enumerate_walks(const AnnotatedGraph& g, ProblemKind kind, int max_len,
                            const std::function<void(const Walk&)>& visit) {
    Walk walk;
    std::function<void()> step = [&]() {
        visit(walk);
        if (static_cast<int>(walk.size()) == max_len) return;
        if (walk.empty()) {
            for (NodeIdx v = 0; v < g.node_count(); ++v) {
                for (Strand s : {Strand::fwd, Strand::rev}) {
                    if (kind == ProblemKind::tangle && s == Strand::rev) continue;
                    walk.push_back({g.node(v).id, s});
                    step();
                    walk.pop_back();
                }
            }
        } else {
            NodeIdx cur = g.require_node(walk.back().node);
            for (NodeIdx v = 0; v < g.node_count(); ++v) {
                for (Strand s : {Strand::fwd, Strand::rev}) {
                    if (kind == ProblemKind::tangle) {
                        if (s == Strand::rev) continue;
                        if (!g.has_node_edge(cur, v)) continue;
                    } else if (!g.has_edge({cur, walk.back().strand}, {v, s})) {
                        continue;
                    }
                    walk.push_back({g.node(v).id, s});
                    step();
                    walk.pop_back();
                }
            }
        }
    };
    step();
}

inline double best_walk_cost_by_enumeration(const AnnotatedGraph& g, ProblemKind kind,
                                            int max_len) {
    double best = std::numeric_limits<double>::infinity();
    enumerate_walks(g, kind, max_len, [&](const Walk& w) {
        best = std::min(best, walk_cost(g, kind, w));
    });
    return best;
}

// Literal evaluation of the three penalty sums on an assignment, squared
// terms and all; independent of the symbolic expansion in the builder.
inline double direct_penalty_cost(const AnnotatedGraph& g, const VariableLayout& layout,
                                  double lambda1, double lambda2, const BitVector& x) {
    const int T = layout.horizon;
    const int S = layout.slots_per_time();
    const int end = layout.end_slot();
    double total = 0.0;

    for (int p = 0; p < layout.num_paths; ++p) {
        for (int t = 1; t <= T; ++t) {
            int on = 0;
            for (int s = 0; s < S; ++s) on += x[layout.index_of(p, t, s)];
            total += lambda1 * (on - 1.0) * (on - 1.0);
        }
        for (int t = 1; t < T; ++t) {
            for (int s = 0; s < S - 1; ++s) {
                for (int s2 = 0; s2 < S - 1; ++s2) {
                    if (!x[layout.index_of(p, t, s)] || !x[layout.index_of(p, t + 1, s2)]) continue;
                    OrientedNode a = layout.node_of_slot(s);
                    OrientedNode b = layout.node_of_slot(s2);
                    bool edge = layout.kind == ProblemKind::tangle ? g.has_node_edge(a.idx, b.idx)
                                                                   : g.has_edge(a, b);
                    if (!edge) total += lambda2;
                }
            }
            for (int s = 0; s < S - 1; ++s) {
                if (x[layout.index_of(p, t, end)] && x[layout.index_of(p, t + 1, s)]) {
                    total += lambda2;
                }
            }
        }
    }

    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        int64_t visits = 0;
        for (int p = 0; p < layout.num_paths; ++p) {
            for (int t = 1; t <= T; ++t) {
                visits += x[layout.index_of(p, t, layout.slot_of(v, Strand::fwd))];
                if (layout.kind != ProblemKind::tangle) {
                    visits += x[layout.index_of(p, t, layout.slot_of(v, Strand::rev))];
                }
            }
        }
        double d = static_cast<double>(visits) - static_cast<double>(rounded_weight(g.node(v).weight));
        total += d * d;
    }
    return total;
}

inline BitVector random_bits(Rng& rng, int n) {
    BitVector x(n);
    for (auto& b : x) b = static_cast<uint8_t>(rng.next() & 1);
    return x;
}

// Random valid walk of bounded length (may be empty when no start works).
inline Walk random_walk(const AnnotatedGraph& g, ProblemKind kind, int max_len, Rng& rng) {
    Walk walk;
    int len = static_cast<int>(rng.below(static_cast<uint64_t>(max_len) + 1));
    for (int i = 0; i < len; ++i) {
        std::vector<Step> options;
        if (walk.empty()) {
            for (NodeIdx v = 0; v < g.node_count(); ++v) {
                options.push_back({g.node(v).id, Strand::fwd});
                if (kind != ProblemKind::tangle) options.push_back({g.node(v).id, Strand::rev});
            }
        } else {
            NodeIdx cur = g.require_node(walk.back().node);
            if (kind == ProblemKind::tangle) {
                for (NodeIdx v : g.out_nodes(cur)) options.push_back({g.node(v).id, Strand::fwd});
            } else {
                for (const auto& [to, ec] : g.out({cur, walk.back().strand})) {
                    options.push_back({g.node(to.idx).id, to.strand});
                }
            }
        }
        if (options.empty()) break;
        walk.push_back(options[rng.below(options.size())]);
    }
    return walk;
}

// Random connected instance for penalty-dominance style checks: integer
// weights <= max_w, tangle variable count min_vars <= (N+1)*T <= max_vars.
inline AnnotatedGraph random_connected_instance(uint64_t seed, int max_vars, int max_w = 3,
                                                ProblemKind kind = ProblemKind::tangle,
                                                int min_vars = 0) {
    Rng rng = Rng::keyed({seed, 0xc0});
    while (true) {
        int n = 1 + static_cast<int>(rng.below(6));
        std::vector<std::pair<std::string, double>> nodes;
        int64_t total_w = 0;
        for (int i = 0; i < n; ++i) {
            int w = static_cast<int>(rng.below(static_cast<uint64_t>(max_w) + 1));
            nodes.emplace_back("n" + std::to_string(i), static_cast<double>(w));
            total_w += w;
        }
        if (total_w < 1) continue;
        int T = std::max(2, static_cast<int>(std::ceil(1.2 * static_cast<double>(total_w) - 1e-9)));
        int slots = kind == ProblemKind::tangle ? n + 1 : 2 * n + 1;
        if (slots * T > max_vars || slots * T < min_vars) continue;

        std::vector<EdgeSpec> edges;
        // random spanning tree first, then extra random edges
        for (int i = 1; i < n; ++i) {
            int j = static_cast<int>(rng.below(static_cast<uint64_t>(i)));
            edges.push_back({"n" + std::to_string(j), '+', "n" + std::to_string(i), '+', 1});
        }
        int extra = static_cast<int>(rng.below(static_cast<uint64_t>(n) + 1));
        for (int e = 0; e < extra; ++e) {
            int a = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            int b = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            char oa = rng.next() & 1 ? '+' : '-';
            char ob = rng.next() & 1 ? '+' : '-';
            edges.push_back({"n" + std::to_string(a), oa, "n" + std::to_string(b), ob, 1});
        }
        return make_graph(nodes, edges, rng.next(), 24);
    }
}

// A pipeline fixture: a backbone graph with a repeated node, the ground
// truth walk, and decoy edges that strictly hurt the visit counts.
// shortcut_edges adds skip routes between backbone nodes so the solver has
// genuinely wrong alternatives to reject.
struct TangleFixture {
    AnnotatedGraph graph;
    Walk truth;
    std::string truth_sequence;
};

TangleFixture make_tangle_fixture(uint64_t seed, int backbone = 8, int repeats = 2,
                                  int64_t min_len = 150, int64_t max_len = 400,
                                  int shortcut_edges = 0);

}  // namespace tangle::testsupport
