#include <doctest.h>

#include <sstream>

#include "tangle/qubo.hpp"
#include "support/fixtures.hpp"

using namespace tangle;
using namespace tangle::testsupport;

namespace {

// all assignments of an n-variable model, n small
template <typename F>
void for_all_assignments(int n, F&& f) {
    for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
        BitVector x(n);
        for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
        f(x);
    }
}

}  // namespace

TEST_CASE("variable counts follow the layout formulas") {
    Rng rng = Rng::keyed({3, 0x1a0});
    for (int iter = 0; iter < 30; ++iter) {
        AnnotatedGraph g = random_connected_instance(rng.next(), 22);
        int64_t total = 0;
        for (const auto& n : g.nodes()) total += rounded_weight(n.weight);
        int T = qubo_horizon(g, 1.2);
        CHECK(T == std::max(2, static_cast<int>(std::ceil(1.2 * total - 1e-9))));
        const int N = static_cast<int>(g.node_count());
        CHECK(build_tangle_qubo(g).n() == (N + 1) * T);
        CHECK(build_oriented_qubo(g).n() == (2 * N + 1) * T);
        CHECK(build_diploid_qubo(g).n() == 2 * (2 * N + 1) * T);
    }
}

TEST_CASE("one-node tangle model: spec instance enumerated") {
    AnnotatedGraph g = make_graph({{"v", 1.0}}, {});
    QuboModel m = build_tangle_qubo(g);
    REQUIRE(m.layout().horizon == 2);
    REQUIRE(m.n() == 4);

    CHECK(m.energy(BitVector(4, 0)) == 21.0);  // 2*lambda1 + w^2

    // the perfect encoding {x_{1,v}, x_{2,end}} is the unique ground state
    BitVector perfect = encode_walk(m.layout(), {{"v", Strand::fwd}});
    CHECK(m.energy(perfect) == 0.0);
    int zero_count = 0;
    double min_energy = 1e18;
    for_all_assignments(4, [&](const BitVector& x) {
        min_energy = std::min(min_energy, m.energy(x));
        if (m.energy(x) == 0.0) ++zero_count;
    });
    CHECK(min_energy == 0.0);
    CHECK(zero_count == 1);
}

TEST_CASE("one-node oriented model: both orientations reach zero") {
    AnnotatedGraph g = make_graph({{"v", 1.0}}, {});
    QuboModel m = build_oriented_qubo(g);
    REQUIRE(m.n() == 6);  // (2*1+1)*2
    BitVector fwd = encode_walk(m.layout(), {{"v", Strand::fwd}});
    BitVector rev = encode_walk(m.layout(), {{"v", Strand::rev}});
    CHECK(m.energy(fwd) == 0.0);
    CHECK(m.energy(rev) == 0.0);
    double min_energy = 1e18;
    for_all_assignments(6, [&](const BitVector& x) { min_energy = std::min(min_energy, m.energy(x)); });
    CHECK(min_energy == 0.0);
}

TEST_CASE("oriented transitions are penalised unless the oriented edge exists") {
    // without a self-pairing edge, visiting v+ then v- pays the transition
    // penalty; adding the edge removes it
    AnnotatedGraph bare = make_graph({{"v", 2.0}}, {});
    QuboModel m1 = build_oriented_qubo(bare);
    Walk flip_walk{{"v", Strand::fwd}, {"v", Strand::rev}};
    BitVector x(m1.n(), 0);
    x[m1.layout().index_of(0, 1, 0)] = 1;  // (v,+) at t=1
    x[m1.layout().index_of(0, 2, 1)] = 1;  // (v,-) at t=2
    for (int t = 3; t <= m1.layout().horizon; ++t) {
        x[m1.layout().index_of(0, t, m1.layout().end_slot())] = 1;
    }
    CHECK(m1.energy(x) == 5.0);  // lambda2, count term satisfied

    AnnotatedGraph paired = make_graph({{"v", 2.0}}, {{"v", '+', "v", '-', 1}});
    QuboModel m2 = build_oriented_qubo(paired);
    CHECK(m2.energy(encode_walk(m2.layout(), flip_walk)) == 0.0);
}

TEST_CASE("diploid model: one visit per path reaches zero on a w=2 node") {
    AnnotatedGraph g = make_graph({{"v", 2.0}}, {});
    QuboModel m = build_diploid_qubo(g);
    REQUIRE(m.layout().horizon == 3);  // ceil(1.2*2)
    REQUIRE(m.n() == 2 * 3 * 3);
    BitVector x = encode_walk_pair(m.layout(), {{{"v", Strand::fwd}}, {{"v", Strand::fwd}}});
    CHECK(m.energy(x) == 0.0);
    // enumeration of the minimal instance confirms 0 is the global minimum
    double min_energy = 1e18;
    for_all_assignments(m.n(), [&](const BitVector& b) {
        min_energy = std::min(min_energy, m.energy(b));
    });
    CHECK(min_energy == 0.0);
}

TEST_CASE("diploid cross-path couplings only come from the count term") {
    AnnotatedGraph g = make_graph({{"a", 1.0}, {"b", 1.0}}, {{"a", '+', "b", '+', 1}});
    QuboModel m = build_diploid_qubo(g);
    const auto& layout = m.layout();
    const int block = layout.horizon * layout.slots_per_time();
    for (const auto& [i, j, c] : m.quadratic()) {
        if (i / block == j / block) continue;  // same path
        // cross-block terms pair slots of the same node, with coefficient 2
        auto a = layout.var_at(i), b = layout.var_at(j);
        REQUIRE(a.slot != layout.end_slot());
        REQUIRE(b.slot != layout.end_slot());
        CHECK(layout.node_of_slot(a.slot).idx == layout.node_of_slot(b.slot).idx);
        CHECK(c == 2.0);
    }
}

TEST_CASE("energy matches a literal evaluation of the penalty sums") {
    Rng rng = Rng::keyed({9, 0xd1e0});
    for (int iter = 0; iter < 60; ++iter) {
        AnnotatedGraph g = random_connected_instance(rng.next(), 22);
        for (ProblemKind kind :
             {ProblemKind::tangle, ProblemKind::oriented, ProblemKind::diploid}) {
            QuboModel m = build_qubo(g, kind);
            Rng xr = rng.fork(iter * 4 + static_cast<int>(kind));
            for (int rep = 0; rep < 20; ++rep) {
                BitVector x = random_bits(xr, m.n());
                CHECK(m.energy(x) ==
                      direct_penalty_cost(g, m.layout(), m.lambda1(), m.lambda2(), x));
            }
        }
    }
}

TEST_CASE("encoding faithfulness: energy(encode(w)) equals the walk cost exactly") {
    Rng rng = Rng::keyed({13, 0xfa17});
    for (int iter = 0; iter < 100; ++iter) {
        AnnotatedGraph g = random_connected_instance(rng.next(), 40);
        for (ProblemKind kind : {ProblemKind::tangle, ProblemKind::oriented}) {
            QuboModel m = build_qubo(g, kind);
            Rng wr = rng.fork(iter * 2 + static_cast<int>(kind));
            for (int rep = 0; rep < 5; ++rep) {
                Walk w = random_walk(g, kind, m.layout().horizon, wr);
                CHECK(m.energy(encode_walk(m.layout(), w)) == walk_cost(g, kind, w));
            }
        }
        QuboModel dm = build_diploid_qubo(g);
        Rng wr = rng.fork(1000 + iter);
        WalkPair p{random_walk(g, ProblemKind::oriented, dm.layout().horizon, wr),
                   random_walk(g, ProblemKind::oriented, dm.layout().horizon, wr)};
        CHECK(dm.energy(encode_walk_pair(dm.layout(), p)) == cost_diploid(g, p));
    }
}

TEST_CASE("encode rejects walks longer than the horizon") {
    AnnotatedGraph g = make_graph({{"v", 1.0}}, {{"v", '+', "v", '+', 1}});
    QuboModel m = build_tangle_qubo(g);
    Walk too_long(static_cast<size_t>(m.layout().horizon) + 1, Step{"v", Strand::fwd});
    CHECK_THROWS(encode_walk(m.layout(), too_long));
}

TEST_CASE("empty walk encodes to all end slots") {
    AnnotatedGraph g = make_graph({{"a", 1.0}, {"b", 1.0}}, {{"a", '+', "b", '+', 1}});
    QuboModel m = build_tangle_qubo(g);
    BitVector x = encode_walk(m.layout(), {});
    for (int t = 1; t <= m.layout().horizon; ++t) {
        CHECK(x[m.layout().index_of(0, t, m.layout().end_slot())] == 1);
    }
    CHECK(m.energy(x) == cost_tangle(g, {}));
}

TEST_CASE("node id permutation preserves the energy spectrum") {
    AnnotatedGraph g = make_graph({{"a", 1.0}, {"b", 2.0}},
                                  {{"a", '+', "b", '+', 1}, {"b", '+', "a", '+', 1}});
    AnnotatedGraph permuted = make_graph({{"b", 2.0}, {"a", 1.0}},
                                         {{"a", '+', "b", '+', 1}, {"b", '+', "a", '+', 1}});
    QuboModel m1 = build_tangle_qubo(g);
    QuboModel m2 = build_tangle_qubo(permuted);
    REQUIRE(m1.n() == m2.n());
    std::vector<double> s1, s2;
    for_all_assignments(m1.n(), [&](const BitVector& x) {
        s1.push_back(m1.energy(x));
        s2.push_back(m2.energy(x));
    });
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    CHECK(s1 == s2);
}

TEST_CASE("model text round-trip preserves energies") {
    Rng rng = Rng::keyed({19, 0x707});
    for (int iter = 0; iter < 20; ++iter) {
        AnnotatedGraph g = random_connected_instance(rng.next(), 22);
        QuboModel m = build_oriented_qubo(g);
        std::ostringstream out;
        write_qubo_model(out, m);
        std::istringstream in(out.str());
        QuboModel back = read_qubo_model(in);
        REQUIRE(back.n() == m.n());
        CHECK(back.layout().kind == m.layout().kind);
        CHECK(back.layout().horizon == m.layout().horizon);
        Rng xr = rng.fork(iter);
        for (int rep = 0; rep < 20; ++rep) {
            BitVector x = random_bits(xr, m.n());
            CHECK(back.energy(x) == m.energy(x));
        }
    }
}

TEST_CASE("layout json round-trip") {
    AnnotatedGraph g = make_graph({{"a", 1.0}, {"b", 2.0}}, {{"a", '+', "b", '+', 1}});
    QuboModel m = build_diploid_qubo(g);
    VariableLayout back = layout_from_json(layout_to_json(m.layout()));
    CHECK(back.kind == m.layout().kind);
    CHECK(back.horizon == m.layout().horizon);
    CHECK(back.num_paths == m.layout().num_paths);
    CHECK(back.node_ids == m.layout().node_ids);
    CHECK(back.variable_count() == m.n());
}

TEST_CASE("hex packing round-trips") {
    Rng rng = Rng::keyed({29, 0x4e});
    for (int iter = 0; iter < 100; ++iter) {
        int n = 1 + static_cast<int>(rng.below(70));
        BitVector x = random_bits(rng, n);
        CHECK(unpack_bits_hex(pack_bits_hex(x), n) == x);
    }
}
