#include "fixtures.hpp"

#include "tangle/assembly.hpp"

namespace tangle::testsupport {

TangleFixture make_tangle_fixture(uint64_t seed, int backbone, int repeats, int64_t min_len,
                                  int64_t max_len, int shortcut_edges) {
    Rng rng = Rng::keyed({seed, 0xf1c});
    TangleFixture fx;
    fx.graph.set_kmer_size(21);

    auto add_node = [&](const std::string& id) {
        NodeRecord rec;
        rec.id = id;
        rec.sequence = random_dna(rng, min_len + static_cast<int64_t>(
                                               rng.below(static_cast<uint64_t>(max_len - min_len + 1))));
        return fx.graph.add_node(std::move(rec));
    };

    std::vector<NodeIdx> chain;
    for (int i = 0; i < backbone; ++i) chain.push_back(add_node("b" + std::to_string(i)));
    NodeIdx repeat = add_node("rep");
    NodeIdx decoy = add_node("decoy");

    // truth: walk the backbone, detouring through the repeat node after
    // every stretch of backbone nodes
    std::vector<NodeIdx> truth_nodes;
    int stretch = std::max(2, backbone / (repeats + 1));
    for (int i = 0; i < backbone; ++i) {
        truth_nodes.push_back(chain[static_cast<size_t>(i)]);
        bool boundary = (i + 1) % stretch == 0 && i + 1 < backbone;
        if (boundary && repeats > 0) {
            truth_nodes.push_back(repeat);
            --repeats;
        }
    }
    for (size_t i = 0; i + 1 < truth_nodes.size(); ++i) {
        fx.graph.add_edge({truth_nodes[i], Strand::fwd}, {truth_nodes[i + 1], Strand::fwd}, 0);
    }
    // dead-end decoy branch off an early backbone node; taking it always
    // hurts the visit counts
    fx.graph.add_edge({chain[1], Strand::fwd}, {decoy, Strand::fwd}, 0);

    // skip routes and one strand-flipping edge between backbone nodes
    for (int s = 0; s < shortcut_edges; ++s) {
        size_t i = rng.below(chain.size() - 2);
        size_t j = i + 2 + rng.below(std::min<uint64_t>(3, chain.size() - i - 2));
        Strand to = s % 3 == 2 ? Strand::rev : Strand::fwd;
        fx.graph.add_edge({chain[i], Strand::fwd}, {chain[std::min(j, chain.size() - 1)], to}, 0);
    }

    std::vector<int64_t> counts(fx.graph.node_count(), 0);
    for (NodeIdx v : truth_nodes) counts[v] += 1;
    for (NodeIdx v = 0; v < fx.graph.node_count(); ++v) {
        fx.graph.set_weight(v, static_cast<double>(counts[v]));
        int64_t kmers = std::max<int64_t>(1, fx.graph.node(v).length() - fx.graph.kmer_size() + 1);
        fx.graph.set_kmer_count(v, counts[v] * kmers);
    }

    for (NodeIdx v : truth_nodes) fx.truth.push_back({fx.graph.node(v).id, Strand::fwd});
    fx.truth_sequence = extract_sequence(fx.graph, fx.truth);
    return fx;
}

}  // namespace tangle::testsupport
