#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tangle/dna.hpp"
#include "tangle/gfa.hpp"

namespace tangle {

using NodeIdx = uint32_t;

struct OrientedNode {
    NodeIdx idx = 0;
    Strand strand = Strand::fwd;

    bool operator==(const OrientedNode&) const = default;
};

inline OrientedNode flip(OrientedNode n) { return {n.idx, flip(n.strand)}; }

// Packed code: node index * 2 + strand bit. Used as adjacency array index.
inline uint32_t oriented_code(OrientedNode n) {
    return n.idx * 2u + static_cast<uint32_t>(n.strand);
}
inline OrientedNode oriented_from_code(uint32_t code) {
    return {code / 2u, static_cast<Strand>(code & 1u)};
}

struct NodeRecord {
    std::string id;
    std::string sequence;
    int64_t kmer_count = 0;            // KC
    int64_t expected_unique_kmers = 0; // filled by the kmer indexer
    double weight = 0.0;               // copy number w(v), real-valued

    int64_t length() const { return static_cast<int64_t>(sequence.size()); }
};

struct OrientedEdge {
    OrientedNode from;
    OrientedNode to;
    int64_t count = 0;  // EC

    bool operator==(const OrientedEdge&) const = default;
};

// Oriented, vertex-weighted graph. Every edge coexists with its implied
// reverse pair: (u,o1)->(v,o2) iff (v,!o2)->(u,!o1), and the pair shares one
// count. Instances are treated as values: the operations below copy, modify
// and return, so a constructed graph is safe for shared concurrent reads.
class AnnotatedGraph {
  public:
    AnnotatedGraph() = default;

    NodeIdx add_node(NodeRecord rec);
    // Inserts the edge and its implied pair; repeated inserts keep the max count.
    void add_edge(OrientedNode from, OrientedNode to, int64_t count = 0);
    void remove_edge(OrientedNode from, OrientedNode to);  // removes the pair too
    void set_edge_count(OrientedNode from, OrientedNode to, int64_t count);
    void set_kmer_count(NodeIdx idx, int64_t kc) { nodes_[idx].kmer_count = kc; }
    void set_expected_unique(NodeIdx idx, int64_t n) { nodes_[idx].expected_unique_kmers = n; }
    void set_weight(NodeIdx idx, double w) { nodes_[idx].weight = w; }
    void set_kmer_size(int k) { kmer_size_ = k; }
    void set_baseline_depth(double d) { baseline_depth_ = d; }

    size_t node_count() const { return nodes_.size(); }
    const NodeRecord& node(NodeIdx idx) const { return nodes_[idx]; }
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    std::optional<NodeIdx> find_node(const std::string& id) const;
    NodeIdx require_node(const std::string& id) const;  // throws on unknown id

    int kmer_size() const { return kmer_size_; }
    double baseline_depth() const { return baseline_depth_; }

    bool has_edge(OrientedNode from, OrientedNode to) const;
    std::optional<int64_t> edge_count(OrientedNode from, OrientedNode to) const;
    // Out-neighbours of an oriented node, sorted by (node, strand).
    const std::vector<std::pair<OrientedNode, int64_t>>& out(OrientedNode n) const;

    // Orientation-collapsed view used by the unoriented problem: u->v iff any
    // oriented edge joins u to v.
    bool has_node_edge(NodeIdx u, NodeIdx v) const;
    const std::vector<NodeIdx>& out_nodes(NodeIdx u) const;

    // All edges in deterministic (from, to) code order, pairs included.
    std::vector<OrientedEdge> edges() const;
    size_t edge_pair_count() const { return edge_counts_.size() / 2; }

    double total_weight() const;

  private:
    void rebuild_adjacency();

    std::vector<NodeRecord> nodes_;
    std::unordered_map<std::string, NodeIdx> index_;
    // key: (from_code, to_code); self-paired edges appear once
    std::map<std::pair<uint32_t, uint32_t>, int64_t> edge_counts_;
    std::vector<std::vector<std::pair<OrientedNode, int64_t>>> adj_;
    std::vector<std::vector<NodeIdx>> node_adj_;
    int kmer_size_ = 0;
    double baseline_depth_ = 0.0;
};

// Builds the oriented graph from a parsed GFA document. KC comes from KC:i,
// else SC:i, else round(dc:f * length); edge counts from EC:i, else
// ceil(dc:f). k >= 2 is required for downstream kmer arithmetic.
AnnotatedGraph graph_from_gfa(const GfaDocument& doc, int k);

// Renders the graph back to a document (S/L records with KC/EC and, when
// known, ku:i expected-unique tags).
GfaDocument graph_to_gfa(const AnnotatedGraph& g);

// Sets w(v) = depth(v) / baseline with depth(v) = KC / max(1, L - k + 1).
// baseline is sequencing_depth when supplied, else the length-weighted median
// of node depths. With use_expected_unique, nodes with a recorded
// expected-unique count use that as the depth denominator instead.
AnnotatedGraph normalize_copy_numbers(const AnnotatedGraph& g,
                                      std::optional<double> sequencing_depth = std::nullopt,
                                      bool use_expected_unique = false);

// Removes superfluous zero-count edges at nodes that have at least one
// positively supported in-edge and out-edge, skipping any removal that would
// change weak connectivity among positive-weight nodes. Single pass in node
// order; implied pairs are removed together.
AnnotatedGraph trim_zero_weight_edges(const AnnotatedGraph& g);

// Component count of the undirected node graph restricted to w(v) > 0.
size_t positive_weight_components(const AnnotatedGraph& g);

}  // namespace tangle
