#include "tangle/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tangle {

namespace {

// Union-find over node indices.
struct DisjointSets {
    std::vector<NodeIdx> parent;

    explicit DisjointSets(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    NodeIdx find(NodeIdx x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(NodeIdx a, NodeIdx b) { parent[find(a)] = find(b); }
};

}  // namespace

NodeIdx AnnotatedGraph::add_node(NodeRecord rec) {
    if (rec.id.empty()) throw std::invalid_argument("node id must be non-empty");
    if (index_.count(rec.id)) throw std::invalid_argument("duplicate node id '" + rec.id + "'");
    NodeIdx idx = static_cast<NodeIdx>(nodes_.size());
    index_.emplace(rec.id, idx);
    nodes_.push_back(std::move(rec));
    adj_.resize(nodes_.size() * 2);
    node_adj_.resize(nodes_.size());
    return idx;
}

void AnnotatedGraph::add_edge(OrientedNode from, OrientedNode to, int64_t count) {
    if (from.idx >= nodes_.size() || to.idx >= nodes_.size()) {
        throw std::invalid_argument("edge endpoint out of range");
    }
    auto key = std::make_pair(oriented_code(from), oriented_code(to));
    auto mirror = std::make_pair(oriented_code(flip(to)), oriented_code(flip(from)));
    auto it = edge_counts_.find(key);
    if (it != edge_counts_.end()) {
        count = std::max(count, it->second);
    }
    edge_counts_[key] = count;
    edge_counts_[mirror] = count;
    rebuild_adjacency();
}

void AnnotatedGraph::remove_edge(OrientedNode from, OrientedNode to) {
    edge_counts_.erase({oriented_code(from), oriented_code(to)});
    edge_counts_.erase({oriented_code(flip(to)), oriented_code(flip(from))});
    rebuild_adjacency();
}

void AnnotatedGraph::set_edge_count(OrientedNode from, OrientedNode to, int64_t count) {
    auto key = std::make_pair(oriented_code(from), oriented_code(to));
    auto it = edge_counts_.find(key);
    if (it == edge_counts_.end()) {
        throw std::invalid_argument("no such edge " + nodes_[from.idx].id + strand_char(from.strand) +
                                    " -> " + nodes_[to.idx].id + strand_char(to.strand));
    }
    it->second = count;
    edge_counts_[{oriented_code(flip(to)), oriented_code(flip(from))}] = count;
    rebuild_adjacency();
}

std::optional<NodeIdx> AnnotatedGraph::find_node(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeIdx AnnotatedGraph::require_node(const std::string& id) const {
    auto idx = find_node(id);
    if (!idx) throw std::invalid_argument("unknown node id '" + id + "'");
    return *idx;
}

bool AnnotatedGraph::has_edge(OrientedNode from, OrientedNode to) const {
    return edge_counts_.count({oriented_code(from), oriented_code(to)}) > 0;
}

std::optional<int64_t> AnnotatedGraph::edge_count(OrientedNode from, OrientedNode to) const {
    auto it = edge_counts_.find({oriented_code(from), oriented_code(to)});
    if (it == edge_counts_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::pair<OrientedNode, int64_t>>& AnnotatedGraph::out(OrientedNode n) const {
    return adj_[oriented_code(n)];
}

bool AnnotatedGraph::has_node_edge(NodeIdx u, NodeIdx v) const {
    const auto& outs = node_adj_[u];
    return std::binary_search(outs.begin(), outs.end(), v);
}

const std::vector<NodeIdx>& AnnotatedGraph::out_nodes(NodeIdx u) const {
    return node_adj_[u];
}

std::vector<OrientedEdge> AnnotatedGraph::edges() const {
    std::vector<OrientedEdge> out;
    out.reserve(edge_counts_.size());
    for (const auto& [key, count] : edge_counts_) {
        out.push_back({oriented_from_code(key.first), oriented_from_code(key.second), count});
    }
    return out;
}

double AnnotatedGraph::total_weight() const {
    double sum = 0.0;
    for (const auto& n : nodes_) sum += n.weight;
    return sum;
}

void AnnotatedGraph::rebuild_adjacency() {
    adj_.assign(nodes_.size() * 2, {});
    node_adj_.assign(nodes_.size(), {});
    for (const auto& [key, count] : edge_counts_) {
        OrientedNode from = oriented_from_code(key.first);
        OrientedNode to = oriented_from_code(key.second);
        adj_[key.first].emplace_back(to, count);
        node_adj_[from.idx].push_back(to.idx);
    }
    for (auto& outs : node_adj_) {
        std::sort(outs.begin(), outs.end());
        outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
    }
}

AnnotatedGraph graph_from_gfa(const GfaDocument& doc, int k) {
    if (k < 2) throw std::invalid_argument("kmer size must be >= 2");
    AnnotatedGraph g;
    g.set_kmer_size(k);
    for (const auto& seg : doc.segments) {
        if (seg.sequence == "*" || seg.sequence.empty()) {
            throw std::invalid_argument("segment '" + seg.id + "' has no sequence");
        }
        NodeRecord rec;
        rec.id = seg.id;
        rec.sequence = seg.sequence;
        if (auto kc = seg.kmer_count()) {
            rec.kmer_count = *kc;
        } else if (auto sc = seg.sc_count()) {
            rec.kmer_count = *sc;
        } else if (auto dc = seg.depth_fraction()) {
            rec.kmer_count = std::llround(*dc * static_cast<double>(rec.length()));
        }
        if (auto ku = tag_int(seg.tags, "ku")) rec.expected_unique_kmers = *ku;
        g.add_node(std::move(rec));
    }
    for (const auto& link : doc.links) {
        OrientedNode from{g.require_node(link.from_id), link.from_strand};
        OrientedNode to{g.require_node(link.to_id), link.to_strand};
        int64_t ec = 0;
        if (auto e = link.edge_count()) {
            ec = *e;
        } else if (auto dc = tag_float(link.tags, "dc")) {
            ec = static_cast<int64_t>(std::ceil(*dc));
        }
        g.add_edge(from, to, ec);
    }
    return g;
}

GfaDocument graph_to_gfa(const AnnotatedGraph& g) {
    GfaDocument doc;
    doc.headers.push_back("H\tVN:Z:1.0");
    for (const auto& n : g.nodes()) {
        GfaSegment seg;
        seg.id = n.id;
        seg.sequence = n.sequence;
        seg.tags["KC"] = GfaTag::of_int(n.kmer_count);
        if (n.expected_unique_kmers > 0) {
            seg.tags["ku"] = GfaTag::of_int(n.expected_unique_kmers);
        }
        doc.segments.push_back(std::move(seg));
    }
    // one L record per edge pair: keep the lexicographically smaller key
    for (const auto& e : g.edges()) {
        auto key = std::make_pair(oriented_code(e.from), oriented_code(e.to));
        auto mirror = std::make_pair(oriented_code(flip(e.to)), oriented_code(flip(e.from)));
        if (mirror < key) continue;
        GfaLink link;
        link.from_id = g.node(e.from.idx).id;
        link.from_strand = e.from.strand;
        link.to_id = g.node(e.to.idx).id;
        link.to_strand = e.to.strand;
        link.overlap = "0M";
        link.tags["EC"] = GfaTag::of_int(e.count);
        doc.links.push_back(std::move(link));
    }
    return doc;
}

AnnotatedGraph normalize_copy_numbers(const AnnotatedGraph& g,
                                      std::optional<double> sequencing_depth,
                                      bool use_expected_unique) {
    bool any_kc = false;
    for (const auto& n : g.nodes()) {
        if (n.kmer_count > 0) any_kc = true;
    }
    if (!any_kc) throw std::runtime_error("cannot normalise: every node has KC = 0");

    const int k = g.kmer_size();
    std::vector<double> depth(g.node_count());
    for (NodeIdx i = 0; i < g.node_count(); ++i) {
        const auto& n = g.node(i);
        int64_t denom = std::max<int64_t>(1, n.length() - k + 1);
        if (use_expected_unique && n.expected_unique_kmers > 0) {
            denom = n.expected_unique_kmers;
        }
        depth[i] = static_cast<double>(n.kmer_count) / static_cast<double>(denom);
    }

    double baseline;
    if (sequencing_depth) {
        if (*sequencing_depth <= 0) throw std::invalid_argument("sequencing depth must be positive");
        baseline = *sequencing_depth;
    } else {
        // length-weighted (lower) median of node depths
        std::vector<NodeIdx> order(g.node_count());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](NodeIdx a, NodeIdx b) { return depth[a] < depth[b]; });
        double total_len = 0.0;
        for (const auto& n : g.nodes()) total_len += static_cast<double>(n.length());
        double acc = 0.0;
        baseline = depth[order.back()];
        for (NodeIdx i : order) {
            acc += static_cast<double>(g.node(i).length());
            if (acc * 2.0 >= total_len) {
                baseline = depth[i];
                break;
            }
        }
        if (baseline <= 0.0) {
            throw std::runtime_error("cannot normalise: length-weighted median depth is zero");
        }
    }

    AnnotatedGraph out = g;
    out.set_baseline_depth(baseline);
    for (NodeIdx i = 0; i < out.node_count(); ++i) {
        out.set_weight(i, depth[i] / baseline);
    }
    return out;
}

size_t positive_weight_components(const AnnotatedGraph& g) {
    DisjointSets ds(g.node_count());
    for (const auto& e : g.edges()) {
        if (g.node(e.from.idx).weight > 0 && g.node(e.to.idx).weight > 0) {
            ds.unite(e.from.idx, e.to.idx);
        }
    }
    size_t count = 0;
    for (NodeIdx i = 0; i < g.node_count(); ++i) {
        if (g.node(i).weight > 0 && ds.find(i) == i) ++count;
    }
    return count;
}

AnnotatedGraph trim_zero_weight_edges(const AnnotatedGraph& g) {
    AnnotatedGraph out = g;
    for (NodeIdx v = 0; v < out.node_count(); ++v) {
        // the forward orientation sees the node's full incident set (the
        // reverse orientation's edges are its mirrors)
        OrientedNode fwd{v, Strand::fwd};
        if (out.node(v).weight <= 0) continue;

        auto outs = out.out(fwd);
        auto ins = out.out(flip(fwd));  // in-edges of v+ are mirrors of out-edges of v-
        if (outs.size() < 2 || ins.size() < 2) continue;

        bool supported_out = false, supported_in = false;
        for (const auto& [to, ec] : outs) {
            if (ec > 0 && out.node(to.idx).weight > 0) supported_out = true;
        }
        for (const auto& [to, ec] : ins) {
            if (ec > 0 && out.node(to.idx).weight > 0) supported_in = true;
        }
        if (!supported_out || !supported_in) continue;

        std::vector<std::pair<OrientedNode, OrientedNode>> removable;
        for (const auto& [to, ec] : outs) {
            if (ec == 0) removable.emplace_back(fwd, to);
        }
        for (const auto& [to, ec] : ins) {
            if (ec == 0) removable.emplace_back(flip(to), fwd);
        }
        for (const auto& [from, to] : removable) {
            if (!out.has_edge(from, to)) continue;  // already dropped via a mirror
            size_t before = positive_weight_components(out);
            int64_t count = out.edge_count(from, to).value_or(0);
            out.remove_edge(from, to);
            if (positive_weight_components(out) != before) {
                out.add_edge(from, to, count);  // removal would disconnect; keep it
            }
        }
    }
    return out;
}

}  // namespace tangle
