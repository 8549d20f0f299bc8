#include "tangle/kmer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tangle {

namespace {

std::pair<uint32_t, uint32_t> canonical_edge_key(OrientedNode from, OrientedNode to) {
    auto key = std::make_pair(oriented_code(from), oriented_code(to));
    auto mirror = std::make_pair(oriented_code(flip(to)), oriented_code(flip(from)));
    return std::min(key, mirror);
}

}  // namespace

std::string canonical_kmer(std::string_view kmer) {
    std::string rc = reverse_complement(kmer);
    std::string fwd(kmer);
    return std::min(fwd, rc);
}

const std::vector<KmerIndex::Entry>* KmerIndex::lookup(const std::string& canonical) const {
    auto it = table_.find(canonical);
    if (it == table_.end()) return nullptr;
    return &it->second;
}

bool KmerIndex::is_unique(const std::string& canonical) const {
    auto* entries = lookup(canonical);
    return entries && entries->size() == 1;
}

KmerIndex build_kmer_index(const AnnotatedGraph& g, int k,
                           const std::map<std::string, std::vector<std::string>>* variants) {
    if (k < 2) throw std::invalid_argument("kmer size must be >= 2");
    KmerIndex idx;
    idx.k_ = k;
    idx.expected_unique_.assign(g.node_count(), 0);

    auto index_sequence = [&](NodeIdx node, const std::string& seq) {
        for (int64_t p = 0; p + k <= static_cast<int64_t>(seq.size()); ++p) {
            std::string_view kmer(seq.data() + p, static_cast<size_t>(k));
            std::string canon = canonical_kmer(kmer);
            Strand strand = canon == kmer ? Strand::fwd : Strand::rev;
            auto& entries = idx.table_[canon];
            bool seen = false;
            for (const auto& e : entries) {
                if (e.node == node) {
                    seen = true;
                    break;
                }
            }
            if (!seen) entries.push_back({node, static_cast<int32_t>(p), strand});
        }
    };

    bool any = false;
    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        const auto& seq = g.node(v).sequence;
        if (static_cast<int64_t>(seq.size()) >= k) any = true;
        index_sequence(v, seq);
        if (variants) {
            auto it = variants->find(g.node(v).id);
            if (it != variants->end()) {
                for (const auto& var : it->second) {
                    if (static_cast<int64_t>(var.size()) >= k) any = true;
                    index_sequence(v, normalize_dna(var));
                }
            }
        }
    }
    if (!any) {
        throw std::invalid_argument("kmer size " + std::to_string(k) +
                                    " exceeds every indexed sequence; index would be empty");
    }

    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        const auto& seq = g.node(v).sequence;
        int64_t count = 0;
        for (int64_t p = 0; p + k <= static_cast<int64_t>(seq.size()); ++p) {
            std::string canon = canonical_kmer(std::string_view(seq.data() + p, static_cast<size_t>(k)));
            auto* entries = idx.lookup(canon);
            if (entries && entries->size() == 1 && (*entries)[0].node == v) ++count;
        }
        idx.expected_unique_[v] = count;
    }
    return idx;
}

std::map<std::string, std::vector<std::string>> read_nodeseq_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open nodeseq file: " + path);
    std::map<std::string, std::vector<std::string>> variants;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw std::runtime_error("nodeseq line " + std::to_string(line_no) +
                                     ": expected 'node<TAB>sequence'");
        }
        variants[line.substr(0, tab)].push_back(line.substr(tab + 1));
    }
    return variants;
}

int64_t NodeHits::total_hits(const std::string& node_id) const {
    int64_t total = 0;
    auto u = unique_hits.find(node_id);
    if (u != unique_hits.end()) total += u->second;
    auto r = rescued_hits.find(node_id);
    if (r != rescued_hits.end()) total += r->second;
    return total;
}

namespace {

struct ResolvedKmer {
    bool resolved = false;
    OrientedNode node;
};

// A maximal same-(node, orientation) run of resolved kmer positions.
struct VisitRun {
    OrientedNode node;
    int64_t first;  // kmer position of the first resolved kmer
    int64_t last;
};

// Simple paths from one oriented node to another whose interior node lengths
// explain an observed kmer gap: gap == sum of interior lengths + (k - 1).
struct PathProbe {
    const AnnotatedGraph& g;
    int64_t target_gap;
    int k;
    OrientedNode goal;
    int max_edges = 8;

    int matches = 0;
    std::vector<OrientedNode> interior;
    std::vector<OrientedNode> found_interior;

    void search(OrientedNode at, int64_t interior_len, int edges) {
        if (edges == max_edges) return;
        if (interior_len + k - 1 > target_gap) return;
        for (const auto& [next, ec] : g.out(at)) {
            if (next == goal && interior_len + static_cast<int64_t>(k) - 1 == target_gap) {
                if (++matches == 1) found_interior = interior;
            }
            // also continue with `next` as an interior visit, covering longer
            // candidate paths that pass through the goal node
            interior.push_back(next);
            search(next, interior_len + g.node(next.idx).length(), edges + 1);
            interior.pop_back();
        }
    }
};

}  // namespace

NodeHits annotate_reads(const std::vector<FastaRecord>& reads, const KmerIndex& idx,
                        const AnnotatedGraph& g) {
    const int k = idx.k();
    NodeHits hits;
    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        hits.expected_unique[g.node(v).id] = idx.expected_unique(v);
    }

    auto credit_unique = [&](NodeIdx node, int64_t count) {
        hits.unique_hits[g.node(node).id] += count;
    };
    auto credit_rescued = [&](NodeIdx node, int64_t count) {
        hits.rescued_hits[g.node(node).id] += count;
    };
    auto credit_transition = [&](OrientedNode from, OrientedNode to) {
        hits.transitions[canonical_edge_key(from, to)] += 1;
    };

    for (const auto& read : reads) {
        const std::string& seq = read.seq;
        const int64_t m = static_cast<int64_t>(seq.size()) - k + 1;
        if (m <= 0) continue;

        std::vector<ResolvedKmer> res(m);
        for (int64_t p = 0; p < m; ++p) {
            std::string_view kmer(seq.data() + p, static_cast<size_t>(k));
            std::string canon = canonical_kmer(kmer);
            auto* entries = idx.lookup(canon);
            if (!entries || entries->size() != 1) continue;
            const auto& e = (*entries)[0];
            Strand read_strand = canon == kmer ? Strand::fwd : Strand::rev;
            // read visits the node forward when it agrees with the canonical
            // form the same way the node does
            Strand visit = read_strand == e.strand ? Strand::fwd : Strand::rev;
            res[p] = {true, {e.node, visit}};
        }

        // collapse into visit runs
        std::vector<VisitRun> runs;
        for (int64_t p = 0; p < m; ++p) {
            if (!res[p].resolved) continue;
            if (!runs.empty() && runs.back().node == res[p].node && runs.back().last == p - 1) {
                runs.back().last = p;
            } else {
                runs.push_back({res[p].node, p, p});
            }
        }
        if (runs.empty()) continue;

        for (const auto& run : runs) {
            credit_unique(run.node.idx, run.last - run.first + 1);
        }

        // read-end rescues
        if (runs.front().first > 0) credit_rescued(runs.front().node.idx, runs.front().first);
        if (runs.back().last < m - 1) credit_rescued(runs.back().node.idx, m - 1 - runs.back().last);

        // interior gaps
        for (size_t r = 0; r + 1 < runs.size(); ++r) {
            const VisitRun& a = runs[r];
            const VisitRun& b = runs[r + 1];
            int64_t gap = b.first - a.last - 1;
            if (a.node == b.node) {
                // same node and orientation: internal non-unique stretch
                credit_rescued(a.node.idx, gap);
                continue;
            }
            if (gap == 0) {
                // overlapping nodes; only counted when the edge exists
                if (g.has_edge(a.node, b.node)) credit_transition(a.node, b.node);
                continue;
            }
            PathProbe probe{g, gap, k, b.node};
            probe.search(a.node, 0, 0);
            if (probe.matches != 1) continue;  // ambiguous or unexplained: drop
            OrientedNode prev = a.node;
            for (const auto& mid : probe.found_interior) {
                credit_transition(prev, mid);
                credit_rescued(mid.idx, g.node(mid.idx).length() - k + 1);
                prev = mid;
            }
            credit_transition(prev, b.node);
        }
    }
    return hits;
}

NodeHits merge_hits_max(const std::vector<NodeHits>& runs) {
    NodeHits merged;
    for (const auto& run : runs) {
        for (const auto& [id, v] : run.unique_hits) {
            merged.unique_hits[id] = std::max(merged.unique_hits[id], v);
        }
        for (const auto& [id, v] : run.rescued_hits) {
            merged.rescued_hits[id] = std::max(merged.rescued_hits[id], v);
        }
        for (const auto& [key, v] : run.transitions) {
            merged.transitions[key] = std::max(merged.transitions[key], v);
        }
        for (const auto& [id, v] : run.expected_unique) {
            merged.expected_unique[id] = std::max(merged.expected_unique[id], v);
        }
    }
    return merged;
}

AnnotatedGraph apply_annotation(const AnnotatedGraph& g, const NodeHits& hits) {
    AnnotatedGraph out = g;
    for (const auto& [id, _] : hits.unique_hits) out.require_node(id);
    for (const auto& [id, _] : hits.rescued_hits) out.require_node(id);
    for (NodeIdx v = 0; v < out.node_count(); ++v) {
        const std::string& id = out.node(v).id;
        out.set_kmer_count(v, hits.total_hits(id));
        auto eu = hits.expected_unique.find(id);
        if (eu != hits.expected_unique.end()) out.set_expected_unique(v, eu->second);
    }
    // reset edge counts, then write the observed transitions
    for (const auto& e : out.edges()) out.set_edge_count(e.from, e.to, 0);
    for (const auto& [key, count] : hits.transitions) {
        OrientedNode from = oriented_from_code(key.first);
        OrientedNode to = oriented_from_code(key.second);
        if (from.idx >= out.node_count() || to.idx >= out.node_count() ||
            !out.has_edge(from, to)) {
            throw std::invalid_argument(
                "transition on absent edge " +
                (from.idx < out.node_count() ? out.node(from.idx).id : "?") +
                strand_char(from.strand) + " -> " +
                (to.idx < out.node_count() ? out.node(to.idx).id : "?") +
                strand_char(to.strand));
        }
        out.set_edge_count(from, to, count);
    }
    return out;
}

}  // namespace tangle
