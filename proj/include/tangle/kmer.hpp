#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tangle/fasta.hpp"
#include "tangle/graph.hpp"

namespace tangle {

// Index over canonical kmers (lexicographic min of a kmer and its reverse
// complement) of all node sequences and optional per-node variant sequences.
// A kmer is unique when it occurs in exactly one node.
class KmerIndex {
  public:
    struct Entry {
        NodeIdx node;
        int32_t offset;  // first occurrence within the node's indexed sequences
        Strand strand;   // canonical form vs the node's forward sequence
    };

    int k() const { return k_; }
    const std::vector<Entry>* lookup(const std::string& canonical) const;
    bool is_unique(const std::string& canonical) const;
    // Unique kmer positions in the node's primary sequence.
    int64_t expected_unique(NodeIdx node) const { return expected_unique_[node]; }
    const std::vector<int64_t>& expected_unique_per_node() const { return expected_unique_; }
    size_t distinct_kmers() const { return table_.size(); }

  private:
    friend KmerIndex build_kmer_index(const AnnotatedGraph&, int,
                                      const std::map<std::string, std::vector<std::string>>*);
    int k_ = 0;
    std::unordered_map<std::string, std::vector<Entry>> table_;
    std::vector<int64_t> expected_unique_;
};

std::string canonical_kmer(std::string_view kmer);

// Indexes every kmer of every node sequence (plus variants, which map to the
// owning node). Throws when k exceeds the longest indexed sequence.
KmerIndex build_kmer_index(
    const AnnotatedGraph& g, int k,
    const std::map<std::string, std::vector<std::string>>* node_seq_variants = nullptr);

// Tab-separated "node_id<TAB>variant_sequence" lines.
std::map<std::string, std::vector<std::string>> read_nodeseq_file(const std::string& path);

struct NodeHits {
    std::map<std::string, int64_t> unique_hits;
    std::map<std::string, int64_t> rescued_hits;
    // keyed on the canonical representative of the edge pair
    std::map<std::pair<uint32_t, uint32_t>, int64_t> transitions;
    std::map<std::string, int64_t> expected_unique;

    int64_t total_hits(const std::string& node_id) const;
};

// Maps every read kmer against the index. Unique hits credit their node;
// non-unique or unmatched runs are rescued when both flanks resolve to the
// same oriented node (read-end runs need one flank), or when exactly one
// graph path joins the flanking nodes with interior lengths matching the run
// length. Edge transitions are recorded along resolved node changes.
// Unexplainable kmers are dropped.
NodeHits annotate_reads(const std::vector<FastaRecord>& reads, const KmerIndex& idx,
                        const AnnotatedGraph& g);

// Optional multi-k combination: per-node and per-edge maximum over runs.
NodeHits merge_hits_max(const std::vector<NodeHits>& runs);

// KC(v) = unique + rescued hits, EC = transition counts. Throws on hits that
// reference unknown nodes or absent edges.
AnnotatedGraph apply_annotation(const AnnotatedGraph& g, const NodeHits& hits);

}  // namespace tangle
