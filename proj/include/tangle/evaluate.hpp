#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tangle/dna.hpp"

namespace tangle {

enum class AlnOp : uint8_t { match, mismatch, ins, del };  // ins: extra base in candidate

struct AlignmentSegment {
    int64_t truth_start = 0, truth_end = 0;  // [ts, te)
    int64_t cand_start = 0, cand_end = 0;    // [cs, ce) in contig forward coordinates
    Strand strand = Strand::fwd;
    int64_t matches = 0, mismatches = 0, insertions = 0, deletions = 0;
    std::vector<AlnOp> ops;  // per-column ops for window scans
    int64_t score = 0;
    int contig = 0;

    int64_t aligned_columns() const { return static_cast<int64_t>(ops.size()); }
};

struct AlignParams {
    int seed_k = 31;
    int match = 1;
    int mismatch = -2;
    int gap_open = -4;    // charged on the first gap base, on top of gap_extend
    int gap_extend = -1;
    int band = 64;        // max diagonal drift between chained anchors
    int64_t max_link_gap = 1000;  // max unanchored stretch bridged inside a segment
    int64_t max_extension = 1000; // how far ends are extended past the outer anchors
    int64_t min_aligned = 50;     // minimum aligned columns for a reported segment
};

// Seed-chain-extend alignment of a candidate sequence against the truth:
// canonical kmers unique in the truth anchor co-linear chains per strand,
// chains are filled and extended with banded affine-gap alignment, and
// overlapping candidate intervals are resolved greedily by score.
std::vector<AlignmentSegment> align(const std::string& truth, const std::string& candidate,
                                    const AlignParams& params = {});

struct EvalReport {
    double pct_covered = 0.0;
    double pct_used = 0.0;
    int64_t contigs = 0;
    int64_t breaks = 0;
    int64_t indels_ge10 = 0;
    int64_t diff_regions = 0;
    double pct_identity = 0.0;
};

std::string eval_report_to_json(const EvalReport& r);
// Tab-separated row: Covered Used Contigs Breaks Indel Diff Identity
std::string eval_report_to_tsv(const EvalReport& r, bool header = false);

// Metrics over segments already produced by align() on each contig
// (segment.contig must index into contig_lengths).
EvalReport evaluate_segments(int64_t truth_len, const std::vector<int64_t>& contig_lengths,
                             const std::vector<AlignmentSegment>& segments);

// Aligns every contig against the truth and computes the report.
EvalReport evaluate(const std::string& truth, const std::vector<std::string>& contigs,
                    const AlignParams& params = {});

}  // namespace tangle
