#pragma once

#include <string>
#include <vector>

#include "tangle/qubo.hpp"

namespace tangle {

enum class DecodeMode { strict, repair };

enum class DecodeViolation { empty_time, multi_set, non_edge, end_escape };

const char* decode_violation_name(DecodeViolation v);

struct DecodeViolationRecord {
    int path = 0;
    int t = 0;  // 1-based time step
    DecodeViolation kind = DecodeViolation::empty_time;
};

struct DecodeReport {
    DecodeMode mode = DecodeMode::strict;
    // Valid walk segments per path (one path, or two for diploid layouts).
    std::vector<std::vector<Walk>> path_segments;
    std::vector<DecodeViolationRecord> violations;

    size_t total_segments() const {
        size_t n = 0;
        for (const auto& segs : path_segments) n += segs.size();
        return n;
    }
    // Concatenation of a path's segments, for reporting.
    Walk flattened(size_t path) const;
};

class DecodeError : public std::runtime_error {
  public:
    DecodeError(DecodeViolationRecord rec, const std::string& what)
        : std::runtime_error(what), record(rec) {}
    DecodeViolationRecord record;
};

// Inverts encode_walk. Strict mode throws DecodeError on the first
// violation. Repair mode skips empty times, resolves multi-set times by the
// slot that least increases the count deviation (ties to the lowest slot),
// closes a segment at end slots, and splits at non-edge transitions; every
// emitted segment is a valid walk.
DecodeReport decode_assignment(const AnnotatedGraph& g, const VariableLayout& layout,
                               const BitVector& x, DecodeMode mode);

// Concatenates node sequences along the walk, reverse-complementing reverse
// visits. Requires a valid walk and sequences on every visited node.
std::string extract_sequence(const AnnotatedGraph& g, const Walk& w);

}  // namespace tangle
