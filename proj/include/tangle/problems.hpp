#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tangle/graph.hpp"

namespace tangle {

// A walk is an ordered list of oriented visits; consecutive visits must
// traverse a graph edge.
using Walk = std::vector<Step>;

struct WalkPair {
    Walk first;
    Walk second;
};

enum class ProblemKind { tangle, oriented, diploid };

const char* problem_kind_name(ProblemKind kind);
std::optional<ProblemKind> problem_kind_from_name(const std::string& name);

struct WalkViolation {
    size_t index = 0;  // position of the offending visit
    std::string message;
};

// Checks edge validity of every consecutive pair. The tangle kind ignores
// orientation (edge lookup on the orientation-collapsed graph); oriented and
// diploid kinds require the oriented edge itself. The empty walk is valid.
// Throws on unknown node ids.
std::optional<WalkViolation> find_walk_violation(const AnnotatedGraph& g, const Walk& w,
                                                 ProblemKind kind = ProblemKind::oriented);
bool is_valid_walk(const AnnotatedGraph& g, const Walk& w,
                   ProblemKind kind = ProblemKind::oriented);

// Visits per node, summed over both orientations.
std::vector<int64_t> visit_counts(const AnnotatedGraph& g, const Walk& w);

// sum_v (#W(v) - w(v))^2, orientation ignored.
double cost_tangle(const AnnotatedGraph& g, const Walk& w);

// sum_v (#W(v+) + #W(v-) - w(v))^2 on the oriented graph.
double cost_oriented(const AnnotatedGraph& g, const Walk& w);

// sum_v (sum_i #Wi(v+) + #Wi(v-) - w(v))^2 for a pair of walks.
double cost_diploid(const AnnotatedGraph& g, const WalkPair& p);

// sum_v log(L(v)) * (#W(v) - w(v))^2; requires every L(v) >= 2.
double cost_length_weighted(const AnnotatedGraph& g, const Walk& w);

// Dispatch helper: cost of one walk (tangle/oriented) or a pair (diploid).
double walk_cost(const AnnotatedGraph& g, ProblemKind kind, const Walk& w1,
                 const Walk& w2 = {});

}  // namespace tangle
