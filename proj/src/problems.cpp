#include "tangle/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace tangle {

const char* problem_kind_name(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::tangle: return "tangle";
        case ProblemKind::oriented: return "oriented";
        case ProblemKind::diploid: return "diploid";
    }
    return "?";
}

std::optional<ProblemKind> problem_kind_from_name(const std::string& name) {
    if (name == "tangle") return ProblemKind::tangle;
    if (name == "oriented") return ProblemKind::oriented;
    if (name == "diploid") return ProblemKind::diploid;
    return std::nullopt;
}

std::optional<WalkViolation> find_walk_violation(const AnnotatedGraph& g, const Walk& w,
                                                 ProblemKind kind) {
    for (size_t i = 0; i < w.size(); ++i) {
        NodeIdx cur = g.require_node(w[i].node);
        if (i == 0) continue;
        NodeIdx prev = g.require_node(w[i - 1].node);
        bool ok;
        if (kind == ProblemKind::tangle) {
            ok = g.has_node_edge(prev, cur);
        } else {
            ok = g.has_edge({prev, w[i - 1].strand}, {cur, w[i].strand});
        }
        if (!ok) {
            return WalkViolation{i, "no edge " + w[i - 1].node + strand_char(w[i - 1].strand) +
                                        " -> " + w[i].node + strand_char(w[i].strand)};
        }
    }
    return std::nullopt;
}

bool is_valid_walk(const AnnotatedGraph& g, const Walk& w, ProblemKind kind) {
    return !find_walk_violation(g, w, kind).has_value();
}

std::vector<int64_t> visit_counts(const AnnotatedGraph& g, const Walk& w) {
    std::vector<int64_t> counts(g.node_count(), 0);
    for (const auto& step : w) counts[g.require_node(step.node)] += 1;
    return counts;
}

namespace {

void require_valid(const AnnotatedGraph& g, const Walk& w, ProblemKind kind, const char* label) {
    if (auto v = find_walk_violation(g, w, kind)) {
        throw std::invalid_argument(std::string("invalid ") + label + " at index " +
                                    std::to_string(v->index) + ": " + v->message);
    }
}

double squared_deviation(const AnnotatedGraph& g, const std::vector<int64_t>& counts) {
    double cost = 0.0;
    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        double d = static_cast<double>(counts[v]) - g.node(v).weight;
        cost += d * d;
    }
    return cost;
}

}  // namespace

double cost_tangle(const AnnotatedGraph& g, const Walk& w) {
    require_valid(g, w, ProblemKind::tangle, "walk");
    return squared_deviation(g, visit_counts(g, w));
}

double cost_oriented(const AnnotatedGraph& g, const Walk& w) {
    require_valid(g, w, ProblemKind::oriented, "walk");
    return squared_deviation(g, visit_counts(g, w));
}

double cost_diploid(const AnnotatedGraph& g, const WalkPair& p) {
    require_valid(g, p.first, ProblemKind::oriented, "first walk");
    require_valid(g, p.second, ProblemKind::oriented, "second walk");
    auto counts = visit_counts(g, p.first);
    auto counts2 = visit_counts(g, p.second);
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += counts2[i];
    return squared_deviation(g, counts);
}

double cost_length_weighted(const AnnotatedGraph& g, const Walk& w) {
    for (const auto& n : g.nodes()) {
        if (n.length() < 2) {
            throw std::invalid_argument("node '" + n.id + "' shorter than 2 bases");
        }
    }
    require_valid(g, w, ProblemKind::tangle, "walk");
    auto counts = visit_counts(g, w);
    double cost = 0.0;
    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        double d = static_cast<double>(counts[v]) - g.node(v).weight;
        cost += std::log(static_cast<double>(g.node(v).length())) * d * d;
    }
    return cost;
}

double walk_cost(const AnnotatedGraph& g, ProblemKind kind, const Walk& w1, const Walk& w2) {
    switch (kind) {
        case ProblemKind::tangle: return cost_tangle(g, w1);
        case ProblemKind::oriented: return cost_oriented(g, w1);
        case ProblemKind::diploid: return cost_diploid(g, {w1, w2});
    }
    throw std::logic_error("unreachable");
}

}  // namespace tangle
