#include "tangle/assembly.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tangle {

const char* decode_violation_name(DecodeViolation v) {
    switch (v) {
        case DecodeViolation::empty_time: return "empty-time";
        case DecodeViolation::multi_set: return "multi-set";
        case DecodeViolation::non_edge: return "non-edge";
        case DecodeViolation::end_escape: return "end-escape";
    }
    return "?";
}

Walk DecodeReport::flattened(size_t path) const {
    Walk out;
    for (const auto& seg : path_segments[path]) {
        out.insert(out.end(), seg.begin(), seg.end());
    }
    return out;
}

namespace {

std::string describe(const DecodeViolationRecord& rec) {
    return std::string(decode_violation_name(rec.kind)) + " violation at path " +
           std::to_string(rec.path) + ", time " + std::to_string(rec.t);
}

}  // namespace

DecodeReport decode_assignment(const AnnotatedGraph& g, const VariableLayout& layout,
                               const BitVector& x, DecodeMode mode) {
    if (static_cast<int>(x.size()) != layout.variable_count()) {
        throw std::invalid_argument("assignment length does not match layout");
    }
    if (layout.node_ids.size() != g.node_count()) {
        throw std::invalid_argument("layout node list does not match graph");
    }
    for (size_t i = 0; i < layout.node_ids.size(); ++i) {
        if (g.node(static_cast<NodeIdx>(i)).id != layout.node_ids[i]) {
            throw std::invalid_argument("layout node order does not match graph");
        }
    }

    DecodeReport report;
    report.mode = mode;
    report.path_segments.assign(layout.num_paths, {});

    auto fail_or_record = [&](DecodeViolationRecord rec) {
        if (mode == DecodeMode::strict) throw DecodeError(rec, describe(rec));
        report.violations.push_back(rec);
    };

    // running visit counts, shared across paths (the count term couples them)
    std::vector<int64_t> counts(g.node_count(), 0);
    const int S = layout.slots_per_time();

    for (int path = 0; path < layout.num_paths; ++path) {
        auto& segments = report.path_segments[path];
        Walk current;
        bool after_end = false;
        auto close_segment = [&]() {
            if (!current.empty()) segments.push_back(std::move(current));
            current.clear();
        };

        for (int t = 1; t <= layout.horizon; ++t) {
            std::vector<int> set_slots;
            for (int s = 0; s < S; ++s) {
                if (x[layout.index_of(path, t, s)]) set_slots.push_back(s);
            }
            if (set_slots.empty()) {
                fail_or_record({path, t, DecodeViolation::empty_time});
                continue;  // repair: skip the time step
            }
            int slot;
            if (set_slots.size() > 1) {
                fail_or_record({path, t, DecodeViolation::multi_set});
                // keep the slot that least increases the count deviation;
                // the end slot costs nothing, node slots cost 2(c - w) + 1
                slot = set_slots[0];
                double best_delta = std::numeric_limits<double>::infinity();
                for (int s : set_slots) {
                    double delta = 0.0;
                    if (s != layout.end_slot()) {
                        OrientedNode node = layout.node_of_slot(s);
                        double dev = static_cast<double>(counts[node.idx]) -
                                     static_cast<double>(rounded_weight(g.node(node.idx).weight));
                        delta = 2.0 * dev + 1.0;
                    }
                    bool better = delta < best_delta;
                    if (!better && delta == best_delta && s != layout.end_slot() &&
                        slot != layout.end_slot()) {
                        better = g.node(layout.node_of_slot(s).idx).id <
                                 g.node(layout.node_of_slot(slot).idx).id;
                    }
                    if (better) {
                        best_delta = delta;
                        slot = s;
                    }
                }
            } else {
                slot = set_slots[0];
            }

            if (slot == layout.end_slot()) {
                close_segment();
                after_end = true;
                continue;
            }
            if (after_end) {
                fail_or_record({path, t, DecodeViolation::end_escape});
                after_end = false;  // repair: the visit opens a new segment
            }
            OrientedNode node = layout.node_of_slot(slot);
            Step step{g.node(node.idx).id, node.strand};
            if (!current.empty()) {
                const Step& prev = current.back();
                NodeIdx prev_idx = g.require_node(prev.node);
                bool edge_ok = layout.kind == ProblemKind::tangle
                                   ? g.has_node_edge(prev_idx, node.idx)
                                   : g.has_edge({prev_idx, prev.strand}, {node.idx, node.strand});
                if (!edge_ok) {
                    fail_or_record({path, t, DecodeViolation::non_edge});
                    close_segment();  // repair: split into a new segment
                }
            }
            current.push_back(step);
            counts[node.idx] += 1;
        }
        close_segment();
    }
    return report;
}

std::string extract_sequence(const AnnotatedGraph& g, const Walk& w) {
    std::string out;
    for (const auto& step : w) {
        const NodeRecord& node = g.node(g.require_node(step.node));
        if (node.sequence.empty() || node.sequence == "*") {
            throw std::invalid_argument("node '" + step.node + "' has no sequence");
        }
        if (step.strand == Strand::fwd) {
            out += node.sequence;
        } else {
            out += reverse_complement(node.sequence);
        }
    }
    return out;
}

}  // namespace tangle
