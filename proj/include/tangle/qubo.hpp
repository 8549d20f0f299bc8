#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "tangle/problems.hpp"

namespace tangle {

using BitVector = std::vector<uint8_t>;

std::string pack_bits_hex(const BitVector& x);
BitVector unpack_bits_hex(const std::string& hex, size_t n);

// Maps (path, time, slot) triples to flat variable indices. Times are
// 1-based; slots enumerate the graph nodes (one slot per node for the tangle
// kind, one per orientation otherwise) followed by the virtual end slot.
struct VariableLayout {
    ProblemKind kind = ProblemKind::tangle;
    int horizon = 0;  // T
    double alpha = 1.2;
    int num_paths = 1;
    std::vector<std::string> node_ids;

    int node_count() const { return static_cast<int>(node_ids.size()); }
    int slots_per_time() const {
        return (kind == ProblemKind::tangle ? node_count() : 2 * node_count()) + 1;
    }
    int end_slot() const { return slots_per_time() - 1; }
    int variable_count() const { return num_paths * horizon * slots_per_time(); }

    int slot_of(NodeIdx idx, Strand strand) const {
        if (kind == ProblemKind::tangle) return static_cast<int>(idx);
        return static_cast<int>(idx) * 2 + static_cast<int>(strand);
    }
    OrientedNode node_of_slot(int slot) const {
        if (kind == ProblemKind::tangle) return {static_cast<NodeIdx>(slot), Strand::fwd};
        return {static_cast<NodeIdx>(slot / 2), static_cast<Strand>(slot % 2)};
    }

    int index_of(int path, int t, int slot) const {
        return (path * horizon + (t - 1)) * slots_per_time() + slot;
    }
    struct VarRef {
        int path;
        int t;  // 1-based
        int slot;
    };
    VarRef var_at(int index) const {
        int s = slots_per_time();
        return {index / (horizon * s), (index / s) % horizon + 1, index % s};
    }
};

std::string layout_to_json(const VariableLayout& layout);
VariableLayout layout_from_json(const std::string& text);

// Sparse symmetric quadratic form over binary variables plus constant
// offset. Coefficients are exact integers for integer penalty weights, so
// energies of integer models evaluate exactly in double arithmetic.
class QuboModel {
  public:
    QuboModel() = default;
    QuboModel(int n, double offset, double lambda1, double lambda2, VariableLayout layout)
        : n_(n), offset_(offset), lambda1_(lambda1), lambda2_(lambda2),
          layout_(std::move(layout)), linear_(n, 0.0) {}

    void add_offset(double c) { offset_ += c; }
    void add_linear(int i, double c) { linear_[i] += c; }
    void add_quadratic(int i, int j, double c);
    // Builds adjacency; call once after all terms are added.
    void finalize();

    int n() const { return n_; }
    double offset() const { return offset_; }
    double lambda1() const { return lambda1_; }
    double lambda2() const { return lambda2_; }
    const VariableLayout& layout() const { return layout_; }

    const std::vector<double>& linear() const { return linear_; }
    // Unique pairs with i < j, sorted.
    const std::vector<std::tuple<int, int, double>>& quadratic() const { return quad_; }
    // Both directions: neighbors(i) lists (j, coeff) for every pair containing i.
    const std::vector<std::pair<int, double>>& neighbors(int i) const { return adj_[i]; }

    double energy(const BitVector& x) const;

  private:
    int n_ = 0;
    double offset_ = 0.0;
    double lambda1_ = 0.0;
    double lambda2_ = 0.0;
    VariableLayout layout_;
    std::vector<double> linear_;
    std::unordered_map<uint64_t, double> quad_acc_;
    std::vector<std::tuple<int, int, double>> quad_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Horizon T = ceil(alpha * sum of rounded weights), floored at 2. Weights are
// rounded to nearest integer (ties to even) first.
int qubo_horizon(const AnnotatedGraph& g, double alpha);
int64_t rounded_weight(double w);

// Encodes the walk-fit problem as penalty terms C1 (one slot per time), C2
// (non-edge and end-escape transitions) and C3 (visit counts vs weights).
// The offset is chosen so a perfect encoding has energy exactly 0.
QuboModel build_qubo(const AnnotatedGraph& g, ProblemKind kind, double alpha = 1.2,
                     double lambda1 = 10.0, double lambda2 = 5.0);
QuboModel build_tangle_qubo(const AnnotatedGraph& g, double alpha = 1.2,
                            double lambda1 = 10.0, double lambda2 = 5.0);
QuboModel build_oriented_qubo(const AnnotatedGraph& g, double alpha = 1.2,
                              double lambda1 = 10.0, double lambda2 = 5.0);
QuboModel build_diploid_qubo(const AnnotatedGraph& g, double alpha = 1.2,
                             double lambda1 = 10.0, double lambda2 = 5.0);

// Sets the visit bit for each step in order and the end slot for every
// remaining time. Throws if the walk is longer than the horizon or mentions
// nodes outside the layout.
BitVector encode_walk(const VariableLayout& layout, const Walk& w);
BitVector encode_walk_pair(const VariableLayout& layout, const WalkPair& p);

// Sparse text format: "n offset lambda1 lambda2 kind T" header, then one
// "i j coeff" line per term (i == j for linear terms).
void write_qubo_model(std::ostream& out, const QuboModel& m);
void write_qubo_model_file(const std::string& path, const QuboModel& m);
QuboModel read_qubo_model(std::istream& in);
QuboModel read_qubo_model_file(const std::string& path);

}  // namespace tangle
