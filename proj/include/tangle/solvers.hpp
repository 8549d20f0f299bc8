#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tangle/qubo.hpp"

namespace tangle {

struct SolverParams {
    double time_limit = 5.0;   // seconds; ignored when max_flips > 0
    uint64_t seed = 1;
    int restarts = 10;
    int tabu_tenure = 0;       // 0 picks max(10, n/10)
    uint64_t max_flips = 0;    // > 0 switches to the deterministic budget mode
    double anneal_t_start = 20.0;
    double anneal_t_end = 0.05;
    uint64_t anneal_sweeps = 0;  // 0 derives sweeps from the flip budget
};

struct TraceEntry {
    double seconds = 0.0;
    uint64_t flips = 0;
    double energy = 0.0;
};

struct SolveResult {
    BitVector best_x;
    double best_energy = 0.0;
    std::vector<TraceEntry> trace;  // best-so-far improvements, non-increasing
    int restarts_completed = 0;
    uint64_t seed = 0;
    uint64_t flips = 0;
    double seconds = 0.0;
};

std::string solve_result_to_json(const SolveResult& r);
SolveResult solve_result_from_json(const std::string& text, int n);

// Incremental single-flip evaluation: maintains local fields so a flip and
// its energy delta cost O(degree) instead of a full re-evaluation. Deltas are
// exact for integer-coefficient models.
class FlipEngine {
  public:
    explicit FlipEngine(const QuboModel& m) : model_(&m) {}

    void reset(BitVector x);
    double energy() const { return energy_; }
    double delta(int i) const { return (x_[i] ? -1.0 : 1.0) * phi_[i]; }
    void flip(int i);
    const BitVector& assignment() const { return x_; }

  private:
    const QuboModel* model_;
    BitVector x_;
    std::vector<double> phi_;  // linear_i + sum_j quad_ij * x_j
    double energy_ = 0.0;
};

// Global minimum by Gray-code enumeration with incremental deltas; n <= 26.
SolveResult solve_exhaustive_bits(const QuboModel& m);

// Every global minimiser (up to max_count); same enumeration order.
std::vector<BitVector> enumerate_optima(const QuboModel& m, size_t max_count = 4096);

// Multistart 1-flip tabu search: steepest admissible flip, tenure with
// aspiration, uniform random restarts. Deterministic given (model, params,
// seed) in budget mode.
SolveResult solve_tabu(const QuboModel& m, const SolverParams& p);

// Metropolis single-flip simulated annealing with a geometric temperature
// schedule, restarts sharing the budget.
SolveResult solve_anneal(const QuboModel& m, const SolverParams& p);

struct WalkSolveResult {
    Walk walk;        // best walk (first of the pair for diploid)
    Walk second;      // diploid only
    double cost = 0.0;
    uint64_t expanded = 0;
};

// Globally optimal walk (or pair) for the cost function of the given kind,
// by depth-first enumeration of walks up to length T with a
// monotone-deviation lower bound. Refuses after max_expansions node
// expansions.
WalkSolveResult solve_exhaustive_walks(const AnnotatedGraph& g, ProblemKind kind, int T,
                                       uint64_t max_expansions = 100000000ull);

}  // namespace tangle
