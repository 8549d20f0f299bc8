#include "tangle/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "tangle/rng.hpp"

namespace tangle {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

BitVector random_assignment(int n, Rng& rng) {
    BitVector x(n);
    for (int i = 0; i < n; ++i) x[i] = static_cast<uint8_t>(rng.next() & 1u);
    return x;
}

}  // namespace

std::string solve_result_to_json(const SolveResult& r) {
    nlohmann::json j;
    j["n"] = r.best_x.size();
    j["best_energy"] = r.best_energy;
    j["assignment_hex"] = pack_bits_hex(r.best_x);
    j["restarts_completed"] = r.restarts_completed;
    j["seed"] = r.seed;
    j["flips"] = r.flips;
    j["seconds"] = r.seconds;
    auto trace = nlohmann::json::array();
    for (const auto& t : r.trace) trace.push_back({t.seconds, t.flips, t.energy});
    j["trace"] = trace;
    return j.dump(2) + "\n";
}

SolveResult solve_result_from_json(const std::string& text, int n) {
    nlohmann::json j = nlohmann::json::parse(text);
    SolveResult r;
    size_t stored_n = j.at("n").get<size_t>();
    if (n >= 0 && stored_n != static_cast<size_t>(n)) {
        throw std::runtime_error("result has " + std::to_string(stored_n) +
                                 " variables, expected " + std::to_string(n));
    }
    r.best_x = unpack_bits_hex(j.at("assignment_hex").get<std::string>(), stored_n);
    r.best_energy = j.at("best_energy").get<double>();
    r.restarts_completed = j.value("restarts_completed", 0);
    r.seed = j.value("seed", 0ull);
    r.flips = j.value("flips", 0ull);
    r.seconds = j.value("seconds", 0.0);
    if (j.contains("trace")) {
        for (const auto& t : j["trace"]) {
            r.trace.push_back({t.at(0).get<double>(), t.at(1).get<uint64_t>(), t.at(2).get<double>()});
        }
    }
    return r;
}

void FlipEngine::reset(BitVector x) {
    x_ = std::move(x);
    const auto& m = *model_;
    phi_.assign(m.n(), 0.0);
    for (int i = 0; i < m.n(); ++i) phi_[i] = m.linear()[i];
    energy_ = m.offset();
    for (int i = 0; i < m.n(); ++i) {
        if (x_[i]) energy_ += m.linear()[i];
    }
    for (const auto& [i, j, c] : m.quadratic()) {
        if (x_[j]) phi_[i] += c;
        if (x_[i]) phi_[j] += c;
        if (x_[i] && x_[j]) energy_ += c;
    }
}

void FlipEngine::flip(int i) {
    energy_ += delta(i);
    x_[i] ^= 1;
    double sign = x_[i] ? 1.0 : -1.0;
    for (const auto& [j, c] : model_->neighbors(i)) phi_[j] += sign * c;
}

SolveResult solve_exhaustive_bits(const QuboModel& m) {
    if (m.n() > 26) {
        throw std::invalid_argument("exhaustive enumeration capped at 26 variables, got " +
                                    std::to_string(m.n()));
    }
    auto start = std::chrono::steady_clock::now();
    SolveResult result;
    result.seed = 0;
    FlipEngine engine(m);
    engine.reset(BitVector(m.n(), 0));
    result.best_x = engine.assignment();
    result.best_energy = engine.energy();
    result.trace.push_back({0.0, 0, result.best_energy});
    const uint64_t total = m.n() == 0 ? 1 : (1ull << m.n());
    for (uint64_t k = 1; k < total; ++k) {
        engine.flip(std::countr_zero(k));
        if (engine.energy() < result.best_energy) {
            result.best_energy = engine.energy();
            result.best_x = engine.assignment();
            result.trace.push_back({seconds_since(start), k, result.best_energy});
        }
    }
    result.flips = total - 1;
    result.restarts_completed = 1;
    result.seconds = seconds_since(start);
    return result;
}

std::vector<BitVector> enumerate_optima(const QuboModel& m, size_t max_count) {
    if (m.n() > 26) {
        throw std::invalid_argument("exhaustive enumeration capped at 26 variables");
    }
    FlipEngine engine(m);
    engine.reset(BitVector(m.n(), 0));
    double best = engine.energy();
    std::vector<BitVector> optima{engine.assignment()};
    const uint64_t total = m.n() == 0 ? 1 : (1ull << m.n());
    for (uint64_t k = 1; k < total; ++k) {
        engine.flip(std::countr_zero(k));
        if (engine.energy() < best) {
            best = engine.energy();
            optima.clear();
            optima.push_back(engine.assignment());
        } else if (engine.energy() == best && optima.size() < max_count) {
            optima.push_back(engine.assignment());
        }
    }
    return optima;
}

SolveResult solve_tabu(const QuboModel& m, const SolverParams& p) {
    const int n = m.n();
    if (n == 0) throw std::invalid_argument("empty model");
    const int tenure = p.tabu_tenure > 0 ? p.tabu_tenure : std::max(10, n / 10);
    const bool budget_mode = p.max_flips > 0;
    const int restarts = std::max(1, p.restarts);
    const uint64_t flips_per_restart =
        budget_mode ? std::max<uint64_t>(1, p.max_flips / restarts) : UINT64_MAX;
    const double seconds_per_restart = p.time_limit / restarts;

    auto start = std::chrono::steady_clock::now();
    SolveResult result;
    result.seed = p.seed;
    result.best_energy = std::numeric_limits<double>::infinity();
    FlipEngine engine(m);
    std::vector<uint64_t> tabu_until(n, 0);

    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::keyed({p.seed, static_cast<uint64_t>(r), 0x7ab5});
        engine.reset(random_assignment(n, rng));
        std::fill(tabu_until.begin(), tabu_until.end(), 0);
        double restart_best = engine.energy();
        BitVector restart_best_x = engine.assignment();
        if (restart_best < result.best_energy) {
            result.best_energy = restart_best;
            result.best_x = restart_best_x;
            result.trace.push_back({seconds_since(start), result.flips, result.best_energy});
        }
        const double restart_deadline = seconds_since(start) + seconds_per_restart;
        for (uint64_t iter = 1; iter <= flips_per_restart; ++iter) {
            if (!budget_mode && (iter & 0xff) == 0 && seconds_since(start) >= restart_deadline) break;
            int chosen = -1;
            double chosen_delta = 0.0;
            int fallback = -1;
            double fallback_delta = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = engine.delta(i);
                bool admissible =
                    tabu_until[i] <= iter || engine.energy() + d < restart_best;  // aspiration
                if (admissible && (chosen < 0 || d < chosen_delta)) {
                    chosen = i;
                    chosen_delta = d;
                }
                if (fallback < 0 || d < fallback_delta) {
                    fallback = i;
                    fallback_delta = d;
                }
            }
            if (chosen < 0) chosen = fallback;
            engine.flip(chosen);
            tabu_until[chosen] = iter + tenure;
            ++result.flips;
            if (engine.energy() < restart_best) {
                restart_best = engine.energy();
                restart_best_x = engine.assignment();
                if (restart_best < result.best_energy) {
                    result.best_energy = restart_best;
                    result.best_x = restart_best_x;
                    result.trace.push_back({seconds_since(start), result.flips, result.best_energy});
                }
            }
        }
        ++result.restarts_completed;
        if (!budget_mode && seconds_since(start) >= p.time_limit) break;
    }
    result.seconds = seconds_since(start);
    return result;
}

SolveResult solve_anneal(const QuboModel& m, const SolverParams& p) {
    const int n = m.n();
    if (n == 0) throw std::invalid_argument("empty model");
    if (!(p.anneal_t_start >= p.anneal_t_end) || !(p.anneal_t_end >= 0)) {
        throw std::invalid_argument("temperature schedule requires t_start >= t_end >= 0");
    }
    const bool budget_mode = p.max_flips > 0 || p.anneal_sweeps > 0;
    const int restarts = std::max(1, p.restarts);
    uint64_t sweeps_per_restart;
    if (p.anneal_sweeps > 0) {
        sweeps_per_restart = std::max<uint64_t>(1, p.anneal_sweeps / restarts);
    } else if (p.max_flips > 0) {
        sweeps_per_restart = std::max<uint64_t>(1, p.max_flips / (static_cast<uint64_t>(n) * restarts));
    } else {
        sweeps_per_restart = UINT64_MAX;
    }

    auto start = std::chrono::steady_clock::now();
    SolveResult result;
    result.seed = p.seed;
    result.best_energy = std::numeric_limits<double>::infinity();
    FlipEngine engine(m);

    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::keyed({p.seed, static_cast<uint64_t>(r), 0xa55a});
        engine.reset(random_assignment(n, rng));
        if (engine.energy() < result.best_energy) {
            result.best_energy = engine.energy();
            result.best_x = engine.assignment();
            result.trace.push_back({seconds_since(start), result.flips, result.best_energy});
        }
        const double restart_deadline = seconds_since(start) + p.time_limit / restarts;
        const double ratio = p.anneal_t_start > 0 ? p.anneal_t_end / p.anneal_t_start : 0.0;
        for (uint64_t sweep = 0; sweep < sweeps_per_restart; ++sweep) {
            if (!budget_mode && seconds_since(start) >= restart_deadline) break;
            double frac = sweeps_per_restart > 1
                              ? static_cast<double>(sweep) / static_cast<double>(sweeps_per_restart - 1)
                              : 1.0;
            // geometric cooling; frac is clamped because UINT64_MAX sweeps never ends anyway
            double temp = p.anneal_t_start * std::pow(ratio, std::min(1.0, frac));
            for (int attempt = 0; attempt < n; ++attempt) {
                int i = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
                double d = engine.delta(i);
                bool accept = d <= 0.0;
                if (!accept && temp > 0.0) accept = rng.unit() < std::exp(-d / temp);
                if (!accept) continue;
                engine.flip(i);
                ++result.flips;
                if (engine.energy() < result.best_energy) {
                    result.best_energy = engine.energy();
                    result.best_x = engine.assignment();
                    result.trace.push_back({seconds_since(start), result.flips, result.best_energy});
                }
            }
        }
        ++result.restarts_completed;
        if (!budget_mode && seconds_since(start) >= p.time_limit) break;
    }
    result.seconds = seconds_since(start);
    return result;
}

namespace {

// Depth-first walk enumeration shared by the three problem kinds. Positions
// are oriented-node codes; the tangle kind collapses strands.
class WalkSearch {
  public:
    WalkSearch(const AnnotatedGraph& g, ProblemKind kind, int T, uint64_t max_expansions)
        : g_(g), kind_(kind), horizon_(T), max_expansions_(max_expansions) {
        counts_.assign(g.node_count(), 0);
        weights_.reserve(g.node_count());
        for (const auto& n : g.nodes()) weights_.push_back(n.weight);
        full_ = full_deviation();
        over_ = 0.0;
        for (size_t v = 0; v < counts_.size(); ++v) {
            if (weights_[v] <= 0.0) over_ += weights_[v] * weights_[v];
        }
        best_cost_ = full_;
    }

    WalkSolveResult run() {
        const int paths = kind_ == ProblemKind::diploid ? 2 : 1;
        descend(0, paths);
        WalkSolveResult out;
        out.cost = best_cost_;
        out.walk = decode_path(best_stack_, 0);
        if (kind_ == ProblemKind::diploid) out.second = decode_path(best_stack_, 1);
        out.expanded = expanded_;
        return out;
    }

  private:
    struct Visit {
        int path;
        uint32_t code;
    };

    double full_deviation() const {
        double cost = 0.0;
        for (size_t v = 0; v < counts_.size(); ++v) {
            double d = static_cast<double>(counts_[v]) - weights_[v];
            cost += d * d;
        }
        return cost;
    }

    void record_if_better() {
        if (full_ < best_cost_) {
            double fresh = full_deviation();  // fresh sum, no accumulated drift
            if (fresh < best_cost_) {
                best_cost_ = fresh;
                best_stack_ = stack_;
            }
        }
    }

    void expand() {
        if (++expanded_ > max_expansions_) {
            throw std::runtime_error("walk search bound exceeded (" +
                                     std::to_string(max_expansions_) + " expansions)");
        }
    }

    // path_index counts down: remaining paths after this one.
    void descend(int steps_used, int paths_left) {
        record_if_better();
        // counts only grow, so deviation at or above target is locked in
        if (over_ >= best_cost_) return;
        bool at_start = stack_.empty() || stack_.back().path != current_path_;
        if (steps_used < horizon_) {
            if (at_start) {
                // a walk may start at any oriented node
                for (uint32_t code = 0; code < g_.node_count() * 2; ++code) {
                    if (kind_ == ProblemKind::tangle && (code & 1u)) continue;
                    step_into(code, steps_used, paths_left);
                }
            } else {
                uint32_t cur = stack_.back().code;
                if (kind_ == ProblemKind::tangle) {
                    for (NodeIdx v : g_.out_nodes(cur / 2)) {
                        step_into(v * 2, steps_used, paths_left);
                    }
                } else {
                    for (const auto& [to, ec] : g_.out({cur / 2, static_cast<Strand>(cur & 1)})) {
                        step_into(oriented_code(to), steps_used, paths_left);
                    }
                }
            }
        }
        // terminate the current walk; start the next path if one remains
        if (paths_left > 1) {
            ++current_path_;
            descend(0, paths_left - 1);
            --current_path_;
        }
    }

    void step_into(uint32_t code, int steps_used, int paths_left) {
        expand();
        stack_.push_back({current_path_, code});
        const size_t v = code / 2;
        const double d = static_cast<double>(counts_[v]) - weights_[v];
        const double nd = d + 1.0;
        full_ += nd * nd - d * d;
        over_ += (nd >= 0.0 ? nd * nd : 0.0) - (d >= 0.0 ? d * d : 0.0);
        ++counts_[v];
        descend(steps_used + 1, paths_left);
        --counts_[v];
        full_ -= nd * nd - d * d;
        over_ -= (nd >= 0.0 ? nd * nd : 0.0) - (d >= 0.0 ? d * d : 0.0);
        stack_.pop_back();
    }

    Walk decode_path(const std::vector<Visit>& stack, int path) const {
        Walk w;
        for (const auto& v : stack) {
            if (v.path != path) continue;
            w.push_back({g_.node(v.code / 2).id, static_cast<Strand>(v.code & 1)});
        }
        return w;
    }

    const AnnotatedGraph& g_;
    ProblemKind kind_;
    int horizon_;
    uint64_t max_expansions_;
    uint64_t expanded_ = 0;
    int current_path_ = 0;
    std::vector<int64_t> counts_;
    std::vector<double> weights_;
    std::vector<Visit> stack_;
    double full_ = 0.0;
    double over_ = 0.0;
    double best_cost_;
    std::vector<Visit> best_stack_;
};

}  // namespace

WalkSolveResult solve_exhaustive_walks(const AnnotatedGraph& g, ProblemKind kind, int T,
                                       uint64_t max_expansions) {
    if (T < 0) throw std::invalid_argument("horizon must be non-negative");
    if (g.node_count() == 0) throw std::invalid_argument("empty graph");
    WalkSearch search(g, kind, T, max_expansions);
    return search.run();
}

}  // namespace tangle
