#include "tangle/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tangle/rng.hpp"

namespace tangle {

double IsingHamiltonian::energy_of_bits(const BitVector& x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("assignment length mismatch");
    double e = constant;
    for (int i = 0; i < n; ++i) e += h[i] * (x[i] ? -1.0 : 1.0);
    for (const auto& [a, b, c] : j) e += c * ((x[a] == x[b]) ? 1.0 : -1.0);
    return e;
}

IsingHamiltonian qubo_to_ising(const QuboModel& m) {
    IsingHamiltonian ising;
    ising.n = m.n();
    ising.constant = m.offset();
    ising.h.assign(m.n(), 0.0);
    // x_i = (1 - z_i)/2: a_i x_i -> a_i/2 - (a_i/2) z_i
    for (int i = 0; i < m.n(); ++i) {
        double a = m.linear()[i];
        ising.constant += a / 2.0;
        ising.h[i] -= a / 2.0;
    }
    // b_ij x_i x_j -> b/4 (1 - z_i - z_j + z_i z_j)
    for (const auto& [i, j, b] : m.quadratic()) {
        ising.constant += b / 4.0;
        ising.h[i] -= b / 4.0;
        ising.h[j] -= b / 4.0;
        ising.j.emplace_back(i, j, b / 4.0);
    }
    return ising;
}

double SampleBatch::min_energy() const {
    double best = std::numeric_limits<double>::infinity();
    for (double e : energies) best = std::min(best, e);
    return best;
}

BitVector bits_of_index(uint64_t index, int n) {
    BitVector x(n);
    for (int i = 0; i < n; ++i) x[i] = static_cast<uint8_t>((index >> i) & 1u);
    return x;
}

double cvar(const SampleBatch& batch, double alpha_cvar) {
    if (batch.shots <= 0) throw std::invalid_argument("empty sample batch");
    if (!(alpha_cvar > 0.0) || alpha_cvar > 1.0) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    std::vector<size_t> order(batch.samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return batch.energies[a] < batch.energies[b]; });
    int64_t keep = static_cast<int64_t>(std::ceil(alpha_cvar * batch.shots));
    keep = std::max<int64_t>(1, std::min<int64_t>(keep, batch.shots));
    double sum = 0.0;
    int64_t taken = 0;
    for (size_t k : order) {
        int64_t take = std::min<int64_t>(batch.samples[k].second, keep - taken);
        sum += batch.energies[k] * static_cast<double>(take);
        taken += take;
        if (taken == keep) break;
    }
    return sum / static_cast<double>(keep);
}

QaoaSimulator::QaoaSimulator(IsingHamiltonian hamiltonian, int qubit_cap)
    : hamiltonian_(std::move(hamiltonian)) {
    if (hamiltonian_.n > qubit_cap) {
        throw std::invalid_argument("statevector simulation capped at " +
                                    std::to_string(qubit_cap) + " qubits, model needs " +
                                    std::to_string(hamiltonian_.n));
    }
    if (hamiltonian_.n > 30) throw std::invalid_argument("qubit cap above 30 is not supported");
    const size_t dim = size_t{1} << hamiltonian_.n;
    diagonal_.assign(dim, hamiltonian_.constant);
    for (int i = 0; i < hamiltonian_.n; ++i) {
        double hi = hamiltonian_.h[i];
        if (hi == 0.0) continue;
        for (size_t x = 0; x < dim; ++x) {
            diagonal_[x] += ((x >> i) & 1u) ? -hi : hi;
        }
    }
    for (const auto& [a, b, c] : hamiltonian_.j) {
        if (c == 0.0) continue;
        for (size_t x = 0; x < dim; ++x) {
            diagonal_[x] += (((x >> a) & 1u) == ((x >> b) & 1u)) ? c : -c;
        }
    }
}

StateVector QaoaSimulator::run(const QaoaParams& params) const {
    if (params.gammas.size() != params.betas.size()) {
        throw std::invalid_argument("gamma and beta vectors must have equal length");
    }
    const size_t dim = diagonal_.size();
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(dim));
    StateVector state(dim, {amp0, 0.0});
    for (int layer = 0; layer < params.layers(); ++layer) {
        const double gamma = params.gammas[layer];
        const double beta = params.betas[layer];
        // cost layer: diagonal phase exp(-i gamma E(x))
        for (size_t x = 0; x < dim; ++x) {
            double phase = -gamma * diagonal_[x];
            state[x] *= std::complex<double>(std::cos(phase), std::sin(phase));
        }
        // mixer layer: exp(-i beta X) on every qubit
        const double c = std::cos(beta);
        const std::complex<double> ms(0.0, -std::sin(beta));
        for (int qubit = 0; qubit < hamiltonian_.n; ++qubit) {
            const size_t bit = size_t{1} << qubit;
            for (size_t group = 0; group < dim; group += bit * 2) {
                for (size_t k = group; k < group + bit; ++k) {
                    auto a0 = state[k];
                    auto a1 = state[k + bit];
                    state[k] = c * a0 + ms * a1;
                    state[k + bit] = c * a1 + ms * a0;
                }
            }
        }
    }
    return state;
}

SampleBatch QaoaSimulator::sample(const StateVector& state, int shots, uint64_t seed) const {
    if (shots <= 0) throw std::invalid_argument("shots must be positive");
    if (state.size() != diagonal_.size()) throw std::invalid_argument("state size mismatch");
    std::vector<double> cumulative(state.size());
    double acc = 0.0;
    for (size_t x = 0; x < state.size(); ++x) {
        acc += std::norm(state[x]);
        cumulative[x] = acc;
    }
    Rng rng = Rng::keyed({seed, 0x5a3f});
    std::vector<uint64_t> draws(shots);
    for (int s = 0; s < shots; ++s) {
        double u = rng.unit() * acc;
        draws[s] = static_cast<uint64_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (draws[s] >= state.size()) draws[s] = state.size() - 1;
    }
    std::sort(draws.begin(), draws.end());
    SampleBatch batch;
    batch.shots = shots;
    batch.seed = seed;
    for (size_t k = 0; k < draws.size();) {
        size_t run = k;
        while (run < draws.size() && draws[run] == draws[k]) ++run;
        batch.samples.emplace_back(draws[k], static_cast<int>(run - k));
        batch.energies.push_back(diagonal_[draws[k]]);
        k = run;
    }
    return batch;
}

namespace {

double wrap_interval(double v, double hi) {
    v = std::fmod(v, hi);
    if (v < 0) v += hi;
    return v;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

}  // namespace

QaoaResult optimize_qaoa(const QuboModel& m, int p, int shots, int max_iters, double alpha_cvar,
                         uint64_t seed, int qubit_cap) {
    if (p < 1 || p > 20) throw std::invalid_argument("layer count must lie in 1..20");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    QaoaSimulator sim(qubo_to_ising(m), qubit_cap);

    // characteristic coefficient scale; angles are searched around 1/scale
    double scale = 1e-12;
    for (double hv : sim.hamiltonian().h) scale = std::max(scale, std::abs(hv));
    for (const auto& [a, b, c] : sim.hamiltonian().j) scale = std::max(scale, std::abs(c));
    scale = std::max(scale, 1.0);

    QaoaResult result;
    result.best_energy = std::numeric_limits<double>::infinity();

    auto evaluate = [&](const QaoaParams& params) {
        StateVector state = sim.run(params);
        SampleBatch batch =
            sim.sample(state, shots, Rng::keyed({seed, static_cast<uint64_t>(result.evaluations)}).next());
        ++result.evaluations;
        double value = cvar(batch, alpha_cvar);
        for (size_t k = 0; k < batch.samples.size(); ++k) {
            if (batch.energies[k] < result.best_energy) {
                result.best_energy = batch.energies[k];
                result.best_sample = bits_of_index(batch.samples[k].first, sim.n());
            }
        }
        return value;
    };

    auto ramp = [&](double gamma_scale, double beta_scale) {
        QaoaParams params;
        for (int l = 0; l < p; ++l) {
            params.gammas.push_back(gamma_scale * (l + 1) / p);
            params.betas.push_back(beta_scale * (1.0 - static_cast<double>(l) / p));
        }
        return params;
    };

    // warm-up: a few annealing-style ramps, keep the best
    QaoaParams current;
    double current_value = std::numeric_limits<double>::infinity();
    for (double gs : {0.05 / scale, 0.15 / scale, 0.4 / scale, 1.0 / scale}) {
        if (result.evaluations >= max_iters) break;
        QaoaParams candidate = ramp(gs, kPi / 4.0);
        double value = evaluate(candidate);
        if (value < current_value) {
            current_value = value;
            current = candidate;
        }
        result.trace.push_back({result.evaluations, value, current_value, result.best_energy});
    }
    if (current.gammas.empty()) current = ramp(0.15 / scale, kPi / 4.0);

    // coordinate pattern search with shrinking steps
    double gamma_step = 0.2 / scale;
    double beta_step = kPi / 16.0;
    while (result.evaluations < max_iters && (gamma_step > 1e-4 / scale || beta_step > 1e-4)) {
        bool improved = false;
        for (int coord = 0; coord < 2 * p && result.evaluations < max_iters; ++coord) {
            const bool is_gamma = coord < p;
            const int l = is_gamma ? coord : coord - p;
            for (double dir : {+1.0, -1.0}) {
                if (result.evaluations >= max_iters) break;
                QaoaParams candidate = current;
                if (is_gamma) {
                    candidate.gammas[l] = wrap_interval(candidate.gammas[l] + dir * gamma_step, kTwoPi);
                } else {
                    candidate.betas[l] = wrap_interval(candidate.betas[l] + dir * beta_step, kPi);
                }
                double value = evaluate(candidate);
                bool accept = value < current_value;
                if (accept) {
                    current_value = value;
                    current = candidate;
                }
                result.trace.push_back({result.evaluations, value, current_value, result.best_energy});
                if (accept) {
                    improved = true;
                    break;  // keep moving from the improved point
                }
            }
        }
        if (!improved) {
            gamma_step *= 0.5;
            beta_step *= 0.5;
        }
    }

    result.params = current;
    // final readout batch at the optimised parameters, fresh stream
    StateVector state = sim.run(current);
    result.final_batch = sim.sample(state, shots, Rng::keyed({seed, 0xf17a1}).next());
    for (size_t k = 0; k < result.final_batch.samples.size(); ++k) {
        if (result.final_batch.energies[k] < result.best_energy) {
            result.best_energy = result.final_batch.energies[k];
            result.best_sample = bits_of_index(result.final_batch.samples[k].first, sim.n());
        }
    }
    return result;
}

}  // namespace tangle
