#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tangle/qubo.hpp"

namespace tangle {

// Diagonal Ising operator: constant + sum h_i Z_i + sum J_ij Z_i Z_j, with
// basis-state energies equal to the QUBO energies under x_i = (1 - z_i)/2.
struct IsingHamiltonian {
    int n = 0;
    double constant = 0.0;
    std::vector<double> h;
    std::vector<std::tuple<int, int, double>> j;  // i < j

    // Energy of basis state |x> (bit i of the assignment maps to qubit i).
    double energy_of_bits(const BitVector& x) const;
};

IsingHamiltonian qubo_to_ising(const QuboModel& m);

struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    int layers() const { return static_cast<int>(gammas.size()); }
};

using StateVector = std::vector<std::complex<double>>;

struct SampleBatch {
    int shots = 0;
    uint64_t seed = 0;
    std::vector<std::pair<uint64_t, int>> samples;  // (basis index, multiplicity)
    std::vector<double> energies;                   // parallel to samples

    double min_energy() const;
};

BitVector bits_of_index(uint64_t index, int n);

// Mean of the lowest ceil(alpha * shots) sampled energies (with
// multiplicity); alpha in (0, 1], alpha = 1 is the plain mean.
double cvar(const SampleBatch& batch, double alpha_cvar);

// Statevector QAOA simulation for a diagonal Hamiltonian. The cost layer
// exp(-i gamma H) is a per-basis-state phase; the mixer exp(-i beta sum X_i)
// factorises into n single-qubit rotations.
class QaoaSimulator {
  public:
    explicit QaoaSimulator(IsingHamiltonian hamiltonian, int qubit_cap = 20);

    int n() const { return hamiltonian_.n; }
    const IsingHamiltonian& hamiltonian() const { return hamiltonian_; }
    // Basis-state energies, indexed by packed assignment.
    const std::vector<double>& diagonal() const { return diagonal_; }

    // [prod_l U_M(beta_l) U_C(gamma_l)] H^{outer n} |0>
    StateVector run(const QaoaParams& params) const;

    // Multinomial draw over |amplitude|^2; deterministic given seed.
    SampleBatch sample(const StateVector& state, int shots, uint64_t seed) const;

  private:
    IsingHamiltonian hamiltonian_;
    std::vector<double> diagonal_;
};

struct QaoaTraceEntry {
    int evaluation = 0;
    double cvar_value = 0.0;      // CVaR of this evaluation's fresh batch
    double accepted_cvar = 0.0;   // best accepted CVaR so far (non-increasing)
    double best_energy = 0.0;     // lowest sampled energy so far
};

struct QaoaResult {
    QaoaParams params;
    SampleBatch final_batch;  // fresh batch at the returned parameters
    BitVector best_sample;
    double best_energy = 0.0;
    int evaluations = 0;
    std::vector<QaoaTraceEntry> trace;
};

// Derivative-free parameter search (coordinate pattern search with shrinking
// steps, after a small ramp warm-up) minimising the CVaR of fresh sample
// batches. gamma is kept in [0, 2pi), beta in [0, pi). max_iters caps the
// number of objective evaluations.
QaoaResult optimize_qaoa(const QuboModel& m, int p, int shots, int max_iters, double alpha_cvar,
                         uint64_t seed, int qubit_cap = 20);

}  // namespace tangle
