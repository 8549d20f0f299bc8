#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tangle/assembly.hpp"
#include "tangle/evaluate.hpp"
#include "tangle/qaoa.hpp"
#include "tangle/solvers.hpp"
#include "tangle/synth.hpp"

namespace tangle {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
    uint64_t seed = 1;

    // synth
    MutationConfig synth;
    int64_t founder_length = 20000;

    // reads
    double coverage = 30.0;
    int64_t read_length = 100;
    double error_rate = 0.002;

    // annotate
    int k = 21;
    std::string nodeseq_path;

    // graph
    std::optional<double> sequencing_depth;
    bool trim = false;
    bool use_expected_unique = false;

    // qubo
    ProblemKind kind = ProblemKind::oriented;
    double alpha = 1.2;
    double lambda1 = 10.0;
    double lambda2 = 5.0;

    // solver: oracle-walk | oracle-bits | tabu | anneal | qaoa
    std::string solver = "tabu";
    SolverParams solver_params;
    int qaoa_layers = 2;
    int qaoa_shots = 1000;
    int qaoa_max_iters = 100;
    double qaoa_alpha_cvar = 0.1;
    int qaoa_qubit_cap = 20;

    // paths
    std::string gfa_path;
    std::string reads_path;
    std::string truth_path;
    std::string outdir = "run";
};

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config_file(const std::string& path);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string config_json;
    std::vector<StageTiming> stages;
    std::map<std::string, std::string> input_digests;   // path -> fnv1a-64 hex
    std::map<std::string, std::string> output_digests;  // path -> fnv1a-64 hex
};

std::string manifest_to_json(const RunManifest& m);
// FNV-1a 64 of a file's bytes, as 16 hex chars.
std::string digest_file(const std::string& path);

// Resolves a possibly relative output directory against the TANGLE_WORKDIR
// environment variable (the only environment input the tool reads).
std::string resolve_outdir(const std::string& outdir);

struct SynthOutcome {
    std::vector<Genome> population;
    std::string population_fasta;  // output path
    RunManifest manifest;
};

// Generates the population, writes population.fa, one event-log JSON per
// genome, and the manifest. Fails before writing anything if the output
// location is unusable.
SynthOutcome run_synth(const PipelineConfig& cfg);

struct PipelineOutcome {
    AnnotatedGraph graph;          // annotated + normalised (+ trimmed) graph
    std::vector<Walk> segments;    // decoded walk segments (contig candidates)
    std::vector<std::string> contigs;
    double solver_energy = 0.0;    // QUBO energy or walk cost, by solver
    std::optional<EvalReport> report;
    RunManifest manifest;
};

// annotate -> normalise -> (trim) -> build -> solve -> decode -> extract ->
// evaluate, writing per-stage artifacts under cfg.outdir.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

}  // namespace tangle
