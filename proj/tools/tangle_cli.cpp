#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tangle/gfa.hpp"
#include "tangle/kmer.hpp"
#include "tangle/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tangle;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

ProblemKind parse_kind(const std::string& name) {
    auto kind = problem_kind_from_name(name);
    if (!kind) throw CLI::ValidationError("--kind", "must be tangle, oriented or diploid");
    return *kind;
}

AnnotatedGraph load_graph(const std::string& gfa_path, int k) {
    return graph_from_gfa(read_gfa_file(gfa_path), k);
}

int cmd_synth(const PipelineConfig& cfg) {
    SynthOutcome outcome = run_synth(cfg);
    std::cout << "wrote " << outcome.population.size() << " genomes to "
              << outcome.population_fasta << "\n";
    return 0;
}

int cmd_reads(const std::string& genome_path, const std::string& name, double coverage,
              int64_t read_length, double error_rate, uint64_t seed, const std::string& out) {
    auto records = read_fasta_file(genome_path);
    const FastaRecord* record = nullptr;
    for (const auto& r : records) {
        if (name.empty() || r.name == name) {
            record = &r;
            break;
        }
    }
    if (!record) throw std::runtime_error("genome '" + name + "' not found in " + genome_path);
    Genome g;
    g.id = record->name;
    g.sequence = record->seq;
    ReadSet reads = simulate_reads(g, coverage, read_length, error_rate, seed);
    write_fasta_file(out, reads.reads);
    std::cout << "wrote " << reads.reads.size() << " reads to " << out << "\n";
    return 0;
}

int cmd_annotate(const std::string& gfa_path, const std::string& reads_path,
                 const std::vector<int>& ks, const std::string& nodeseq_path,
                 const std::string& out) {
    AnnotatedGraph graph = load_graph(gfa_path, ks.front());
    auto reads = read_fasta_file(reads_path);
    std::map<std::string, std::vector<std::string>> variants;
    const std::map<std::string, std::vector<std::string>>* variants_ptr = nullptr;
    if (!nodeseq_path.empty()) {
        variants = read_nodeseq_file(nodeseq_path);
        variants_ptr = &variants;
    }
    std::vector<NodeHits> runs;
    for (int k : ks) {
        KmerIndex idx = build_kmer_index(graph, k, variants_ptr);
        runs.push_back(annotate_reads(reads, idx, graph));
    }
    NodeHits hits = runs.size() == 1 ? runs.front() : merge_hits_max(runs);
    AnnotatedGraph annotated = apply_annotation(graph, hits);
    write_gfa_file(out, graph_to_gfa(annotated));
    std::cout << "wrote annotated graph to " << out << "\n";
    return 0;
}

int cmd_trim(const std::string& gfa_path, int k, std::optional<double> depth,
             const std::string& out) {
    AnnotatedGraph graph = load_graph(gfa_path, k);
    graph = normalize_copy_numbers(graph, depth);
    AnnotatedGraph trimmed = trim_zero_weight_edges(graph);
    write_gfa_file(out, graph_to_gfa(trimmed));
    std::cout << "kept " << trimmed.edge_pair_count() << " of " << graph.edge_pair_count()
              << " edge pairs\n";
    return 0;
}

int cmd_build(const std::string& gfa_path, int k, const std::string& kind_name, double alpha,
              double lambda1, double lambda2, std::optional<double> depth, bool trim,
              const std::string& out_model, const std::string& out_layout) {
    AnnotatedGraph graph = load_graph(gfa_path, k);
    graph = normalize_copy_numbers(graph, depth);
    if (trim) graph = trim_zero_weight_edges(graph);
    QuboModel model = build_qubo(graph, parse_kind(kind_name), alpha, lambda1, lambda2);
    write_qubo_model_file(out_model, model);
    spill(out_layout, layout_to_json(model.layout()));
    std::cout << "model: " << model.n() << " variables, T=" << model.layout().horizon << "\n";
    return 0;
}

int cmd_solve(const std::string& model_path, const std::string& solver, const SolverParams& params,
              int qaoa_layers, int qaoa_shots, int qaoa_max_iters, double qaoa_alpha_cvar,
              int qaoa_cap, const std::string& out) {
    QuboModel model = read_qubo_model_file(model_path);
    SolveResult result;
    if (solver == "oracle-bits") {
        result = solve_exhaustive_bits(model);
    } else if (solver == "tabu") {
        result = solve_tabu(model, params);
    } else if (solver == "anneal") {
        result = solve_anneal(model, params);
    } else if (solver == "qaoa") {
        QaoaResult r = optimize_qaoa(model, qaoa_layers, qaoa_shots, qaoa_max_iters,
                                     qaoa_alpha_cvar, params.seed, qaoa_cap);
        result.best_x = r.best_sample;
        result.best_energy = r.best_energy;
        result.seed = params.seed;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& t : r.trace) {
            trace.push_back({t.evaluation, t.cvar_value, t.accepted_cvar, t.best_energy});
        }
        nlohmann::json histogram = nlohmann::json::array();
        for (size_t k = 0; k < r.final_batch.samples.size(); ++k) {
            histogram.push_back({r.final_batch.energies[k], r.final_batch.samples[k].second});
        }
        nlohmann::json extras{{"trace", trace}, {"final_histogram", histogram},
                              {"gammas", r.params.gammas}, {"betas", r.params.betas}};
        spill(out + ".qaoa.json", extras.dump(2) + "\n");
    } else {
        throw CLI::ValidationError("--solver", "must be oracle-bits, tabu, anneal or qaoa");
    }
    spill(out, solve_result_to_json(result));
    std::cout << "best energy " << result.best_energy << " -> " << out << "\n";
    return 0;
}

int cmd_decode(const std::string& gfa_path, const std::string& layout_path,
               const std::string& result_path, const std::string& mode_name,
               const std::string& out) {
    VariableLayout layout = layout_from_json(slurp(layout_path));
    AnnotatedGraph graph = load_graph(gfa_path, 21);
    SolveResult result = solve_result_from_json(slurp(result_path), layout.variable_count());
    DecodeMode mode = mode_name == "strict" ? DecodeMode::strict : DecodeMode::repair;
    DecodeReport report = decode_assignment(graph, layout, result.best_x, mode);
    nlohmann::json j;
    auto paths = nlohmann::json::array();
    for (const auto& segments : report.path_segments) {
        auto path = nlohmann::json::array();
        for (const auto& seg : segments) path.push_back(render_path_string(seg));
        paths.push_back(path);
    }
    j["paths"] = paths;
    auto violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"path", v.path}, {"t", v.t}, {"kind", decode_violation_name(v.kind)}});
    }
    j["violations"] = violations;
    j["segments"] = report.total_segments();
    spill(out, j.dump(2) + "\n");
    std::cout << report.total_segments() << " segment(s), " << report.violations.size()
              << " repaired violation(s) -> " << out << "\n";
    return 0;
}

int cmd_extract(const std::string& gfa_path, const std::string& walks_path, const std::string& out) {
    AnnotatedGraph graph = load_graph(gfa_path, 21);
    nlohmann::json j = nlohmann::json::parse(slurp(walks_path));
    std::vector<FastaRecord> contigs;
    size_t counter = 0;
    auto add_walk = [&](const std::string& rendered) {
        Walk w = parse_path_string(rendered);
        contigs.push_back({"contig_" + std::to_string(counter++), extract_sequence(graph, w)});
    };
    if (j.contains("paths")) {
        for (const auto& path : j["paths"]) {
            for (const auto& seg : path) add_walk(seg.get<std::string>());
        }
    } else if (j.contains("segments")) {
        for (const auto& seg : j["segments"]) add_walk(seg.get<std::string>());
    } else {
        throw std::runtime_error("walks file needs a 'paths' or 'segments' array");
    }
    write_fasta_file(out, contigs);
    std::cout << "wrote " << contigs.size() << " contig(s) to " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& contigs_path,
                 const std::string& out_json, const std::string& out_tsv) {
    auto truth = read_fasta_file(truth_path);
    if (truth.empty()) throw std::runtime_error("truth FASTA is empty");
    auto contig_records = read_fasta_file(contigs_path);
    std::vector<std::string> contigs;
    for (const auto& r : contig_records) contigs.push_back(r.seq);
    EvalReport report = evaluate(truth.front().seq, contigs);
    if (!out_json.empty()) spill(out_json, eval_report_to_json(report));
    if (!out_tsv.empty()) spill(out_tsv, eval_report_to_tsv(report, true));
    std::cout << eval_report_to_tsv(report, true);
    return 0;
}

int cmd_pipeline(const PipelineConfig& cfg) {
    PipelineOutcome outcome = run_pipeline(cfg);
    std::cout << "solver energy " << outcome.solver_energy << ", " << outcome.contigs.size()
              << " contig(s)\n";
    if (outcome.report) std::cout << eval_report_to_tsv(*outcome.report, true);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pangenome-guided assembly via binary optimisation"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_path, gfa, reads, nodeseq, truth, out, out2, layout_path, result_path;
    std::string kind_name = "oriented", solver = "tabu", mode_name = "repair", genome_name;
    std::vector<int> ks{21};
    int k = 21;
    double alpha = 1.2, lambda1 = 10.0, lambda2 = 5.0;
    double coverage = 30.0, error_rate = 0.002;
    int64_t read_length = 100;
    uint64_t seed = 1;
    std::optional<double> depth;
    bool trim = false;
    SolverParams params;
    int qaoa_layers = 2, qaoa_shots = 1000, qaoa_max_iters = 100, qaoa_cap = 20;
    double qaoa_alpha_cvar = 0.1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic genome population");
    synth->add_option("--config", config_path, "pipeline config JSON")->required();
    synth->add_option("--outdir", out, "override config outdir");
    synth->add_option("--seed", seed, "override config seed");

    auto* reads_cmd = app.add_subcommand("reads", "simulate short reads from a genome");
    reads_cmd->add_option("--genome", gfa, "FASTA with source genome")->required();
    reads_cmd->add_option("--name", genome_name, "record name (default: first)");
    reads_cmd->add_option("--coverage", coverage, "fold coverage");
    reads_cmd->add_option("--read-length", read_length, "read length");
    reads_cmd->add_option("--error-rate", error_rate, "per-base substitution rate");
    reads_cmd->add_option("--seed", seed, "RNG seed");
    reads_cmd->add_option("--out", out, "output FASTA")->required();

    auto* annotate = app.add_subcommand("annotate", "map reads onto graph nodes (KC/EC tags)");
    annotate->add_option("--gfa", gfa, "pangenome GFA")->required();
    annotate->add_option("--reads", reads, "reads FASTA")->required();
    annotate->add_option("--k", ks, "kmer size(s); several run multi-k merge");
    annotate->add_option("--nodeseq", nodeseq, "per-node variant sequences (tab-separated)");
    annotate->add_option("--out", out, "output GFA")->required();

    auto* trim_cmd = app.add_subcommand("trim", "drop unsupported zero-count edges");
    trim_cmd->add_option("--gfa", gfa, "annotated GFA")->required();
    trim_cmd->add_option("--k", k, "kmer size used for depth");
    trim_cmd->add_option("--depth", depth, "sequencing depth (default: length-weighted median)");
    trim_cmd->add_option("--out", out, "output GFA")->required();

    auto* build = app.add_subcommand("build", "encode the graph as a QUBO model");
    build->add_option("--gfa", gfa, "annotated GFA")->required();
    build->add_option("--k", k, "kmer size used for depth");
    build->add_option("--kind", kind_name, "tangle | oriented | diploid");
    build->add_option("--alpha", alpha, "horizon factor");
    build->add_option("--lambda1", lambda1, "one-slot penalty weight");
    build->add_option("--lambda2", lambda2, "transition penalty weight");
    build->add_option("--depth", depth, "sequencing depth (default: length-weighted median)");
    build->add_flag("--trim", trim, "trim zero-count edges first");
    build->add_option("--out-model", out, "model output path")->required();
    build->add_option("--out-layout", out2, "layout JSON output path")->required();

    auto* solve = app.add_subcommand("solve", "minimise a QUBO model");
    solve->add_option("--model", gfa, "model file")->required();
    solve->add_option("--solver", solver, "oracle-bits | tabu | anneal | qaoa");
    solve->add_option("--seed", params.seed, "RNG seed");
    solve->add_option("--time-limit", params.time_limit, "seconds");
    solve->add_option("--max-flips", params.max_flips, "flip budget (deterministic mode)");
    solve->add_option("--restarts", params.restarts, "restart count");
    solve->add_option("--tenure", params.tabu_tenure, "tabu tenure (0 = auto)");
    solve->add_option("--t-start", params.anneal_t_start, "annealing start temperature");
    solve->add_option("--t-end", params.anneal_t_end, "annealing end temperature");
    solve->add_option("--sweeps", params.anneal_sweeps, "annealing sweeps");
    solve->add_option("--p", qaoa_layers, "QAOA layers");
    solve->add_option("--shots", qaoa_shots, "QAOA shots per iteration");
    solve->add_option("--max-iters", qaoa_max_iters, "QAOA iteration cap");
    solve->add_option("--alpha-cvar", qaoa_alpha_cvar, "CVaR fraction");
    solve->add_option("--qubit-cap", qaoa_cap, "QAOA qubit cap");
    solve->add_option("--out", out, "result JSON")->required();

    auto* decode = app.add_subcommand("decode", "turn an assignment back into walks");
    decode->add_option("--gfa", gfa, "pangenome GFA")->required();
    decode->add_option("--layout", layout_path, "layout JSON")->required();
    decode->add_option("--result", result_path, "solver result JSON")->required();
    decode->add_option("--mode", mode_name, "strict | repair");
    decode->add_option("--out", out, "walks JSON")->required();

    auto* extract = app.add_subcommand("extract", "walk segments to contig FASTA");
    extract->add_option("--gfa", gfa, "pangenome GFA")->required();
    extract->add_option("--walks", layout_path, "walks JSON")->required();
    extract->add_option("--out", out, "contigs FASTA")->required();

    auto* eval = app.add_subcommand("evaluate", "compare contigs against the truth");
    eval->add_option("--truth", truth, "truth FASTA")->required();
    eval->add_option("--contigs", gfa, "contigs FASTA")->required();
    eval->add_option("--out", out, "report JSON");
    eval->add_option("--tsv", out2, "report TSV");

    auto* pipeline = app.add_subcommand("pipeline", "run annotate..evaluate end to end");
    pipeline->add_option("--config", config_path, "pipeline config JSON")->required();
    pipeline->add_option("--gfa", gfa, "override config gfa");
    pipeline->add_option("--reads", reads, "override config reads");
    pipeline->add_option("--truth", truth, "override config truth");
    pipeline->add_option("--outdir", out, "override config outdir");
    pipeline->add_option("--solver", solver, "override config solver");
    pipeline->add_option("--seed", seed, "override config seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            PipelineConfig cfg = load_config_file(config_path);
            if (!out.empty()) cfg.outdir = out;
            if (synth->count("--seed")) cfg.seed = seed;
            return cmd_synth(cfg);
        }
        if (reads_cmd->parsed()) {
            return cmd_reads(gfa, genome_name, coverage, read_length, error_rate, seed, out);
        }
        if (annotate->parsed()) return cmd_annotate(gfa, reads, ks, nodeseq, out);
        if (trim_cmd->parsed()) return cmd_trim(gfa, k, depth, out);
        if (build->parsed()) {
            return cmd_build(gfa, k, kind_name, alpha, lambda1, lambda2, depth, trim, out, out2);
        }
        if (solve->parsed()) {
            return cmd_solve(gfa, solver, params, qaoa_layers, qaoa_shots, qaoa_max_iters,
                             qaoa_alpha_cvar, qaoa_cap, out);
        }
        if (decode->parsed()) return cmd_decode(gfa, layout_path, result_path, mode_name, out);
        if (extract->parsed()) return cmd_extract(gfa, layout_path, out);
        if (eval->parsed()) return cmd_evaluate(truth, gfa, out, out2);
        if (pipeline->parsed()) {
            PipelineConfig cfg = load_config_file(config_path);
            if (!gfa.empty()) cfg.gfa_path = gfa;
            if (!reads.empty()) cfg.reads_path = reads;
            if (!truth.empty()) cfg.truth_path = truth;
            if (!out.empty()) cfg.outdir = out;
            if (pipeline->count("--solver")) cfg.solver = solver;
            if (pipeline->count("--seed")) {
                cfg.seed = seed;
                cfg.solver_params.seed = seed;
            }
            return cmd_pipeline(cfg);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return 0;
}
