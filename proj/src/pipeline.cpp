#include "tangle/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tangle/gfa.hpp"
#include "tangle/kmer.hpp"

namespace tangle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json rates_to_json(const MutationRates& r) {
    return json{{"point_substitution", r.point_substitution},
                {"str_event", r.str_event},
                {"cnv_event", r.cnv_event},
                {"short_repeat_insertion", r.short_repeat_insertion},
                {"long_repeat_insertion", r.long_repeat_insertion},
                {"translocation", r.translocation},
                {"inversion", r.inversion}};
}

MutationRates rates_from_json(const json& j) {
    MutationRates r;
    r.point_substitution = j.value("point_substitution", 0.0);
    r.str_event = j.value("str_event", 0.0);
    r.cnv_event = j.value("cnv_event", 0.0);
    r.short_repeat_insertion = j.value("short_repeat_insertion", 0.0);
    r.long_repeat_insertion = j.value("long_repeat_insertion", 0.0);
    r.translocation = j.value("translocation", 0.0);
    r.inversion = j.value("inversion", 0.0);
    return r;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

class StageClock {
  public:
    explicit StageClock(RunManifest& manifest) : manifest_(manifest) {}

    template <typename F>
    auto run(const std::string& name, F&& f) {
        auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                manifest_.stages.push_back({name, elapsed(start)});
            } else {
                auto value = f();
                manifest_.stages.push_back({name, elapsed(start)});
                return value;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + name + "' failed: " + e.what());
        }
    }

  private:
    static double elapsed(std::chrono::steady_clock::time_point start) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    RunManifest& manifest_;
};

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    PipelineConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);

    if (j.contains("synth")) {
        const auto& s = j["synth"];
        if (s.contains("founder_rates")) cfg.synth.founder_rates = rates_from_json(s["founder_rates"]);
        if (s.contains("descendant_rates")) {
            cfg.synth.descendant_rates = rates_from_json(s["descendant_rates"]);
        }
        cfg.synth.generations = s.value("generations", cfg.synth.generations);
        cfg.synth.population_size = s.value("population_size", cfg.synth.population_size);
        cfg.founder_length = s.value("founder_length", cfg.founder_length);
    }
    if (j.contains("reads")) {
        const auto& r = j["reads"];
        cfg.coverage = r.value("coverage", cfg.coverage);
        cfg.read_length = r.value("read_length", cfg.read_length);
        cfg.error_rate = r.value("error_rate", cfg.error_rate);
    }
    if (j.contains("annotate")) {
        const auto& a = j["annotate"];
        cfg.k = a.value("k", cfg.k);
        cfg.nodeseq_path = a.value("nodeseq", cfg.nodeseq_path);
    }
    if (j.contains("graph")) {
        const auto& g = j["graph"];
        if (g.contains("sequencing_depth")) cfg.sequencing_depth = g["sequencing_depth"].get<double>();
        cfg.trim = g.value("trim", cfg.trim);
        cfg.use_expected_unique = g.value("use_expected_unique", cfg.use_expected_unique);
    }
    if (j.contains("qubo")) {
        const auto& q = j["qubo"];
        if (q.contains("kind")) {
            auto kind = problem_kind_from_name(q["kind"].get<std::string>());
            if (!kind) throw std::runtime_error("unknown problem kind in config");
            cfg.kind = *kind;
        }
        cfg.alpha = q.value("alpha", cfg.alpha);
        cfg.lambda1 = q.value("lambda1", cfg.lambda1);
        cfg.lambda2 = q.value("lambda2", cfg.lambda2);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.solver = s.value("name", cfg.solver);
        cfg.solver_params.seed = s.value("seed", cfg.seed);
        cfg.solver_params.time_limit = s.value("time_limit", cfg.solver_params.time_limit);
        cfg.solver_params.restarts = s.value("restarts", cfg.solver_params.restarts);
        cfg.solver_params.tabu_tenure = s.value("tabu_tenure", cfg.solver_params.tabu_tenure);
        cfg.solver_params.max_flips = s.value("max_flips", cfg.solver_params.max_flips);
        cfg.solver_params.anneal_t_start = s.value("t_start", cfg.solver_params.anneal_t_start);
        cfg.solver_params.anneal_t_end = s.value("t_end", cfg.solver_params.anneal_t_end);
        cfg.solver_params.anneal_sweeps = s.value("sweeps", cfg.solver_params.anneal_sweeps);
        cfg.qaoa_layers = s.value("qaoa_layers", cfg.qaoa_layers);
        cfg.qaoa_shots = s.value("qaoa_shots", cfg.qaoa_shots);
        cfg.qaoa_max_iters = s.value("qaoa_max_iters", cfg.qaoa_max_iters);
        cfg.qaoa_alpha_cvar = s.value("qaoa_alpha_cvar", cfg.qaoa_alpha_cvar);
        cfg.qaoa_qubit_cap = s.value("qaoa_qubit_cap", cfg.qaoa_qubit_cap);
    } else {
        cfg.solver_params.seed = cfg.seed;
    }
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        cfg.gfa_path = p.value("gfa", cfg.gfa_path);
        cfg.reads_path = p.value("reads", cfg.reads_path);
        cfg.truth_path = p.value("truth", cfg.truth_path);
        cfg.outdir = p.value("outdir", cfg.outdir);
    }
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["synth"] = {{"founder_rates", rates_to_json(cfg.synth.founder_rates)},
                  {"descendant_rates", rates_to_json(cfg.synth.descendant_rates)},
                  {"generations", cfg.synth.generations},
                  {"population_size", cfg.synth.population_size},
                  {"founder_length", cfg.founder_length}};
    j["reads"] = {{"coverage", cfg.coverage},
                  {"read_length", cfg.read_length},
                  {"error_rate", cfg.error_rate}};
    j["annotate"] = {{"k", cfg.k}, {"nodeseq", cfg.nodeseq_path}};
    json graph = {{"trim", cfg.trim}, {"use_expected_unique", cfg.use_expected_unique}};
    if (cfg.sequencing_depth) graph["sequencing_depth"] = *cfg.sequencing_depth;
    j["graph"] = graph;
    j["qubo"] = {{"kind", problem_kind_name(cfg.kind)},
                 {"alpha", cfg.alpha},
                 {"lambda1", cfg.lambda1},
                 {"lambda2", cfg.lambda2}};
    j["solver"] = {{"name", cfg.solver},
                   {"seed", cfg.solver_params.seed},
                   {"time_limit", cfg.solver_params.time_limit},
                   {"restarts", cfg.solver_params.restarts},
                   {"tabu_tenure", cfg.solver_params.tabu_tenure},
                   {"max_flips", cfg.solver_params.max_flips},
                   {"t_start", cfg.solver_params.anneal_t_start},
                   {"t_end", cfg.solver_params.anneal_t_end},
                   {"sweeps", cfg.solver_params.anneal_sweeps},
                   {"qaoa_layers", cfg.qaoa_layers},
                   {"qaoa_shots", cfg.qaoa_shots},
                   {"qaoa_max_iters", cfg.qaoa_max_iters},
                   {"qaoa_alpha_cvar", cfg.qaoa_alpha_cvar},
                   {"qaoa_qubit_cap", cfg.qaoa_qubit_cap}};
    j["paths"] = {{"gfa", cfg.gfa_path},
                  {"reads", cfg.reads_path},
                  {"truth", cfg.truth_path},
                  {"outdir", cfg.outdir}};
    return j.dump(2) + "\n";
}

PipelineConfig load_config_file(const std::string& path) {
    return config_from_json(read_text_file(path));
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["tool_version"] = m.tool_version;
    j["config"] = json::parse(m.config_json);
    auto stages = json::array();
    for (const auto& s : m.stages) stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
    j["stages"] = stages;
    j["inputs"] = m.input_digests;
    j["outputs"] = m.output_digests;
    return j.dump(2) + "\n";
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path);
    uint64_t hash = 0xcbf29ce484222325ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

std::string resolve_outdir(const std::string& outdir) {
    fs::path p(outdir);
    if (p.is_absolute()) return outdir;
    const char* root = std::getenv("TANGLE_WORKDIR");
    if (root && *root) return (fs::path(root) / p).string();
    return outdir;
}

SynthOutcome run_synth(const PipelineConfig& cfg) {
    SynthOutcome outcome;
    outcome.manifest.config_json = config_to_json(cfg);
    StageClock clock(outcome.manifest);

    const fs::path outdir = resolve_outdir(cfg.outdir);
    if (!outdir.parent_path().empty() && !fs::exists(outdir.parent_path())) {
        throw std::runtime_error("output directory parent does not exist: " +
                                 outdir.parent_path().string());
    }

    outcome.population = clock.run("synth", [&] {
        return generate_population(cfg.synth, cfg.founder_length, cfg.seed);
    });

    clock.run("write", [&] {
        fs::create_directories(outdir);
        std::vector<FastaRecord> records;
        for (const auto& g : outcome.population) records.push_back({g.id, g.sequence});
        outcome.population_fasta = (outdir / "population.fa").string();
        write_fasta_file(outcome.population_fasta, records);
        for (const auto& g : outcome.population) {
            write_text_file((outdir / (g.id + ".events.json")).string(), events_to_json(g));
        }
    });
    outcome.manifest.output_digests[outcome.population_fasta] =
        digest_file(outcome.population_fasta);
    write_text_file((outdir / "manifest.json").string(), manifest_to_json(outcome.manifest));
    return outcome;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
    if (cfg.gfa_path.empty()) throw std::runtime_error("pipeline requires a pangenome GFA path");
    PipelineOutcome outcome;
    outcome.manifest.config_json = config_to_json(cfg);
    StageClock clock(outcome.manifest);
    const fs::path outdir = resolve_outdir(cfg.outdir);
    fs::create_directories(outdir);

    auto track_input = [&](const std::string& path) {
        if (!path.empty()) outcome.manifest.input_digests[path] = digest_file(path);
    };
    auto track_output = [&](const std::string& path) {
        outcome.manifest.output_digests[path] = digest_file(path);
    };

    track_input(cfg.gfa_path);
    track_input(cfg.reads_path);
    track_input(cfg.truth_path);
    track_input(cfg.nodeseq_path);

    AnnotatedGraph graph = clock.run("load", [&] {
        return graph_from_gfa(read_gfa_file(cfg.gfa_path), cfg.k);
    });

    if (!cfg.reads_path.empty()) {
        graph = clock.run("annotate", [&] {
            auto reads = read_fasta_file(cfg.reads_path);
            std::map<std::string, std::vector<std::string>> variants;
            const std::map<std::string, std::vector<std::string>>* variants_ptr = nullptr;
            if (!cfg.nodeseq_path.empty()) {
                variants = read_nodeseq_file(cfg.nodeseq_path);
                variants_ptr = &variants;
            }
            KmerIndex idx = build_kmer_index(graph, cfg.k, variants_ptr);
            NodeHits hits = annotate_reads(reads, idx, graph);
            return apply_annotation(graph, hits);
        });
        const std::string annotated_path = (outdir / "annotated.gfa").string();
        write_gfa_file(annotated_path, graph_to_gfa(graph));
        track_output(annotated_path);
    }

    graph = clock.run("normalize", [&] {
        return normalize_copy_numbers(graph, cfg.sequencing_depth, cfg.use_expected_unique);
    });

    if (cfg.trim) {
        graph = clock.run("trim", [&] { return trim_zero_weight_edges(graph); });
        const std::string trimmed_path = (outdir / "trimmed.gfa").string();
        write_gfa_file(trimmed_path, graph_to_gfa(graph));
        track_output(trimmed_path);
    }
    outcome.graph = graph;

    if (cfg.solver == "oracle-walk") {
        const int T = qubo_horizon(graph, cfg.alpha);
        WalkSolveResult best = clock.run("solve", [&] {
            return solve_exhaustive_walks(graph, cfg.kind, T);
        });
        outcome.solver_energy = best.cost;
        if (!best.walk.empty()) outcome.segments.push_back(best.walk);
        if (cfg.kind == ProblemKind::diploid && !best.second.empty()) {
            outcome.segments.push_back(best.second);
        }
    } else {
        QuboModel model = clock.run("build", [&] {
            return build_qubo(graph, cfg.kind, cfg.alpha, cfg.lambda1, cfg.lambda2);
        });
        const std::string model_path = (outdir / "model.qubo").string();
        write_qubo_model_file(model_path, model);
        const std::string layout_path = (outdir / "layout.json").string();
        write_text_file(layout_path, layout_to_json(model.layout()));
        track_output(model_path);
        track_output(layout_path);

        BitVector best_x;
        if (cfg.solver == "oracle-bits") {
            SolveResult r = clock.run("solve", [&] { return solve_exhaustive_bits(model); });
            best_x = r.best_x;
            outcome.solver_energy = r.best_energy;
            write_text_file((outdir / "result.json").string(), solve_result_to_json(r));
        } else if (cfg.solver == "tabu") {
            SolveResult r = clock.run("solve", [&] { return solve_tabu(model, cfg.solver_params); });
            best_x = r.best_x;
            outcome.solver_energy = r.best_energy;
            write_text_file((outdir / "result.json").string(), solve_result_to_json(r));
        } else if (cfg.solver == "anneal") {
            SolveResult r = clock.run("solve", [&] { return solve_anneal(model, cfg.solver_params); });
            best_x = r.best_x;
            outcome.solver_energy = r.best_energy;
            write_text_file((outdir / "result.json").string(), solve_result_to_json(r));
        } else if (cfg.solver == "qaoa") {
            QaoaResult r = clock.run("solve", [&] {
                return optimize_qaoa(model, cfg.qaoa_layers, cfg.qaoa_shots, cfg.qaoa_max_iters,
                                     cfg.qaoa_alpha_cvar, cfg.solver_params.seed, cfg.qaoa_qubit_cap);
            });
            best_x = r.best_sample;
            outcome.solver_energy = r.best_energy;
            SolveResult as_result;
            as_result.best_x = r.best_sample;
            as_result.best_energy = r.best_energy;
            as_result.seed = cfg.solver_params.seed;
            write_text_file((outdir / "result.json").string(), solve_result_to_json(as_result));
        } else {
            throw std::runtime_error("unknown solver '" + cfg.solver + "'");
        }
        track_output((outdir / "result.json").string());

        DecodeReport decoded = clock.run("decode", [&] {
            return decode_assignment(graph, model.layout(), best_x, DecodeMode::repair);
        });
        for (const auto& path_segments : decoded.path_segments) {
            for (const auto& seg : path_segments) outcome.segments.push_back(seg);
        }
    }

    clock.run("extract", [&] {
        json walks = json::array();
        std::vector<FastaRecord> contigs;
        for (size_t s = 0; s < outcome.segments.size(); ++s) {
            outcome.contigs.push_back(extract_sequence(graph, outcome.segments[s]));
            contigs.push_back({"contig_" + std::to_string(s), outcome.contigs.back()});
            walks.push_back(render_path_string(outcome.segments[s]));
        }
        write_fasta_file((outdir / "contigs.fa").string(), contigs);
        write_text_file((outdir / "walks.json").string(),
                        json{{"segments", walks}}.dump(2) + "\n");
    });
    track_output((outdir / "contigs.fa").string());
    track_output((outdir / "walks.json").string());

    if (!cfg.truth_path.empty()) {
        outcome.report = clock.run("evaluate", [&] {
            auto truth_records = read_fasta_file(cfg.truth_path);
            if (truth_records.empty()) throw std::runtime_error("truth FASTA is empty");
            return evaluate(truth_records.front().seq, outcome.contigs);
        });
        write_text_file((outdir / "report.json").string(), eval_report_to_json(*outcome.report));
        write_text_file((outdir / "report.tsv").string(), eval_report_to_tsv(*outcome.report, true));
        track_output((outdir / "report.json").string());
        track_output((outdir / "report.tsv").string());
    }

    write_text_file((outdir / "manifest.json").string(), manifest_to_json(outcome.manifest));
    return outcome;
}

}  // namespace tangle
