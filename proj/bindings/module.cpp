#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "tangle/assembly.hpp"
#include "tangle/evaluate.hpp"
#include "tangle/kmer.hpp"
#include "tangle/pipeline.hpp"
#include "tangle/qaoa.hpp"
#include "tangle/solvers.hpp"

namespace py = pybind11;
using namespace tangle;

namespace {

ProblemKind kind_of(const std::string& name) {
    auto kind = problem_kind_from_name(name);
    if (!kind) throw std::invalid_argument("unknown problem kind '" + name + "'");
    return *kind;
}

using PyWalk = std::vector<std::pair<std::string, std::string>>;

Walk walk_of(const PyWalk& steps) {
    Walk w;
    for (const auto& [node, orient] : steps) {
        if (orient != "+" && orient != "-") {
            throw std::invalid_argument("orientation must be '+' or '-'");
        }
        w.push_back({node, orient == "+" ? Strand::fwd : Strand::rev});
    }
    return w;
}

PyWalk walk_to_py(const Walk& w) {
    PyWalk out;
    for (const auto& step : w) {
        out.emplace_back(step.node, std::string(1, strand_char(step.strand)));
    }
    return out;
}

py::dict report_to_py(const EvalReport& r) {
    py::dict d;
    d["pct_covered"] = r.pct_covered;
    d["pct_used"] = r.pct_used;
    d["contigs"] = r.contigs;
    d["breaks"] = r.breaks;
    d["indels_ge10"] = r.indels_ge10;
    d["diff_regions"] = r.diff_regions;
    d["pct_identity"] = r.pct_identity;
    return d;
}

py::dict solve_result_to_py(const SolveResult& r) {
    py::dict d;
    d["best_x"] = r.best_x;
    d["best_energy"] = r.best_energy;
    d["restarts_completed"] = r.restarts_completed;
    d["seed"] = r.seed;
    d["flips"] = r.flips;
    d["seconds"] = r.seconds;
    return d;
}

SolverParams params_of(uint64_t seed, double time_limit, uint64_t max_flips, int restarts,
                       int tenure, double t_start, double t_end, uint64_t sweeps) {
    SolverParams p;
    p.seed = seed;
    p.time_limit = time_limit;
    p.max_flips = max_flips;
    p.restarts = restarts;
    p.tabu_tenure = tenure;
    p.anneal_t_start = t_start;
    p.anneal_t_end = t_end;
    p.anneal_sweeps = sweeps;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pangenome-guided assembly: graphs, QUBO encodings, solvers, QAOA simulation";
    m.attr("__version__") = kToolVersion;

    py::class_<AnnotatedGraph>(m, "AnnotatedGraph")
        .def("node_count", &AnnotatedGraph::node_count)
        .def("node_ids",
             [](const AnnotatedGraph& g) {
                 std::vector<std::string> ids;
                 for (const auto& n : g.nodes()) ids.push_back(n.id);
                 return ids;
             })
        .def("sequence",
             [](const AnnotatedGraph& g, const std::string& id) {
                 return g.node(g.require_node(id)).sequence;
             })
        .def("kmer_count",
             [](const AnnotatedGraph& g, const std::string& id) {
                 return g.node(g.require_node(id)).kmer_count;
             })
        .def("weight",
             [](const AnnotatedGraph& g, const std::string& id) {
                 return g.node(g.require_node(id)).weight;
             })
        .def("set_weight",
             [](AnnotatedGraph& g, const std::string& id, double w) {
                 g.set_weight(g.require_node(id), w);
             })
        .def("baseline_depth", &AnnotatedGraph::baseline_depth)
        .def("edges", [](const AnnotatedGraph& g) {
            std::vector<std::tuple<std::string, std::string, std::string, std::string, int64_t>> out;
            for (const auto& e : g.edges()) {
                out.emplace_back(g.node(e.from.idx).id, std::string(1, strand_char(e.from.strand)),
                                 g.node(e.to.idx).id, std::string(1, strand_char(e.to.strand)),
                                 e.count);
            }
            return out;
        });

    m.def("load_gfa", [](const std::string& path, int k) {
        return graph_from_gfa(read_gfa_file(path), k);
    }, py::arg("path"), py::arg("k") = 21);
    m.def("graph_from_gfa_text", [](const std::string& text, int k) {
        return graph_from_gfa(parse_gfa(text), k);
    }, py::arg("text"), py::arg("k") = 21);
    m.def("graph_to_gfa_text", [](const AnnotatedGraph& g) { return write_gfa(graph_to_gfa(g)); });

    m.def("reverse_complement", [](const std::string& s) { return reverse_complement(s); });
    m.def("normalize_copy_numbers", &normalize_copy_numbers, py::arg("graph"),
          py::arg("sequencing_depth") = std::nullopt, py::arg("use_expected_unique") = false);
    m.def("trim_zero_weight_edges", &trim_zero_weight_edges);

    m.def("is_valid_walk", [](const AnnotatedGraph& g, const PyWalk& w, const std::string& kind) {
        return is_valid_walk(g, walk_of(w), kind_of(kind));
    }, py::arg("graph"), py::arg("walk"), py::arg("kind") = "oriented");
    m.def("cost_tangle", [](const AnnotatedGraph& g, const PyWalk& w) {
        return cost_tangle(g, walk_of(w));
    });
    m.def("cost_oriented", [](const AnnotatedGraph& g, const PyWalk& w) {
        return cost_oriented(g, walk_of(w));
    });
    m.def("cost_diploid", [](const AnnotatedGraph& g, const PyWalk& w1, const PyWalk& w2) {
        return cost_diploid(g, {walk_of(w1), walk_of(w2)});
    });
    m.def("cost_length_weighted", [](const AnnotatedGraph& g, const PyWalk& w) {
        return cost_length_weighted(g, walk_of(w));
    });

    py::class_<QuboModel>(m, "QuboModel")
        .def("n", &QuboModel::n)
        .def("offset", &QuboModel::offset)
        .def("horizon", [](const QuboModel& m_) { return m_.layout().horizon; })
        .def("kind", [](const QuboModel& m_) {
            return std::string(problem_kind_name(m_.layout().kind));
        })
        .def("energy", [](const QuboModel& m_, const std::vector<int>& x) {
            BitVector bits(x.begin(), x.end());
            return m_.energy(bits);
        })
        .def("layout_json", [](const QuboModel& m_) { return layout_to_json(m_.layout()); })
        .def("to_text", [](const QuboModel& m_) {
            std::ostringstream out;
            write_qubo_model(out, m_);
            return out.str();
        });

    m.def("build_qubo", [](const AnnotatedGraph& g, const std::string& kind, double alpha,
                           double lambda1, double lambda2) {
        return build_qubo(g, kind_of(kind), alpha, lambda1, lambda2);
    }, py::arg("graph"), py::arg("kind") = "oriented", py::arg("alpha") = 1.2,
       py::arg("lambda1") = 10.0, py::arg("lambda2") = 5.0);

    m.def("encode_walk", [](const QuboModel& m_, const PyWalk& w) {
        return encode_walk(m_.layout(), walk_of(w));
    });
    m.def("encode_walk_pair", [](const QuboModel& m_, const PyWalk& w1, const PyWalk& w2) {
        return encode_walk_pair(m_.layout(), {walk_of(w1), walk_of(w2)});
    });

    m.def("decode", [](const AnnotatedGraph& g, const QuboModel& m_, const std::vector<int>& x,
                       const std::string& mode) {
        BitVector bits(x.begin(), x.end());
        DecodeReport rep = decode_assignment(
            g, m_.layout(), bits, mode == "strict" ? DecodeMode::strict : DecodeMode::repair);
        py::dict d;
        py::list paths;
        for (const auto& segments : rep.path_segments) {
            py::list path;
            for (const auto& seg : segments) path.append(walk_to_py(seg));
            paths.append(path);
        }
        d["paths"] = paths;
        d["segments"] = rep.total_segments();
        py::list violations;
        for (const auto& v : rep.violations) {
            violations.append(py::make_tuple(v.path, v.t, decode_violation_name(v.kind)));
        }
        d["violations"] = violations;
        return d;
    }, py::arg("graph"), py::arg("model"), py::arg("x"), py::arg("mode") = "repair");

    m.def("extract_sequence", [](const AnnotatedGraph& g, const PyWalk& w) {
        return extract_sequence(g, walk_of(w));
    });
    m.def("parse_path_string", [](const std::string& s) { return walk_to_py(parse_path_string(s)); });
    m.def("render_path_string", [](const PyWalk& w) { return render_path_string(walk_of(w)); });

    m.def("solve_exhaustive_bits", [](const QuboModel& m_) {
        return solve_result_to_py(solve_exhaustive_bits(m_));
    });
    m.def("solve_tabu", [](const QuboModel& m_, uint64_t seed, double time_limit,
                           uint64_t max_flips, int restarts, int tenure) {
        return solve_result_to_py(solve_tabu(
            m_, params_of(seed, time_limit, max_flips, restarts, tenure, 20.0, 0.05, 0)));
    }, py::arg("model"), py::arg("seed") = 1, py::arg("time_limit") = 5.0,
       py::arg("max_flips") = 0, py::arg("restarts") = 10, py::arg("tenure") = 0);
    m.def("solve_anneal", [](const QuboModel& m_, uint64_t seed, double time_limit,
                             uint64_t max_flips, int restarts, double t_start, double t_end,
                             uint64_t sweeps) {
        return solve_result_to_py(solve_anneal(
            m_, params_of(seed, time_limit, max_flips, restarts, 0, t_start, t_end, sweeps)));
    }, py::arg("model"), py::arg("seed") = 1, py::arg("time_limit") = 5.0,
       py::arg("max_flips") = 0, py::arg("restarts") = 10, py::arg("t_start") = 20.0,
       py::arg("t_end") = 0.05, py::arg("sweeps") = 0);
    m.def("solve_exhaustive_walks", [](const AnnotatedGraph& g, const std::string& kind, int T) {
        WalkSolveResult r = solve_exhaustive_walks(g, kind_of(kind), T);
        py::dict d;
        d["walk"] = walk_to_py(r.walk);
        d["second"] = walk_to_py(r.second);
        d["cost"] = r.cost;
        d["expanded"] = r.expanded;
        return d;
    }, py::arg("graph"), py::arg("kind"), py::arg("T"));

    m.def("optimize_qaoa", [](const QuboModel& m_, int p, int shots, int max_iters,
                              double alpha_cvar, uint64_t seed, int qubit_cap) {
        QaoaResult r = optimize_qaoa(m_, p, shots, max_iters, alpha_cvar, seed, qubit_cap);
        py::dict d;
        d["gammas"] = r.params.gammas;
        d["betas"] = r.params.betas;
        d["best_sample"] = r.best_sample;
        d["best_energy"] = r.best_energy;
        d["evaluations"] = r.evaluations;
        py::list trace;
        for (const auto& t : r.trace) {
            trace.append(py::make_tuple(t.evaluation, t.cvar_value, t.accepted_cvar, t.best_energy));
        }
        d["trace"] = trace;
        py::list final_energies;
        for (size_t i = 0; i < r.final_batch.samples.size(); ++i) {
            final_energies.append(py::make_tuple(r.final_batch.energies[i],
                                                 r.final_batch.samples[i].second));
        }
        d["final_energies"] = final_energies;
        return d;
    }, py::arg("model"), py::arg("p") = 2, py::arg("shots") = 1000, py::arg("max_iters") = 100,
       py::arg("alpha_cvar") = 0.1, py::arg("seed") = 1, py::arg("qubit_cap") = 20);

    m.def("generate_population", [](int population_size, int generations, int64_t founder_length,
                                    uint64_t seed, double founder_point, double founder_str,
                                    double founder_cnv, double founder_repeat_short,
                                    double founder_repeat_long, double founder_translocation,
                                    double founder_inversion, double descendant_scale) {
        MutationConfig cfg;
        cfg.population_size = population_size;
        cfg.generations = generations;
        cfg.founder_rates = {founder_point, founder_str, founder_cnv, founder_repeat_short,
                             founder_repeat_long, founder_translocation, founder_inversion};
        cfg.descendant_rates = {founder_point * descendant_scale, founder_str * descendant_scale,
                                founder_cnv * descendant_scale,
                                founder_repeat_short * descendant_scale,
                                founder_repeat_long * descendant_scale,
                                founder_translocation * descendant_scale,
                                founder_inversion * descendant_scale};
        auto population = generate_population(cfg, founder_length, seed);
        py::list out;
        for (const auto& g : population) {
            py::dict d;
            d["id"] = g.id;
            d["sequence"] = g.sequence;
            d["parent"] = g.parent ? py::cast(*g.parent) : py::none();
            d["generation"] = g.generation;
            d["events"] = g.events.size();
            out.append(d);
        }
        return out;
    }, py::arg("population_size") = 10, py::arg("generations") = 4,
       py::arg("founder_length") = 20000, py::arg("seed") = 1, py::arg("point") = 0.002,
       py::arg("str_rate") = 1e-4, py::arg("cnv") = 1e-4, py::arg("repeat_short") = 1e-4,
       py::arg("repeat_long") = 2e-5, py::arg("translocation") = 2e-5,
       py::arg("inversion") = 2e-5, py::arg("descendant_scale") = 0.1);

    m.def("simulate_reads", [](const std::string& name, const std::string& sequence,
                               double coverage, int64_t read_length, double error_rate,
                               uint64_t seed) {
        Genome g;
        g.id = name;
        g.sequence = sequence;
        ReadSet reads = simulate_reads(g, coverage, read_length, error_rate, seed);
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& r : reads.reads) out.emplace_back(r.name, r.seq);
        return out;
    }, py::arg("name"), py::arg("sequence"), py::arg("coverage") = 30.0,
       py::arg("read_length") = 100, py::arg("error_rate") = 0.002, py::arg("seed") = 1);

    m.def("annotate_graph", [](const AnnotatedGraph& g,
                               const std::vector<std::pair<std::string, std::string>>& reads,
                               int k) {
        std::vector<FastaRecord> records;
        for (const auto& [name, seq] : reads) records.push_back({name, seq});
        KmerIndex idx = build_kmer_index(g, k);
        NodeHits hits = annotate_reads(records, idx, g);
        return apply_annotation(g, hits);
    }, py::arg("graph"), py::arg("reads"), py::arg("k") = 21);

    m.def("evaluate", [](const std::string& truth, const std::vector<std::string>& contigs) {
        return report_to_py(evaluate(truth, contigs));
    });

    m.def("run_pipeline", [](const std::string& config_json) {
        PipelineOutcome outcome = run_pipeline(config_from_json(config_json));
        py::dict d;
        d["solver_energy"] = outcome.solver_energy;
        py::list segments;
        for (const auto& seg : outcome.segments) segments.append(walk_to_py(seg));
        d["segments"] = segments;
        d["contigs"] = outcome.contigs;
        if (outcome.report) d["report"] = report_to_py(*outcome.report);
        return d;
    });
}
