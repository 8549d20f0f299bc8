"""Smoke tests for the tanglekit python bindings."""

import math

import pytest

import tanglekit as tk


GFA = (
    "S\tA\tACGTACGTTTACGGATTACA\tKC:i:32\n"
    "S\tB\tTTGACCATGGTTCAGGCCAA\tKC:i:32\n"
    "S\tC\tGGTTCATTGCAGGACCATAC\tKC:i:64\n"
    "L\tA\t+\tB\t+\t0M\tEC:i:3\n"
    "L\tB\t+\tC\t+\t0M\tEC:i:3\n"
    "L\tC\t+\tC\t+\t0M\tEC:i:1\n"
)


def small_graph():
    g = tk.graph_from_gfa_text(GFA, 5)
    return tk.normalize_copy_numbers(g, 2.0)


def test_graph_loading_and_weights():
    g = small_graph()
    assert g.node_count() == 3
    assert g.node_ids() == ["A", "B", "C"]
    assert g.weight("A") == pytest.approx(1.0)
    assert g.weight("C") == pytest.approx(2.0)
    assert ("A", "+", "B", "+", 3) in g.edges()


def test_reverse_complement():
    assert tk.reverse_complement("AACG") == "CGTT"
    assert tk.reverse_complement("ACGT") == "ACGT"


def test_costs_and_validity():
    g = small_graph()
    walk = [("A", "+"), ("B", "+"), ("C", "+"), ("C", "+")]
    assert tk.is_valid_walk(g, walk)
    assert tk.cost_oriented(g, walk) == 0.0
    assert tk.cost_tangle(g, [("A", "+")]) > 0.0


def test_qubo_encode_solve_decode_roundtrip():
    g = small_graph()
    m = tk.build_qubo(g, "oriented")
    walk = [("A", "+"), ("B", "+"), ("C", "+"), ("C", "+")]
    x = tk.encode_walk(m, walk)
    assert m.energy(x) == 0.0

    result = tk.solve_tabu(m, seed=12, max_flips=300000, restarts=6)
    assert result["best_energy"] == 0.0
    decoded = tk.decode(g, m, result["best_x"], mode="strict")
    assert decoded["segments"] == 1
    seq = tk.extract_sequence(g, decoded["paths"][0][0])
    truth = tk.extract_sequence(g, walk)
    assert seq in (truth, tk.reverse_complement(truth))

    # the tangle encoding of the same graph is small enough to enumerate
    mt = tk.build_qubo(g, "tangle")
    assert tk.solve_exhaustive_bits(mt)["best_energy"] == 0.0


def test_tabu_matches_oracle():
    g = small_graph()
    m = tk.build_qubo(g, "oriented")
    tabu = tk.solve_tabu(m, seed=3, max_flips=200000, restarts=5)
    assert tabu["best_energy"] == 0.0


def test_walk_oracle():
    g = small_graph()
    r = tk.solve_exhaustive_walks(g, "oriented", m_horizon(g))
    assert r["cost"] == 0.0


def m_horizon(g):
    return tk.build_qubo(g, "oriented").horizon()


def test_qaoa_runs_and_improves():
    g = tk.graph_from_gfa_text(
        "S\ta\tACGTACGTTTACGGATTACA\tKC:i:16\n"
        "S\tb\tTTGACCATGGTTCAGGCCAA\tKC:i:16\n"
        "L\ta\t+\tb\t+\t0M\n",
        5,
    )
    g = tk.normalize_copy_numbers(g, 1.0)
    m = tk.build_qubo(g, "tangle")
    assert m.n() <= 16
    r = tk.optimize_qaoa(m, p=2, shots=500, max_iters=40, alpha_cvar=0.1, seed=7)
    assert len(r["gammas"]) == 2
    assert r["best_energy"] == 0.0


def test_synth_and_reads():
    population = tk.generate_population(population_size=4, generations=2,
                                        founder_length=12000, seed=11)
    assert len(population) == 4
    assert population[0]["parent"] is None
    reads = tk.simulate_reads("g0", population[0]["sequence"], coverage=2.0,
                              read_length=100, error_rate=0.0, seed=5)
    assert len(reads) == math.ceil(2.0 * len(population[0]["sequence"]) / 100)


def test_annotate_and_evaluate():
    g = small_graph()
    truth = tk.extract_sequence(g, [("A", "+"), ("B", "+"), ("C", "+"), ("C", "+")])
    report = tk.evaluate(truth, [truth])
    assert report["pct_identity"] == 100.0
    assert report["contigs"] == 1

    reads = tk.simulate_reads("t", truth * 10, coverage=10.0, read_length=30,
                              error_rate=0.0, seed=9)
    annotated = tk.annotate_graph(g, reads, k=11)
    assert annotated.kmer_count("A") >= 0  # annotation ran end to end


def test_path_strings():
    walk = [("s1", "+"), ("s2", "-")]
    assert tk.render_path_string(walk) == ">s1<s2"
    assert tk.parse_path_string(">s1<s2") == walk
