#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tangle/fasta.hpp"

namespace tangle {

// Per-base event rates, all in [0, 1]. Structural rates are expected events
// per base; point_substitution is a plain per-base probability.
struct MutationRates {
    double point_substitution = 0.0;
    double str_event = 0.0;        // tandem-repeat expansion/contraction
    double cnv_event = 0.0;        // segment duplication/deletion
    double short_repeat_insertion = 0.0;  // 50-500 bp library elements
    double long_repeat_insertion = 0.0;   // 2-10 kb library elements
    double translocation = 0.0;
    double inversion = 0.0;
};

struct MutationConfig {
    MutationRates founder_rates;
    MutationRates descendant_rates;  // must not exceed founder rates
    int generations = 10;
    int population_size = 100;
};

// One applied mutation. kind records the biological event; op/pos/len/dest/
// payload are the mechanical edit, sufficient to replay the event on the
// parent sequence.
struct MutationEvent {
    std::string kind;  // point|str_expand|str_contract|cnv_dup|cnv_del|
                       // repeat_short|repeat_long|translocation|inversion
    std::string op;    // substitute|insert|delete|invert|move
    int64_t pos = 0;
    int64_t len = 0;
    int64_t dest = 0;        // move target (position after excision)
    std::string payload;     // inserted sequence or substituted base
};

struct Genome {
    std::string id;
    std::string sequence;
    std::optional<std::string> parent;  // none for the founder
    int generation = 0;
    std::vector<MutationEvent> events;
};

// Applies one event to a sequence; the replay primitive used by both the
// generator and the event-log oracle tests.
void apply_event(std::string& seq, const MutationEvent& event);
std::string replay_events(std::string parent_seq, const std::vector<MutationEvent>& events);

// Builds a founder from a uniform random base string plus founder-rate
// events, then derives each later member from a uniformly chosen earlier-
// generation member with descendant-rate events. Fully deterministic given
// the seed.
std::vector<Genome> generate_population(const MutationConfig& cfg, int64_t founder_length,
                                        uint64_t seed);

struct ReadSet {
    std::vector<FastaRecord> reads;
    std::string source_genome;
    double coverage = 0.0;
    double error_rate = 0.0;
    int64_t read_length = 0;
    uint64_t seed = 0;
};

// ceil(coverage * |seq| / read_length) single-end reads, uniform start and
// strand, independent per-base substitution errors, no indels.
ReadSet simulate_reads(const Genome& g, double coverage, int64_t read_length, double error_rate,
                       uint64_t seed);

std::string events_to_json(const Genome& g);
std::vector<MutationEvent> events_from_json(const std::string& text);

}  // namespace tangle
