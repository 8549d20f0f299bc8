#include "tangle/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "tangle/dna.hpp"
#include "tangle/rng.hpp"

namespace tangle {

namespace {

constexpr int64_t kStrUnitMin = 2, kStrUnitMax = 6;
constexpr int64_t kStrCopiesMax = 5;
constexpr int64_t kCnvMin = 100, kCnvMax = 5000;
constexpr int64_t kShortRepeatMin = 50, kShortRepeatMax = 500;
constexpr int64_t kLongRepeatMin = 2000, kLongRepeatMax = 10000;
constexpr int64_t kSegmentMin = 100, kSegmentMax = 5000;  // translocation/inversion

const char kBases[4] = {'A', 'C', 'G', 'T'};

std::string random_dna(Rng& rng, int64_t length) {
    std::string s(length, 'A');
    for (auto& c : s) c = kBases[rng.below(4)];
    return s;
}

char random_other_base(Rng& rng, char current) {
    while (true) {
        char c = kBases[rng.below(4)];
        if (c != current) return c;
    }
}

int64_t uniform_range(Rng& rng, int64_t lo, int64_t hi) {  // inclusive
    return lo + static_cast<int64_t>(rng.below(static_cast<uint64_t>(hi - lo + 1)));
}

void check_rates(const MutationRates& r, const char* label) {
    for (double v : {r.point_substitution, r.str_event, r.cnv_event, r.short_repeat_insertion,
                     r.long_repeat_insertion, r.translocation, r.inversion}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string(label) + " rates must lie in [0, 1]");
        }
    }
}

// Elements shared by the whole population so insertions create true repeats.
struct RepeatLibrary {
    std::vector<std::string> short_elements;
    std::vector<std::string> long_elements;

    static RepeatLibrary build(uint64_t seed) {
        Rng rng = Rng::keyed({seed, 0x11b});
        RepeatLibrary lib;
        for (int i = 0; i < 4; ++i) {
            lib.short_elements.push_back(
                random_dna(rng, uniform_range(rng, kShortRepeatMin, kShortRepeatMax)));
        }
        for (int i = 0; i < 2; ++i) {
            lib.long_elements.push_back(
                random_dna(rng, uniform_range(rng, kLongRepeatMin, kLongRepeatMax)));
        }
        return lib;
    }
};

class Mutator {
  public:
    Mutator(std::string& seq, std::vector<MutationEvent>& log, const RepeatLibrary& lib, Rng rng)
        : seq_(seq), log_(log), lib_(lib), rng_(std::move(rng)) {}

    void apply_all(const MutationRates& rates) {
        // structural events first, point substitutions last
        insert_repeats(rates.short_repeat_insertion, lib_.short_elements, "repeat_short");
        insert_repeats(rates.long_repeat_insertion, lib_.long_elements, "repeat_long");
        cnv_events(rates.cnv_event);
        str_events(rates.str_event);
        translocations(rates.translocation);
        inversions(rates.inversion);
        point_substitutions(rates.point_substitution);
    }

  private:
    int64_t len() const { return static_cast<int64_t>(seq_.size()); }

    void emit(MutationEvent event) {
        apply_event(seq_, event);
        log_.push_back(std::move(event));
    }

    void insert_repeats(double rate, const std::vector<std::string>& elements,
                        const char* kind) {
        if (elements.empty()) return;
        int count = rng_.poisson(rate * static_cast<double>(len()));
        for (int i = 0; i < count; ++i) {
            const std::string& element = elements[rng_.below(elements.size())];
            int64_t pos = uniform_range(rng_, 0, len());
            emit({kind, "insert", pos, 0, 0, element});
        }
    }

    void cnv_events(double rate) {
        int count = rng_.poisson(rate * static_cast<double>(len()));
        for (int i = 0; i < count; ++i) {
            int64_t size = std::min(uniform_range(rng_, kCnvMin, kCnvMax), len() / 2);
            if (size < 1) continue;
            int64_t pos = uniform_range(rng_, 0, len() - size);
            if (rng_.next() & 1) {
                // tandem duplication
                emit({"cnv_dup", "insert", pos + size, 0, 0,
                      seq_.substr(static_cast<size_t>(pos), static_cast<size_t>(size))});
            } else {
                emit({"cnv_del", "delete", pos, size, 0, {}});
            }
        }
    }

    void str_events(double rate) {
        int count = rng_.poisson(rate * static_cast<double>(len()));
        for (int i = 0; i < count; ++i) {
            int64_t unit = uniform_range(rng_, kStrUnitMin, kStrUnitMax);
            if (len() < 2 * unit) continue;
            int64_t pos = uniform_range(rng_, 0, len() - 2 * unit);
            std::string u = seq_.substr(static_cast<size_t>(pos), static_cast<size_t>(unit));
            bool tandem = seq_.compare(static_cast<size_t>(pos + unit),
                                       static_cast<size_t>(unit), u) == 0;
            if (tandem) {
                emit({"str_contract", "delete", pos, unit, 0, {}});
            } else {
                int64_t copies = uniform_range(rng_, 1, kStrCopiesMax);
                std::string expansion;
                for (int64_t c = 0; c < copies; ++c) expansion += u;
                emit({"str_expand", "insert", pos + unit, 0, 0, expansion});
            }
        }
    }

    void translocations(double rate) {
        int count = rng_.poisson(rate * static_cast<double>(len()));
        for (int i = 0; i < count; ++i) {
            int64_t size = std::min(uniform_range(rng_, kSegmentMin, kSegmentMax), len() / 4);
            if (size < 1 || len() - size < 1) continue;
            int64_t pos = uniform_range(rng_, 0, len() - size);
            int64_t dest = uniform_range(rng_, 0, len() - size);
            if (dest == pos) continue;
            emit({"translocation", "move", pos, size, dest, {}});
        }
    }

    void inversions(double rate) {
        int count = rng_.poisson(rate * static_cast<double>(len()));
        for (int i = 0; i < count; ++i) {
            int64_t size = std::min(uniform_range(rng_, kSegmentMin, kSegmentMax), len() / 2);
            if (size < 1) continue;
            int64_t pos = uniform_range(rng_, 0, len() - size);
            emit({"inversion", "invert", pos, size, 0, {}});
        }
    }

    void point_substitutions(double rate) {
        if (rate <= 0.0) return;
        for (int64_t pos = 0; pos < len(); ++pos) {
            if (!rng_.chance(rate)) continue;
            char replacement = random_other_base(rng_, seq_[static_cast<size_t>(pos)]);
            emit({"point", "substitute", pos, 0, 0, std::string(1, replacement)});
        }
    }

    std::string& seq_;
    std::vector<MutationEvent>& log_;
    const RepeatLibrary& lib_;
    Rng rng_;
};

}  // namespace

void apply_event(std::string& seq, const MutationEvent& event) {
    const int64_t n = static_cast<int64_t>(seq.size());
    if (event.op == "substitute") {
        if (event.pos < 0 || event.pos >= n || event.payload.size() != 1) {
            throw std::invalid_argument("bad substitute event");
        }
        seq[static_cast<size_t>(event.pos)] = event.payload[0];
    } else if (event.op == "insert") {
        if (event.pos < 0 || event.pos > n) throw std::invalid_argument("bad insert event");
        seq.insert(static_cast<size_t>(event.pos), event.payload);
    } else if (event.op == "delete") {
        if (event.pos < 0 || event.len < 0 || event.pos + event.len > n) {
            throw std::invalid_argument("bad delete event");
        }
        seq.erase(static_cast<size_t>(event.pos), static_cast<size_t>(event.len));
    } else if (event.op == "invert") {
        if (event.pos < 0 || event.len < 0 || event.pos + event.len > n) {
            throw std::invalid_argument("bad invert event");
        }
        std::string segment = seq.substr(static_cast<size_t>(event.pos), static_cast<size_t>(event.len));
        std::string rc = reverse_complement(segment);
        seq.replace(static_cast<size_t>(event.pos), static_cast<size_t>(event.len), rc);
    } else if (event.op == "move") {
        if (event.pos < 0 || event.len < 0 || event.pos + event.len > n) {
            throw std::invalid_argument("bad move event");
        }
        std::string segment = seq.substr(static_cast<size_t>(event.pos), static_cast<size_t>(event.len));
        seq.erase(static_cast<size_t>(event.pos), static_cast<size_t>(event.len));
        if (event.dest < 0 || event.dest > static_cast<int64_t>(seq.size())) {
            throw std::invalid_argument("bad move destination");
        }
        seq.insert(static_cast<size_t>(event.dest), segment);
    } else {
        throw std::invalid_argument("unknown event op '" + event.op + "'");
    }
}

std::string replay_events(std::string parent_seq, const std::vector<MutationEvent>& events) {
    for (const auto& e : events) apply_event(parent_seq, e);
    return parent_seq;
}

std::vector<Genome> generate_population(const MutationConfig& cfg, int64_t founder_length,
                                        uint64_t seed) {
    if (cfg.population_size < 2) throw std::invalid_argument("population size must be >= 2");
    if (cfg.generations < 1) throw std::invalid_argument("generations must be >= 1");
    check_rates(cfg.founder_rates, "founder");
    check_rates(cfg.descendant_rates, "descendant");
    {
        const auto& f = cfg.founder_rates;
        const auto& d = cfg.descendant_rates;
        bool ok = d.point_substitution <= f.point_substitution && d.str_event <= f.str_event &&
                  d.cnv_event <= f.cnv_event &&
                  d.short_repeat_insertion <= f.short_repeat_insertion &&
                  d.long_repeat_insertion <= f.long_repeat_insertion &&
                  d.translocation <= f.translocation && d.inversion <= f.inversion;
        if (!ok) throw std::invalid_argument("descendant rates must not exceed founder rates");
    }
    int64_t largest_event = 1;
    if (cfg.founder_rates.cnv_event > 0) largest_event = std::max(largest_event, kCnvMin);
    if (cfg.founder_rates.translocation > 0 || cfg.founder_rates.inversion > 0) {
        largest_event = std::max(largest_event, kSegmentMin);
    }
    if (cfg.founder_rates.str_event > 0) largest_event = std::max(largest_event, 2 * kStrUnitMax);
    if (founder_length < 2 * largest_event) {
        throw std::invalid_argument("founder length " + std::to_string(founder_length) +
                                    " too small for the configured event sizes");
    }

    RepeatLibrary lib = RepeatLibrary::build(seed);
    std::vector<Genome> population;
    population.reserve(cfg.population_size);

    auto genome_id = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "g%03d", i);
        return std::string(buf);
    };

    {
        Rng rng = Rng::keyed({seed, 0, 0xf0});
        Genome founder;
        founder.id = genome_id(0);
        founder.generation = 0;
        founder.sequence = random_dna(rng, founder_length);
        Mutator mutator(founder.sequence, founder.events, lib, rng.fork(0xe));
        mutator.apply_all(cfg.founder_rates);
        population.push_back(std::move(founder));
    }

    const int descendants = cfg.population_size - 1;
    for (int i = 1; i < cfg.population_size; ++i) {
        Rng rng = Rng::keyed({seed, static_cast<uint64_t>(i), 0xf0});
        // members are spread over the configured generations; parents come
        // from strictly earlier generations
        int generation = 1 + static_cast<int>((static_cast<int64_t>(i - 1) * cfg.generations) /
                                              std::max(1, descendants));
        generation = std::min(generation, cfg.generations);
        std::vector<int> candidates;
        for (int k = 0; k < i; ++k) {
            if (population[k].generation < generation) candidates.push_back(k);
        }
        int parent = candidates[rng.below(candidates.size())];
        Genome child;
        child.id = genome_id(i);
        child.generation = generation;
        child.parent = population[parent].id;
        child.sequence = population[parent].sequence;
        Mutator mutator(child.sequence, child.events, lib, rng.fork(0xe));
        mutator.apply_all(cfg.descendant_rates);
        population.push_back(std::move(child));
    }
    return population;
}

ReadSet simulate_reads(const Genome& g, double coverage, int64_t read_length, double error_rate,
                       uint64_t seed) {
    const int64_t n = static_cast<int64_t>(g.sequence.size());
    if (read_length < 1) throw std::invalid_argument("read length must be positive");
    if (read_length > n) throw std::invalid_argument("read length exceeds genome length");
    if (!(coverage > 0.0)) throw std::invalid_argument("coverage must be positive");
    if (!(error_rate >= 0.0 && error_rate < 1.0)) {
        throw std::invalid_argument("error rate must lie in [0, 1)");
    }

    ReadSet set;
    set.source_genome = g.id;
    set.coverage = coverage;
    set.error_rate = error_rate;
    set.read_length = read_length;
    set.seed = seed;

    const int64_t count = static_cast<int64_t>(
        std::ceil(coverage * static_cast<double>(n) / static_cast<double>(read_length)));
    set.reads.reserve(count);
    Rng base = Rng::keyed({seed, 0x2ead});
    for (int64_t i = 0; i < count; ++i) {
        Rng rng = base.fork(static_cast<uint64_t>(i));
        int64_t start = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n - read_length + 1)));
        std::string read = g.sequence.substr(static_cast<size_t>(start),
                                             static_cast<size_t>(read_length));
        bool reverse = rng.next() & 1;
        if (reverse) read = reverse_complement(read);
        if (error_rate > 0.0) {
            for (auto& c : read) {
                if (rng.chance(error_rate)) c = random_other_base(rng, c);
            }
        }
        set.reads.push_back({g.id + "_r" + std::to_string(i), std::move(read)});
    }
    return set;
}

std::string events_to_json(const Genome& g) {
    nlohmann::json j;
    j["id"] = g.id;
    if (g.parent) j["parent"] = *g.parent;
    j["generation"] = g.generation;
    j["length"] = g.sequence.size();
    auto events = nlohmann::json::array();
    for (const auto& e : g.events) {
        nlohmann::json je;
        je["kind"] = e.kind;
        je["op"] = e.op;
        je["pos"] = e.pos;
        if (e.len != 0) je["len"] = e.len;
        if (e.op == "move") je["dest"] = e.dest;
        if (!e.payload.empty()) je["payload"] = e.payload;
        events.push_back(std::move(je));
    }
    j["events"] = std::move(events);
    return j.dump(2) + "\n";
}

std::vector<MutationEvent> events_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<MutationEvent> events;
    for (const auto& je : j.at("events")) {
        MutationEvent e;
        e.kind = je.at("kind").get<std::string>();
        e.op = je.at("op").get<std::string>();
        e.pos = je.at("pos").get<int64_t>();
        e.len = je.value("len", int64_t{0});
        e.dest = je.value("dest", int64_t{0});
        e.payload = je.value("payload", std::string{});
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace tangle
