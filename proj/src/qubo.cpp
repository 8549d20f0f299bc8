#include "tangle/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tangle {

std::string pack_bits_hex(const BitVector& x) {
    std::string hex;
    hex.reserve((x.size() + 3) / 4);
    static const char* digits = "0123456789abcdef";
    for (size_t base = 0; base < x.size(); base += 4) {
        int nibble = 0;
        for (size_t b = 0; b < 4 && base + b < x.size(); ++b) {
            if (x[base + b]) nibble |= 1 << b;
        }
        hex += digits[nibble];
    }
    return hex;
}

BitVector unpack_bits_hex(const std::string& hex, size_t n) {
    if (hex.size() != (n + 3) / 4) {
        throw std::invalid_argument("hex assignment length mismatch");
    }
    BitVector x(n, 0);
    for (size_t i = 0; i < hex.size(); ++i) {
        char c = hex[i];
        int nibble;
        if (c >= '0' && c <= '9') nibble = c - '0';
        else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
        else throw std::invalid_argument("invalid hex digit in assignment");
        for (size_t b = 0; b < 4 && i * 4 + b < n; ++b) {
            x[i * 4 + b] = (nibble >> b) & 1;
        }
    }
    return x;
}

std::string layout_to_json(const VariableLayout& layout) {
    nlohmann::json j;
    j["kind"] = problem_kind_name(layout.kind);
    j["T"] = layout.horizon;
    j["alpha"] = layout.alpha;
    j["paths"] = layout.num_paths;
    j["nodes"] = layout.node_ids;
    j["slots_per_time"] = layout.slots_per_time();
    j["variables"] = layout.variable_count();
    return j.dump(2) + "\n";
}

VariableLayout layout_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    VariableLayout layout;
    auto kind = problem_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown problem kind in layout");
    layout.kind = *kind;
    layout.horizon = j.at("T").get<int>();
    layout.alpha = j.value("alpha", 1.2);
    layout.num_paths = j.at("paths").get<int>();
    layout.node_ids = j.at("nodes").get<std::vector<std::string>>();
    return layout;
}

void QuboModel::add_quadratic(int i, int j, double c) {
    if (i == j) throw std::invalid_argument("quadratic term needs distinct indices");
    if (i > j) std::swap(i, j);
    quad_acc_[static_cast<uint64_t>(i) << 32 | static_cast<uint32_t>(j)] += c;
}

void QuboModel::finalize() {
    quad_.clear();
    quad_.reserve(quad_acc_.size());
    for (const auto& [key, c] : quad_acc_) {
        if (c == 0.0) continue;
        quad_.emplace_back(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu), c);
    }
    quad_acc_.clear();
    std::sort(quad_.begin(), quad_.end());
    adj_.assign(n_, {});
    for (const auto& [i, j, c] : quad_) {
        adj_[i].emplace_back(j, c);
        adj_[j].emplace_back(i, c);
    }
}

double QuboModel::energy(const BitVector& x) const {
    if (static_cast<int>(x.size()) != n_) {
        throw std::invalid_argument("assignment length " + std::to_string(x.size()) +
                                    " does not match variable count " + std::to_string(n_));
    }
    double e = offset_;
    for (int i = 0; i < n_; ++i) {
        if (x[i]) e += linear_[i];
    }
    for (const auto& [i, j, c] : quad_) {
        if (x[i] && x[j]) e += c;
    }
    return e;
}

int64_t rounded_weight(double w) {
    if (!std::isfinite(w)) throw std::invalid_argument("non-finite node weight");
    // ties to even (FE_TONEAREST is the process default and never changed here)
    return static_cast<int64_t>(std::nearbyint(w));
}

int qubo_horizon(const AnnotatedGraph& g, double alpha) {
    int64_t total = 0;
    for (const auto& n : g.nodes()) total += rounded_weight(n.weight);
    if (total < 1) throw std::invalid_argument("sum of rounded weights must be >= 1");
    // tiny slack keeps exact products like 1.2*5 from ceiling one step too far
    int t = static_cast<int>(std::ceil(alpha * static_cast<double>(total) - 1e-9));
    return std::max(2, t);
}

namespace {

QuboModel build_impl(const AnnotatedGraph& g, ProblemKind kind, double alpha, double lambda1,
                     double lambda2) {
    if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
    VariableLayout layout;
    layout.kind = kind;
    layout.alpha = alpha;
    layout.horizon = qubo_horizon(g, alpha);
    layout.num_paths = kind == ProblemKind::diploid ? 2 : 1;
    layout.node_ids.reserve(g.node_count());
    for (const auto& n : g.nodes()) layout.node_ids.push_back(n.id);

    const int T = layout.horizon;
    const int S = layout.slots_per_time();
    const int end = layout.end_slot();
    QuboModel m(layout.variable_count(), 0.0, lambda1, lambda2, layout);

    // C1: one slot active per (path, time)
    for (int p = 0; p < layout.num_paths; ++p) {
        for (int t = 1; t <= T; ++t) {
            m.add_offset(lambda1);
            for (int s = 0; s < S; ++s) {
                m.add_linear(layout.index_of(p, t, s), -lambda1);
                for (int s2 = s + 1; s2 < S; ++s2) {
                    m.add_quadratic(layout.index_of(p, t, s), layout.index_of(p, t, s2),
                                    2.0 * lambda1);
                }
            }
        }
    }

    // C2: non-edge transitions between consecutive times, plus leaving end
    auto transition_allowed = [&](int slot_a, int slot_b) {
        OrientedNode a = layout.node_of_slot(slot_a);
        OrientedNode b = layout.node_of_slot(slot_b);
        if (kind == ProblemKind::tangle) return g.has_node_edge(a.idx, b.idx);
        return g.has_edge(a, b);
    };
    for (int p = 0; p < layout.num_paths; ++p) {
        for (int t = 1; t < T; ++t) {
            for (int s = 0; s < S - 1; ++s) {
                for (int s2 = 0; s2 < S - 1; ++s2) {
                    if (!transition_allowed(s, s2)) {
                        m.add_quadratic(layout.index_of(p, t, s), layout.index_of(p, t + 1, s2),
                                        lambda2);
                    }
                }
                // end -> node is penalised; node -> end and end -> end are free
                m.add_quadratic(layout.index_of(p, t, end), layout.index_of(p, t + 1, s), lambda2);
            }
        }
    }

    // C3: per node, squared gap between total visits and the rounded weight
    for (NodeIdx v = 0; v < g.node_count(); ++v) {
        int64_t w = rounded_weight(g.node(v).weight);
        std::vector<int> vars;
        for (int p = 0; p < layout.num_paths; ++p) {
            for (int t = 1; t <= T; ++t) {
                vars.push_back(layout.index_of(p, t, layout.slot_of(v, Strand::fwd)));
                if (kind != ProblemKind::tangle) {
                    vars.push_back(layout.index_of(p, t, layout.slot_of(v, Strand::rev)));
                }
            }
        }
        m.add_offset(static_cast<double>(w) * static_cast<double>(w));
        for (size_t a = 0; a < vars.size(); ++a) {
            m.add_linear(vars[a], 1.0 - 2.0 * static_cast<double>(w));
            for (size_t b = a + 1; b < vars.size(); ++b) {
                m.add_quadratic(vars[a], vars[b], 2.0);
            }
        }
    }

    m.finalize();
    return m;
}

}  // namespace

QuboModel build_qubo(const AnnotatedGraph& g, ProblemKind kind, double alpha, double lambda1,
                     double lambda2) {
    return build_impl(g, kind, alpha, lambda1, lambda2);
}
QuboModel build_tangle_qubo(const AnnotatedGraph& g, double alpha, double lambda1, double lambda2) {
    return build_impl(g, ProblemKind::tangle, alpha, lambda1, lambda2);
}
QuboModel build_oriented_qubo(const AnnotatedGraph& g, double alpha, double lambda1,
                              double lambda2) {
    return build_impl(g, ProblemKind::oriented, alpha, lambda1, lambda2);
}
QuboModel build_diploid_qubo(const AnnotatedGraph& g, double alpha, double lambda1,
                             double lambda2) {
    return build_impl(g, ProblemKind::diploid, alpha, lambda1, lambda2);
}

namespace {

void encode_one_path(const VariableLayout& layout, const Walk& w, int path, BitVector& x) {
    if (static_cast<int>(w.size()) > layout.horizon) {
        throw std::invalid_argument("walk of length " + std::to_string(w.size()) +
                                    " exceeds horizon T=" + std::to_string(layout.horizon));
    }
    for (int t = 1; t <= layout.horizon; ++t) {
        int slot;
        if (t <= static_cast<int>(w.size())) {
            const Step& step = w[t - 1];
            auto it = std::find(layout.node_ids.begin(), layout.node_ids.end(), step.node);
            if (it == layout.node_ids.end()) {
                throw std::invalid_argument("walk node '" + step.node + "' not in layout");
            }
            NodeIdx idx = static_cast<NodeIdx>(it - layout.node_ids.begin());
            slot = layout.slot_of(idx, step.strand);
        } else {
            slot = layout.end_slot();
        }
        x[layout.index_of(path, t, slot)] = 1;
    }
}

}  // namespace

BitVector encode_walk(const VariableLayout& layout, const Walk& w) {
    if (layout.num_paths != 1) throw std::invalid_argument("layout expects a walk pair");
    BitVector x(layout.variable_count(), 0);
    encode_one_path(layout, w, 0, x);
    return x;
}

BitVector encode_walk_pair(const VariableLayout& layout, const WalkPair& p) {
    if (layout.num_paths != 2) throw std::invalid_argument("layout expects a single walk");
    BitVector x(layout.variable_count(), 0);
    encode_one_path(layout, p.first, 0, x);
    encode_one_path(layout, p.second, 1, x);
    return x;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_qubo_model(std::ostream& out, const QuboModel& m) {
    out << m.n() << ' ' << num(m.offset()) << ' ' << num(m.lambda1()) << ' ' << num(m.lambda2())
        << ' ' << problem_kind_name(m.layout().kind) << ' ' << m.layout().horizon << '\n';
    for (int i = 0; i < m.n(); ++i) {
        if (m.linear()[i] != 0.0) out << i << ' ' << i << ' ' << num(m.linear()[i]) << '\n';
    }
    for (const auto& [i, j, c] : m.quadratic()) {
        out << i << ' ' << j << ' ' << num(c) << '\n';
    }
}

void write_qubo_model_file(const std::string& path, const QuboModel& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    write_qubo_model(out, m);
}

QuboModel read_qubo_model(std::istream& in) {
    std::string header;
    while (std::getline(in, header)) {
        if (!header.empty() && header[0] != '#') break;
    }
    std::istringstream hs(header);
    int n = 0, T = 0;
    double offset = 0, l1 = 0, l2 = 0;
    std::string kind_name;
    if (!(hs >> n >> offset >> l1 >> l2 >> kind_name >> T)) {
        throw std::runtime_error("bad model header: '" + header + "'");
    }
    auto kind = problem_kind_from_name(kind_name);
    if (!kind) throw std::runtime_error("unknown problem kind '" + kind_name + "'");

    VariableLayout layout;
    layout.kind = *kind;
    layout.horizon = T;
    layout.num_paths = *kind == ProblemKind::diploid ? 2 : 1;
    QuboModel m(n, offset, l1, l2, layout);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double c = 0;
        if (!(ls >> i >> j >> c)) throw std::runtime_error("bad model line: '" + line + "'");
        if (i < 0 || i >= n || j < 0 || j >= n) {
            throw std::runtime_error("model index out of range in line: '" + line + "'");
        }
        if (i == j) {
            m.add_linear(i, c);
        } else {
            m.add_quadratic(i, j, c);
        }
    }
    m.finalize();
    return m;
}

QuboModel read_qubo_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    return read_qubo_model(in);
}

}  // namespace tangle
