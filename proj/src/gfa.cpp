#include "tangle/gfa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tangle {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

bool valid_tag_name(std::string_view name) {
    if (name.size() != 2) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    return std::isalnum(static_cast<unsigned char>(name[1])) != 0;
}

// Column of a field within the original line (1-based), for error reporting.
size_t field_col(const std::vector<std::string_view>& fields, size_t idx) {
    size_t col = 1;
    for (size_t i = 0; i < idx; ++i) col += fields[i].size() + 1;
    return col;
}

void parse_tag(std::string_view field, size_t line_no, size_t col, GfaTagMap& tags) {
    // NAME:TYPE:VALUE
    if (field.size() < 5 || field[2] != ':' || field[4] != ':') {
        throw ParseError(line_no, col, "malformed tag '" + std::string(field) + "'");
    }
    std::string_view name = field.substr(0, 2);
    char type = field[3];
    std::string_view value = field.substr(5);
    if (!valid_tag_name(name)) {
        throw ParseError(line_no, col, "invalid tag name '" + std::string(name) + "'");
    }
    GfaTag tag;
    tag.type = type;
    switch (type) {
        case 'i': {
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), tag.ival);
            if (ec != std::errc() || ptr != value.data() + value.size()) {
                throw ParseError(line_no, col, "invalid integer tag value '" + std::string(value) + "'");
            }
            break;
        }
        case 'f': {
            std::string tmp(value);
            size_t pos = 0;
            try {
                tag.fval = std::stod(tmp, &pos);
            } catch (const std::exception&) {
                throw ParseError(line_no, col, "invalid float tag value '" + tmp + "'");
            }
            if (pos != tmp.size()) {
                throw ParseError(line_no, col, "invalid float tag value '" + tmp + "'");
            }
            break;
        }
        case 'A':
        case 'Z':
        case 'H':
        case 'B':
        case 'J':
            tag.sval = std::string(value);
            break;
        default:
            throw ParseError(line_no, col, std::string("unknown tag type '") + type + "'");
    }
    if (!tags.emplace(std::string(name), std::move(tag)).second) {
        throw ParseError(line_no, col, "duplicate tag '" + std::string(name) + "'");
    }
}

Strand parse_strand(std::string_view field, size_t line_no, size_t col) {
    if (field == "+") return Strand::fwd;
    if (field == "-") return Strand::rev;
    throw ParseError(line_no, col, "orientation must be '+' or '-', got '" + std::string(field) + "'");
}

std::string format_float(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void write_tags(std::ostream& out, const GfaTagMap& tags) {
    for (const auto& [name, tag] : tags) {
        out << '\t' << name << ':' << tag.type << ':';
        switch (tag.type) {
            case 'i': out << tag.ival; break;
            case 'f': out << format_float(tag.fval); break;
            default: out << tag.sval; break;
        }
    }
}

}  // namespace

std::optional<int64_t> tag_int(const GfaTagMap& tags, const std::string& name) {
    auto it = tags.find(name);
    if (it == tags.end() || it->second.type != 'i') return std::nullopt;
    return it->second.ival;
}

std::optional<double> tag_float(const GfaTagMap& tags, const std::string& name) {
    auto it = tags.find(name);
    if (it == tags.end()) return std::nullopt;
    if (it->second.type == 'f') return it->second.fval;
    if (it->second.type == 'i') return static_cast<double>(it->second.ival);
    return std::nullopt;
}

const GfaSegment* GfaDocument::find_segment(const std::string& id) const {
    for (const auto& seg : segments) {
        if (seg.id == id) return &seg;
    }
    return nullptr;
}

GfaDocument parse_gfa(std::istream& in) {
    GfaDocument doc;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        switch (line[0]) {
            case 'H':
                doc.headers.push_back(line);
                break;
            case 'S': {
                auto fields = split_tabs(line);
                if (fields.size() < 3) {
                    throw ParseError(line_no, 1, "S record needs at least 3 fields");
                }
                GfaSegment seg;
                seg.id = std::string(fields[1]);
                if (seg.id.empty()) throw ParseError(line_no, field_col(fields, 1), "empty segment id");
                if (!seen_ids.insert(seg.id).second) {
                    throw ParseError(line_no, field_col(fields, 1), "duplicate segment id '" + seg.id + "'");
                }
                if (fields[2] == "*") {
                    seg.sequence = "*";
                } else if (fields[2].empty()) {
                    throw ParseError(line_no, field_col(fields, 2), "empty sequence (use '*')");
                } else {
                    try {
                        seg.sequence = normalize_dna(fields[2]);
                    } catch (const std::invalid_argument& e) {
                        throw ParseError(line_no, field_col(fields, 2), e.what());
                    }
                }
                for (size_t i = 3; i < fields.size(); ++i) {
                    parse_tag(fields[i], line_no, field_col(fields, i), seg.tags);
                }
                doc.segments.push_back(std::move(seg));
                break;
            }
            case 'L': {
                auto fields = split_tabs(line);
                if (fields.size() < 6) {
                    throw ParseError(line_no, 1, "L record needs at least 6 fields");
                }
                GfaLink link;
                link.from_id = std::string(fields[1]);
                link.from_strand = parse_strand(fields[2], line_no, field_col(fields, 2));
                link.to_id = std::string(fields[3]);
                link.to_strand = parse_strand(fields[4], line_no, field_col(fields, 4));
                link.overlap = std::string(fields[5]);
                for (size_t i = 6; i < fields.size(); ++i) {
                    parse_tag(fields[i], line_no, field_col(fields, i), link.tags);
                }
                doc.links.push_back(std::move(link));
                break;
            }
            default:
                doc.others.push_back(line);
                break;
        }
    }
    for (const auto& link : doc.links) {
        if (!seen_ids.count(link.from_id)) {
            throw ParseError(0, 0, "link endpoint '" + link.from_id + "' is not a segment");
        }
        if (!seen_ids.count(link.to_id)) {
            throw ParseError(0, 0, "link endpoint '" + link.to_id + "' is not a segment");
        }
    }
    return doc;
}

GfaDocument parse_gfa(const std::string& text) {
    std::istringstream in(text);
    return parse_gfa(in);
}

GfaDocument read_gfa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open GFA file: " + path);
    return parse_gfa(in);
}

void write_gfa(std::ostream& out, const GfaDocument& doc) {
    for (const auto& h : doc.headers) out << h << '\n';
    for (const auto& seg : doc.segments) {
        out << "S\t" << seg.id << '\t' << seg.sequence;
        write_tags(out, seg.tags);
        out << '\n';
    }
    for (const auto& link : doc.links) {
        out << "L\t" << link.from_id << '\t' << strand_char(link.from_strand) << '\t'
            << link.to_id << '\t' << strand_char(link.to_strand) << '\t' << link.overlap;
        write_tags(out, link.tags);
        out << '\n';
    }
    for (const auto& other : doc.others) out << other << '\n';
}

std::string write_gfa(const GfaDocument& doc) {
    std::ostringstream out;
    write_gfa(out, doc);
    return out.str();
}

void write_gfa_file(const std::string& path, const GfaDocument& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write GFA file: " + path);
    write_gfa(out, doc);
}

std::vector<Step> parse_path_string(const std::string& s) {
    if (s.empty()) throw ParseError(1, 1, "empty path string");
    std::vector<Step> steps;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c != '>' && c != '<') {
            throw ParseError(1, i + 1, "expected '>' or '<' before node id");
        }
        size_t start = ++i;
        while (i < s.size() && s[i] != '>' && s[i] != '<') ++i;
        if (i == start) throw ParseError(1, start + 1, "empty node id in path string");
        steps.push_back({s.substr(start, i - start), c == '>' ? Strand::fwd : Strand::rev});
    }
    return steps;
}

std::string render_path_string(const std::vector<Step>& steps) {
    std::string out;
    for (const auto& step : steps) {
        out += step.strand == Strand::fwd ? '>' : '<';
        out += step.node;
    }
    return out;
}

}  // namespace tangle
