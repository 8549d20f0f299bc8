#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tangle/dna.hpp"

namespace tangle {

class ParseError : public std::runtime_error {
  public:
    ParseError(size_t line, size_t col, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ": " + what),
          line_(line),
          col_(col) {}

    size_t line() const { return line_; }
    size_t col() const { return col_; }

  private:
    size_t line_;
    size_t col_;
};

// One GFA auxiliary tag. Integer and float payloads are parsed; all other
// type chars (A, Z, H, B, J) keep their raw text.
struct GfaTag {
    char type = 'Z';
    int64_t ival = 0;
    double fval = 0.0;
    std::string sval;

    static GfaTag of_int(int64_t v) { return {'i', v, 0.0, {}}; }
    static GfaTag of_float(double v) { return {'f', 0, v, {}}; }
    static GfaTag of_string(std::string v) { return {'Z', 0, 0.0, std::move(v)}; }

    bool operator==(const GfaTag&) const = default;
};

// Keyed by tag name; std::map keeps emission alphabetical.
using GfaTagMap = std::map<std::string, GfaTag>;

std::optional<int64_t> tag_int(const GfaTagMap& tags, const std::string& name);
std::optional<double> tag_float(const GfaTagMap& tags, const std::string& name);

struct GfaSegment {
    std::string id;
    std::string sequence;  // uppercase ACGTN, or literal "*"
    GfaTagMap tags;

    // Standard annotation tags used by graph annotators.
    std::optional<int64_t> kmer_count() const { return tag_int(tags, "KC"); }
    std::optional<int64_t> sc_count() const { return tag_int(tags, "SC"); }
    std::optional<double> depth_fraction() const { return tag_float(tags, "dc"); }

    bool operator==(const GfaSegment&) const = default;
};

struct GfaLink {
    std::string from_id;
    Strand from_strand = Strand::fwd;
    std::string to_id;
    Strand to_strand = Strand::fwd;
    std::string overlap = "0M";  // verbatim CIGAR, not interpreted
    GfaTagMap tags;

    std::optional<int64_t> edge_count() const { return tag_int(tags, "EC"); }

    bool operator==(const GfaLink&) const = default;
};

struct GfaDocument {
    std::vector<std::string> headers;  // verbatim H lines
    std::vector<GfaSegment> segments;
    std::vector<GfaLink> links;
    std::vector<std::string> others;  // verbatim unknown record lines

    const GfaSegment* find_segment(const std::string& id) const;

    bool operator==(const GfaDocument&) const = default;
};

// Parses GFA v1 text. S and L records are captured with their tags; H and
// unknown record types are retained verbatim for round-tripping. Throws
// ParseError with the line/column of the first problem: malformed tags,
// duplicate segment ids, dangling link endpoints, non-DNA sequence.
GfaDocument parse_gfa(std::istream& in);
GfaDocument parse_gfa(const std::string& text);
GfaDocument read_gfa_file(const std::string& path);

// Serialises a document; tags come out alphabetically, so
// write(parse(write(x))) == write(x) byte for byte.
void write_gfa(std::ostream& out, const GfaDocument& doc);
std::string write_gfa(const GfaDocument& doc);
void write_gfa_file(const std::string& path, const GfaDocument& doc);

// One oriented visit, shared by path strings and walks.
struct Step {
    std::string node;
    Strand strand = Strand::fwd;

    bool operator==(const Step&) const = default;
};

// Parses a GAF-style oriented path string such as ">s1<s2"; '>' is forward
// and '<' reverse. Throws ParseError on empty input or an id without a
// leading orientation character.
std::vector<Step> parse_path_string(const std::string& s);

// Inverse of parse_path_string; empty steps render as "".
std::string render_path_string(const std::vector<Step>& steps);

}  // namespace tangle
