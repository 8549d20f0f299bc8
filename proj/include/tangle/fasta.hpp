#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tangle {

struct FastaRecord {
    std::string name;  // text after '>' up to first whitespace
    std::string seq;
};

std::vector<FastaRecord> read_fasta(std::istream& in);
std::vector<FastaRecord> read_fasta_file(const std::string& path);

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records,
                 size_t line_width = 80);
void write_fasta_file(const std::string& path, const std::vector<FastaRecord>& records,
                      size_t line_width = 80);

}  // namespace tangle
