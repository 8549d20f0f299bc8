#include "tangle/fasta.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tangle {

std::vector<FastaRecord> read_fasta(std::istream& in) {
    std::vector<FastaRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            FastaRecord rec;
            size_t end = line.find_first_of(" \t", 1);
            rec.name = line.substr(1, end == std::string::npos ? std::string::npos : end - 1);
            if (rec.name.empty()) throw std::runtime_error("FASTA record with empty name");
            records.push_back(std::move(rec));
        } else {
            if (records.empty()) throw std::runtime_error("FASTA sequence before first header");
            records.back().seq += line;
        }
    }
    return records;
}

std::vector<FastaRecord> read_fasta_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open FASTA file: " + path);
    return read_fasta(in);
}

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records, size_t line_width) {
    for (const auto& rec : records) {
        out << '>' << rec.name << '\n';
        for (size_t i = 0; i < rec.seq.size(); i += line_width) {
            out << rec.seq.substr(i, line_width) << '\n';
        }
        if (rec.seq.empty()) out << '\n';
    }
}

void write_fasta_file(const std::string& path, const std::vector<FastaRecord>& records,
                      size_t line_width) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write FASTA file: " + path);
    write_fasta(out, records, line_width);
}

}  // namespace tangle
