#include "tangle/dna.hpp"

#include <cctype>

namespace tangle {

std::string reverse_complement(std::string_view seq) {
    std::string out;
    out.resize(seq.size());
    for (size_t i = 0; i < seq.size(); ++i) {
        out[i] = complement_base(seq[seq.size() - 1 - i]);
    }
    return out;
}

std::string normalize_dna(std::string_view seq) {
    std::string out;
    out.resize(seq.size());
    for (size_t i = 0; i < seq.size(); ++i) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(seq[i])));
        if (!is_dna_char(c)) {
            throw std::invalid_argument(std::string("non-DNA character '") + seq[i] +
                                        "' at position " + std::to_string(i));
        }
        out[i] = c;
    }
    return out;
}

}  // namespace tangle
