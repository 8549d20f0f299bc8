#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tangle {

enum class Strand : uint8_t { fwd = 0, rev = 1 };

inline Strand flip(Strand s) { return s == Strand::fwd ? Strand::rev : Strand::fwd; }
inline char strand_char(Strand s) { return s == Strand::fwd ? '+' : '-'; }

inline bool is_dna_char(char c) {
    switch (c) {
        case 'A': case 'C': case 'G': case 'T': case 'N':
            return true;
        default:
            return false;
    }
}

inline char complement_base(char c) {
    switch (c) {
        case 'A': return 'T';
        case 'C': return 'G';
        case 'G': return 'C';
        case 'T': return 'A';
        case 'N': return 'N';
        default:
            throw std::invalid_argument(std::string("non-DNA base '") + c + "'");
    }
}

// Watson-Crick complement, reversed; alphabet ACGTN.
std::string reverse_complement(std::string_view seq);

// Uppercases and validates; throws on characters outside ACGTN (case-insensitive).
std::string normalize_dna(std::string_view seq);

}  // namespace tangle
