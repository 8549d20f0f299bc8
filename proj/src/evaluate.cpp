#include "tangle/evaluate.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "tangle/kmer.hpp"

namespace tangle {

namespace {

constexpr int64_t kNegInf = std::numeric_limits<int32_t>::min() / 4;

enum Layer : uint8_t { LM = 0, LD = 1, LI = 2 };

// Gotoh affine-gap alignment with full traceback, restricted to a diagonal
// band. Global by default; in extension mode the alignment may stop anywhere
// (best match cell wins) and the remainder is clipped.
struct PairAligner {
    const AlignParams& P;

    std::vector<AlnOp> run(std::string_view a, std::string_view b, bool extension,
                           int64_t* out_a_used = nullptr, int64_t* out_b_used = nullptr) {
        const int64_t la = static_cast<int64_t>(a.size());
        const int64_t lb = static_cast<int64_t>(b.size());
        if (out_a_used) *out_a_used = la;
        if (out_b_used) *out_b_used = lb;
        if (la == 0) return std::vector<AlnOp>(static_cast<size_t>(lb), AlnOp::ins);
        if (lb == 0) return std::vector<AlnOp>(static_cast<size_t>(la), AlnOp::del);

        // band on j - i; the global corner must stay reachable
        int64_t dlo = -P.band, dhi = P.band;
        if (!extension) {
            dlo = std::min<int64_t>(dlo, lb - la - P.band);
            dhi = std::max<int64_t>(dhi, lb - la + P.band);
        }

        const int64_t w = lb + 1;
        auto at = [&](int64_t i, int64_t j) { return i * w + j; };
        std::vector<int32_t> M((la + 1) * w, kNegInf), D((la + 1) * w, kNegInf),
            I((la + 1) * w, kNegInf);
        std::vector<uint8_t> tm((la + 1) * w), td((la + 1) * w), ti((la + 1) * w);

        M[at(0, 0)] = 0;
        for (int64_t i = 1; i <= la && -i >= dlo; ++i) {
            D[at(i, 0)] = P.gap_open + static_cast<int32_t>(i) * P.gap_extend;
            td[at(i, 0)] = i == 1 ? LM : LD;
        }
        for (int64_t j = 1; j <= lb && j <= dhi; ++j) {
            I[at(0, j)] = P.gap_open + static_cast<int32_t>(j) * P.gap_extend;
            ti[at(0, j)] = j == 1 ? LM : LI;
        }

        int64_t best_i = la, best_j = lb;
        int32_t best_score = kNegInf;
        for (int64_t i = 1; i <= la; ++i) {
            const int64_t j_lo = std::max<int64_t>(1, i + dlo);
            const int64_t j_hi = std::min<int64_t>(lb, i + dhi);
            for (int64_t j = j_lo; j <= j_hi; ++j) {
                int32_t sub = a[i - 1] == b[j - 1] ? P.match : P.mismatch;
                int32_t m0 = M[at(i - 1, j - 1)], d0 = D[at(i - 1, j - 1)], i0 = I[at(i - 1, j - 1)];
                int32_t best = m0;
                uint8_t from = LM;
                if (d0 > best) { best = d0; from = LD; }
                if (i0 > best) { best = i0; from = LI; }
                M[at(i, j)] = best + sub;
                tm[at(i, j)] = from;

                int32_t open_d = std::max(M[at(i - 1, j)], I[at(i - 1, j)]) + P.gap_open + P.gap_extend;
                int32_t ext_d = D[at(i - 1, j)] + P.gap_extend;
                if (ext_d >= open_d) {
                    D[at(i, j)] = ext_d;
                    td[at(i, j)] = LD;
                } else {
                    D[at(i, j)] = open_d;
                    td[at(i, j)] = M[at(i - 1, j)] >= I[at(i - 1, j)] ? LM : LI;
                }

                int32_t open_i = std::max(M[at(i, j - 1)], D[at(i, j - 1)]) + P.gap_open + P.gap_extend;
                int32_t ext_i = I[at(i, j - 1)] + P.gap_extend;
                if (ext_i >= open_i) {
                    I[at(i, j)] = ext_i;
                    ti[at(i, j)] = LI;
                } else {
                    I[at(i, j)] = open_i;
                    ti[at(i, j)] = M[at(i, j - 1)] >= D[at(i, j - 1)] ? LM : LD;
                }

                if (extension && M[at(i, j)] > best_score) {
                    best_score = M[at(i, j)];
                    best_i = i;
                    best_j = j;
                }
            }
        }

        int64_t i = la, j = lb;
        uint8_t layer;
        if (extension) {
            if (best_score <= 0) {
                if (out_a_used) *out_a_used = 0;
                if (out_b_used) *out_b_used = 0;
                return {};
            }
            i = best_i;
            j = best_j;
            layer = LM;
            if (out_a_used) *out_a_used = i;
            if (out_b_used) *out_b_used = j;
        } else {
            int32_t m = M[at(i, j)], d = D[at(i, j)], ins = I[at(i, j)];
            layer = LM;
            if (d > m && d >= ins) layer = LD;
            else if (ins > m && ins > d) layer = LI;
        }

        std::vector<AlnOp> ops;
        while (i > 0 || j > 0) {
            if (layer == LM) {
                uint8_t from = tm[at(i, j)];
                ops.push_back(a[i - 1] == b[j - 1] ? AlnOp::match : AlnOp::mismatch);
                --i;
                --j;
                layer = from;
            } else if (layer == LD) {
                uint8_t from = td[at(i, j)];
                ops.push_back(AlnOp::del);
                --i;
                layer = from;
            } else {
                uint8_t from = ti[at(i, j)];
                ops.push_back(AlnOp::ins);
                --j;
                layer = from;
            }
        }
        std::reverse(ops.begin(), ops.end());
        return ops;
    }
};

struct SuperAnchor {
    int64_t tpos = 0, cpos = 0, len = 0;  // exact forward match truth[tpos..) == cand[cpos..)

    int64_t tend() const { return tpos + len; }
    int64_t cend() const { return cpos + len; }
    int64_t diag() const { return tpos - cpos; }
};

// Unique-in-truth canonical seeds, merged into maximal exact runs.
std::vector<SuperAnchor> find_super_anchors(const std::string& truth, const std::string& cand,
                                            int k) {
    struct Seed {
        int64_t pos = -1;
        Strand strand = Strand::fwd;
        int count = 0;
    };
    std::unordered_map<std::string, Seed> seeds;
    for (int64_t p = 0; p + k <= static_cast<int64_t>(truth.size()); ++p) {
        std::string_view kmer(truth.data() + p, static_cast<size_t>(k));
        std::string canon = canonical_kmer(kmer);
        auto& s = seeds[canon];
        ++s.count;
        if (s.count == 1) {
            s.pos = p;
            s.strand = canon == kmer ? Strand::fwd : Strand::rev;
        }
    }

    std::vector<std::pair<int64_t, int64_t>> anchors;  // (cpos, tpos)
    for (int64_t p = 0; p + k <= static_cast<int64_t>(cand.size()); ++p) {
        std::string_view kmer(cand.data() + p, static_cast<size_t>(k));
        std::string canon = canonical_kmer(kmer);
        auto it = seeds.find(canon);
        if (it == seeds.end() || it->second.count != 1) continue;
        Strand cstrand = canon == kmer ? Strand::fwd : Strand::rev;
        if (cstrand != it->second.strand) continue;  // reverse hits belong to the rc pass
        anchors.emplace_back(p, it->second.pos);
    }

    std::sort(anchors.begin(), anchors.end(), [](const auto& a, const auto& b) {
        int64_t da = a.second - a.first, db = b.second - b.first;
        return std::tie(da, a.first) < std::tie(db, b.first);
    });

    std::vector<SuperAnchor> supers;
    for (const auto& [cpos, tpos] : anchors) {
        if (!supers.empty() && supers.back().diag() == tpos - cpos &&
            cpos == supers.back().cpos + supers.back().len - k + 1) {
            supers.back().len += 1;  // consecutive overlapping kmers extend the exact run
        } else {
            supers.push_back({tpos, cpos, k});
        }
    }
    return supers;
}

struct Chain {
    std::vector<int> supers;
    int64_t score = 0;
};

// Co-linear chaining with bounded diagonal drift and bounded unanchored gaps.
std::vector<Chain> chain_supers(const std::vector<SuperAnchor>& supers, const AlignParams& P) {
    std::vector<int> order(supers.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::tie(supers[a].cpos, supers[a].tpos) < std::tie(supers[b].cpos, supers[b].tpos);
    });

    std::vector<bool> used(supers.size(), false);
    std::vector<Chain> chains;
    while (true) {
        std::vector<int64_t> score(supers.size(), 0);
        std::vector<int> prev(supers.size(), -1);
        int64_t best_score = 0;
        int best_at = -1;
        for (size_t oi = 0; oi < order.size(); ++oi) {
            int i = order[oi];
            if (used[i]) continue;
            score[i] = supers[i].len;
            for (size_t oj = 0; oj < oi; ++oj) {
                int j = order[oj];
                if (used[j]) continue;
                int64_t cgap = supers[i].cpos - supers[j].cend();
                int64_t tgap = supers[i].tpos - supers[j].tend();
                int64_t drift = std::abs(supers[i].diag() - supers[j].diag());
                if (supers[i].cpos <= supers[j].cpos || supers[i].tpos <= supers[j].tpos) continue;
                if (cgap > P.max_link_gap || tgap > P.max_link_gap) continue;
                if (drift > P.band) continue;
                int64_t overlap = std::max<int64_t>(0, std::max(-cgap, -tgap));
                if (overlap >= supers[i].len) continue;
                int64_t gap_cost = std::max<int64_t>(0, std::max(cgap, tgap)) / 8 + drift / 2 + 1;
                int64_t cand_score = score[j] + supers[i].len - overlap - gap_cost;
                if (cand_score > score[i]) {
                    score[i] = cand_score;
                    prev[i] = j;
                }
            }
            if (score[i] > best_score) {
                best_score = score[i];
                best_at = i;
            }
        }
        if (best_at < 0) break;
        Chain chain;
        chain.score = best_score;
        for (int at = best_at; at >= 0; at = prev[at]) chain.supers.push_back(at);
        std::reverse(chain.supers.begin(), chain.supers.end());
        int64_t hull_lo = supers[chain.supers.front()].cpos;
        int64_t hull_hi = supers[chain.supers.back()].cend();
        for (int s : chain.supers) used[s] = true;
        // drop leftovers inside the chain's candidate hull; they compete for
        // the same region and would only produce overlapping supplementaries
        for (size_t s = 0; s < supers.size(); ++s) {
            if (!used[s] && supers[s].cpos < hull_hi && supers[s].cend() > hull_lo) used[s] = true;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

void count_ops(AlignmentSegment& seg, const AlignParams& P) {
    seg.matches = seg.mismatches = seg.insertions = seg.deletions = 0;
    seg.score = 0;
    AlnOp prev = AlnOp::match;
    bool first = true;
    for (AlnOp op : seg.ops) {
        switch (op) {
            case AlnOp::match: seg.matches++; seg.score += P.match; break;
            case AlnOp::mismatch: seg.mismatches++; seg.score += P.mismatch; break;
            case AlnOp::ins:
                seg.insertions++;
                seg.score += P.gap_extend + ((first || prev != AlnOp::ins) ? P.gap_open : 0);
                break;
            case AlnOp::del:
                seg.deletions++;
                seg.score += P.gap_extend + ((first || prev != AlnOp::del) ? P.gap_open : 0);
                break;
        }
        prev = op;
        first = false;
    }
}

void trim_terminal_gaps(AlignmentSegment& seg) {
    while (!seg.ops.empty() && (seg.ops.back() == AlnOp::ins || seg.ops.back() == AlnOp::del)) {
        if (seg.ops.back() == AlnOp::ins) seg.cand_end--;
        else seg.truth_end--;
        seg.ops.pop_back();
    }
    size_t lead = 0;
    while (lead < seg.ops.size() && (seg.ops[lead] == AlnOp::ins || seg.ops[lead] == AlnOp::del)) {
        if (seg.ops[lead] == AlnOp::ins) seg.cand_start++;
        else seg.truth_start++;
        ++lead;
    }
    if (lead > 0) seg.ops.erase(seg.ops.begin(), seg.ops.begin() + static_cast<int64_t>(lead));
}

// Builds one alignment segment from a chain: exact anchors, banded fills
// between them, and score-clipped extensions at both ends.
AlignmentSegment stitch_chain(const std::string& truth, const std::string& cand,
                              const std::vector<SuperAnchor>& supers, const Chain& chain,
                              const AlignParams& P) {
    PairAligner aligner{P};
    AlignmentSegment seg;

    std::vector<SuperAnchor> parts;
    for (int s : chain.supers) parts.push_back(supers[s]);
    // trim overlaps against the previous part (exact runs shrink trivially)
    for (size_t i = 1; i < parts.size(); ++i) {
        int64_t overlap = std::max<int64_t>(
            0, std::max(parts[i - 1].cend() - parts[i].cpos, parts[i - 1].tend() - parts[i].tpos));
        parts[i].cpos += overlap;
        parts[i].tpos += overlap;
        parts[i].len -= overlap;
    }
    parts.erase(std::remove_if(parts.begin(), parts.end(),
                               [](const SuperAnchor& s) { return s.len <= 0; }),
                parts.end());
    if (parts.empty()) return seg;

    seg.truth_start = parts.front().tpos;
    seg.cand_start = parts.front().cpos;

    // left extension on reversed overhangs, clipped at the best-scoring cell
    {
        int64_t e_t = std::min(parts.front().tpos, P.max_extension);
        int64_t e_c = std::min(parts.front().cpos, P.max_extension);
        std::string ta(truth.rbegin() + (static_cast<int64_t>(truth.size()) - parts.front().tpos),
                       truth.rbegin() + (static_cast<int64_t>(truth.size()) - parts.front().tpos) + e_t);
        std::string ca(cand.rbegin() + (static_cast<int64_t>(cand.size()) - parts.front().cpos),
                       cand.rbegin() + (static_cast<int64_t>(cand.size()) - parts.front().cpos) + e_c);
        int64_t used_t = 0, used_c = 0;
        auto ops = aligner.run(ta, ca, true, &used_t, &used_c);
        std::reverse(ops.begin(), ops.end());
        seg.ops.insert(seg.ops.end(), ops.begin(), ops.end());
        seg.truth_start -= used_t;
        seg.cand_start -= used_c;
    }

    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            std::string_view tgap(truth.data() + parts[i - 1].tend(),
                                  static_cast<size_t>(parts[i].tpos - parts[i - 1].tend()));
            std::string_view cgap(cand.data() + parts[i - 1].cend(),
                                  static_cast<size_t>(parts[i].cpos - parts[i - 1].cend()));
            auto ops = aligner.run(tgap, cgap, false);
            seg.ops.insert(seg.ops.end(), ops.begin(), ops.end());
        }
        seg.ops.insert(seg.ops.end(), static_cast<size_t>(parts[i].len), AlnOp::match);
    }

    seg.truth_end = parts.back().tend();
    seg.cand_end = parts.back().cend();

    // right extension
    {
        int64_t e_t = std::min(static_cast<int64_t>(truth.size()) - parts.back().tend(), P.max_extension);
        int64_t e_c = std::min(static_cast<int64_t>(cand.size()) - parts.back().cend(), P.max_extension);
        std::string_view ta(truth.data() + parts.back().tend(), static_cast<size_t>(e_t));
        std::string_view ca(cand.data() + parts.back().cend(), static_cast<size_t>(e_c));
        int64_t used_t = 0, used_c = 0;
        auto ops = aligner.run(ta, ca, true, &used_t, &used_c);
        seg.ops.insert(seg.ops.end(), ops.begin(), ops.end());
        seg.truth_end += used_t;
        seg.cand_end += used_c;
    }

    trim_terminal_gaps(seg);
    count_ops(seg, P);
    return seg;
}

std::vector<AlignmentSegment> align_one_strand(const std::string& truth, const std::string& cand,
                                               const AlignParams& P) {
    auto supers = find_super_anchors(truth, cand, P.seed_k);
    auto chains = chain_supers(supers, P);
    std::vector<AlignmentSegment> segments;
    for (const auto& chain : chains) {
        AlignmentSegment seg = stitch_chain(truth, cand, supers, chain, P);
        if (seg.aligned_columns() > 0) segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace

std::vector<AlignmentSegment> align(const std::string& truth, const std::string& candidate,
                                    const AlignParams& params) {
    if (truth.empty() || candidate.empty()) {
        throw std::invalid_argument("align requires non-empty sequences");
    }
    std::vector<AlignmentSegment> all;
    for (auto& seg : align_one_strand(truth, candidate, params)) {
        seg.strand = Strand::fwd;
        all.push_back(std::move(seg));
    }
    const std::string rc = reverse_complement(candidate);
    const int64_t lc = static_cast<int64_t>(candidate.size());
    for (auto& seg : align_one_strand(truth, rc, params)) {
        seg.strand = Strand::rev;
        int64_t cs = lc - seg.cand_end, ce = lc - seg.cand_start;
        seg.cand_start = cs;
        seg.cand_end = ce;
        all.push_back(std::move(seg));
    }

    // primary first, then supplementaries that claim untouched candidate bases
    std::sort(all.begin(), all.end(), [](const AlignmentSegment& a, const AlignmentSegment& b) {
        return std::tie(b.score, a.cand_start, a.truth_start) <
               std::tie(a.score, b.cand_start, b.truth_start);
    });
    std::vector<AlignmentSegment> picked;
    for (auto& seg : all) {
        if (seg.aligned_columns() < params.min_aligned) continue;
        bool overlaps = false;
        for (const auto& have : picked) {
            if (seg.cand_start < have.cand_end && seg.cand_end > have.cand_start) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) picked.push_back(std::move(seg));
    }
    std::sort(picked.begin(), picked.end(), [](const AlignmentSegment& a, const AlignmentSegment& b) {
        return std::tie(a.cand_start, a.truth_start) < std::tie(b.cand_start, b.truth_start);
    });
    return picked;
}

namespace {

int64_t union_length(std::vector<std::pair<int64_t, int64_t>> intervals) {
    std::sort(intervals.begin(), intervals.end());
    int64_t total = 0, hi = std::numeric_limits<int64_t>::min();
    for (const auto& [s, e] : intervals) {
        if (s > hi) {
            total += e - s;
            hi = e;
        } else if (e > hi) {
            total += e - hi;
            hi = e;
        }
    }
    return total;
}

}  // namespace

EvalReport evaluate_segments(int64_t truth_len, const std::vector<int64_t>& contig_lengths,
                             const std::vector<AlignmentSegment>& segments) {
    EvalReport r;
    r.contigs = static_cast<int64_t>(contig_lengths.size());

    std::vector<std::pair<int64_t, int64_t>> truth_iv;
    std::vector<std::vector<std::pair<int64_t, int64_t>>> cand_iv(contig_lengths.size());
    int64_t matches = 0, mismatches = 0, gap_bases = 0;
    for (const auto& seg : segments) {
        truth_iv.emplace_back(seg.truth_start, seg.truth_end);
        cand_iv.at(static_cast<size_t>(seg.contig)).emplace_back(seg.cand_start, seg.cand_end);
        matches += seg.matches;
        mismatches += seg.mismatches;
        gap_bases += seg.insertions + seg.deletions;

        // gap runs of 10+ bases
        int64_t run = 0;
        AlnOp run_op = AlnOp::match;
        auto flush = [&]() {
            if (run >= 10) r.indels_ge10++;
            run = 0;
        };
        for (AlnOp op : seg.ops) {
            if (op == AlnOp::ins || op == AlnOp::del) {
                if (run > 0 && op != run_op) flush();
                run_op = op;
                ++run;
            } else {
                flush();
            }
        }
        flush();

        // 100-column windows with >= 30% mismatch columns; overlapping
        // qualifying windows merge into one region
        const int64_t cols = seg.aligned_columns();
        if (cols >= 100) {
            std::vector<int64_t> prefix(cols + 1, 0);
            for (int64_t i = 0; i < cols; ++i) {
                prefix[i + 1] = prefix[i] + (seg.ops[static_cast<size_t>(i)] == AlnOp::mismatch);
            }
            int64_t region_end = -1;
            for (int64_t s = 0; s + 100 <= cols; ++s) {
                if (prefix[s + 100] - prefix[s] < 30) continue;
                if (s >= region_end) r.diff_regions++;
                region_end = s + 100;
            }
        }
    }

    r.breaks = std::max<int64_t>(0, static_cast<int64_t>(segments.size()) - r.contigs);
    if (truth_len > 0) {
        r.pct_covered = 100.0 * static_cast<double>(union_length(std::move(truth_iv))) /
                        static_cast<double>(truth_len);
    }
    int64_t used = 0, cand_total = 0;
    for (size_t c = 0; c < contig_lengths.size(); ++c) {
        used += union_length(std::move(cand_iv[c]));
        cand_total += contig_lengths[c];
    }
    if (cand_total > 0) r.pct_used = 100.0 * static_cast<double>(used) / static_cast<double>(cand_total);
    int64_t denom = matches + mismatches + gap_bases;
    if (denom > 0) r.pct_identity = 100.0 * static_cast<double>(matches) / static_cast<double>(denom);
    return r;
}

EvalReport evaluate(const std::string& truth, const std::vector<std::string>& contigs,
                    const AlignParams& params) {
    std::vector<AlignmentSegment> segments;
    std::vector<int64_t> lengths;
    for (size_t c = 0; c < contigs.size(); ++c) {
        lengths.push_back(static_cast<int64_t>(contigs[c].size()));
        if (contigs[c].empty()) continue;
        for (auto& seg : align(truth, contigs[c], params)) {
            seg.contig = static_cast<int>(c);
            segments.push_back(std::move(seg));
        }
    }
    return evaluate_segments(static_cast<int64_t>(truth.size()), lengths, segments);
}

std::string eval_report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["pct_covered"] = r.pct_covered;
    j["pct_used"] = r.pct_used;
    j["contigs"] = r.contigs;
    j["breaks"] = r.breaks;
    j["indels_ge10"] = r.indels_ge10;
    j["diff_regions"] = r.diff_regions;
    j["pct_identity"] = r.pct_identity;
    return j.dump(2) + "\n";
}

std::string eval_report_to_tsv(const EvalReport& r, bool header) {
    std::string out;
    if (header) out += "Covered\tUsed\tContigs\tBreaks\tIndel\tDiff\tIdentity\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.2f\t%.2f\t%lld\t%lld\t%lld\t%lld\t%.2f\n", r.pct_covered,
                  r.pct_used, static_cast<long long>(r.contigs), static_cast<long long>(r.breaks),
                  static_cast<long long>(r.indels_ge10), static_cast<long long>(r.diff_regions),
                  r.pct_identity);
    out += buf;
    return out;
}

}  // namespace tangle
