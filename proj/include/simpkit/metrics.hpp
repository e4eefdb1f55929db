#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "simpkit/errors.hpp"
#include "simpkit/text.hpp"

namespace simpkit {

// One evaluation row: BLEU/SARI on a 0-100 scale, FKGL unbounded,
// match/add/del as proportions in [0,1].
struct EvalReport {
    double bleu = 0.0;
    double sari = 0.0;
    double fkgl = 0.0;
    double match = 0.0;
    double add = 0.0;
    double del = 0.0;
    std::size_t n_sentences = 0;

    bool operator==(const EvalReport&) const = default;
};

struct CorpusStats {
    std::size_t n_sentences = 0;
    std::size_t vocab_size = 0;
    double mean_compression = 0.0;  // meaningful only for paired corpora
    double fkgl = 0.0;
};

// Flesch-Kincaid grade from document aggregates. Not clamped; very simple
// text goes negative.
inline double fkgl_from_counts(double words, double syllables, double sentences) {
    return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

struct SyllableStats {
    std::int64_t words = 0;
    std::int64_t syllables = 0;
};

inline SyllableStats syllable_stats(std::span<const std::string> tokens) {
    SyllableStats st;
    for (const std::string& tok : tokens) {
        int syl = count_syllables(tok);
        if (syl > 0) {
            ++st.words;
            st.syllables += syl;
        }
    }
    return st;
}

// Document-level FKGL: ratios over the whole input, one Sentence = one
// sentence. Punctuation and other non-word tokens are excluded from the
// word count.
inline double fkgl(std::span<const Sentence> sentences) {
    if (sentences.empty()) throw ValidationError("fkgl: empty input");
    std::int64_t words = 0, syllables = 0;
    for (const Sentence& s : sentences) {
        SyllableStats st = syllable_stats(s.tokens);
        words += st.words;
        syllables += st.syllables;
    }
    if (words == 0) throw ValidationError("fkgl: input contains no words");
    return fkgl_from_counts(static_cast<double>(words), static_cast<double>(syllables),
                            static_cast<double>(sentences.size()));
}

namespace detail {

inline void require_aligned(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw ValidationError(std::string(what) + ": misaligned inputs (" + std::to_string(a) +
                              " vs " + std::to_string(b) + " sentences)");
}

}  // namespace detail

// Corpus BLEU: clipped modified n-gram precisions for n = 1..4 (truncated to
// the highest order for which the hypothesis corpus has any n-grams),
// geometric mean, closest-reference brevity penalty, no smoothing.
inline double bleu(std::span<const Sentence> hypotheses,
                   std::span<const std::vector<Sentence>> references) {
    detail::require_aligned(hypotheses.size(), references.size(), "bleu");
    if (hypotheses.empty()) throw ValidationError("bleu: empty corpus");

    std::int64_t match[4] = {0, 0, 0, 0};
    std::int64_t total[4] = {0, 0, 0, 0};
    std::int64_t hyp_len = 0, ref_len = 0;

    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const auto& hyp = hypotheses[i].tokens;
        const auto& refs = references[i];
        if (refs.empty()) throw ValidationError("bleu: sentence " + std::to_string(i + 1) +
                                                " has no reference");
        hyp_len += static_cast<std::int64_t>(hyp.size());

        // Closest reference length; ties go to the shorter reference.
        std::int64_t best = static_cast<std::int64_t>(refs[0].tokens.size());
        for (const Sentence& r : refs) {
            std::int64_t rl = static_cast<std::int64_t>(r.tokens.size());
            std::int64_t hl = static_cast<std::int64_t>(hyp.size());
            if (std::llabs(rl - hl) < std::llabs(best - hl) ||
                (std::llabs(rl - hl) == std::llabs(best - hl) && rl < best))
                best = rl;
        }
        ref_len += best;

        for (int n = 1; n <= 4; ++n) {
            TokenMultiset hyp_ngrams = ngram_counts(hyp, n);
            if (hyp_ngrams.empty()) continue;
            TokenMultiset clip;
            for (const Sentence& r : refs) {
                for (const auto& [g, c] : ngram_counts(r.tokens, n)) {
                    auto& slot = clip[g];
                    slot = std::max(slot, c);
                }
            }
            for (const auto& [g, c] : hyp_ngrams) {
                total[n - 1] += c;
                auto it = clip.find(g);
                if (it != clip.end()) match[n - 1] += std::min(c, it->second);
            }
        }
    }

    int order = 0;
    for (int n = 4; n >= 1; --n) {
        if (total[n - 1] > 0) {
            order = n;
            break;
        }
    }
    if (order == 0 || hyp_len == 0) return 0.0;

    double log_prec = 0.0;
    for (int n = 1; n <= order; ++n) {
        if (match[n - 1] == 0) return 0.0;
        log_prec += std::log(static_cast<double>(match[n - 1]) / static_cast<double>(total[n - 1]));
    }
    log_prec /= order;

    double bp = 1.0;
    if (hyp_len < ref_len)
        bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return 100.0 * bp * std::exp(log_prec);
}

namespace detail {

// Fractional multiset used for averaged reference counts.
using FracCounts = std::map<std::string, double>;

inline FracCounts to_frac(const TokenMultiset& m) {
    FracCounts out;
    for (const auto& [k, v] : m) out[k] = static_cast<double>(v);
    return out;
}

inline FracCounts frac_min(const FracCounts& a, const FracCounts& b) {
    FracCounts out;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it != b.end()) {
            double m = std::min(v, it->second);
            if (m > 0.0) out[k] = m;
        }
    }
    return out;
}

inline FracCounts frac_diff(const FracCounts& a, const FracCounts& b) {
    FracCounts out;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        double d = v - (it == b.end() ? 0.0 : it->second);
        if (d > 0.0) out[k] = d;
    }
    return out;
}

inline double frac_total(const FracCounts& m) {
    double t = 0.0;
    for (const auto& [k, v] : m) t += v;
    return t;
}

struct OpScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Precision/recall of a system operation against the reference operation.
// Matching nothing when nothing should happen counts as perfect; doing
// nothing when the references act (or vice versa) scores zero.
inline OpScore op_score(const FracCounts& sys, const FracCounts& ref) {
    double sys_total = frac_total(sys);
    double ref_total = frac_total(ref);
    double correct = frac_total(frac_min(sys, ref));
    OpScore s;
    s.precision = sys_total > 0.0 ? correct / sys_total : (ref_total == 0.0 ? 1.0 : 0.0);
    s.recall = ref_total > 0.0 ? correct / ref_total : (sys_total == 0.0 ? 1.0 : 0.0);
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

}  // namespace detail

// Per-sentence SARI: mean over n = 1..4 of the arithmetic mean of add-F1,
// keep-F1 and delete-precision, with reference n-gram counts averaged over
// the reference set. 0-100 scale.
inline double sari_sentence(const Sentence& source, const Sentence& hypothesis,
                            std::span<const Sentence> references) {
    if (references.empty()) throw ValidationError("sari: sentence has no reference");
    double total = 0.0;
    for (int n = 1; n <= 4; ++n) {
        detail::FracCounts src = detail::to_frac(ngram_counts(source.tokens, n));
        detail::FracCounts hyp = detail::to_frac(ngram_counts(hypothesis.tokens, n));
        detail::FracCounts ref;
        for (const Sentence& r : references)
            for (const auto& [g, c] : ngram_counts(r.tokens, n)) ref[g] += static_cast<double>(c);
        for (auto& [g, c] : ref) c /= static_cast<double>(references.size());

        detail::FracCounts keep_sys = detail::frac_min(src, hyp);
        detail::FracCounts keep_ref = detail::frac_min(src, ref);
        detail::FracCounts add_sys = detail::frac_diff(hyp, src);
        detail::FracCounts add_ref = detail::frac_diff(ref, src);
        detail::FracCounts del_sys = detail::frac_diff(src, hyp);
        detail::FracCounts del_ref = detail::frac_diff(src, ref);

        double keep_f1 = detail::op_score(keep_sys, keep_ref).f1;
        double add_f1 = detail::op_score(add_sys, add_ref).f1;
        double del_precision = detail::op_score(del_sys, del_ref).precision;
        total += (keep_f1 + add_f1 + del_precision) / 3.0;
    }
    return 100.0 * total / 4.0;
}

// Macro-average of per-sentence SARI over the corpus.
inline double sari(std::span<const Sentence> sources, std::span<const Sentence> hypotheses,
                   std::span<const std::vector<Sentence>> references) {
    detail::require_aligned(sources.size(), hypotheses.size(), "sari");
    detail::require_aligned(sources.size(), references.size(), "sari");
    if (sources.empty()) throw ValidationError("sari: empty corpus");
    double total = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        total += sari_sentence(sources[i], hypotheses[i], references[i]);
    return total / static_cast<double>(sources.size());
}

// Fraction of pairs whose lowercased token lists are identical.
inline double exact_match_ratio(std::span<const Sentence> sources,
                                std::span<const Sentence> hypotheses) {
    detail::require_aligned(sources.size(), hypotheses.size(), "exact_match_ratio");
    if (sources.empty()) throw ValidationError("exact_match_ratio: empty corpus");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        if (sources[i].tokens == hypotheses[i].tokens) ++hits;
    return static_cast<double>(hits) / static_cast<double>(sources.size());
}

// Type-level added/deleted proportions, macro-averaged. An empty hypothesis
// contributes add = 0 and del = 1.
inline std::pair<double, double> added_deleted_proportions(std::span<const Sentence> sources,
                                                           std::span<const Sentence> hypotheses) {
    detail::require_aligned(sources.size(), hypotheses.size(), "added_deleted_proportions");
    if (sources.empty()) throw ValidationError("added_deleted_proportions: empty corpus");
    double add_sum = 0.0, del_sum = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        std::set<std::string> src(sources[i].tokens.begin(), sources[i].tokens.end());
        std::set<std::string> hyp(hypotheses[i].tokens.begin(), hypotheses[i].tokens.end());
        if (src.empty())
            throw ValidationError("added_deleted_proportions: empty source at sentence " +
                                  std::to_string(i + 1));
        if (hyp.empty()) {
            del_sum += 1.0;
            continue;
        }
        std::size_t added = 0, deleted = 0;
        for (const auto& t : hyp)
            if (!src.count(t)) ++added;
        for (const auto& t : src)
            if (!hyp.count(t)) ++deleted;
        add_sum += static_cast<double>(added) / static_cast<double>(hyp.size());
        del_sum += static_cast<double>(deleted) / static_cast<double>(src.size());
    }
    double n = static_cast<double>(sources.size());
    return {add_sum / n, del_sum / n};
}

// Character-length ratio target/source on raw text.
inline double compression_ratio(const Sentence& source, const Sentence& target) {
    std::size_t src_chars = utf8_length(source.raw);
    if (src_chars == 0) throw ValidationError("compression_ratio: empty source");
    return static_cast<double>(utf8_length(target.raw)) / static_cast<double>(src_chars);
}

inline EvalReport evaluate(std::span<const Sentence> sources,
                           std::span<const Sentence> hypotheses,
                           std::span<const std::vector<Sentence>> references) {
    EvalReport r;
    r.bleu = bleu(hypotheses, references);
    r.sari = sari(sources, hypotheses, references);
    r.fkgl = fkgl(hypotheses);
    r.match = exact_match_ratio(sources, hypotheses);
    auto [add, del] = added_deleted_proportions(sources, hypotheses);
    r.add = add;
    r.del = del;
    r.n_sentences = sources.size();
    return r;
}

inline CorpusStats corpus_stats(std::span<const Sentence> side) {
    if (side.empty()) throw ValidationError("corpus_stats: empty corpus");
    CorpusStats st;
    st.n_sentences = side.size();
    std::set<std::string> vocab;
    for (const Sentence& s : side) vocab.insert(s.tokens.begin(), s.tokens.end());
    st.vocab_size = vocab.size();
    st.fkgl = fkgl(side);
    return st;
}

inline double mean_compression(std::span<const Sentence> sources,
                               std::span<const Sentence> targets) {
    detail::require_aligned(sources.size(), targets.size(), "mean_compression");
    if (sources.empty()) throw ValidationError("mean_compression: empty corpus");
    double total = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        total += compression_ratio(sources[i], targets[i]);
    return total / static_cast<double>(sources.size());
}

}  // namespace simpkit
