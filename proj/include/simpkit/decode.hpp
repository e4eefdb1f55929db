#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simpkit/control.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/metrics.hpp"
#include "simpkit/models.hpp"
#include "simpkit/text.hpp"

namespace simpkit {

// Coefficients for the three multiplicative score penalties; (0,0,0) is
// vanilla beam search. Positive values penalize, negative values reward.
struct PenaltyConfig {
    double lambda_length = 0.0;
    double lambda_exact = 0.0;
    double lambda_fkgl = 0.0;

    bool is_vanilla() const {
        return lambda_length == 0.0 && lambda_exact == 0.0 && lambda_fkgl == 0.0;
    }

    bool operator==(const PenaltyConfig&) const = default;
};

struct BeamConfig {
    int beam_size = 8;
    int max_len = 64;  // maximum emitted tokens, end-of-sequence included
};

struct Hypothesis {
    std::vector<std::string> tokens;  // includes the end-of-sequence token when complete
    double logprob = 0.0;
    double adjusted_score = 0.0;  // logprob - penalty_logsum
    bool complete = false;
};

// Output tokens: end-of-sequence and control tokens removed.
inline std::vector<std::string> surface_tokens(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& tok : tokens) {
        if (tok == kEosToken) continue;
        if (is_control_token(tok)) continue;
        out.push_back(tok);
    }
    return out;
}

// log(LP * EMP * FKGLP) for a hypothesis prefix: lambda_length * length +
// lambda_exact * cos(source, hypothesis) + lambda_fkgl * FKGL(hypothesis as
// one sentence). End-of-sequence and control tokens are excluded from all
// three terms; a hypothesis with no words contributes 0 to the FKGL term.
// The ranking key everywhere is logprob - penalty_logsum.
inline double penalty_logsum(std::span<const std::string> hyp_tokens, const Sentence& source,
                             const PenaltyConfig& config) {
    if (config.is_vanilla()) return 0.0;
    std::vector<std::string> hyp = surface_tokens(hyp_tokens);
    std::vector<std::string> src = strip_control_prefix(source.tokens);

    double sum = config.lambda_length * static_cast<double>(hyp.size());
    if (config.lambda_exact != 0.0) sum += config.lambda_exact * cosine_bow(src, hyp);
    if (config.lambda_fkgl != 0.0) {
        SyllableStats st = syllable_stats(hyp);
        if (st.words > 0)
            sum += config.lambda_fkgl * fkgl_from_counts(static_cast<double>(st.words),
                                                         static_cast<double>(st.syllables), 1.0);
    }
    return sum;
}

// Deterministic hypothesis ordering: adjusted score, then raw logprob, then
// lexicographic tokens.
inline bool hypothesis_before(const Hypothesis& a, const Hypothesis& b) {
    if (a.adjusted_score != b.adjusted_score) return a.adjusted_score > b.adjusted_score;
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.tokens < b.tokens;
}

// Beam search with penalties applied to every prefix. Completed hypotheses
// retire to a pool which is returned ranked best-first. If nothing completes
// within max_len the best incomplete hypothesis is returned, flagged.
inline std::vector<Hypothesis> beam_search(const SequenceModel& model, const Sentence& source,
                                           const BeamConfig& beam_cfg,
                                           const PenaltyConfig& penalty_cfg) {
    if (beam_cfg.beam_size < 1) throw ValidationError("beam_search: beam_size must be >= 1");
    if (beam_cfg.max_len < 1) throw ValidationError("beam_search: max_len must be >= 1");

    std::vector<std::string> vocab = model.vocabulary(source.tokens);
    std::size_t eos = detail::index_of(vocab, kEosToken);
    if (eos == vocab.size())
        throw DecodeError("model vocabulary has no end-of-sequence token");

    std::vector<Hypothesis> beams{
        Hypothesis{{}, 0.0, -penalty_logsum({}, source, penalty_cfg), false}};
    std::vector<Hypothesis> pool;
    Hypothesis deepest_live = beams.front();

    for (int step = 0; step < beam_cfg.max_len && !beams.empty(); ++step) {
        std::vector<Hypothesis> candidates;
        for (const Hypothesis& h : beams) {
            std::vector<double> lp = model.next_logprobs(source.tokens, h.tokens);
            for (std::size_t v = 0; v < vocab.size(); ++v) {
                if (lp[v] == kNegInf) continue;
                Hypothesis next;
                next.tokens = h.tokens;
                next.tokens.push_back(vocab[v]);
                next.logprob = h.logprob + lp[v];
                next.complete = (v == eos);
                next.adjusted_score =
                    next.logprob - penalty_logsum(next.tokens, source, penalty_cfg);
                if (next.complete)
                    pool.push_back(std::move(next));
                else
                    candidates.push_back(std::move(next));
            }
        }
        std::sort(candidates.begin(), candidates.end(), hypothesis_before);
        if (candidates.size() > static_cast<std::size_t>(beam_cfg.beam_size))
            candidates.resize(static_cast<std::size_t>(beam_cfg.beam_size));
        beams = std::move(candidates);
        if (!beams.empty()) deepest_live = beams.front();
    }

    if (pool.empty()) return {deepest_live};
    std::sort(pool.begin(), pool.end(), hypothesis_before);
    return pool;
}

// Re-rank a fixed candidate pool under a penalty config and return the full
// ranking. Candidate logprobs are taken as given.
inline std::vector<Hypothesis> rescore_ranked(std::span<const Hypothesis> candidates,
                                              const Sentence& source,
                                              const PenaltyConfig& config) {
    if (candidates.empty()) throw ValidationError("rescore: empty candidate list");
    std::vector<Hypothesis> out(candidates.begin(), candidates.end());
    for (Hypothesis& h : out)
        h.adjusted_score = h.logprob - penalty_logsum(h.tokens, source, config);
    std::sort(out.begin(), out.end(), hypothesis_before);
    return out;
}

inline Hypothesis rescore(std::span<const Hypothesis> candidates, const Sentence& source,
                          const PenaltyConfig& config) {
    return rescore_ranked(candidates, source, config).front();
}

// Rescoring-mode decoding: collect the completed pool with a vanilla beam,
// then pick the penalized argmax over that fixed pool.
inline std::vector<Hypothesis> beam_search_rescoring(const SequenceModel& model,
                                                     const Sentence& source,
                                                     const BeamConfig& beam_cfg,
                                                     const PenaltyConfig& penalty_cfg) {
    std::vector<Hypothesis> pool = beam_search(model, source, beam_cfg, PenaltyConfig{});
    if (pool.size() == 1 && !pool.front().complete) return pool;
    return rescore_ranked(pool, source, penalty_cfg);
}

}  // namespace simpkit
