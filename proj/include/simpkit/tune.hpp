#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simpkit/decode.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/metrics.hpp"
#include "simpkit/models.hpp"
#include "simpkit/util.hpp"

namespace simpkit {

// Candidate values per penalty coefficient; the cross product is searched.
struct GridSpec {
    std::vector<double> length;
    std::vector<double> exact;
    std::vector<double> fkgl;

    static GridSpec defaults() {
        std::vector<double> r{0.1, 0.4, 0.7, 1.0, 1.3};
        return GridSpec{r, r, r};
    }

    std::size_t cardinality() const { return length.size() * exact.size() * fkgl.size(); }

    void validate() const {
        for (const auto* dim : {&length, &exact, &fkgl}) {
            if (dim->empty()) throw ValidationError("grid: empty dimension");
            for (std::size_t i = 1; i < dim->size(); ++i)
                if ((*dim)[i] <= (*dim)[i - 1])
                    throw ValidationError("grid: values must be strictly increasing");
        }
    }
};

struct TuneEntry {
    PenaltyConfig config;
    std::optional<EvalReport> report;  // absent when the grid point errored
    double objective = 0.0;
    std::optional<std::string> error;
};

struct TuneResult {
    PenaltyConfig best;
    std::size_t best_index = 0;
    std::vector<TuneEntry> table;  // grid order: lambda_length, then exact, then fkgl
};

struct TuneOptions {
    BeamConfig beam;
    double beta = 1.0;  // objective = SARI - beta * FKGL
    bool rescore_mode = false;
    int threads = 0;
};

// Decode one corpus under a fixed penalty config; top hypothesis per line.
inline std::vector<Sentence> decode_corpus(const SequenceModel& model,
                                           std::span<const Sentence> sources,
                                           const BeamConfig& beam_cfg,
                                           const PenaltyConfig& penalty_cfg,
                                           bool rescore_mode = false, int threads = 0) {
    std::vector<Sentence> out(sources.size());
    parallel_for(sources.size(), threads, [&](std::size_t i) {
        std::vector<Hypothesis> ranked =
            rescore_mode ? beam_search_rescoring(model, sources[i], beam_cfg, penalty_cfg)
                         : beam_search(model, sources[i], beam_cfg, penalty_cfg);
        out[i] = sentence_from_tokens(surface_tokens(ranked.front().tokens));
    });
    return out;
}

// Grid search over penalty configs on a validation set, maximizing
// SARI - beta * FKGL. Ties break toward the lexicographically smallest
// (lambda_length, lambda_exact, lambda_fkgl). Grid points whose decoding
// fails are recorded and excluded from the argmax.
inline TuneResult tune(const SequenceModel& model, std::span<const Sentence> sources,
                       std::span<const std::vector<Sentence>> references, const GridSpec& grid,
                       const TuneOptions& options = {}) {
    grid.validate();
    if (sources.empty()) throw ValidationError("tune: empty validation set");
    detail::require_aligned(sources.size(), references.size(), "tune");

    std::vector<PenaltyConfig> configs;
    configs.reserve(grid.cardinality());
    for (double l : grid.length)
        for (double e : grid.exact)
            for (double f : grid.fkgl) configs.push_back(PenaltyConfig{l, e, f});

    std::vector<TuneEntry> table(configs.size());
    parallel_for(configs.size(), options.threads, [&](std::size_t i) {
        TuneEntry entry;
        entry.config = configs[i];
        try {
            std::vector<Sentence> hyps =
                decode_corpus(model, sources, options.beam, configs[i], options.rescore_mode, 1);
            EvalReport report = evaluate(sources, hyps, references);
            entry.report = report;
            entry.objective = report.sari - options.beta * report.fkgl;
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        table[i] = std::move(entry);
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].error) continue;
        if (!best || table[i].objective > table[*best].objective) best = i;
    }
    if (!best) throw DecodeError("tune: every grid point failed");

    TuneResult result;
    result.best = table[*best].config;
    result.best_index = *best;
    result.table = std::move(table);
    return result;
}

}  // namespace simpkit
