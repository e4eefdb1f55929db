#include <catch2/catch_amalgamated.hpp>

#include "simpkit/tune.hpp"

#include <numeric>

#include "simpkit/io.hpp"
#include "oracles.hpp"

using namespace simpkit;
using Catch::Approx;

namespace {

// Validation pair where the model can either copy or shorten, so penalties
// actually move the metrics.
struct Fixture {
    TableModel model;
    std::vector<Sentence> sources;
    std::vector<std::vector<Sentence>> references;

    Fixture() : model(build_model()) {
        sources = {make_sentence("the little cat sat"), make_sentence("a big dog ran")};
        references = {{make_sentence("the cat sat")}, {make_sentence("a dog ran")}};
    }

    static TableModel build_model() {
        std::map<std::pair<std::string, std::string>, TableModel::Distribution> states;
        // First source: copy vs the reference-like shortening.
        states[{"the little cat sat", ""}] = {{"the", 1.0}};
        states[{"the little cat sat", "the"}] = {{"little", 0.6}, {"cat", 0.4}};
        states[{"the little cat sat", "the little"}] = {{"cat", 1.0}};
        states[{"the little cat sat", "the little cat"}] = {{"sat", 1.0}};
        states[{"the little cat sat", "the little cat sat"}] = {{std::string(kEosToken), 1.0}};
        states[{"the little cat sat", "the cat"}] = {{"sat", 1.0}};
        states[{"the little cat sat", "the cat sat"}] = {{std::string(kEosToken), 1.0}};
        // Second source: same structure.
        states[{"a big dog ran", ""}] = {{"a", 1.0}};
        states[{"a big dog ran", "a"}] = {{"big", 0.7}, {"dog", 0.3}};
        states[{"a big dog ran", "a big"}] = {{"dog", 1.0}};
        states[{"a big dog ran", "a big dog"}] = {{"ran", 1.0}};
        states[{"a big dog ran", "a big dog ran"}] = {{std::string(kEosToken), 1.0}};
        states[{"a big dog ran", "a dog"}] = {{"ran", 1.0}};
        states[{"a big dog ran", "a dog ran"}] = {{std::string(kEosToken), 1.0}};
        return TableModel::with_eos_default(std::move(states));
    }
};

struct ThrowingModel : SequenceModel {
    std::vector<std::string> vocabulary(const std::vector<std::string>&) const override {
        return {std::string(kEosToken), "a"};
    }
    std::vector<double> next_logprobs(const std::vector<std::string>&,
                                      std::span<const std::string>) const override {
        throw DecodeError("deliberately broken model");
    }
};

}  // namespace

TEST_CASE("a single-point grid selects that point") {
    Fixture fx;
    GridSpec grid{{0.4}, {0.7}, {1.0}};
    TuneResult result = tune(fx.model, fx.sources, fx.references, grid);
    REQUIRE(result.table.size() == 1);
    CHECK(result.best == PenaltyConfig{0.4, 0.7, 1.0});
    CHECK(result.best_index == 0);
    REQUIRE(result.table[0].report.has_value());
}

TEST_CASE("the default grid has 125 points in lexicographic order") {
    GridSpec grid = GridSpec::defaults();
    CHECK(grid.cardinality() == 125);
    CHECK(grid.length == std::vector<double>{0.1, 0.4, 0.7, 1.0, 1.3});

    Fixture fx;
    TuneOptions options;
    options.beam.beam_size = 4;
    options.beam.max_len = 12;
    TuneResult result = tune(fx.model, fx.sources, fx.references, grid, options);
    REQUIRE(result.table.size() == 125);

    // Grid order: lambda_length outermost, lambda_fkgl innermost.
    std::size_t i = 0;
    for (double l : grid.length)
        for (double e : grid.exact)
            for (double f : grid.fkgl) {
                CHECK(result.table[i].config == PenaltyConfig{l, e, f});
                ++i;
            }
}

TEST_CASE("the best entry maximizes SARI - beta * FKGL over non-errored rows") {
    Fixture fx;
    GridSpec grid{{0.1, 0.7}, {0.1, 1.3}, {0.1, 1.0}};

    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
        TuneOptions options;
        options.beta = beta;
        TuneResult result = tune(fx.model, fx.sources, fx.references, grid, options);
        double best_objective = result.table[result.best_index].objective;
        for (const TuneEntry& e : result.table) {
            if (e.error) continue;
            CHECK(best_objective >= e.objective - 1e-12);
            REQUIRE(e.report.has_value());
            CHECK(e.objective == Approx(e.report->sari - beta * e.report->fkgl).margin(1e-12));
        }
    }
}

TEST_CASE("beta = 0 reduces the objective to pure SARI") {
    Fixture fx;
    GridSpec grid{{0.1, 1.3}, {0.1, 1.3}, {0.1, 1.3}};
    TuneOptions options;
    options.beta = 0.0;
    TuneResult result = tune(fx.model, fx.sources, fx.references, grid, options);
    double best_sari = result.table[result.best_index].report->sari;
    for (const TuneEntry& e : result.table)
        if (e.report) CHECK(best_sari >= e.report->sari - 1e-12);
}

TEST_CASE("ties break toward the lexicographically smallest config") {
    // A pure copy model decodes identically under every config, so every
    // objective ties and the first grid point must win.
    NoisyCopyModel model(NoisyCopyModel::Params{1.0, 0.0, 0.0});
    std::vector<Sentence> sources{make_sentence("the cat sat")};
    std::vector<std::vector<Sentence>> refs{{make_sentence("the cat")}};
    GridSpec grid{{0.1, 0.4}, {0.1, 0.4}, {0.1, 0.4}};
    TuneResult result = tune(model, sources, refs, grid);
    CHECK(result.best == PenaltyConfig{0.1, 0.1, 0.1});
}

TEST_CASE("the table is invariant under validation-corpus permutation") {
    Fixture fx;
    GridSpec grid{{0.1, 1.0}, {0.4}, {0.1, 0.7}};
    TuneResult base = tune(fx.model, fx.sources, fx.references, grid);

    std::vector<Sentence> sources{fx.sources[1], fx.sources[0]};
    std::vector<std::vector<Sentence>> refs{fx.references[1], fx.references[0]};
    TuneResult permuted = tune(fx.model, sources, refs, grid);

    REQUIRE(base.table.size() == permuted.table.size());
    for (std::size_t i = 0; i < base.table.size(); ++i) {
        CHECK(base.table[i].config == permuted.table[i].config);
        CHECK(base.table[i].objective == Approx(permuted.table[i].objective).margin(1e-9));
    }
    CHECK(base.best == permuted.best);
}

TEST_CASE("doubling the beam never changes the grid coordinates") {
    Fixture fx;
    GridSpec grid{{0.1, 0.7}, {0.4}, {0.1}};
    TuneOptions narrow, wide;
    narrow.beam.beam_size = 2;
    wide.beam.beam_size = 4;
    TuneResult a = tune(fx.model, fx.sources, fx.references, grid, narrow);
    TuneResult b = tune(fx.model, fx.sources, fx.references, grid, wide);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i)
        CHECK(a.table[i].config == b.table[i].config);
}

TEST_CASE("re-runs serialize byte-identically") {
    Fixture fx;
    GridSpec grid{{0.1, 0.4}, {0.1}, {0.1, 0.4}};
    TuneResult a = tune(fx.model, fx.sources, fx.references, grid);
    TuneResult b = tune(fx.model, fx.sources, fx.references, grid);
    CHECK(tune_table_tsv(a) == tune_table_tsv(b));
    CHECK(to_json(a.best).dump() == to_json(b.best).dump());

    // Thread count must not change the result either.
    TuneOptions threaded;
    threaded.threads = 3;
    TuneResult c = tune(fx.model, fx.sources, fx.references, grid, threaded);
    CHECK(tune_table_tsv(a) == tune_table_tsv(c));
}

TEST_CASE("grid points that fail are recorded and excluded from the argmax") {
    // Under a negative lambda_fkgl the decoder prefers the word-free "."
    // output, which makes the evaluation fail for that grid point only.
    std::map<std::pair<std::string, std::string>, TableModel::Distribution> states;
    states[{"*", ""}] = {{"word", 0.6}, {".", 0.4}};
    states[{"*", "word"}] = {{std::string(kEosToken), 1.0}};
    states[{"*", "."}] = {{std::string(kEosToken), 1.0}};
    TableModel model = TableModel::with_eos_default(std::move(states));

    std::vector<Sentence> sources{make_sentence("word")};
    std::vector<std::vector<Sentence>> refs{{make_sentence("word")}};
    GridSpec grid{{0.1}, {0.1}, {-2.0, 0.1}};
    TuneResult result = tune(model, sources, refs, grid);

    REQUIRE(result.table.size() == 2);
    CHECK(result.table[0].error.has_value());  // "." wins, no words to score
    CHECK(!result.table[0].report.has_value());
    CHECK(!result.table[1].error.has_value());
    CHECK(result.best == PenaltyConfig{0.1, 0.1, 0.1});
}

TEST_CASE("tune fails loudly when every grid point errors") {
    ThrowingModel model;
    std::vector<Sentence> sources{make_sentence("a")};
    std::vector<std::vector<Sentence>> refs{{make_sentence("a")}};
    GridSpec grid{{0.1}, {0.1}, {0.1, 0.4}};
    CHECK_THROWS_AS(tune(model, sources, refs, grid), DecodeError);
}

TEST_CASE("tune validates grids and inputs") {
    Fixture fx;
    CHECK_THROWS_AS(tune(fx.model, fx.sources, fx.references, GridSpec{{}, {0.1}, {0.1}}),
                    ValidationError);
    CHECK_THROWS_AS(
        tune(fx.model, fx.sources, fx.references, GridSpec{{0.4, 0.1}, {0.1}, {0.1}}),
        ValidationError);
    std::vector<std::vector<Sentence>> short_refs{{make_sentence("a")}};
    CHECK_THROWS_AS(tune(fx.model, fx.sources, short_refs, GridSpec::defaults()),
                    ValidationError);
}

TEST_CASE("decode_corpus preserves input order under concurrency") {
    Fixture fx;
    std::vector<Sentence> once =
        decode_corpus(fx.model, fx.sources, BeamConfig{4, 12}, PenaltyConfig{}, false, 1);
    std::vector<Sentence> many =
        decode_corpus(fx.model, fx.sources, BeamConfig{4, 12}, PenaltyConfig{}, false, 4);
    REQUIRE(once.size() == many.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].tokens == many[i].tokens);
}
