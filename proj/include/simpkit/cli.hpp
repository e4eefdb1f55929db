#pragma once

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simpkit/bt.hpp"
#include "simpkit/control.hpp"
#include "simpkit/decode.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/io.hpp"
#include "simpkit/metrics.hpp"
#include "simpkit/models.hpp"
#include "simpkit/text.hpp"
#include "simpkit/tune.hpp"

namespace simpkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitMissingResource = 3;
inline constexpr int kExitDecode = 4;

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ResourceError*>(&e)) return kExitMissingResource;
    if (dynamic_cast<const DecodeError*>(&e)) return kExitDecode;
    return kExitValidation;
}

template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

inline void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << content;
    else
        write_file(path, content);
}

// ---- stats ----

struct StatsArgs {
    std::string src;
    std::string tgt;  // optional
    std::string out_tsv;
    std::string out_json;
};

inline int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            std::vector<Sentence> src = load_corpus(args.src);
            CorpusStats src_stats = corpus_stats(src);

            nlohmann::json j{{"n_sentences", src_stats.n_sentences},
                             {"source", {{"vocab_size", src_stats.vocab_size},
                                         {"fkgl", src_stats.fkgl}}}};
            std::string tsv = "n_sentences\tvocab_src\tfkgl_src";
            std::string row = std::to_string(src_stats.n_sentences) + '\t' +
                              std::to_string(src_stats.vocab_size) + '\t' +
                              format_fixed(src_stats.fkgl, 2);

            if (!args.tgt.empty()) {
                std::vector<Sentence> tgt = load_corpus(args.tgt);
                detail::require_aligned(src.size(), tgt.size(), "stats");
                CorpusStats tgt_stats = corpus_stats(tgt);
                double compression = mean_compression(src, tgt);
                j["target"] = {{"vocab_size", tgt_stats.vocab_size}, {"fkgl", tgt_stats.fkgl}};
                j["mean_compression"] = compression;
                tsv += "\tvocab_tgt\tfkgl_tgt\tcompression";
                row += '\t' + std::to_string(tgt_stats.vocab_size) + '\t' +
                       format_fixed(tgt_stats.fkgl, 2) + '\t' + format_fixed(compression, 2);
            }
            tsv += '\n' + row + '\n';

            emit(tsv, args.out_tsv, out);
            if (!args.out_json.empty()) write_file(args.out_json, j.dump(2) + "\n");
            return kExitOk;
        },
        err);
}

// ---- eval ----

struct EvalArgs {
    std::string src;
    std::string hyp;
    std::vector<std::string> refs;
    std::string out_tsv;
    std::string out_json;
    std::string per_sentence;  // optional per-sentence SARI/FKGL TSV
};

inline int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            std::vector<Sentence> src = load_corpus(args.src);
            std::vector<Sentence> hyp = load_corpus(args.hyp, false);
            detail::require_aligned(src.size(), hyp.size(), "eval");
            if (args.refs.empty()) throw ValidationError("eval: at least one --ref required");

            std::vector<std::vector<Sentence>> refs(src.size());
            for (const std::string& path : args.refs) {
                std::vector<Sentence> r = load_corpus(path, false);
                detail::require_aligned(src.size(), r.size(), "eval");
                for (std::size_t i = 0; i < r.size(); ++i) refs[i].push_back(std::move(r[i]));
            }

            EvalReport report = evaluate(src, hyp, refs);
            emit(eval_report_tsv(report), args.out_tsv, out);
            if (!args.out_json.empty())
                write_file(args.out_json, to_json(report).dump(2) + "\n");

            if (!args.per_sentence.empty()) {
                std::string tsv = "index\tsari\tfkgl\n";
                for (std::size_t i = 0; i < src.size(); ++i) {
                    double s = sari_sentence(src[i], hyp[i], refs[i]);
                    SyllableStats st = syllable_stats(hyp[i].tokens);
                    tsv += std::to_string(i + 1) + '\t' + format_fixed(s, 4) + '\t';
                    if (st.words > 0)
                        tsv += format_fixed(
                            fkgl_from_counts(static_cast<double>(st.words),
                                             static_cast<double>(st.syllables), 1.0),
                            4);
                    tsv += '\n';
                }
                write_file(args.per_sentence, tsv);
            }
            return kExitOk;
        },
        err);
}

// ---- tokens ----

struct TokensArgs {
    std::string src;
    std::string tgt;
    std::string freq_table;
    FreqFormat freq_format = FreqFormat::Auto;
    std::string depths_src;  // optional sidecars; both or neither
    std::string depths_tgt;
    std::string out;
};

inline int cmd_tokens(const TokensArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            if (args.freq_table.empty())
                throw ResourceError("tokens: --freq-table is required");
            FrequencyTable table = load_frequency_table(args.freq_table, args.freq_format);
            std::vector<Sentence> src = load_corpus(args.src);
            std::vector<Sentence> tgt = load_corpus(args.tgt);
            detail::require_aligned(src.size(), tgt.size(), "tokens");

            std::unique_ptr<TextKeyedDepths> depths;
            if (!args.depths_src.empty() || !args.depths_tgt.empty()) {
                if (args.depths_src.empty() || args.depths_tgt.empty())
                    throw ValidationError("tokens: --depths-src and --depths-tgt go together");
                depths = std::make_unique<TextKeyedDepths>();
                add_sidecar_depths(*depths, args.depths_src, src);
                add_sidecar_depths(*depths, args.depths_tgt, tgt);
            }

            std::string tsv;
            for (std::size_t i = 0; i < src.size(); ++i) {
                ControlTokens c = control_tokens(src[i], tgt[i], table, depths.get());
                tsv += join(render_control_tokens(c)) + '\t' + tgt[i].raw + '\n';
            }
            emit(tsv, args.out, out);
            return kExitOk;
        },
        err);
}

// ---- prepare-bt ----

struct PrepareBtArgs {
    std::string src;
    std::string freq_table;
    FreqFormat freq_format = FreqFormat::Auto;
    double drop = 0.0;
    int shuffle = 0;
    std::uint64_t seed = 0;
    Direction direction = Direction::ComplexToSimple;
    std::string out;
};

inline int cmd_prepare_bt(const PrepareBtArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            if (args.freq_table.empty())
                throw ResourceError("prepare-bt: --freq-table is required");
            FrequencyTable table = load_frequency_table(args.freq_table, args.freq_format);
            std::vector<Sentence> corpus = load_corpus(args.src);
            NoiseConfig noise_cfg{args.drop, args.shuffle};

            std::vector<BTExample> examples;
            examples.reserve(corpus.size());
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                // Per-sentence derived seed keeps output independent of
                // any parallel scheduling.
                std::uint64_t line_seed = args.seed + i;
                Translator translator = [&](const Sentence& s) {
                    return sentence_from_tokens(noise(s.tokens, noise_cfg, line_seed));
                };
                examples.push_back(
                    make_bt_example(corpus[i], translator, table, nullptr, args.direction));
            }
            emit(bt_examples_to_tsv(examples), args.out, out);
            return kExitOk;
        },
        err);
}

// ---- decode ----

struct DecodeArgs {
    std::string model;
    std::string input;
    int beam = 8;
    int max_len = 0;  // 0 = auto: 2 * source length + 8
    PenaltyConfig penalties;
    std::string penalty_config;  // JSON file, overrides --lp/--emp/--fkglp
    std::string prefix;          // control tokens prepended to every line
    bool rescore = false;
    int n_best = 0;  // 0 = plain one-line-per-input output
    int threads = 0;
    std::string out;
};

// Splits a raw input line into leading control-token chunks and the
// remaining sentence text. Control tokens are matched on the raw chunk so
// tokenization never mangles them.
inline std::pair<std::vector<std::string>, std::string> split_line_control_prefix(
    const std::string& line) {
    std::vector<std::string> chunks = split_whitespace(line);
    std::vector<std::string> prefix;
    std::size_t i = 0;
    while (i < chunks.size() && is_control_token(chunks[i])) prefix.push_back(chunks[i++]);
    std::string rest;
    for (; i < chunks.size(); ++i) {
        if (!rest.empty()) rest += ' ';
        rest += chunks[i];
    }
    return {std::move(prefix), std::move(rest)};
}

inline int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            std::unique_ptr<SequenceModel> model = load_model_spec(args.model);
            PenaltyConfig penalties = args.penalties;
            if (!args.penalty_config.empty())
                penalties = load_penalty_config(args.penalty_config);

            std::vector<std::string> flag_prefix;
            if (!args.prefix.empty()) {
                for (const std::string& tok : split_whitespace(args.prefix)) {
                    if (!is_control_token(tok))
                        throw ValidationError("decode: '" + tok +
                                              "' in --prefix is not a control token");
                    flag_prefix.push_back(tok);
                }
            }

            std::vector<std::string> lines = read_lines(args.input);
            std::vector<Sentence> sources(lines.size());
            for (std::size_t i = 0; i < lines.size(); ++i) {
                auto [line_prefix, rest] = split_line_control_prefix(lines[i]);
                Sentence s;
                s.raw = lines[i];
                s.tokens = flag_prefix;
                s.tokens.insert(s.tokens.end(), line_prefix.begin(), line_prefix.end());
                std::vector<std::string> content = tokenize(rest);
                s.tokens.insert(s.tokens.end(), content.begin(), content.end());
                sources[i] = std::move(s);
            }

            std::vector<std::vector<Hypothesis>> ranked(sources.size());
            std::optional<std::pair<std::size_t, std::string>> failure;
            std::mutex failure_mu;
            parallel_for(sources.size(), args.threads, [&](std::size_t i) {
                try {
                    BeamConfig beam_cfg{args.beam,
                                        args.max_len > 0
                                            ? args.max_len
                                            : static_cast<int>(2 * sources[i].tokens.size() + 8)};
                    ranked[i] = args.rescore
                                    ? beam_search_rescoring(*model, sources[i], beam_cfg,
                                                            penalties)
                                    : beam_search(*model, sources[i], beam_cfg, penalties);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure || i < failure->first) failure = {i, e.what()};
                }
            });
            if (failure)
                throw DecodeError("line " + std::to_string(failure->first + 1) + ": " +
                                  failure->second);

            std::string text;
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                if (args.n_best > 0) {
                    std::size_t k =
                        std::min<std::size_t>(ranked[i].size(), static_cast<std::size_t>(args.n_best));
                    for (std::size_t r = 0; r < k; ++r) {
                        const Hypothesis& h = ranked[i][r];
                        text += std::to_string(i + 1) + '\t' + std::to_string(r + 1) + '\t' +
                                format_fixed(h.adjusted_score, 6) + '\t' +
                                format_fixed(h.logprob, 6) + '\t' +
                                join(surface_tokens(h.tokens)) + '\n';
                    }
                } else {
                    text += join(surface_tokens(ranked[i].front().tokens)) + '\n';
                }
            }
            emit(text, args.out, out);
            return kExitOk;
        },
        err);
}

// ---- tune ----

struct TuneArgs {
    std::string model;
    std::string src;
    std::vector<std::string> refs;
    GridSpec grid = GridSpec::defaults();
    double beta = 1.0;
    int beam = 8;
    int max_len = 0;
    bool rescore = false;
    int threads = 0;
    std::string out_table;
    std::string out_best;
};

inline int cmd_tune(const TuneArgs& args, std::ostream& out, std::ostream& err) {
    return run_guarded(
        [&]() {
            std::unique_ptr<SequenceModel> model = load_model_spec(args.model);
            std::vector<Sentence> src = load_corpus(args.src);
            if (args.refs.empty()) throw ValidationError("tune: at least one --ref required");
            std::vector<std::vector<Sentence>> refs(src.size());
            for (const std::string& path : args.refs) {
                std::vector<Sentence> r = load_corpus(path, false);
                detail::require_aligned(src.size(), r.size(), "tune");
                for (std::size_t i = 0; i < r.size(); ++i) refs[i].push_back(std::move(r[i]));
            }

            std::size_t max_src = 0;
            for (const Sentence& s : src) max_src = std::max(max_src, s.tokens.size());
            TuneOptions options;
            options.beam = BeamConfig{args.beam, args.max_len > 0
                                                     ? args.max_len
                                                     : static_cast<int>(2 * max_src + 8)};
            options.beta = args.beta;
            options.rescore_mode = args.rescore;
            options.threads = args.threads;

            TuneResult result = tune(*model, src, refs, args.grid, options);
            emit(tune_table_tsv(result), args.out_table, out);

            nlohmann::json best = to_json(result.best);
            best["objective"] = result.table[result.best_index].objective;
            best["beta"] = args.beta;
            if (!args.out_best.empty())
                write_file(args.out_best, best.dump(2) + "\n");
            else
                out << best.dump(2) << "\n";
            return kExitOk;
        },
        err);
}

}  // namespace simpkit::cli
