#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simpkit/cli.hpp"

namespace {

simpkit::FreqFormat parse_freq_format(const std::string& s) {
    if (s == "auto") return simpkit::FreqFormat::Auto;
    if (s == "counts") return simpkit::FreqFormat::Counts;
    if (s == "ranks") return simpkit::FreqFormat::Ranks;
    throw CLI::ValidationError("--freq-format", "expected auto, counts or ranks");
}

std::vector<double> parse_grid_dim(const std::string& csv) {
    std::vector<double> out;
    for (const std::string& item : simpkit::split_on(csv, ',')) {
        auto v = simpkit::detail::parse_double(simpkit::trim(item));
        if (!v) throw CLI::ValidationError("--grid", "bad number '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text simplification toolkit: control-token data preparation, "
                 "penalized beam-search decoding, and evaluation (SARI, BLEU, FKGL)."};
    app.require_subcommand(1);

    // stats
    simpkit::cli::StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics (vocabulary, FKGL, compression)");
    stats_cmd->add_option("--src", stats.src, "Source corpus, one sentence per line")->required();
    stats_cmd->add_option("--tgt", stats.tgt, "Optional aligned target corpus");
    stats_cmd->add_option("--tsv", stats.out_tsv, "Write the TSV report here instead of stdout");
    stats_cmd->add_option("--json", stats.out_json, "Write the JSON report here");

    // eval
    simpkit::cli::EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate hypotheses (BLEU, SARI, FKGL, match, add, del)");
    eval_cmd->add_option("--src", eval.src, "Source corpus")->required();
    eval_cmd->add_option("--hyp", eval.hyp, "Hypothesis corpus")->required();
    eval_cmd->add_option("--ref", eval.refs, "Reference corpus (repeat for multiple references)")
        ->required()
        ->take_all();
    eval_cmd->add_option("--tsv", eval.out_tsv, "Write the TSV report here instead of stdout");
    eval_cmd->add_option("--json", eval.out_json, "Write the JSON report here");
    eval_cmd->add_option("--per-sentence", eval.per_sentence,
                         "Write per-sentence SARI/FKGL TSV here");

    // tokens
    simpkit::cli::TokensArgs tokens;
    std::string tokens_freq_format = "auto";
    auto* tokens_cmd = app.add_subcommand("tokens", "Annotate aligned pairs with control tokens");
    tokens_cmd->add_option("--src", tokens.src, "Source corpus")->required();
    tokens_cmd->add_option("--tgt", tokens.tgt, "Aligned target corpus")->required();
    tokens_cmd->add_option("--freq-table", tokens.freq_table, "Word frequency table");
    tokens_cmd->add_option("--freq-format", tokens_freq_format, "auto|counts|ranks");
    tokens_cmd->add_option("--depths-src", tokens.depths_src, "Depth sidecar for --src");
    tokens_cmd->add_option("--depths-tgt", tokens.depths_tgt, "Depth sidecar for --tgt");
    tokens_cmd->add_option("--out", tokens.out, "Output TSV path (default stdout)");

    // prepare-bt
    simpkit::cli::PrepareBtArgs bt;
    std::string bt_freq_format = "auto";
    std::string bt_direction = "c2s";
    auto* bt_cmd = app.add_subcommand("prepare-bt",
                                      "Build back-translation examples with noised inputs");
    bt_cmd->add_option("--src", bt.src, "Corpus to noise and pair")->required();
    bt_cmd->add_option("--freq-table", bt.freq_table, "Word frequency table");
    bt_cmd->add_option("--freq-format", bt_freq_format, "auto|counts|ranks");
    bt_cmd->add_option("--drop", bt.drop, "Token drop probability in [0,1)")
        ->check(CLI::Range(0.0, 0.999999));
    bt_cmd->add_option("--shuffle", bt.shuffle, "Local shuffle window (0 = off)")
        ->check(CLI::NonNegativeNumber);
    bt_cmd->add_option("--seed", bt.seed, "Base seed; line i uses seed + i");
    bt_cmd->add_option("--direction", bt_direction, "c2s|s2c");
    bt_cmd->add_option("--out", bt.out, "Output TSV path (default stdout)");

    // decode
    simpkit::cli::DecodeArgs decode;
    auto* decode_cmd = app.add_subcommand("decode", "Beam-search decode an input file");
    decode_cmd
        ->add_option("--model", decode.model,
                     "Model spec: table:FILE | copy[:copy=,delete=,stop=,lexicon=FILE] | "
                     "ngram:FILE[,order=N][,k=X]")
        ->required();
    decode_cmd->add_option("--input", decode.input, "Input file, one sentence per line")
        ->required();
    decode_cmd->add_option("--beam", decode.beam, "Beam size")->check(CLI::PositiveNumber);
    decode_cmd->add_option("--max-len", decode.max_len,
                           "Max emitted tokens incl. end-of-sequence (0 = auto)");
    decode_cmd->add_option("--lp", decode.penalties.lambda_length, "Length penalty coefficient");
    decode_cmd->add_option("--emp", decode.penalties.lambda_exact,
                           "Exact-match (input-copy cosine) penalty coefficient");
    decode_cmd->add_option("--fkglp", decode.penalties.lambda_fkgl, "FKGL penalty coefficient");
    decode_cmd->add_option("--penalty-config", decode.penalty_config,
                           "JSON penalty config (overrides --lp/--emp/--fkglp)");
    decode_cmd->add_option("--prefix", decode.prefix,
                           "Control tokens prepended to every input line");
    decode_cmd->add_flag("--rescore", decode.rescore,
                         "Vanilla search, penalties applied by rescoring the completed pool");
    decode_cmd->add_option("--n-best", decode.n_best, "Emit top-k hypotheses with scores as TSV");
    decode_cmd->add_option("--threads", decode.threads, "Worker threads (0 = all cores)");
    decode_cmd->add_option("--out", decode.out, "Output path (default stdout)");

    // tune
    simpkit::cli::TuneArgs tune;
    std::string grid_lp, grid_emp, grid_fkglp;
    auto* tune_cmd = app.add_subcommand("tune", "Grid-search penalty coefficients on a validation set");
    tune_cmd->add_option("--model", tune.model, "Model spec (see decode)")->required();
    tune_cmd->add_option("--src", tune.src, "Validation sources")->required();
    tune_cmd->add_option("--ref", tune.refs, "Validation references (repeatable)")
        ->required()
        ->take_all();
    tune_cmd->add_option("--grid-lp", grid_lp, "Comma-separated length-penalty values");
    tune_cmd->add_option("--grid-emp", grid_emp, "Comma-separated exact-match-penalty values");
    tune_cmd->add_option("--grid-fkglp", grid_fkglp, "Comma-separated FKGL-penalty values");
    tune_cmd->add_option("--beta", tune.beta, "Objective weight: SARI - beta * FKGL");
    tune_cmd->add_option("--beam", tune.beam, "Beam size")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--max-len", tune.max_len, "Max emitted tokens (0 = auto)");
    tune_cmd->add_flag("--rescore", tune.rescore, "Apply penalties by rescoring");
    tune_cmd->add_option("--threads", tune.threads, "Worker threads (0 = all cores)");
    tune_cmd->add_option("--out-table", tune.out_table, "Grid table TSV path (default stdout)");
    tune_cmd->add_option("--out-best", tune.out_best, "Best-config JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats_cmd->parsed()) return simpkit::cli::cmd_stats(stats, std::cout, std::cerr);
        if (eval_cmd->parsed()) return simpkit::cli::cmd_eval(eval, std::cout, std::cerr);
        if (tokens_cmd->parsed()) {
            tokens.freq_format = parse_freq_format(tokens_freq_format);
            return simpkit::cli::cmd_tokens(tokens, std::cout, std::cerr);
        }
        if (bt_cmd->parsed()) {
            bt.freq_format = parse_freq_format(bt_freq_format);
            if (bt_direction == "c2s")
                bt.direction = simpkit::Direction::ComplexToSimple;
            else if (bt_direction == "s2c")
                bt.direction = simpkit::Direction::SimpleToComplex;
            else
                throw CLI::ValidationError("--direction", "expected c2s or s2c");
            return simpkit::cli::cmd_prepare_bt(bt, std::cout, std::cerr);
        }
        if (decode_cmd->parsed()) return simpkit::cli::cmd_decode(decode, std::cout, std::cerr);
        if (tune_cmd->parsed()) {
            if (!grid_lp.empty()) tune.grid.length = parse_grid_dim(grid_lp);
            if (!grid_emp.empty()) tune.grid.exact = parse_grid_dim(grid_emp);
            if (!grid_fkglp.empty()) tune.grid.fkgl = parse_grid_dim(grid_fkglp);
            return simpkit::cli::cmd_tune(tune, std::cout, std::cerr);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
    return simpkit::cli::kExitValidation;
}
