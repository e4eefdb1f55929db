#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simpkit/bt.hpp"
#include "simpkit/control.hpp"
#include "simpkit/decode.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/metrics.hpp"
#include "simpkit/models.hpp"
#include "simpkit/text.hpp"
#include "simpkit/tune.hpp"
#include "simpkit/util.hpp"

namespace simpkit {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ResourceError("write failed for '" + path + "'");
}

// One sentence per line. With require_nonempty, an empty line is a
// validation error naming the 1-based line number.
inline std::vector<Sentence> load_corpus(const std::string& path, bool require_nonempty = true) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<Sentence> out;
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (require_nonempty && trim(lines[i]).empty())
            throw ValidationError(path + ": line " + std::to_string(i + 1) + ": empty sentence");
        out.push_back(make_sentence(lines[i]));
    }
    return out;
}

namespace detail {

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
    std::uint64_t value = 0;
    if (s.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(std::string(s), &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

}  // namespace detail

enum class FreqFormat { Auto, Counts, Ranks };

// "word<TAB>value" per line, value a count or a rank. In Auto mode, values
// forming exactly the set {1..N} are read as ranks; anything else is read
// as counts with ranks derived by descending count (ties lexicographic).
inline FrequencyTable load_frequency_table(const std::string& path,
                                           FreqFormat format = FreqFormat::Auto) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> cols = split_on(lines[i], '\t');
        if (cols.size() != 2)
            throw ValidationError(path + ": line " + std::to_string(i + 1) +
                                  ": expected 'word<TAB>value'");
        auto value = detail::parse_uint(trim(cols[1]));
        if (!value)
            throw ValidationError(path + ": line " + std::to_string(i + 1) +
                                  ": bad numeric value '" + cols[1] + "'");
        entries.emplace_back(cols[0], *value);
    }
    if (entries.empty()) throw ValidationError(path + ": empty frequency table");

    bool as_ranks = false;
    if (format == FreqFormat::Ranks) {
        as_ranks = true;
    } else if (format == FreqFormat::Auto) {
        std::vector<std::uint64_t> values;
        values.reserve(entries.size());
        for (const auto& [w, v] : entries) values.push_back(v);
        std::sort(values.begin(), values.end());
        as_ranks = true;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] != i + 1) {
                as_ranks = false;
                break;
            }
    }

    if (as_ranks) {
        std::vector<std::pair<std::string, std::size_t>> ranks;
        ranks.reserve(entries.size());
        for (auto& [w, v] : entries) ranks.emplace_back(std::move(w), static_cast<std::size_t>(v));
        return FrequencyTable::from_ranks(std::move(ranks), path);
    }
    return FrequencyTable::from_counts(std::move(entries), path);
}

// "line_number<TAB>depth" per line, 1-based line numbers.
inline std::map<std::size_t, int> load_depth_sidecar(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::map<std::size_t, int> depths;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> cols = split_on(lines[i], '\t');
        auto lineno = cols.size() == 2 ? detail::parse_uint(trim(cols[0])) : std::nullopt;
        auto depth = cols.size() == 2 ? detail::parse_uint(trim(cols[1])) : std::nullopt;
        if (!lineno || !depth || *lineno == 0 || *depth == 0)
            throw ValidationError(path + ": line " + std::to_string(i + 1) +
                                  ": expected 'line_number<TAB>depth'");
        depths[static_cast<std::size_t>(*lineno)] = static_cast<int>(*depth);
    }
    return depths;
}

// Attaches sidecar depths to the raw text of the corresponding corpus lines.
inline void add_sidecar_depths(TextKeyedDepths& provider, const std::string& sidecar_path,
                               std::span<const Sentence> corpus) {
    for (const auto& [lineno, depth] : load_depth_sidecar(sidecar_path)) {
        if (lineno > corpus.size())
            throw ValidationError(sidecar_path + ": line number " + std::to_string(lineno) +
                                  " beyond corpus of " + std::to_string(corpus.size()) +
                                  " lines");
        provider.add(corpus[lineno - 1].raw, depth);
    }
}

// "word<TAB>syn1 syn2 ..." per line.
inline NoisyCopyModel::Lexicon load_lexicon(const std::string& path) {
    NoisyCopyModel::Lexicon lex;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> cols = split_on(lines[i], '\t');
        if (cols.size() != 2)
            throw ValidationError(path + ": line " + std::to_string(i + 1) +
                                  ": expected 'word<TAB>synonyms'");
        std::vector<std::string> syns = split_whitespace(cols[1]);
        if (syns.empty())
            throw ValidationError(path + ": line " + std::to_string(i + 1) + ": no synonyms");
        lex[cols[0]] = std::move(syns);
    }
    return lex;
}

// Table model spec: one line per state,
//   source tokens|prefix tokens -> token:prob, token:prob, ...
// An empty prefix (nothing after "|") is the initial state. "*" is a
// wildcard source; "*|*" sets the default distribution for unlisted states.
// "->" and unicode arrows are both accepted; blank lines and #-comments are
// ignored. Keys are matched against post-tokenization (lowercased) tokens.
inline TableModel load_table_model_text(const std::string& text, const std::string& what) {
    std::map<std::pair<std::string, std::string>, TableModel::Distribution> states;
    std::optional<TableModel::Distribution> default_dist;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;

        std::size_t arrow = t.find("->");
        std::size_t arrow_len = 2;
        if (arrow == std::string::npos) {
            arrow = t.find("→");
            arrow_len = 3;
        }
        if (arrow == std::string::npos)
            throw ValidationError(what + ": line " + std::to_string(lineno) + ": missing '->'");

        std::string lhs = trim(t.substr(0, arrow));
        std::string rhs = trim(t.substr(arrow + arrow_len));
        std::size_t bar = lhs.find('|');
        if (bar == std::string::npos)
            throw ValidationError(what + ": line " + std::to_string(lineno) +
                                  ": state must be 'source|prefix'");
        std::string src = trim(lhs.substr(0, bar));
        std::string prefix = trim(lhs.substr(bar + 1));

        TableModel::Distribution dist;
        for (const std::string& item : split_on(rhs, ',')) {
            std::string entry = trim(item);
            if (entry.empty()) continue;
            std::size_t colon = entry.rfind(':');
            if (colon == std::string::npos)
                throw ValidationError(what + ": line " + std::to_string(lineno) +
                                      ": expected 'token:prob' in '" + entry + "'");
            std::string tok = trim(entry.substr(0, colon));
            auto prob = detail::parse_double(trim(entry.substr(colon + 1)));
            if (tok.empty() || !prob || *prob < 0.0)
                throw ValidationError(what + ": line " + std::to_string(lineno) +
                                      ": bad probability in '" + entry + "'");
            dist[tok] += *prob;
        }
        if (dist.empty())
            throw ValidationError(what + ": line " + std::to_string(lineno) +
                                  ": empty distribution");

        if (src == "*" && prefix == "*") {
            default_dist = std::move(dist);
        } else {
            // Keys are post-tokenization token strings; normalize spacing only.
            states[{src == "*" ? "*" : join(split_whitespace(src)),
                    join(split_whitespace(prefix))}] = std::move(dist);
        }
    }
    if (default_dist) return TableModel(std::move(states), std::move(*default_dist));
    return TableModel::with_eos_default(std::move(states));
}

inline TableModel load_table_model(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::string text;
    for (const std::string& l : lines) {
        text += l;
        text += '\n';
    }
    return load_table_model_text(text, path);
}

// Model specs: "table:FILE", "copy[:k=v,...]" (keys copy, delete, stop,
// lexicon), "ngram:FILE[,order=N][,k=X]".
inline std::unique_ptr<SequenceModel> load_model_spec(const std::string& spec) {
    std::size_t colon = spec.find(':');
    std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (kind == "table") {
        if (rest.empty()) throw ValidationError("model spec 'table:' needs a file path");
        return std::make_unique<TableModel>(load_table_model(rest));
    }
    if (kind == "copy") {
        NoisyCopyModel::Params params;
        NoisyCopyModel::Lexicon lexicon;
        if (!rest.empty()) {
            for (const std::string& item : split_on(rest, ',')) {
                std::string entry = trim(item);
                if (entry.empty()) continue;
                std::size_t eq = entry.find('=');
                if (eq == std::string::npos)
                    throw ValidationError("model spec: expected key=value in '" + entry + "'");
                std::string key = trim(entry.substr(0, eq));
                std::string value = trim(entry.substr(eq + 1));
                if (key == "lexicon") {
                    lexicon = load_lexicon(value);
                    continue;
                }
                auto num = detail::parse_double(value);
                if (!num) throw ValidationError("model spec: bad number in '" + entry + "'");
                if (key == "copy")
                    params.copy_prob = *num;
                else if (key == "delete")
                    params.delete_prob = *num;
                else if (key == "stop")
                    params.stop_prob = *num;
                else
                    throw ValidationError("model spec: unknown key '" + key + "'");
            }
        }
        return std::make_unique<NoisyCopyModel>(params, std::move(lexicon));
    }
    if (kind == "ngram") {
        std::vector<std::string> parts = split_on(rest, ',');
        if (parts.empty() || trim(parts[0]).empty())
            throw ValidationError("model spec 'ngram:' needs a corpus path");
        std::string corpus_path = trim(parts[0]);
        int order = 2;
        double k = 0.1;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            std::string entry = trim(parts[i]);
            std::size_t eq = entry.find('=');
            if (eq == std::string::npos)
                throw ValidationError("model spec: expected key=value in '" + entry + "'");
            std::string key = trim(entry.substr(0, eq));
            auto num = detail::parse_double(trim(entry.substr(eq + 1)));
            if (!num) throw ValidationError("model spec: bad number in '" + entry + "'");
            if (key == "order")
                order = static_cast<int>(*num);
            else if (key == "k")
                k = *num;
            else
                throw ValidationError("model spec: unknown key '" + key + "'");
        }
        std::vector<Sentence> corpus = load_corpus(corpus_path, false);
        std::vector<std::vector<std::string>> tokenized;
        tokenized.reserve(corpus.size());
        for (const Sentence& s : corpus)
            if (!s.tokens.empty()) tokenized.push_back(s.tokens);
        return std::make_unique<NgramLM>(train_ngram_lm(tokenized, order, k));
    }
    throw ValidationError("unknown model spec '" + spec + "' (expected table:, copy, ngram:)");
}

// BT example TSV: "input tokens<TAB>target tokens", space-joined.
inline std::string bt_examples_to_tsv(std::span<const BTExample> examples) {
    std::string out;
    for (const BTExample& ex : examples) {
        out += join(ex.input);
        out += '\t';
        out += join(ex.target);
        out += '\n';
    }
    return out;
}

inline std::vector<BTExample> bt_examples_from_tsv(const std::string& text,
                                                   const std::string& what) {
    std::vector<BTExample> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> cols = split_on(line, '\t');
        if (cols.size() != 2)
            throw ValidationError(what + ": line " + std::to_string(lineno) +
                                  ": expected 'input<TAB>target'");
        BTExample ex;
        ex.input = split_whitespace(cols[0]);
        ex.target = split_whitespace(cols[1]);
        out.push_back(std::move(ex));
    }
    return out;
}

// ---- JSON views (stable key names, exact double round-trips) ----

inline nlohmann::json to_json(const EvalReport& r) {
    return nlohmann::json{{"bleu", r.bleu},   {"sari", r.sari}, {"fkgl", r.fkgl},
                          {"match", r.match}, {"add", r.add},   {"del", r.del},
                          {"n_sentences", r.n_sentences}};
}

inline EvalReport eval_report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.bleu = j.at("bleu").get<double>();
    r.sari = j.at("sari").get<double>();
    r.fkgl = j.at("fkgl").get<double>();
    r.match = j.at("match").get<double>();
    r.add = j.at("add").get<double>();
    r.del = j.at("del").get<double>();
    r.n_sentences = j.at("n_sentences").get<std::size_t>();
    return r;
}

inline nlohmann::json to_json(const PenaltyConfig& c) {
    return nlohmann::json{{"lambda_length", c.lambda_length},
                          {"lambda_exact", c.lambda_exact},
                          {"lambda_fkgl", c.lambda_fkgl}};
}

inline PenaltyConfig penalty_config_from_json(const nlohmann::json& j) {
    PenaltyConfig c;
    c.lambda_length = j.at("lambda_length").get<double>();
    c.lambda_exact = j.at("lambda_exact").get<double>();
    c.lambda_fkgl = j.at("lambda_fkgl").get<double>();
    return c;
}

inline PenaltyConfig load_penalty_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        return penalty_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": bad penalty config: " + e.what());
    }
}

// ---- report formatting ----

inline std::string format_fixed(double v, int decimals) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
    return os.str();
}

inline std::string eval_report_tsv(const EvalReport& r) {
    std::string out = "bleu\tsari\tfkgl\tmatch\tadd\tdel\tn_sentences\n";
    out += format_fixed(r.bleu, 2) + '\t' + format_fixed(r.sari, 2) + '\t' +
           format_fixed(r.fkgl, 2) + '\t' + format_fixed(r.match, 2) + '\t' +
           format_fixed(r.add, 2) + '\t' + format_fixed(r.del, 2) + '\t' +
           std::to_string(r.n_sentences) + '\n';
    return out;
}

inline std::string tune_table_tsv(const TuneResult& result) {
    std::string out =
        "lambda_length\tlambda_exact\tlambda_fkgl\tbleu\tsari\tfkgl\tmatch\tadd\tdel\t"
        "objective\terror\n";
    for (const TuneEntry& e : result.table) {
        out += format_fixed(e.config.lambda_length, 2) + '\t' +
               format_fixed(e.config.lambda_exact, 2) + '\t' +
               format_fixed(e.config.lambda_fkgl, 2) + '\t';
        if (e.report) {
            out += format_fixed(e.report->bleu, 2) + '\t' + format_fixed(e.report->sari, 2) +
                   '\t' + format_fixed(e.report->fkgl, 2) + '\t' +
                   format_fixed(e.report->match, 2) + '\t' + format_fixed(e.report->add, 2) +
                   '\t' + format_fixed(e.report->del, 2) + '\t' +
                   format_fixed(e.objective, 4) + "\t\n";
        } else {
            out += "\t\t\t\t\t\t\t" + (e.error ? *e.error : std::string("error")) + "\n";
        }
    }
    return out;
}

}  // namespace simpkit
