#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simpkit/errors.hpp"
#include "simpkit/metrics.hpp"
#include "simpkit/text.hpp"

namespace simpkit {

// A ratio snapped to the 0.05 grid on [0.05, 2.00], stored in ticks of 0.05
// so rendering and parsing are exact.
class Bucket {
  public:
    static constexpr int kMinTicks = 1;   // 0.05
    static constexpr int kMaxTicks = 40;  // 2.00

    // Round to the nearest multiple of 0.05 (ties away from zero), clamp to
    // [0.05, 2.00]. Non-positive ratios are rejected.
    static Bucket from_ratio(double ratio) {
        if (!(ratio > 0.0)) throw ValidationError("bucketize: ratio must be positive");
        if (ratio >= 100.0) return Bucket(kMaxTicks);
        int ticks = static_cast<int>(std::llround(ratio * 20.0));
        return Bucket(std::clamp(ticks, kMinTicks, kMaxTicks));
    }

    // Accepts only exact bucket values (multiples of 0.05 within range).
    static std::optional<Bucket> from_value(double value) {
        double scaled = value * 20.0;
        int ticks = static_cast<int>(std::llround(scaled));
        if (std::fabs(scaled - ticks) > 1e-6) return std::nullopt;
        if (ticks < kMinTicks || ticks > kMaxTicks) return std::nullopt;
        return Bucket(ticks);
    }

    static Bucket smallest() { return Bucket(kMinTicks); }

    double value() const { return ticks_ / 20.0; }
    int ticks() const { return ticks_; }

    // Two-decimal surface form, e.g. "0.75", "1.00".
    std::string str() const {
        int whole = ticks_ / 20;
        int cents = (ticks_ % 20) * 5;
        return std::to_string(whole) + "." + (cents < 10 ? "0" : "") + std::to_string(cents);
    }

    auto operator<=>(const Bucket&) const = default;

  private:
    explicit Bucket(int ticks) : ticks_(ticks) {}
    int ticks_;
};

inline Bucket bucketize(double ratio) { return Bucket::from_ratio(ratio); }

// The four control fields, in their fixed surface order.
enum class ControlField { NbChars, LevSim, WordRank, DepTreeDepth };

inline std::string_view control_field_name(ControlField f) {
    switch (f) {
        case ControlField::NbChars: return "NbChars";
        case ControlField::LevSim: return "LevSim";
        case ControlField::WordRank: return "WordRank";
        case ControlField::DepTreeDepth: return "DepthTreeDepth";
    }
    return "";
}

struct ControlTokens {
    Bucket nb_chars;
    Bucket lev_sim;
    Bucket word_rank;
    std::optional<Bucket> dep_depth;

    bool operator==(const ControlTokens&) const = default;
};

inline std::string render_control_token(ControlField f, Bucket b) {
    return "<" + std::string(control_field_name(f)) + "_" + b.str() + ">";
}

// "<NbChars_1.00> <LevSim_0.75> <WordRank_0.75> [<DepthTreeDepth_0.80>]"
inline std::vector<std::string> render_control_tokens(const ControlTokens& c) {
    std::vector<std::string> out;
    out.push_back(render_control_token(ControlField::NbChars, c.nb_chars));
    out.push_back(render_control_token(ControlField::LevSim, c.lev_sim));
    out.push_back(render_control_token(ControlField::WordRank, c.word_rank));
    if (c.dep_depth)
        out.push_back(render_control_token(ControlField::DepTreeDepth, *c.dep_depth));
    return out;
}

// Matches "<Name_x.xx>" with a known field name and a valid two-decimal
// bucket value. Returns nothing for any other token.
inline std::optional<std::pair<ControlField, Bucket>> match_control_token(std::string_view tok) {
    if (tok.size() < 4 || tok.front() != '<' || tok.back() != '>') return std::nullopt;
    std::string_view body = tok.substr(1, tok.size() - 2);
    std::size_t us = body.rfind('_');
    if (us == std::string_view::npos) return std::nullopt;
    std::string_view name = body.substr(0, us);
    std::string_view value = body.substr(us + 1);

    ControlField field;
    if (name == "NbChars")
        field = ControlField::NbChars;
    else if (name == "LevSim")
        field = ControlField::LevSim;
    else if (name == "WordRank")
        field = ControlField::WordRank;
    else if (name == "DepthTreeDepth")
        field = ControlField::DepTreeDepth;
    else
        return std::nullopt;

    // Strict "d.dd" (or "dd.dd") form.
    std::size_t dot = value.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot > 2 || value.size() - dot - 1 != 2)
        return std::nullopt;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (i == dot) continue;
        if (value[i] < '0' || value[i] > '9') return std::nullopt;
    }
    int whole = 0;
    for (std::size_t i = 0; i < dot; ++i) whole = whole * 10 + (value[i] - '0');
    int cents = (value[dot + 1] - '0') * 10 + (value[dot + 2] - '0');
    if (cents % 5 != 0) return std::nullopt;
    int ticks = whole * 20 + cents / 5;
    if (ticks < Bucket::kMinTicks || ticks > Bucket::kMaxTicks) return std::nullopt;
    auto b = Bucket::from_value(whole + cents / 100.0);
    if (!b) return std::nullopt;
    return std::make_pair(field, *b);
}

inline bool is_control_token(std::string_view tok) { return match_control_token(tok).has_value(); }

// Length of the leading run of well-formed control tokens.
inline std::size_t control_prefix_length(std::span<const std::string> tokens) {
    std::size_t n = 0;
    while (n < tokens.size() && is_control_token(tokens[n])) ++n;
    return n;
}

inline std::vector<std::string> strip_control_prefix(std::span<const std::string> tokens) {
    std::size_t n = control_prefix_length(tokens);
    return {tokens.begin() + n, tokens.end()};
}

// Inverse of render_control_tokens: exactly 3 or 4 tokens in canonical order.
// Errors name the offending token.
inline ControlTokens parse_control_tokens(std::span<const std::string> tokens) {
    if (tokens.size() != 3 && tokens.size() != 4)
        throw ValidationError("parse_control_tokens: expected 3 or 4 tokens, got " +
                              std::to_string(tokens.size()));
    static constexpr ControlField kOrder[4] = {ControlField::NbChars, ControlField::LevSim,
                                               ControlField::WordRank, ControlField::DepTreeDepth};
    std::vector<Bucket> values;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto m = match_control_token(tokens[i]);
        if (!m)
            throw ValidationError("parse_control_tokens: malformed control token '" + tokens[i] +
                                  "'");
        if (m->first != kOrder[i])
            throw ValidationError("parse_control_tokens: token '" + tokens[i] +
                                  "' out of order; expected " +
                                  std::string(control_field_name(kOrder[i])));
        values.push_back(m->second);
    }
    ControlTokens c{values[0], values[1], values[2], std::nullopt};
    if (values.size() == 4) c.dep_depth = values[3];
    return c;
}

// Word -> rank map. Ranks are positive and unique but not necessarily
// contiguous. Out-of-vocabulary words are assigned rank size() + 1.
class FrequencyTable {
  public:
    FrequencyTable() = default;

    static FrequencyTable from_ranks(std::vector<std::pair<std::string, std::size_t>> ranks,
                                     std::string source = "") {
        FrequencyTable t;
        t.source_ = std::move(source);
        std::unordered_map<std::size_t, const std::string*> seen;
        for (auto& [word, rank] : ranks) {
            if (rank == 0) throw ValidationError("frequency table: rank 0 for '" + word + "'");
            auto [it, inserted] = t.rank_.emplace(std::move(word), rank);
            if (!inserted)
                throw ValidationError("frequency table: duplicate word '" + it->first + "'");
            if (!seen.emplace(rank, &it->first).second)
                throw ValidationError("frequency table: duplicate rank " + std::to_string(rank));
        }
        return t;
    }

    // Ranks derived by descending count; ties broken lexicographically.
    static FrequencyTable from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts,
                                      std::string source = "") {
        std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::pair<std::string, std::size_t>> ranks;
        ranks.reserve(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            ranks.emplace_back(std::move(counts[i].first), i + 1);
        return from_ranks(std::move(ranks), std::move(source));
    }

    std::size_t rank(std::string_view word) const {
        auto it = rank_.find(std::string(word));
        return it == rank_.end() ? rank_.size() + 1 : it->second;
    }

    bool contains(std::string_view word) const { return rank_.count(std::string(word)) > 0; }
    std::size_t size() const { return rank_.size(); }
    const std::string& source() const { return source_; }

  private:
    std::unordered_map<std::string, std::size_t> rank_;
    std::string source_;
};

namespace detail {

// Third quartile by linear interpolation over sorted values.
inline double third_quartile(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    if (values.empty()) throw ValidationError("third_quartile: no values");
    if (values.size() == 1) return values[0];
    double pos = 0.75 * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double log_rank_q3(const Sentence& s, const FrequencyTable& table) {
    std::vector<double> logs;
    for (const std::string& tok : s.tokens)
        if (is_word_token(tok))
            logs.push_back(std::log(1.0 + static_cast<double>(table.rank(tok))));
    if (logs.empty())  // punctuation-only sentence: fall back to all tokens
        for (const std::string& tok : s.tokens)
            logs.push_back(std::log(1.0 + static_cast<double>(table.rank(tok))));
    return third_quartile(std::move(logs));
}

}  // namespace detail

// Third quartile of log(1 + rank) over target words, divided by the same
// statistic over source words.
inline double word_rank_ratio(const Sentence& src, const Sentence& tgt,
                              const FrequencyTable& table) {
    if (src.tokens.empty() || tgt.tokens.empty())
        throw ValidationError("word_rank_ratio: empty sentence");
    return detail::log_rank_q3(tgt, table) / detail::log_rank_q3(src, table);
}

// Per-sentence dependency tree depth source. Parsers are out of scope; depths
// come from sidecar annotations keyed however the implementation chooses.
class DepthProvider {
  public:
    virtual ~DepthProvider() = default;
    virtual std::optional<int> depth(const Sentence& sentence) const = 0;
};

// Depths keyed by raw sentence text.
class TextKeyedDepths : public DepthProvider {
  public:
    void add(std::string raw, int depth) { by_raw_[std::move(raw)] = depth; }

    std::optional<int> depth(const Sentence& sentence) const override {
        auto it = by_raw_.find(sentence.raw);
        if (it == by_raw_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return by_raw_.size(); }

  private:
    std::unordered_map<std::string, int> by_raw_;
};

// Computes the control sequence for a sentence pair; ratios are other over
// original. With no depth provider the sequence degrades to three tokens.
inline ControlTokens control_tokens(const Sentence& original, const Sentence& other,
                                    const FrequencyTable& table,
                                    const DepthProvider* depths = nullptr) {
    if (original.tokens.empty() || other.tokens.empty())
        throw ValidationError("control_tokens: empty sentence");

    double sim = lev_similarity(original.raw, other.raw);
    // Similarity 0 maps to the smallest bucket.
    Bucket lev = sim > 0.0 ? bucketize(sim) : Bucket::smallest();

    ControlTokens c{
        bucketize(compression_ratio(original, other)),
        lev,
        bucketize(word_rank_ratio(original, other, table)),
        std::nullopt,
    };
    if (depths) {
        auto d_orig = depths->depth(original);
        auto d_other = depths->depth(other);
        if (!d_orig || *d_orig <= 0)
            throw ValidationError("control_tokens: no depth for sentence '" + original.raw + "'");
        if (!d_other || *d_other <= 0)
            throw ValidationError("control_tokens: no depth for sentence '" + other.raw + "'");
        c.dep_depth = bucketize(static_cast<double>(*d_other) / static_cast<double>(*d_orig));
    }
    return c;
}

struct NoiseConfig {
    double drop_prob = 0.0;
    int shuffle_window = 0;
};

// Denoising-style corruption: independent token drops (never emptying the
// output) followed by a local shuffle in which no token moves more than
// shuffle_window positions. Bit-reproducible for a fixed seed.
inline std::vector<std::string> noise(std::span<const std::string> tokens,
                                      const NoiseConfig& config, std::uint64_t seed) {
    if (config.drop_prob < 0.0 || config.drop_prob >= 1.0)
        throw ValidationError("noise: drop_prob must be in [0, 1)");
    if (config.shuffle_window < 0)
        throw ValidationError("noise: shuffle_window must be >= 0");
    if (tokens.empty()) return {};

    std::mt19937_64 rng(seed);
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const std::string& tok : tokens)
        if (uniform_unit(rng) >= config.drop_prob) kept.push_back(tok);
    if (kept.empty()) {
        std::size_t pick = static_cast<std::size_t>(rng() % tokens.size());
        kept.push_back(tokens[pick]);
    }

    if (config.shuffle_window > 0 && kept.size() > 1) {
        // Sorting by i + u with u in [0, window + 1) bounds every
        // displacement by the window size.
        std::vector<std::pair<double, std::size_t>> keys(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            keys[i] = {static_cast<double>(i) +
                           uniform_unit(rng) * (config.shuffle_window + 1),
                       i};
        std::stable_sort(keys.begin(), keys.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> shuffled(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) shuffled[i] = kept[keys[i].second];
        kept = std::move(shuffled);
    }
    return kept;
}

}  // namespace simpkit
