#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simpkit/util.hpp"

namespace simpkit {

inline bool is_ascii_punct(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
}

// Bytes >= 0x80 are treated as letters so UTF-8 sequences are never split
// or detached as punctuation.
inline bool is_letter_byte(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalpha(u);
}

inline std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// A token is a "word" (for readability and rank statistics) if it contains
// at least one letter.
inline bool is_word_token(std::string_view tok) {
    for (char c : tok)
        if (is_letter_byte(c)) return true;
    return false;
}

// Whitespace split, then leading/trailing punctuation detached one character
// at a time, then ASCII lowercased. "don't" and "3.14" stay whole; "sat."
// becomes ["sat", "."].
inline std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    for (const std::string& chunk : split_whitespace(raw)) {
        std::size_t b = 0, e = chunk.size();
        std::vector<std::string> tail;
        while (b < e && is_ascii_punct(chunk[b]) && e - b > 1) {
            tokens.push_back(std::string(1, chunk[b]));
            ++b;
        }
        while (e > b + 1 && is_ascii_punct(chunk[e - 1])) {
            tail.push_back(std::string(1, chunk[e - 1]));
            --e;
        }
        if (e > b) tokens.push_back(lowercase_ascii(std::string_view(chunk).substr(b, e - b)));
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) tokens.push_back(*it);
    }
    return tokens;
}

inline std::string detokenize(std::span<const std::string> tokens) { return join(tokens, " "); }

struct Sentence {
    std::string raw;
    std::vector<std::string> tokens;

    bool operator==(const Sentence&) const = default;
};

inline Sentence make_sentence(std::string raw) {
    Sentence s;
    s.tokens = tokenize(raw);
    s.raw = std::move(raw);
    return s;
}

inline Sentence sentence_from_tokens(std::vector<std::string> tokens) {
    Sentence s;
    s.raw = detokenize(tokens);
    s.tokens = std::move(tokens);
    return s;
}

inline bool is_vowel_char(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
            return true;
        default:
            return false;
    }
}

// Heuristic syllable count: number of maximal vowel groups (aeiouy), minus
// one for a word-final silent "e" when another vowel group exists, floored
// at 1. Non-word tokens get 0.
inline int count_syllables(std::string_view token) {
    if (!is_word_token(token)) return 0;
    int groups = 0;
    bool in_group = false;
    char last = '\0';
    for (char c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        bool v = is_vowel_char(c);
        if (v && !in_group) ++groups;
        in_group = v;
        last = c;
    }
    if (groups >= 2 && last == 'e') --groups;
    return groups < 1 ? 1 : groups;
}

namespace detail {

inline std::size_t levenshtein_cp(std::vector<char32_t> ca, std::vector<char32_t> cb) {
    if (ca.size() < cb.size()) std::swap(ca, cb);
    const std::size_t n = cb.size();
    std::vector<std::size_t> row(n + 1);
    for (std::size_t j = 0; j <= n; ++j) row[j] = j;
    for (std::size_t i = 1; i <= ca.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            std::size_t sub = diag + (ca[i - 1] == cb[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
        }
    }
    return row[n];
}

}  // namespace detail

// Character-level edit distance on code points, unit costs.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    return detail::levenshtein_cp(utf8_decode(a), utf8_decode(b));
}

// 1 - dist / max(|a|, |b|) on code points. Both empty -> 1 by convention.
inline double lev_similarity(std::string_view a, std::string_view b) {
    std::vector<char32_t> ca = utf8_decode(a);
    std::vector<char32_t> cb = utf8_decode(b);
    std::size_t m = std::max(ca.size(), cb.size());
    if (m == 0) return 1.0;
    std::size_t dist = detail::levenshtein_cp(std::move(ca), std::move(cb));
    return 1.0 - static_cast<double>(dist) / static_cast<double>(m);
}

// Multiset of tokens or space-joined n-grams.
using TokenMultiset = std::unordered_map<std::string, std::int64_t>;

inline std::int64_t multiset_total(const TokenMultiset& m) {
    std::int64_t t = 0;
    for (const auto& [k, v] : m) t += v;
    return t;
}

inline TokenMultiset ngram_counts(std::span<const std::string> tokens, int n) {
    if (n < 1) throw std::invalid_argument("ngram_counts: n must be >= 1");
    TokenMultiset out;
    if (tokens.size() < static_cast<std::size_t>(n)) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += ' ';
            key += tokens[i + k];
        }
        ++out[key];
    }
    return out;
}

// Cosine of unigram count vectors; 0 when either vector is all-zero.
inline double cosine_bow(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0.0;
    TokenMultiset ca = ngram_counts(a, 1);
    TokenMultiset cb = ngram_counts(b, 1);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [tok, c] : ca) {
        na += static_cast<double>(c) * static_cast<double>(c);
        auto it = cb.find(tok);
        if (it != cb.end()) dot += static_cast<double>(c) * static_cast<double>(it->second);
    }
    for (const auto& [tok, c] : cb) nb += static_cast<double>(c) * static_cast<double>(c);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace simpkit
