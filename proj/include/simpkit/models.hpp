#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "simpkit/control.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/text.hpp"

namespace simpkit {

inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Conditional next-token distribution over a fixed per-source vocabulary.
// Implementations are immutable and deterministic: the same (source, prefix)
// always yields the same distribution, log-probabilities exponentiate and
// sum to 1, and a prefix ending in the end-of-sequence token is terminal
// (all mass stays on end-of-sequence).
class SequenceModel {
  public:
    virtual ~SequenceModel() = default;

    // Sorted token list the model can emit for this source; always contains
    // kEosToken. next_logprobs results are aligned with it.
    virtual std::vector<std::string> vocabulary(
        const std::vector<std::string>& source) const = 0;

    // Log-probabilities for the next token given the source and the target
    // prefix so far. -inf marks impossible tokens. Throws DecodeError for
    // prefix tokens outside the vocabulary.
    virtual std::vector<double> next_logprobs(const std::vector<std::string>& source,
                                              std::span<const std::string> prefix) const = 0;
};

namespace detail {

inline std::size_t index_of(const std::vector<std::string>& vocab, std::string_view token) {
    auto it = std::lower_bound(vocab.begin(), vocab.end(), token);
    if (it == vocab.end() || *it != token) return vocab.size();
    return static_cast<std::size_t>(it - vocab.begin());
}

inline void check_prefix(const std::vector<std::string>& vocab,
                         std::span<const std::string> prefix) {
    for (const std::string& tok : prefix)
        if (index_of(vocab, tok) == vocab.size())
            throw DecodeError("prefix token '" + tok + "' not in model vocabulary");
}

inline bool ends_with_eos(std::span<const std::string> prefix) {
    return !prefix.empty() && prefix.back() == kEosToken;
}

inline std::vector<double> one_hot_eos(const std::vector<std::string>& vocab) {
    std::vector<double> lp(vocab.size(), kNegInf);
    lp[index_of(vocab, kEosToken)] = 0.0;
    return lp;
}

}  // namespace detail

// Explicit (source, prefix) -> distribution lookup with a default for
// unlisted states. The deterministic workhorse for decoder testing.
class TableModel : public SequenceModel {
  public:
    // Token -> probability; validated to sum to 1 within 1e-6, then
    // renormalized exactly.
    using Distribution = std::map<std::string, double>;

    TableModel(std::map<std::pair<std::string, std::string>, Distribution> states,
               Distribution default_dist)
        : states_(std::move(states)), default_(std::move(default_dist)) {
        normalize(default_, "default");
        for (auto& [state, dist] : states_)
            normalize(dist, "'" + state.first + "|" + state.second + "'");
        std::set<std::string> vocab{std::string(kEosToken)};
        for (const auto& [state, dist] : states_)
            for (const auto& [tok, p] : dist) vocab.insert(tok);
        for (const auto& [tok, p] : default_) vocab.insert(tok);
        vocab_.assign(vocab.begin(), vocab.end());
    }

    // A model that emits end-of-sequence immediately unless a state says
    // otherwise; keeps the reachable prefix set finite.
    static TableModel with_eos_default(
        std::map<std::pair<std::string, std::string>, Distribution> states) {
        return TableModel(std::move(states), Distribution{{std::string(kEosToken), 1.0}});
    }

    std::vector<std::string> vocabulary(const std::vector<std::string>&) const override {
        return vocab_;
    }

    std::vector<double> next_logprobs(const std::vector<std::string>& source,
                                      std::span<const std::string> prefix) const override {
        detail::check_prefix(vocab_, prefix);
        if (detail::ends_with_eos(prefix)) return detail::one_hot_eos(vocab_);

        std::string src_key = join(source);
        std::string prefix_key = join(prefix);
        const Distribution* dist = lookup(src_key, prefix_key);
        std::vector<double> lp(vocab_.size(), kNegInf);
        for (const auto& [tok, p] : *dist)
            if (p > 0.0) lp[detail::index_of(vocab_, tok)] = std::log(p);
        return lp;
    }

    const std::vector<std::string>& vocab() const { return vocab_; }

  private:
    const Distribution* lookup(const std::string& src, const std::string& prefix) const {
        auto it = states_.find({src, prefix});
        if (it != states_.end()) return &it->second;
        it = states_.find({"*", prefix});
        if (it != states_.end()) return &it->second;
        return &default_;
    }

    static void normalize(Distribution& dist, const std::string& what) {
        double sum = 0.0;
        for (const auto& [tok, p] : dist) {
            if (p < 0.0) throw ValidationError("table model: negative probability in " + what);
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw ValidationError("table model: distribution " + what + " sums to " +
                                  std::to_string(sum));
        for (auto& [tok, p] : dist) p /= sum;
    }

    std::map<std::pair<std::string, std::string>, Distribution> states_;
    Distribution default_;
    std::vector<std::string> vocab_;
};

// Training-free model with controllable copying behaviour: at output
// position i it copies source token i, swaps in a listed synonym, skips a
// token, or stops. Control tokens in the source act as conditioning only
// and are never copied.
class NoisyCopyModel : public SequenceModel {
  public:
    using Lexicon = std::unordered_map<std::string, std::vector<std::string>>;

    struct Params {
        double copy_prob = 0.9;
        double delete_prob = 0.02;
        double stop_prob = 0.05;
    };

    NoisyCopyModel() : NoisyCopyModel(Params{}) {}

    explicit NoisyCopyModel(Params params, Lexicon lexicon = {})
        : params_(params), lexicon_(std::move(lexicon)) {
        auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in_unit(params_.copy_prob) || !in_unit(params_.delete_prob) ||
            !in_unit(params_.stop_prob) ||
            params_.copy_prob + params_.delete_prob + params_.stop_prob > 1.0 + 1e-12)
            throw ValidationError("noisy copy model: probabilities not jointly normalizable");
    }

    std::vector<std::string> vocabulary(const std::vector<std::string>& source) const override {
        std::set<std::string> vocab{std::string(kEosToken)};
        for (const std::string& tok : strip_control_prefix(source)) {
            vocab.insert(tok);
            auto it = lexicon_.find(tok);
            if (it != lexicon_.end()) vocab.insert(it->second.begin(), it->second.end());
        }
        return {vocab.begin(), vocab.end()};
    }

    std::vector<double> next_logprobs(const std::vector<std::string>& source,
                                      std::span<const std::string> prefix) const override {
        std::vector<std::string> vocab = vocabulary(source);
        detail::check_prefix(vocab, prefix);
        if (detail::ends_with_eos(prefix)) return detail::one_hot_eos(vocab);

        std::vector<std::string> content = strip_control_prefix(source);
        std::size_t pos = prefix.size();
        std::map<std::string, double> weights;
        if (pos >= content.size()) {
            weights[std::string(kEosToken)] = 1.0;
        } else {
            const std::string& current = content[pos];
            auto syn = lexicon_.find(current);
            double sub_mass =
                1.0 - params_.copy_prob - params_.delete_prob - params_.stop_prob;
            if (syn != lexicon_.end() && !syn->second.empty() && sub_mass > 0.0) {
                double each = sub_mass / static_cast<double>(syn->second.size());
                for (const std::string& s : syn->second) weights[s] += each;
                weights[current] += params_.copy_prob;
            } else {
                weights[current] += params_.copy_prob + std::max(sub_mass, 0.0);
            }
            if (pos + 1 < content.size())
                weights[content[pos + 1]] += params_.delete_prob;  // skip current token
            else
                weights[std::string(kEosToken)] += params_.delete_prob;
            weights[std::string(kEosToken)] += params_.stop_prob;
        }

        double sum = 0.0;
        for (const auto& [tok, w] : weights) sum += w;
        std::vector<double> lp(vocab.size(), kNegInf);
        for (const auto& [tok, w] : weights)
            if (w > 0.0) lp[detail::index_of(vocab, tok)] = std::log(w / sum);
        return lp;
    }

  private:
    Params params_;
    Lexicon lexicon_;
};

// Source-ignoring n-gram language model with add-k smoothing. Sentence
// starts are padded with a begin marker; every training sentence ends with
// the end-of-sequence token.
class NgramLM : public SequenceModel {
  public:
    NgramLM(int order, double add_k, std::vector<std::string> vocab,
            std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>> counts,
            std::unordered_map<std::string, std::int64_t> context_totals)
        : order_(order),
          add_k_(add_k),
          vocab_(std::move(vocab)),
          counts_(std::move(counts)),
          context_totals_(std::move(context_totals)) {}

    std::vector<std::string> vocabulary(const std::vector<std::string>&) const override {
        return vocab_;
    }

    std::vector<double> next_logprobs(const std::vector<std::string>& source,
                                      std::span<const std::string> prefix) const override {
        (void)source;
        detail::check_prefix(vocab_, prefix);
        if (detail::ends_with_eos(prefix)) return detail::one_hot_eos(vocab_);

        std::string ctx = context_key(prefix);
        auto ctx_counts = counts_.find(ctx);
        auto ctx_total = context_totals_.find(ctx);
        double total = ctx_total == context_totals_.end()
                           ? 0.0
                           : static_cast<double>(ctx_total->second);
        double denom = total + add_k_ * static_cast<double>(vocab_.size());

        std::vector<double> lp(vocab_.size());
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            double c = 0.0;
            if (ctx_counts != counts_.end()) {
                auto it = ctx_counts->second.find(vocab_[i]);
                if (it != ctx_counts->second.end()) c = static_cast<double>(it->second);
            }
            lp[i] = std::log((c + add_k_) / denom);
        }
        return lp;
    }

    int order() const { return order_; }

    std::string context_key(std::span<const std::string> prefix) const {
        std::vector<std::string> ctx;
        for (int i = 0; i < order_ - 1; ++i) {
            std::int64_t idx = static_cast<std::int64_t>(prefix.size()) - (order_ - 1) + i;
            ctx.push_back(idx < 0 ? std::string(kBosToken) : prefix[static_cast<std::size_t>(idx)]);
        }
        return join(ctx);
    }

  private:
    int order_;
    double add_k_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>> counts_;
    std::unordered_map<std::string, std::int64_t> context_totals_;
};

inline NgramLM train_ngram_lm(const std::vector<std::vector<std::string>>& corpus, int order,
                              double add_k) {
    if (order < 1 || order > 5) throw ValidationError("ngram lm: order must be in 1..5");
    if (!(add_k > 0.0)) throw ValidationError("ngram lm: add_k must be positive");
    if (corpus.empty()) throw ValidationError("ngram lm: empty corpus");

    std::set<std::string> vocab{std::string(kEosToken)};
    for (const auto& sent : corpus) vocab.insert(sent.begin(), sent.end());

    std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>> counts;
    std::unordered_map<std::string, std::int64_t> totals;
    for (const auto& sent : corpus) {
        std::vector<std::string> padded(static_cast<std::size_t>(order - 1),
                                        std::string(kBosToken));
        padded.insert(padded.end(), sent.begin(), sent.end());
        padded.push_back(std::string(kEosToken));
        for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size(); ++i) {
            std::vector<std::string> ctx(padded.begin() + (i - (order - 1)), padded.begin() + i);
            std::string key = join(ctx);
            ++counts[key][padded[i]];
            ++totals[key];
        }
    }
    return NgramLM(order, add_k, {vocab.begin(), vocab.end()}, std::move(counts),
                   std::move(totals));
}

}  // namespace simpkit
