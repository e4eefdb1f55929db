#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "simpkit/control.hpp"
#include "simpkit/errors.hpp"
#include "simpkit/models.hpp"
#include "simpkit/text.hpp"

namespace simpkit {

enum class Direction { ComplexToSimple, SimpleToComplex };

// One back-translation training example: rendered control tokens prepended
// to the noisy/translated tokens, paired with the original as target.
struct BTExample {
    std::vector<std::string> input;
    std::vector<std::string> target;
    Direction direction = Direction::ComplexToSimple;

    bool operator==(const BTExample&) const = default;
};

using Translator = std::function<Sentence(const Sentence&)>;

inline BTExample make_bt_example(const Sentence& original, const Translator& translator,
                                 const FrequencyTable& table,
                                 const DepthProvider* depths = nullptr,
                                 Direction direction = Direction::ComplexToSimple) {
    Sentence translated = translator(original);
    if (translated.tokens.empty())
        throw ValidationError("make_bt_example: translator produced an empty sentence");

    ControlTokens ctrl = control_tokens(original, translated, table, depths);
    BTExample ex;
    ex.input = render_control_tokens(ctrl);
    ex.input.insert(ex.input.end(), translated.tokens.begin(), translated.tokens.end());
    ex.target = original.tokens;
    ex.direction = direction;
    return ex;
}

// Mean negative log-likelihood of the targets under the model, end-of-
// sequence terminal included. A zero-probability step makes the loss +inf.
inline double bt_loss(const SequenceModel& model, std::span<const BTExample> examples) {
    if (examples.empty()) throw ValidationError("bt_loss: no examples");
    double total = 0.0;
    for (const BTExample& ex : examples) {
        std::vector<std::string> vocab = model.vocabulary(ex.input);
        std::vector<std::string> target = ex.target;
        target.push_back(std::string(kEosToken));

        std::vector<std::string> prefix;
        for (const std::string& tok : target) {
            std::size_t idx = detail::index_of(vocab, tok);
            if (idx == vocab.size()) return std::numeric_limits<double>::infinity();
            double lp = model.next_logprobs(ex.input, prefix)[idx];
            if (lp == kNegInf) return std::numeric_limits<double>::infinity();
            total -= lp;
            prefix.push_back(tok);
        }
    }
    return total / static_cast<double>(examples.size());
}

}  // namespace simpkit
