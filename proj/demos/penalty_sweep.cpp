// Decodes one sentence with a noisy copy model while sweeping the length
// penalty, showing the output collapse once the penalty outweighs the
// model's preference for copying.

#include <iostream>

#include "simpkit/decode.hpp"
#include "simpkit/models.hpp"

int main() {
    using namespace simpkit;

    NoisyCopyModel model(NoisyCopyModel::Params{0.88, 0.02, 0.03},
                         {{"plant", {"factory"}}, {"learn", {"see"}}});
    Sentence source = make_sentence(
        "people visited a large plant to learn how machines made cars .");

    BeamConfig beam{32, 40};
    for (double lp : {0.0, 0.1, 0.2, 0.3, 0.5}) {
        std::vector<Hypothesis> ranked =
            beam_search_rescoring(model, source, beam, PenaltyConfig{lp, 0.0, 0.0});
        std::cout << "lp=" << lp << "  \"" << join(surface_tokens(ranked.front().tokens))
                  << "\"\n";
    }
    return 0;
}
