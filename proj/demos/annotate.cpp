// Computes control tokens for a pair of sentences given on the command line.
//
//   demo_annotate "the original sentence ." "the shorter one ."

#include <iostream>

#include "simpkit/control.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: demo_annotate <original> <other>\n";
        return 1;
    }
    using namespace simpkit;

    FrequencyTable table = FrequencyTable::from_counts({
        {"the", 1000}, {"a", 900}, {"one", 500}, {"sentence", 40}, {"original", 25},
        {"shorter", 10},
    });

    Sentence original = make_sentence(argv[1]);
    Sentence other = make_sentence(argv[2]);
    ControlTokens c = control_tokens(original, other, table);
    for (const std::string& tok : render_control_tokens(c)) std::cout << tok << ' ';
    std::cout << '\n';
    return 0;
}
