#include <catch2/catch_amalgamated.hpp>

#include "simpkit/io.hpp"

#include <filesystem>
#include <random>

using namespace simpkit;
using Catch::Approx;

namespace {

// Scratch directory removed at scope exit.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("simpkit_io_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::string file(const std::string& name, const std::string& content) const {
        std::string p = (path / name).string();
        write_file(p, content);
        return p;
    }
};

}  // namespace

TEST_CASE("read_lines handles newlines and missing files") {
    TempDir tmp;
    std::string p = tmp.file("a.txt", "one\ntwo\r\nthree");
    CHECK(read_lines(p) == std::vector<std::string>{"one", "two", "three"});
    CHECK_THROWS_AS(read_lines((tmp.path / "absent.txt").string()), ResourceError);
}

TEST_CASE("load_corpus enforces non-empty lines with line numbers") {
    TempDir tmp;
    std::string p = tmp.file("c.txt", "The cat .\n\nfinal line\n");
    CHECK_THROWS_WITH(load_corpus(p), Catch::Matchers::ContainsSubstring("line 2"));
    std::vector<Sentence> lax = load_corpus(p, false);
    REQUIRE(lax.size() == 3);
    CHECK(lax[0].tokens == std::vector<std::string>{"the", "cat", "."});
    CHECK(lax[1].tokens.empty());
}

TEST_CASE("frequency table files: counts, ranks, and the auto heuristic") {
    TempDir tmp;

    SECTION("counts with ties broken lexicographically") {
        std::string p = tmp.file("f.tsv", "zebra\t10\napple\t10\nthe\t500\n");
        FrequencyTable t = load_frequency_table(p);
        CHECK(t.rank("the") == 1);
        CHECK(t.rank("apple") == 2);
        CHECK(t.rank("zebra") == 3);
    }

    SECTION("a permutation of 1..N is read as explicit ranks") {
        std::string p = tmp.file("r.tsv", "rare\t3\nthe\t1\ncommon\t2\n");
        FrequencyTable t = load_frequency_table(p);
        CHECK(t.rank("the") == 1);
        CHECK(t.rank("common") == 2);
        CHECK(t.rank("rare") == 3);
    }

    SECTION("explicit format flags override the heuristic") {
        std::string p = tmp.file("x.tsv", "a\t3\nb\t1\nc\t2\n");
        FrequencyTable counts = load_frequency_table(p, FreqFormat::Counts);
        CHECK(counts.rank("a") == 1);  // highest count first
        FrequencyTable ranks = load_frequency_table(p, FreqFormat::Ranks);
        CHECK(ranks.rank("a") == 3);
    }

    SECTION("malformed rows are rejected with line numbers") {
        std::string p = tmp.file("bad.tsv", "ok\t1\nbroken line\n");
        CHECK_THROWS_WITH(load_frequency_table(p), Catch::Matchers::ContainsSubstring("line 2"));
        std::string neg = tmp.file("neg.tsv", "word\t-3\n");
        CHECK_THROWS_AS(load_frequency_table(neg), ValidationError);
    }
}

TEST_CASE("depth sidecars map line numbers to depths") {
    TempDir tmp;
    std::string p = tmp.file("d.tsv", "1\t5\n3\t2\n");
    std::map<std::size_t, int> d = load_depth_sidecar(p);
    REQUIRE(d.size() == 2);
    CHECK(d.at(1) == 5);
    CHECK(d.at(3) == 2);

    CHECK_THROWS_AS(load_depth_sidecar(tmp.file("bad.tsv", "0\t4\n")), ValidationError);
    CHECK_THROWS_AS(load_depth_sidecar(tmp.file("bad2.tsv", "1\tx\n")), ValidationError);

    std::vector<Sentence> corpus{make_sentence("a"), make_sentence("b"), make_sentence("c")};
    TextKeyedDepths provider;
    add_sidecar_depths(provider, p, corpus);
    CHECK(provider.depth(corpus[0]) == 5);
    CHECK(provider.depth(corpus[2]) == 2);
    CHECK(!provider.depth(corpus[1]).has_value());

    std::string beyond = tmp.file("far.tsv", "9\t1\n");
    CHECK_THROWS_AS(add_sidecar_depths(provider, beyond, corpus), ValidationError);
}

TEST_CASE("lexicon files map words to synonym lists") {
    TempDir tmp;
    std::string p = tmp.file("lex.tsv", "large\tbig huge\nplant\tfactory\n");
    NoisyCopyModel::Lexicon lex = load_lexicon(p);
    CHECK(lex.at("large") == std::vector<std::string>{"big", "huge"});
    CHECK(lex.at("plant") == std::vector<std::string>{"factory"});
    CHECK_THROWS_AS(load_lexicon(tmp.file("bad.tsv", "word\t\n")), ValidationError);
}

TEST_CASE("table model files parse states, wildcards and comments") {
    TempDir tmp;
    std::string text =
        "# toy model\n"
        "\n"
        "src a| -> x:0.5, y:0.5\n"
        "*|x -> y:1.0\n"
        "*|* -> </s>:0.5, x:0.5\n";
    TableModel model = load_table_model(tmp.file("m.tm", text));

    std::vector<std::string> source{"src", "a"};
    std::vector<std::string> vocab = model.vocabulary(source);
    // Exact (source, empty-prefix) state.
    std::vector<double> lp = model.next_logprobs(source, std::vector<std::string>{});
    CHECK(std::exp(lp[detail::index_of(vocab, "x")]) == Approx(0.5));

    // ("*", "x") state.
    std::vector<double> lp2 = model.next_logprobs(source, std::vector<std::string>{"x"});
    CHECK(std::exp(lp2[detail::index_of(vocab, "y")]) == Approx(1.0));

    // Unlisted state falls back to the *|* default.
    std::vector<double> lp3 = model.next_logprobs(source, std::vector<std::string>{"y"});
    CHECK(std::exp(lp3[detail::index_of(vocab, std::string(kEosToken))]) == Approx(0.5));
}

TEST_CASE("table model files report malformed lines") {
    CHECK_THROWS_WITH(load_table_model_text("a|b x:1.0\n", "spec"),
                      Catch::Matchers::ContainsSubstring("missing '->'"));
    CHECK_THROWS_WITH(load_table_model_text("a -> x:1.0\n", "spec"),
                      Catch::Matchers::ContainsSubstring("source|prefix"));
    CHECK_THROWS_WITH(load_table_model_text("a|b -> x\n", "spec"),
                      Catch::Matchers::ContainsSubstring("token:prob"));
    CHECK_THROWS_AS(load_table_model_text("a|b -> x:0.9\n", "spec"), ValidationError);
}

TEST_CASE("model specs instantiate the right implementations") {
    TempDir tmp;
    std::string table_path = tmp.file("m.tm", "*|* -> a:0.5, </s>:0.5\n");
    auto table = load_model_spec("table:" + table_path);
    CHECK(dynamic_cast<TableModel*>(table.get()) != nullptr);

    auto copy = load_model_spec("copy");
    CHECK(dynamic_cast<NoisyCopyModel*>(copy.get()) != nullptr);

    std::string lex_path = tmp.file("lex.tsv", "big\tlarge\n");
    auto copy2 = load_model_spec("copy:copy=0.8,delete=0.05,stop=0.1,lexicon=" + lex_path);
    CHECK(dynamic_cast<NoisyCopyModel*>(copy2.get()) != nullptr);

    std::string corpus_path = tmp.file("corpus.txt", "the cat sat\nthe dog ran\n");
    auto lm = load_model_spec("ngram:" + corpus_path + ",order=2,k=0.5");
    auto* ngram = dynamic_cast<NgramLM*>(lm.get());
    REQUIRE(ngram != nullptr);
    CHECK(ngram->order() == 2);

    CHECK_THROWS_AS(load_model_spec("mystery:thing"), ValidationError);
    CHECK_THROWS_AS(load_model_spec("copy:copy=2.0"), ValidationError);
    CHECK_THROWS_AS(load_model_spec("table:/definitely/not/here.tm"), ResourceError);
}

TEST_CASE("bt example TSV round-trips") {
    std::vector<BTExample> examples;
    BTExample a;
    a.input = {"<NbChars_1.00>", "<LevSim_1.00>", "<WordRank_1.00>", "the", "cat"};
    a.target = {"the", "cat"};
    examples.push_back(a);
    BTExample b;
    b.input = {"<NbChars_0.50>", "<LevSim_0.75>", "<WordRank_1.00>", "dog"};
    b.target = {"a", "dog", "ran"};
    examples.push_back(b);

    std::string tsv = bt_examples_to_tsv(examples);
    std::vector<BTExample> parsed = bt_examples_from_tsv(tsv, "mem");
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].input == a.input);
    CHECK(parsed[0].target == a.target);
    CHECK(parsed[1].input == b.input);

    CHECK_THROWS_WITH(bt_examples_from_tsv("no tab here\n", "mem"),
                      Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("json reports round-trip exactly") {
    EvalReport r;
    r.bleu = 71.65313105737893;
    r.sari = 62.22222222222222;
    r.fkgl = -1.4500000000000002;
    r.match = 1.0 / 3.0;
    r.add = 0.1234567890123456;
    r.del = 0.0;
    r.n_sentences = 42;

    nlohmann::json j = nlohmann::json::parse(to_json(r).dump());
    EvalReport back = eval_report_from_json(j);
    CHECK(back == r);

    PenaltyConfig c{0.1, 1.3, 0.7000000000000001};
    PenaltyConfig back_c =
        penalty_config_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(back_c == c);
}

TEST_CASE("penalty configs load from JSON files") {
    TempDir tmp;
    std::string p = tmp.file("best.json",
                             "{\"lambda_length\":0.4,\"lambda_exact\":1.3,\"lambda_fkgl\":1.0}");
    PenaltyConfig c = load_penalty_config(p);
    CHECK(c == PenaltyConfig{0.4, 1.3, 1.0});
    CHECK_THROWS_AS(load_penalty_config(tmp.file("bad.json", "{}")), ValidationError);
    CHECK_THROWS_AS(load_penalty_config((tmp.path / "absent.json").string()), ResourceError);
}

TEST_CASE("eval report TSV has a stable header and two-decimal values") {
    EvalReport r;
    r.bleu = 97.41;
    r.sari = 27.32;
    r.fkgl = 9.9;
    r.match = 1.0;
    r.add = 0.0;
    r.del = 0.0;
    r.n_sentences = 359;
    CHECK(eval_report_tsv(r) ==
          "bleu\tsari\tfkgl\tmatch\tadd\tdel\tn_sentences\n"
          "97.41\t27.32\t9.90\t1.00\t0.00\t0.00\t359\n");
}
