#include "chatda/transcript.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace chatda;
using testutil::bot;
using testutil::user;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("chatda_unit_" + name);
}

} // namespace

TEST_CASE("empty content loads as an empty list") {
    CHECK(parse_transcripts("", true).empty());
    CHECK(serialize_transcripts({}).empty());
}

TEST_CASE("three-utterance dialogue round trips through the writer") {
    auto d = testutil::dialogue("d1", "q1", {bot("What hobbies or interests do you have?"), user("naïve 😀 dancing"),
                                             bot("Okay.")});
    d.utterances[1].user_da = UserDA::AnswerRelevant;
    d.utterances[1].swda_tag = SwdaTag::StatementNonOpinion;
    d.utterances[2].chatbot_da = ChatbotDA::Acknowledge;
    d.utterances[2].gold_label = Appropriateness::Neutral;
    const auto path = temp_file("roundtrip.jsonl");
    write_transcripts({d}, path);
    const auto back = load_transcripts(path, true);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == d);
    CHECK(back[0].utterances[1].text == "naïve 😀 dancing");
    std::filesystem::remove(path);
}

TEST_CASE("user utterance with chatbot_da is rejected in strict mode naming the field") {
    const std::string line =
        R"({"id":"x","topic_id":"q1","question_text":"Q?","utterances":[{"speaker":"chatbot","text":"Q?"},)"
        R"({"speaker":"user","text":"hi","chatbot_da":"chatbot-repeat"}]})";
    try {
        parse_transcripts(line, true);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 1") != std::string::npos);
        CHECK(msg.find("utterances[1].chatbot_da") != std::string::npos);
    }
    LoadReport rep;
    CHECK(parse_transcripts(line, false, &rep).empty());
    CHECK(rep.skipped == 1);
}

TEST_CASE("malformed JSON and unknown labels") {
    CHECK_THROWS_AS(parse_transcripts("{not json}\n", true), DataError);
    const std::string bad_label =
        R"({"id":"x","topic_id":"q1","question_text":"Q?","utterances":[{"speaker":"chatbot","text":"Q?","gold_label":"great"}]})";
    CHECK_THROWS_AS(parse_transcripts(bad_label, true), DataError);
}

TEST_CASE("duplicate dialogue ids are an error in both modes") {
    const std::string rec =
        R"({"id":"x","topic_id":"q1","question_text":"Q?","utterances":[{"speaker":"chatbot","text":"Q?"}]})";
    CHECK_THROWS_AS(parse_transcripts(rec + "\n" + rec + "\n", true), DataError);
    CHECK_THROWS_AS(parse_transcripts(rec + "\n" + rec + "\n", false), DataError);
}

TEST_CASE("dialogue without a chatbot turn is invalid; non-question opener only warns") {
    CHECK_THROWS_AS(validate(testutil::dialogue("u", "q1", {user("hello")})), DataError);
    CHECK_THROWS_AS(validate(testutil::dialogue("e", "q1", {})), DataError);
    const auto w = validate(testutil::dialogue("s", "q1", {bot("Welcome."), user("hi")}));
    CHECK(w.size() == 1);
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_transcripts("/nonexistent/x.jsonl", true), DataError);
}

TEST_CASE("generate_corpus is deterministic and fully labeled") {
    CHECK(generate_corpus({0, 7, 0.15}).empty());
    const auto a = generate_corpus({100, 7, 0.15});
    const auto b = generate_corpus({100, 7, 0.15});
    CHECK(serialize_transcripts(a) == serialize_transcripts(b));
    CHECK(serialize_transcripts(a) != serialize_transcripts(generate_corpus({100, 8, 0.15})));
    for (const auto& d : a) {
        CHECK(validate(d).empty());
        for (const auto& u : d.utterances) {
            if (u.is_chatbot()) {
                CHECK(u.chatbot_da.has_value());
                CHECK(u.gold_label.has_value());
            } else {
                CHECK(u.user_da.has_value());
            }
        }
    }
    CHECK(parse_transcripts(serialize_transcripts(a), true) == a);
}

TEST_CASE("generated mismatch rate is within 0.15 +- 0.03 for seed 7, n = 800") {
    const auto corpus = generate_corpus({800, 7, 0.15});
    std::size_t n = 0, bad = 0;
    for (const auto& d : corpus) {
        for (const auto& u : d.utterances) {
            if (!u.is_chatbot()) continue;
            ++n;
            bad += u.gold_label == Appropriateness::Inappropriate;
        }
    }
    const double rate = static_cast<double>(bad) / static_cast<double>(n);
    CHECK(rate >= 0.12);
    CHECK(rate <= 0.18);
}

TEST_CASE("planted responses are exactly the incompatible ones") {
    const auto& m = default_ruleset().compatibility;
    for (const auto& d : generate_corpus({200, 11, 0.2})) {
        std::optional<UserDA> last;
        for (const auto& u : d.utterances) {
            if (u.is_user()) {
                last = u.user_da;
                continue;
            }
            if (!last) continue;
            CHECK((u.gold_label == Appropriateness::Inappropriate) == !is_compatible(*last, *u.chatbot_da, m));
        }
    }
}
