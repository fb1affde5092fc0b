#include "chatda/explain.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <map>

using namespace chatda;
using testutil::bot;
using testutil::user;

namespace {

Prediction flagged() {
    Prediction p;
    p.label = Appropriateness::Inappropriate;
    p.votes = {300, 50, 150};
    return p;
}

Dialogue dance_exchange() {
    auto d = testutil::dialogue("dance", "q1", {bot("What hobbies or interests do you have?"), user("dance"),
                                                bot("I wish I could... but I have no feet :-)"),
                                                bot("What hobbies or interests do you have?")});
    d.utterances[0].chatbot_da = ChatbotDA::Other;
    d.utterances[1].user_da = UserDA::AnswerRelevant;
    d.utterances[2].chatbot_da = ChatbotDA::HandleRequest;
    d.utterances[3].chatbot_da = ChatbotDA::Repeat;
    return d;
}

std::vector<ResponsePrediction> all_predictions(const std::vector<Dialogue>& ds,
                                                const std::map<std::pair<std::string, std::size_t>, Prediction>& over) {
    std::vector<ResponsePrediction> out;
    for (const auto& d : ds) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            if (!d.utterances[i].is_chatbot()) continue;
            Prediction p;
            p.label = Appropriateness::Appropriate;
            p.votes = {0, 0, 1};
            if (auto it = over.find({d.id, i}); it != over.end()) p = it->second;
            out.push_back({d.id, i, p, d.utterances[i].gold_label});
        }
    }
    return out;
}

} // namespace

TEST_CASE("answer mistaken for a request") {
    const auto& m = default_ruleset().compatibility;
    const auto e = explain_response(dance_exchange(), 2, flagged(), m);
    CHECK(e.user_da == UserDA::AnswerRelevant);
    CHECK(e.target_da == ChatbotDA::HandleRequest);
    CHECK_FALSE(e.compatible);
    CHECK(e.expected_das ==
          std::vector<ChatbotDA>{ChatbotDA::RespondRelevant, ChatbotDA::Acknowledge, ChatbotDA::AskFollowup});
    CHECK(e.narrative.find("user-answer-relevant") != std::string::npos);
    CHECK(e.narrative.find("chatbot-handle-user-request") != std::string::npos);
    CHECK(e.margin == 150);
    CHECK(e.context.size() == 4);  // turns 0..3, window 2
    CHECK(e.context[2].is_target);

    const auto repeat = explain_response(dance_exchange(), 3, flagged(), m);
    CHECK_FALSE(repeat.compatible);
    CHECK(repeat.target_da == ChatbotDA::Repeat);
}

TEST_CASE("gibberish accepted with an acknowledgment") {
    auto d = testutil::dialogue("digits", "q1", {bot("What hobbies or interests do you have?"), user("5"), bot("Okay.")});
    d.utterances[1].user_da = UserDA::Gibberish;
    d.utterances[2].chatbot_da = ChatbotDA::Acknowledge;
    const auto e = explain_response(d, 2, flagged(), default_ruleset().compatibility);
    CHECK_FALSE(e.compatible);
    CHECK(std::find(e.expected_das.begin(), e.expected_das.end(), ChatbotDA::HandleGibberish) != e.expected_das.end());
}

TEST_CASE("target without a prior user turn") {
    const auto e = explain_response(dance_exchange(), 0, flagged(), default_ruleset().compatibility);
    CHECK(e.compatible);
    CHECK_FALSE(e.user_da.has_value());
    CHECK(e.expected_das.empty());
    CHECK(e.narrative.find("no user context") != std::string::npos);
}

TEST_CASE("explain errors on unannotated input") {
    auto d = dance_exchange();
    d.utterances[1].user_da.reset();
    CHECK_THROWS_AS(explain_response(d, 2, flagged(), default_ruleset().compatibility), DataError);
    CHECK_THROWS_AS(explain_response(dance_exchange(), 1, flagged(), default_ruleset().compatibility), DataError);
}

TEST_CASE("report with zero flagged responses has a summary only") {
    const std::vector<Dialogue> ds{dance_exchange()};
    const auto preds = all_predictions(ds, {});
    const auto md = build_report(ds, preds, {}, ReportFormat::Markdown);
    CHECK(md.find("flagged 0 of 3 responses") != std::string::npos);
    CHECK(md.find("\n## ") == std::string::npos);
    const auto j = nlohmann::json::parse(build_report(ds, preds, {}, ReportFormat::Json));
    CHECK(j["summary"]["flagged"] == 0);
    CHECK(j["groups"].empty());
}

TEST_CASE("two flagged responses sharing a pair form one group") {
    auto d2 = dance_exchange();
    d2.id = "dance-copy";
    const std::vector<Dialogue> ds{dance_exchange(), d2};
    const auto& m = default_ruleset().compatibility;
    const auto preds = all_predictions(ds, {{{"dance", 2}, flagged()}, {{"dance-copy", 2}, flagged()}});
    const std::vector<Explanation> ex{explain_response(ds[0], 2, flagged(), m), explain_response(ds[1], 2, flagged(), m)};
    const auto j = nlohmann::json::parse(build_report(ds, preds, ex, ReportFormat::Json));
    REQUIRE(j["groups"].size() == 1);
    const auto& g = j["groups"][0];
    CHECK(g["count"] == 2);
    CHECK(g["user_da"] == "user-answer-relevant");
    CHECK(g["chatbot_da"] == "chatbot-handle-user-request");
    CHECK(g["compatible"] == false);
    CHECK(g["examples"][0]["expected_das"][0] == "chatbot-respond-relevant");
    const auto md = build_report(ds, preds, ex, ReportFormat::Markdown);
    CHECK(md.find("## user-answer-relevant / chatbot-handle-user-request (2)") != std::string::npos);
}

TEST_CASE("report requires coverage and one explanation per flag") {
    const std::vector<Dialogue> ds{dance_exchange()};
    const auto& m = default_ruleset().compatibility;
    auto preds = all_predictions(ds, {{{"dance", 2}, flagged()}});
    CHECK_THROWS_AS(build_report(ds, preds, {}, ReportFormat::Markdown), DataError);
    const auto e = explain_response(ds[0], 2, flagged(), m);
    CHECK_THROWS_AS(build_report(ds, preds, {e, e}, ReportFormat::Markdown), DataError);
    preds.pop_back();
    CHECK_THROWS_AS(build_report(ds, preds, {e}, ReportFormat::Markdown), DataError);
}

TEST_CASE("group sizes equal planted pair counts under a perfect detector") {
    const auto corpus = generate_corpus({200, 17, 0.15});
    const auto& m = default_ruleset().compatibility;
    std::map<std::pair<std::string, std::size_t>, Prediction> over;
    std::vector<Explanation> ex;
    std::map<std::string, std::size_t> planted;
    for (const auto& d : corpus) {
        for (std::size_t i = 0; i < d.utterances.size(); ++i) {
            const auto& u = d.utterances[i];
            if (!u.is_chatbot() || u.gold_label != Appropriateness::Inappropriate) continue;
            over[{d.id, i}] = flagged();
            ex.push_back(explain_response(d, i, flagged(), m));
            ++planted[ex.back().pair_name()];
        }
    }
    const auto groups = group_explanations(ex);
    std::size_t total = 0;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& g = groups[k];
        total += g.members.size();
        CHECK(planted.at(g.members.front()->pair_name()) == g.members.size());
        if (k > 0) CHECK(groups[k - 1].members.size() >= g.members.size());
    }
    CHECK(total == ex.size());
    const auto preds = all_predictions(corpus, over);
    const auto a = build_report(corpus, preds, ex, ReportFormat::Markdown);
    CHECK(a == build_report(corpus, preds, ex, ReportFormat::Markdown));
}
