#include "chatda/taxonomy.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <functional>
#include <limits>
#include <set>

using namespace chatda;

namespace {

const std::array<Relevance, 3> kRel = {Relevance::Relevant, Relevance::Irrelevant, Relevance::NotApplicable};
const std::array<Position, 2> kPos = {Position::AfterQuestion, Position::AfterStatement};

std::string default_without(const std::function<bool(const nlohmann::json&)>& drop_rule) {
    auto j = nlohmann::json::parse(ruleset_to_json(default_ruleset()));
    auto& rules = j["mapping_rules"];
    nlohmann::json kept = nlohmann::json::array();
    for (const auto& r : rules) {
        if (!drop_rule(r)) kept.push_back(r);
    }
    rules = kept;
    return j.dump();
}

} // namespace

TEST_CASE("label spaces have the documented sizes") {
    CHECK(all_user_das().size() == 12);
    CHECK(all_chatbot_das().size() == 14);
    CHECK(all_swda_tags().size() == 43);
    std::set<std::string_view> names;
    for (auto t : all_swda_tags()) names.insert(to_string(t));
    CHECK(names.size() == 43);
    for (auto t : all_swda_tags()) CHECK(parse_swda_tag(to_string(t)) == t);
    for (auto d : all_user_das()) CHECK(parse_user_da(to_string(d)) == d);
    for (auto d : all_chatbot_das()) CHECK(parse_chatbot_da(to_string(d)) == d);
}

TEST_CASE("unknown SwDA strings map leniently to %") {
    bool known = true;
    CHECK(parse_swda_tag_lenient("zz", &known) == SwdaTag::Abandoned);
    CHECK_FALSE(known);
}

TEST_CASE("apply_mapping examples") {
    const auto& rules = default_ruleset().rules;
    CHECK(apply_mapping(*parse_swda_tag("sd"), Relevance::Relevant, Position::AfterQuestion, rules) ==
          UserDA::AnswerRelevant);
    CHECK(apply_mapping(*parse_swda_tag("qw"), Relevance::Irrelevant, Position::AfterQuestion, rules) ==
          UserDA::QuestionIrrelevant);
    CHECK(apply_mapping(*parse_swda_tag("ft"), Relevance::NotApplicable, Position::AfterStatement, rules) ==
          UserDA::SocialObligations);
    CHECK(apply_mapping(*parse_swda_tag("ad"), Relevance::NotApplicable, Position::AfterStatement, rules) ==
          UserDA::Request);
    CHECK(apply_mapping(*parse_swda_tag("ad"), Relevance::Irrelevant, Position::AfterQuestion, rules) ==
          UserDA::Command);
    CHECK(apply_mapping(*parse_swda_tag("%"), Relevance::Irrelevant, Position::AfterQuestion, rules) ==
          UserDA::Gibberish);
    CHECK(apply_mapping(*parse_swda_tag("t3"), Relevance::Relevant, Position::AfterQuestion, rules) == UserDA::Other);
}

TEST_CASE("default ruleset is total: exactly one top-priority rule per cell") {
    const auto& rules = default_ruleset().rules;
    std::size_t cells = 0;
    for (auto t : all_swda_tags()) {
        for (auto r : kRel) {
            for (auto p : kPos) {
                int best = std::numeric_limits<int>::min();
                int at_best = 0;
                for (const auto& rule : rules) {
                    if (!rule.matches(t, r, p)) continue;
                    if (rule.priority > best) {
                        best = rule.priority;
                        at_best = 1;
                    } else if (rule.priority == best) {
                        ++at_best;
                    }
                }
                CHECK(at_best == 1);
                ++cells;
            }
        }
    }
    CHECK(cells == 258);
}

TEST_CASE("compatibility examples and handler reflexivity") {
    const auto& m = default_ruleset().compatibility;
    CHECK(is_compatible(UserDA::Request, ChatbotDA::HandleRequest, m));
    CHECK_FALSE(is_compatible(UserDA::AnswerRelevant, ChatbotDA::HandleRequest, m));
    for (auto c : all_chatbot_das()) CHECK(is_compatible(UserDA::Other, c, m));
    CHECK(is_compatible(UserDA::Command, ChatbotDA::HandleCommand, m));
    CHECK(is_compatible(UserDA::Complain, ChatbotDA::HandleComplain, m));
    CHECK(is_compatible(UserDA::Gibberish, ChatbotDA::HandleGibberish, m));
    CHECK(is_compatible(UserDA::Excuses, ChatbotDA::HandleExcuses, m));
    CHECK(is_compatible(UserDA::QuestionIrrelevant, ChatbotDA::HandleQuestionIrrelevant, m));
    CHECK(is_compatible(UserDA::RespondIrrelevant, ChatbotDA::EchoRespondIrrelevant, m));
    CHECK(is_compatible(UserDA::SocialObligations, ChatbotDA::SocialObligations, m));
    // repeat only after respond-irrelevant, gibberish, other
    for (auto u : all_user_das()) {
        const bool allowed = u == UserDA::RespondIrrelevant || u == UserDA::Gibberish || u == UserDA::Other;
        CHECK(is_compatible(u, ChatbotDA::Repeat, m) == allowed);
    }
    for (auto u : all_user_das()) CHECK(m.row(u).any());
}

TEST_CASE("ruleset JSON round trip") {
    const auto text = ruleset_to_json(default_ruleset());
    const auto back = parse_ruleset_json(text);
    CHECK(back.compatibility == default_ruleset().compatibility);
    CHECK(back.rules.size() == default_ruleset().rules.size());
}

TEST_CASE("ruleset without a catch-all is rejected naming a cell") {
    const auto text = default_without([](const nlohmann::json& r) { return r["swda_tag"] == "*"; });
    try {
        parse_ruleset_json(text);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("no rule covers cell") != std::string::npos);
    }
}

TEST_CASE("ruleset with a tie at equal priority is rejected") {
    auto j = nlohmann::json::parse(ruleset_to_json(default_ruleset()));
    j["mapping_rules"].push_back(
        {{"swda_tag", "*"}, {"relevance", "any"}, {"context", "any"}, {"result", "user-gibberish"}, {"priority", 0}});
    CHECK_THROWS_AS(parse_ruleset_json(j.dump()), DataError);
}

TEST_CASE("ruleset missing the user-gibberish row is rejected naming the row") {
    auto j = nlohmann::json::parse(ruleset_to_json(default_ruleset()));
    j["compatibility"].erase("user-gibberish");
    try {
        parse_ruleset_json(j.dump());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("user-gibberish") != std::string::npos);
    }
}

TEST_CASE("load_ruleset on a missing file fails") {
    CHECK_THROWS_AS(load_ruleset("/nonexistent/ruleset.json"), DataError);
}
