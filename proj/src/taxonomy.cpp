#include "chatda/taxonomy.hpp"

#include "chatda/resources.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace chatda {
namespace {

constexpr std::array<std::string_view, kNumUserDAs> kUserNames = {
    "user-answer-relevant", "user-question-relevant", "user-respond-irrelevant",
    "user-question-irrelevant", "user-excuses", "user-acknowledge",
    "user-request", "user-command", "user-complain",
    "user-social-obligations", "user-gibberish", "user-other",
};

constexpr std::array<std::string_view, kNumChatbotDAs> kChatbotNames = {
    "chatbot-respond-relevant",
    "chatbot-acknowledge",
    "chatbot-ask-followup",
    "chatbot-handle-user-question-irrelevant",
    "chatbot-handle-user-excuses",
    "chatbot-handle-user-request",
    "chatbot-handle-user-command",
    "chatbot-echo-user-respond-irrelevant",
    "chatbot-handle-user-complain",
    "chatbot-social-obligations",
    "chatbot-respond-default-fallback",
    "chatbot-repeat",
    "chatbot-handle-gibberish",
    "chatbot-other",
};

constexpr std::array<std::string_view, kNumSwdaTags> kSwdaNames = {
    "sd", "b", "sv", "aa", "%", "ba", "qy", "x", "ny", "fc", "qw",
    "nn", "bk", "h", "qy^d", "fo_o_fw_\"_by_bc", "bh", "^q", "bf", "na", "ad",
    "^2", "b^m", "qo", "qh", "^h", "ar", "ng", "br", "no", "fp",
    "qrr", "arp_nd", "t3", "oo_co_cc", "t1", "bd", "aap_am", "^g", "qw^d", "fa",
    "ft", "+",
};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::array<Enum, N> enumerate() {
    std::array<Enum, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<Enum>(i);
    return out;
}

std::string_view to_string(RelevanceCondition r) {
    switch (r) {
        case RelevanceCondition::RequiresRelevant: return "relevant";
        case RelevanceCondition::RequiresIrrelevant: return "irrelevant";
        case RelevanceCondition::Any: return "any";
    }
    return "any";
}

std::string_view to_string(ContextCondition c) {
    switch (c) {
        case ContextCondition::AfterInterviewQuestion: return "after-question";
        case ContextCondition::AfterChatbotStatement: return "after-statement";
        case ContextCondition::Any: return "any";
    }
    return "any";
}

std::string cell_name(SwdaTag tag, Relevance r, Position p) {
    std::ostringstream os;
    os << "(" << to_string(tag) << ", " << to_string(r) << ", " << to_string(p) << ")";
    return os.str();
}

} // namespace

std::string_view to_string(UserDA da) { return kUserNames[index_of(da)]; }
std::string_view to_string(ChatbotDA da) { return kChatbotNames[index_of(da)]; }
std::string_view to_string(SwdaTag tag) { return kSwdaNames[index_of(tag)]; }

std::string_view to_string(Relevance r) {
    switch (r) {
        case Relevance::Relevant: return "relevant";
        case Relevance::Irrelevant: return "irrelevant";
        case Relevance::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

std::string_view to_string(Position p) {
    return p == Position::AfterQuestion ? "after-question" : "after-statement";
}

std::optional<UserDA> parse_user_da(std::string_view s) { return lookup<UserDA>(kUserNames, s); }
std::optional<ChatbotDA> parse_chatbot_da(std::string_view s) { return lookup<ChatbotDA>(kChatbotNames, s); }
std::optional<SwdaTag> parse_swda_tag(std::string_view s) { return lookup<SwdaTag>(kSwdaNames, s); }

SwdaTag parse_swda_tag_lenient(std::string_view s, bool* known) {
    auto tag = parse_swda_tag(s);
    if (known) *known = tag.has_value();
    return tag.value_or(SwdaTag::Abandoned);
}

std::array<UserDA, kNumUserDAs> all_user_das() { return enumerate<UserDA, kNumUserDAs>(); }
std::array<ChatbotDA, kNumChatbotDAs> all_chatbot_das() { return enumerate<ChatbotDA, kNumChatbotDAs>(); }
std::array<SwdaTag, kNumSwdaTags> all_swda_tags() { return enumerate<SwdaTag, kNumSwdaTags>(); }

bool MappingRule::matches(SwdaTag tag, Relevance r, Position p) const {
    if (swda_tag && *swda_tag != tag) return false;
    switch (relevance) {
        case RelevanceCondition::RequiresRelevant:
            if (r != Relevance::Relevant) return false;
            break;
        case RelevanceCondition::RequiresIrrelevant:
            if (r != Relevance::Irrelevant) return false;
            break;
        case RelevanceCondition::Any: break;
    }
    switch (context) {
        case ContextCondition::AfterInterviewQuestion: return p == Position::AfterQuestion;
        case ContextCondition::AfterChatbotStatement: return p == Position::AfterStatement;
        case ContextCondition::Any: return true;
    }
    return true;
}

std::vector<ChatbotDA> CompatibilityMatrix::expected(UserDA user) const {
    std::vector<ChatbotDA> out;
    const auto& r = row(user);
    for (auto da : all_chatbot_das()) {
        if (r.test(index_of(da))) out.push_back(da);
    }
    return out;
}

UserDA apply_mapping(SwdaTag tag, Relevance relevance, Position context,
                     const std::vector<MappingRule>& rules) {
    const MappingRule* best = nullptr;
    for (const auto& rule : rules) {
        if (!rule.matches(tag, relevance, context)) continue;
        if (!best || rule.priority > best->priority) best = &rule;
    }
    return best ? best->result : UserDA::Other;
}

bool is_compatible(UserDA user_da, ChatbotDA chatbot_da, const CompatibilityMatrix& matrix) {
    return matrix.row(user_da).test(index_of(chatbot_da));
}

void validate_ruleset(const Ruleset& ruleset) {
    constexpr std::array<Relevance, 3> relevances = {Relevance::Relevant, Relevance::Irrelevant,
                                                     Relevance::NotApplicable};
    constexpr std::array<Position, 2> positions = {Position::AfterQuestion, Position::AfterStatement};

    for (auto tag : all_swda_tags()) {
        for (auto r : relevances) {
            for (auto p : positions) {
                int top = 0;
                int count = 0;
                for (const auto& rule : ruleset.rules) {
                    if (!rule.matches(tag, r, p)) continue;
                    if (count == 0 || rule.priority > top) {
                        top = rule.priority;
                        count = 1;
                    } else if (rule.priority == top) {
                        ++count;
                    }
                }
                if (count == 0) {
                    throw DataError("ruleset: no rule covers cell " + cell_name(tag, r, p) +
                                    " (missing catch-all?)");
                }
                if (count > 1) {
                    throw DataError("ruleset: " + std::to_string(count) +
                                    " rules cover cell " + cell_name(tag, r, p) +
                                    " at equal priority " + std::to_string(top));
                }
            }
        }
    }

    const bool has_catch_all = std::any_of(ruleset.rules.begin(), ruleset.rules.end(), [](const auto& r) {
        return r.is_catch_all() && r.result == UserDA::Other;
    });
    if (!has_catch_all) throw DataError("ruleset: missing catch-all rule mapping to user-other");

    for (auto user : all_user_das()) {
        if (ruleset.compatibility.row(user).none()) {
            throw DataError("ruleset: compatibility row '" + std::string(to_string(user)) +
                            "' is missing or empty");
        }
    }
    if (!ruleset.compatibility.row(UserDA::Other).all()) {
        throw DataError("ruleset: compatibility row 'user-other' must list every chatbot DA");
    }
}

Ruleset parse_ruleset_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("ruleset: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("mapping_rules") || !doc.contains("compatibility")) {
        throw DataError("ruleset: expected an object with 'mapping_rules' and 'compatibility'");
    }

    Ruleset out;
    std::size_t i = 0;
    for (const auto& jr : doc.at("mapping_rules")) {
        const std::string where = "ruleset: mapping_rules[" + std::to_string(i++) + "]";
        try {
            MappingRule rule;
            const auto tag = jr.at("swda_tag").get<std::string>();
            if (tag != "*") {
                rule.swda_tag = parse_swda_tag(tag);
                if (!rule.swda_tag) throw DataError(where + ": unknown swda_tag '" + tag + "'");
            }
            const auto rel = jr.value("relevance", std::string("any"));
            if (rel == "relevant") rule.relevance = RelevanceCondition::RequiresRelevant;
            else if (rel == "irrelevant") rule.relevance = RelevanceCondition::RequiresIrrelevant;
            else if (rel == "any") rule.relevance = RelevanceCondition::Any;
            else throw DataError(where + ": unknown relevance '" + rel + "'");

            const auto ctx = jr.value("context", std::string("any"));
            if (ctx == "after-question") rule.context = ContextCondition::AfterInterviewQuestion;
            else if (ctx == "after-statement") rule.context = ContextCondition::AfterChatbotStatement;
            else if (ctx == "any") rule.context = ContextCondition::Any;
            else throw DataError(where + ": unknown context '" + ctx + "'");

            const auto result = jr.at("result").get<std::string>();
            auto da = parse_user_da(result);
            if (!da) throw DataError(where + ": unknown result '" + result + "'");
            rule.result = *da;
            rule.priority = jr.value("priority", 0);
            out.rules.push_back(rule);
        } catch (const json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }

    for (const auto& [key, values] : doc.at("compatibility").items()) {
        auto user = parse_user_da(key);
        if (!user) throw DataError("ruleset: compatibility: unknown user DA '" + key + "'");
        for (const auto& v : values) {
            const auto name = v.get<std::string>();
            auto chatbot = parse_chatbot_da(name);
            if (!chatbot) {
                throw DataError("ruleset: compatibility[" + key + "]: unknown chatbot DA '" + name + "'");
            }
            out.compatibility.allow(*user, *chatbot);
        }
    }

    validate_ruleset(out);
    return out;
}

std::string ruleset_to_json(const Ruleset& ruleset) {
    using nlohmann::ordered_json;
    ordered_json doc;
    auto rules = ordered_json::array();
    for (const auto& r : ruleset.rules) {
        ordered_json jr;
        jr["swda_tag"] = r.swda_tag ? std::string(to_string(*r.swda_tag)) : std::string("*");
        jr["relevance"] = to_string(r.relevance);
        jr["context"] = to_string(r.context);
        jr["result"] = to_string(r.result);
        jr["priority"] = r.priority;
        rules.push_back(std::move(jr));
    }
    doc["mapping_rules"] = std::move(rules);
    ordered_json compat = ordered_json::object();
    for (auto user : all_user_das()) {
        auto row = ordered_json::array();
        for (auto da : ruleset.compatibility.expected(user)) row.push_back(to_string(da));
        compat[std::string(to_string(user))] = std::move(row);
    }
    doc["compatibility"] = std::move(compat);
    return doc.dump(2) + "\n";
}

Ruleset load_ruleset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("ruleset: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_ruleset_json(ss.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

const Ruleset& default_ruleset() {
    static const Ruleset rs = parse_ruleset_json(resources::ruleset_json());
    return rs;
}

} // namespace chatda
