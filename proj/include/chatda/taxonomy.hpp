#pragma once

#include "chatda/common.hpp"

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chatda {

// Context-aware user dialogue acts in interview conversations.
enum class UserDA : std::uint8_t {
    AnswerRelevant,
    QuestionRelevant,
    RespondIrrelevant,
    QuestionIrrelevant,
    Excuses,
    Acknowledge,
    Request,
    Command,
    Complain,
    SocialObligations,
    Gibberish,
    Other,
};
inline constexpr std::size_t kNumUserDAs = 12;

// Context-aware chatbot dialogue acts, characterized relative to the previous user input.
enum class ChatbotDA : std::uint8_t {
    RespondRelevant,
    Acknowledge,
    AskFollowup,
    HandleQuestionIrrelevant,
    HandleExcuses,
    HandleRequest,
    HandleCommand,
    EchoRespondIrrelevant,
    HandleComplain,
    SocialObligations,
    DefaultFallback,
    Repeat,
    HandleGibberish,
    Other,
};
inline constexpr std::size_t kNumChatbotDAs = 14;

// The 43 Switchboard-DAMSL dialogue-behavior tags (clustered act tags as
// distributed with the SwDA corpus), in descending corpus frequency.
enum class SwdaTag : std::uint8_t {
    StatementNonOpinion,      // sd
    Backchannel,              // b
    StatementOpinion,         // sv
    AgreeAccept,              // aa
    Abandoned,                // %  (abandoned / turn-exit / uninterpretable)
    Appreciation,             // ba
    YesNoQuestion,            // qy
    NonVerbal,                // x
    YesAnswer,                // ny
    ConventionalClosing,      // fc
    WhQuestion,               // qw
    NoAnswer,                 // nn
    ResponseAcknowledgement,  // bk
    Hedge,                    // h
    DeclarativeYesNoQuestion, // qy^d
    Other,                    // fo_o_fw_"_by_bc
    BackchannelQuestion,      // bh
    Quotation,                // ^q
    Summarize,                // bf
    AffirmativeNonYes,        // na
    ActionDirective,          // ad
    CollaborativeCompletion,  // ^2
    RepeatPhrase,             // b^m
    OpenQuestion,             // qo
    RhetoricalQuestion,       // qh
    Hold,                     // ^h
    Reject,                   // ar
    NegativeNonNo,            // ng
    SignalNonUnderstanding,   // br
    OtherAnswer,              // no
    ConventionalOpening,      // fp
    OrClause,                 // qrr
    DispreferredAnswer,       // arp_nd
    ThirdPartyTalk,           // t3
    OfferCommit,              // oo_co_cc
    SelfTalk,                 // t1
    Downplayer,               // bd
    MaybeAcceptPart,          // aap_am
    TagQuestion,              // ^g
    DeclarativeWhQuestion,    // qw^d
    Apology,                  // fa
    Thanking,                 // ft
    Continuation,             // +
};
inline constexpr std::size_t kNumSwdaTags = 43;

enum class Relevance : std::uint8_t { Relevant, Irrelevant, NotApplicable };
enum class Position : std::uint8_t { AfterQuestion, AfterStatement };

std::string_view to_string(UserDA da);
std::string_view to_string(ChatbotDA da);
std::string_view to_string(SwdaTag tag);
std::string_view to_string(Relevance r);
std::string_view to_string(Position p);

std::optional<UserDA> parse_user_da(std::string_view s);
std::optional<ChatbotDA> parse_chatbot_da(std::string_view s);
std::optional<SwdaTag> parse_swda_tag(std::string_view s);

// Unknown tag strings resolve to the abandoned/uninterpretable tag; `known`
// (when given) reports whether the input was recognized.
SwdaTag parse_swda_tag_lenient(std::string_view s, bool* known = nullptr);

std::array<UserDA, kNumUserDAs> all_user_das();
std::array<ChatbotDA, kNumChatbotDAs> all_chatbot_das();
std::array<SwdaTag, kNumSwdaTags> all_swda_tags();

inline constexpr std::size_t index_of(UserDA d) { return static_cast<std::size_t>(d); }
inline constexpr std::size_t index_of(ChatbotDA d) { return static_cast<std::size_t>(d); }
inline constexpr std::size_t index_of(SwdaTag t) { return static_cast<std::size_t>(t); }

enum class RelevanceCondition : std::uint8_t { RequiresRelevant, RequiresIrrelevant, Any };
enum class ContextCondition : std::uint8_t { AfterInterviewQuestion, AfterChatbotStatement, Any };

struct MappingRule {
    std::optional<SwdaTag> swda_tag;  // nullopt matches every tag
    RelevanceCondition relevance = RelevanceCondition::Any;
    ContextCondition context = ContextCondition::Any;
    UserDA result = UserDA::Other;
    int priority = 0;

    bool matches(SwdaTag tag, Relevance r, Position p) const;
    bool is_catch_all() const {
        return !swda_tag && relevance == RelevanceCondition::Any && context == ContextCondition::Any;
    }
};

using ChatbotDASet = std::bitset<kNumChatbotDAs>;

class CompatibilityMatrix {
public:
    CompatibilityMatrix() = default;

    void allow(UserDA user, ChatbotDA chatbot) { rows_[index_of(user)].set(index_of(chatbot)); }
    const ChatbotDASet& row(UserDA user) const { return rows_[index_of(user)]; }
    std::vector<ChatbotDA> expected(UserDA user) const;

    bool operator==(const CompatibilityMatrix&) const = default;

private:
    std::array<ChatbotDASet, kNumUserDAs> rows_{};
};

struct Ruleset {
    std::vector<MappingRule> rules;
    CompatibilityMatrix compatibility;
};

// Highest-priority matching rule wins. The rule set must have passed
// validate_ruleset; an uncovered cell falls back to UserDA::Other.
UserDA apply_mapping(SwdaTag tag, Relevance relevance, Position context,
                     const std::vector<MappingRule>& rules);

bool is_compatible(UserDA user_da, ChatbotDA chatbot_da, const CompatibilityMatrix& matrix);

// Throws DataError naming the offending cell or matrix row.
void validate_ruleset(const Ruleset& ruleset);

Ruleset parse_ruleset_json(std::string_view text);
std::string ruleset_to_json(const Ruleset& ruleset);
Ruleset load_ruleset(const std::filesystem::path& path);

// Ruleset compiled from the bundled data/ruleset.json.
const Ruleset& default_ruleset();

} // namespace chatda
