#pragma once

#include "chatda/taxonomy.hpp"
#include "chatda/text.hpp"
#include "chatda/transcript.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace chatda {

enum class TaggerMode { Heuristic, PreTagged };

struct TaggerConfig {
    TaggerMode mode = TaggerMode::Heuristic;
    double gibberish_nonalpha_threshold = 0.5;
    double gibberish_oov_threshold = 0.8;
    double relevance_threshold = 0.15;
    double repeat_similarity_threshold = 0.9;

    // Throws UsageError when a threshold is outside [0, 1].
    void validate() const;
};

// Word and phrase lists driving the heuristic rules. Entries are normalized
// (lowercase, single-spaced tokens; "didn't" becomes "didn t").
struct TaggerLexicons {
    text::Lexicon english_words;   // known-word list for the OOV gibberish check
    text::Lexicon imperative;      // utterance prefixes -> ad
    text::Lexicon thanking;        // -> ft
    text::Lexicon apology;         // -> fa
    text::Lexicon greeting;        // greetings and closings -> fc
    text::Lexicon complaint;       // -> ar
    text::Lexicon excuse;          // -> ^h
    text::Lexicon agreement;       // whole utterance -> aa
    text::Lexicon backchannel;     // whole utterance -> b
    text::Lexicon appreciation;    // whole utterance -> ba

    text::Lexicon fallback_phrases;  // -> chatbot-respond-default-fallback
    text::Lexicon acknowledgments;   // whole utterance -> chatbot-acknowledge
    // Phrase lexicons per chatbot DA, consulted in handler_order().
    std::array<text::Lexicon, kNumChatbotDAs> handlers;

    static const TaggerLexicons& bundled();

    // Files missing from `dir` fall back to the bundled lists.
    static TaggerLexicons load(const std::filesystem::path& dir);

    static std::vector<std::string> file_names();
};

// Order in which handler phrase lexicons are tried.
std::vector<ChatbotDA> handler_order();

struct GibberishCheck {
    double nonalpha_fraction = 0.0;
    double oov_fraction = 0.0;
    bool is_gibberish = false;
};

GibberishCheck check_gibberish(std::string_view utterance_text, const TaggerConfig& config,
                               const TaggerLexicons& lex);

// Stage 1. PreTagged mode returns the carried tag; Heuristic mode applies
// ordered surface rules. Throws DataError when a pre-tagged utterance lacks a tag.
SwdaTag tag_stage1(const Utterance& utterance, const Dialogue& dialogue, const TaggerConfig& config,
                   const TaggerLexicons& lex = TaggerLexicons::bundled());

// Position of a user turn: after a chatbot question or after anything else.
Position user_position(const Dialogue& dialogue, std::size_t turn_index);

struct RelevanceResult {
    double score = 0.0;
    Relevance relevance = Relevance::NotApplicable;
};

// Cosine between the utterance's content-word counts and the topic vector
// built from the question text, the registered topic's seed keywords, the
// shared interview keywords, and earlier relevant user answers in `dialogue`
// before `turn_index`.
RelevanceResult score_relevance(std::string_view utterance_text, const TopicRef& topic, const Dialogue& dialogue,
                                std::size_t turn_index, const TaggerConfig& config);

text::TermCounts topic_vector(const TopicRef& topic);

// Fills user_da (and swda_tag when absent) on user utterances that lack a
// user_da. Existing labels are never overwritten, so the call is idempotent.
Dialogue annotate_user_das(const Dialogue& dialogue, const std::vector<MappingRule>& rules,
                           const TaggerConfig& config, const TaggerLexicons& lex = TaggerLexicons::bundled());

// Fills chatbot_da on chatbot utterances that lack one. Run after user annotation.
Dialogue annotate_chatbot_das(const Dialogue& dialogue, const TaggerConfig& config,
                              const TaggerLexicons& lex = TaggerLexicons::bundled());

Dialogue annotate(const Dialogue& dialogue, const Ruleset& ruleset, const TaggerConfig& config,
                  const TaggerLexicons& lex = TaggerLexicons::bundled());

// Annotates dialogues on up to `threads` workers; output order and content
// match sequential annotation.
std::vector<Dialogue> annotate_all(const std::vector<Dialogue>& dialogues, const Ruleset& ruleset,
                                   const TaggerConfig& config, const TaggerLexicons& lex, unsigned threads = 1);

// Removes user/chatbot DAs (and optionally stage-1 tags) for re-annotation.
Dialogue strip_das(const Dialogue& dialogue, bool keep_swda_tags);

bool is_fully_annotated(const Dialogue& dialogue);

} // namespace chatda
