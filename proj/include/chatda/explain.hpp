#pragma once

#include "chatda/features.hpp"
#include "chatda/forest.hpp"
#include "chatda/taxonomy.hpp"
#include "chatda/transcript.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chatda {

struct ContextLine {
    std::size_t turn_index = 0;
    Speaker speaker = Speaker::User;
    std::string text;
    std::string da;  // user or chatbot DA name
    bool is_target = false;
};

struct Explanation {
    std::string dialogue_id;
    std::size_t turn_index = 0;
    Appropriateness predicted = Appropriateness::Inappropriate;
    ClassCounts votes{};
    std::uint32_t margin = 0;
    ChatbotDA target_da = ChatbotDA::Other;
    std::optional<UserDA> user_da;  // most recent prior user turn
    bool compatible = true;
    std::vector<ChatbotDA> expected_das;
    std::vector<ContextLine> context;
    std::string narrative;
    // Optional appendix: the path of one tree that voted for the predicted label.
    std::vector<std::string> decision_path;

    // "user-x / chatbot-y", or "(no user turn) / chatbot-y".
    std::string pair_name() const;
};

// Throws DataError when the target is not a chatbot turn or the relevant DAs are missing.
Explanation explain_response(const Dialogue& dialogue, std::size_t target_index, const Prediction& prediction,
                             const CompatibilityMatrix& matrix, std::size_t window = 2);

// Fills the decision-path appendix from the first tree whose vote matches the prediction.
void attach_decision_path(Explanation& e, const ForestModel& model, const FeatureVector& vector,
                          const FeatureSchema& schema);

struct ResponsePrediction {
    std::string dialogue_id;
    std::size_t turn_index = 0;
    Prediction prediction;
    std::optional<Appropriateness> gold;
};

enum class ReportFormat { Markdown, Json };

struct ReportGroup {
    std::optional<UserDA> user_da;
    ChatbotDA chatbot_da = ChatbotDA::Other;
    std::vector<const Explanation*> members;
};

// Flagged explanations grouped by exchange pair, largest group first, then by pair name.
std::vector<ReportGroup> group_explanations(const std::vector<Explanation>& explanations);

// Throws DataError if predictions do not cover every chatbot response or a
// flagged response lacks exactly one explanation.
std::string build_report(const std::vector<Dialogue>& dialogues, const std::vector<ResponsePrediction>& predictions,
                         const std::vector<Explanation>& explanations, ReportFormat format,
                         std::size_t examples_per_group = 5);

} // namespace chatda
