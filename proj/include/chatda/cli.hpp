#pragma once

#include "chatda/explain.hpp"
#include "chatda/forest.hpp"
#include "chatda/metrics.hpp"
#include "chatda/tagger.hpp"
#include "chatda/taxonomy.hpp"
#include "chatda/transcript.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chatda::cli {

// Environment variable naming a ruleset file used when --ruleset is absent.
inline constexpr const char* kRulesetEnv = "CHATDA_RULESET";

struct RunConfig {
    std::filesystem::path in;
    std::filesystem::path out;
    std::filesystem::path model;
    std::filesystem::path ruleset;
    std::filesystem::path lexicons;
    std::uint64_t seed = 7;
    double train_fraction = 0.8;
    double dev_fraction = 0.1;  // of the training portion
    TaggerMode tagger = TaggerMode::Heuristic;
    std::string grid = "default";  // default | none | path to a JSON grid
    ReportFormat format = ReportFormat::Markdown;
    unsigned threads = 1;
    bool strict = false;
    bool relabel = false;

    // Throws UsageError on fractions outside (0, 1).
    void validate() const;
};

// --ruleset, else $CHATDA_RULESET, else the bundled default.
Ruleset resolve_ruleset(const RunConfig& cfg);
TaggerLexicons resolve_lexicons(const RunConfig& cfg);

struct Split {
    std::vector<Dialogue> train;
    std::vector<Dialogue> dev;
    std::vector<Dialogue> test;
};

// Seeded shuffle of whole dialogues: test takes 1 - train_fraction, dev takes
// dev_fraction of the rest. Throws DataError when a split would be empty.
Split split_dialogues(const std::vector<Dialogue>& dialogues, std::uint64_t seed, double train_fraction,
                      double dev_fraction);

// Strips (when relabel) and annotates. In heuristic mode stage-1 tags are
// stripped too so that every label comes from the heuristics.
std::vector<Dialogue> annotate_corpus(const std::vector<Dialogue>& dialogues, const RunConfig& cfg,
                                      const Ruleset& ruleset, const TaggerLexicons& lex);

struct DaAgreement {
    std::size_t user_total = 0, user_agree = 0;
    std::size_t chatbot_total = 0, chatbot_agree = 0;
};

// Compares DAs present in `reference` with those in `annotated` (same dialogues, same order).
DaAgreement da_agreement(const std::vector<Dialogue>& reference, const std::vector<Dialogue>& annotated);

std::string da_frequency_table(const std::vector<Dialogue>& dialogues);

struct TrainOutcome {
    ForestModel model;
    std::optional<GridResult> grid;
    std::optional<EvalReport> dev;
    ModelSize size;
    std::vector<Dialogue> test;
};

// Split, vocabulary on train, optional grid search on dev, final fit on train+dev.
TrainOutcome train_model(const std::vector<Dialogue>& annotated, const RunConfig& cfg, std::ostream& log);

struct Scored {
    std::vector<ResponsePrediction> predictions;
    std::vector<FeatureVector> vectors;
};

Scored score(const std::vector<Dialogue>& annotated, const ForestModel& model);

EvalReport evaluate_model(const std::vector<Dialogue>& annotated, const ForestModel& model);

struct DetectOutcome {
    std::string report;
    std::size_t flagged = 0;
    std::size_t total = 0;
    std::vector<Explanation> explanations;
};

DetectOutcome detect_and_explain(const std::vector<Dialogue>& annotated, const ForestModel& model,
                                 const CompatibilityMatrix& matrix, ReportFormat format, bool with_paths = true);

// Entry point for the command-line tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace chatda::cli
