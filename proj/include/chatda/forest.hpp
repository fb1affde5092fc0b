#pragma once

#include "chatda/common.hpp"
#include "chatda/features.hpp"
#include "chatda/metrics.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace chatda {

enum class FeaturesPerSplit { Sqrt, Log2, All };

std::string_view to_string(FeaturesPerSplit f);
std::optional<FeaturesPerSplit> parse_features_per_split(std::string_view s);

struct Hyperparams {
    std::size_t n_trees = 500;
    std::size_t max_depth = 45;
    std::size_t min_samples_leaf = 1;
    std::size_t min_samples_split = 2;
    FeaturesPerSplit features_per_split = FeaturesPerSplit::Sqrt;
    std::uint64_t seed = 0;

    // Throws UsageError on non-positive counts.
    void validate() const;
    std::size_t features_for(std::size_t n_features) const;
    std::string describe() const;

    bool operator==(const Hyperparams&) const = default;
};

using ClassCounts = std::array<std::uint32_t, kNumClasses>;

// 1 - sum p_i^2. Throws DataError when every count is zero.
double gini(std::span<const std::uint32_t> class_counts);

// Labeled design matrix in feature-major layout.
class TrainingSet {
public:
    TrainingSet(std::size_t n_features, std::vector<double> columns, std::vector<Appropriateness> labels);

    // Throws DataError when any vector is unlabeled.
    static TrainingSet from(const std::vector<FeatureVector>& data, std::size_t dimension);

    std::size_t size() const { return labels_.size(); }
    std::size_t n_features() const { return n_features_; }
    double value(std::size_t feature, std::size_t sample) const { return columns_[feature * size() + sample]; }
    std::span<const double> column(std::size_t feature) const { return {columns_.data() + feature * size(), size()}; }
    Appropriateness label(std::size_t sample) const { return labels_[sample]; }
    const std::vector<Appropriateness>& labels() const { return labels_; }

private:
    std::size_t n_features_;
    std::vector<double> columns_;
    std::vector<Appropriateness> labels_;
};

// Flat binary tree; node 0 is the root. Internal nodes route value <= threshold left.
class DecisionTree {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 for leaves
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        ClassCounts counts{};       // training samples reaching a leaf

        bool is_leaf() const { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& root() const { return nodes_.front(); }

    template <typename ValueAt>
    const Node& leaf_for(ValueAt&& value_at) const {
        const Node* n = &nodes_.front();
        while (!n->is_leaf()) {
            n = &nodes_[static_cast<std::size_t>(value_at(static_cast<std::size_t>(n->feature)) <= n->threshold ? n->left : n->right)];
        }
        return *n;
    }

    std::size_t depth() const;
    std::size_t internal_count() const;
    std::size_t leaf_count() const { return nodes_.size() - internal_count(); }

    bool operator==(const DecisionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

// Majority class of a count vector; ties go to the lower class index.
Appropriateness majority(const ClassCounts& counts);

// Greedy CART tree over the samples listed in `sample_indices` (duplicates
// allowed, as produced by bootstrapping). Deterministic given `tree_seed`.
DecisionTree train_tree(const TrainingSet& data, std::span<const std::size_t> sample_indices, const Hyperparams& hp,
                        std::uint64_t tree_seed);
DecisionTree train_tree(const TrainingSet& data, const Hyperparams& hp, std::uint64_t tree_seed);

// Bootstrap resample of size n drawn with replacement from [0, n).
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t tree_seed);

std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_ordinal);

inline constexpr int kModelFormatVersion = 1;

struct ForestModel {
    std::vector<DecisionTree> trees;
    Hyperparams hyperparams;
    Vocabulary vocabulary;
    std::string schema_fingerprint;
    int format_version = kModelFormatVersion;
};

struct Prediction {
    Appropriateness label = Appropriateness::Neutral;
    ClassCounts votes{};

    std::uint32_t margin() const;
};

// Trees are trained on up to `threads` workers; the result does not depend on the count.
ForestModel train_forest(const TrainingSet& data, const Hyperparams& hp, const Vocabulary& vocab,
                         const std::string& schema_fingerprint, unsigned threads = 1);

// Throws DataError when the vector's schema fingerprint differs from the model's.
Prediction predict(const ForestModel& model, const FeatureVector& vector);
Prediction predict_dense(const ForestModel& model, std::span<const double> values);

struct PathStep {
    std::size_t feature = 0;
    double threshold = 0.0;
    double value = 0.0;
    bool went_left = true;
};

struct DecisionPath {
    std::vector<PathStep> steps;
    ClassCounts leaf_counts{};
};

DecisionPath decision_path(const DecisionTree& tree, const FeatureVector& vector);

struct GridEntry {
    Hyperparams hyperparams;
    EvalReport dev;
};

struct GridResult {
    Hyperparams best;
    std::vector<GridEntry> report;
};

// Picks the configuration with the highest support-weighted dev F1; ties go
// to fewer trees, then smaller max_depth, then earlier grid position.
GridResult grid_search(const TrainingSet& train, const TrainingSet& dev, const std::vector<Hyperparams>& grid,
                       const Vocabulary& vocab, const std::string& schema_fingerprint, unsigned threads = 1);

// n_trees {100,300,500} x max_depth {15,30,45} x min_samples_leaf {1,5} x {Sqrt,Log2}.
std::vector<Hyperparams> default_grid(std::uint64_t seed);

std::vector<Hyperparams> parse_grid_json(std::string_view text, std::uint64_t default_seed);

std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(std::string_view text);
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

struct ModelSize {
    std::size_t trees = 0;
    std::size_t nodes = 0;
    std::size_t internal_nodes = 0;
    std::size_t leaves = 0;
    std::size_t max_depth = 0;
    // feature + threshold per internal node, one count per class per leaf.
    std::size_t parameters = 0;
    std::size_t serialized_bytes = 0;
};

ModelSize model_size(const ForestModel& model);

} // namespace chatda
