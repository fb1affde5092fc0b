#include "chatda/forest.hpp"

#include "chatda/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace chatda {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kGainTieEps = 1e-12;
constexpr std::size_t kHistogramValues = 64;

double gini_of(const ClassCounts& c, std::uint32_t n) {
    if (n == 0) return 0.0;
    double s = 0.0;
    for (auto v : c) {
        const double p = static_cast<double>(v) / static_cast<double>(n);
        s += p * p;
    }
    return 1.0 - s;
}

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

bool better(const Split& cand, const Split& best) {
    if (!best.found) return true;
    if (cand.gain > best.gain + kGainTieEps) return true;
    if (cand.gain < best.gain - kGainTieEps) return false;
    if (cand.feature != best.feature) return cand.feature < best.feature;
    return cand.threshold < best.threshold;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, const Hyperparams& hp, std::uint64_t seed)
        : data_(data), hp_(hp), rng_(seed), per_node_(hp.features_for(data.n_features())) {
        perm_.resize(data.n_features());
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    }

    DecisionTree build(std::vector<std::size_t> samples) {
        samples_ = std::move(samples);
        grow(0, samples_.size(), 0);
        return DecisionTree(std::move(nodes_));
    }

private:
    std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        const std::uint32_t n = static_cast<std::uint32_t>(end - begin);

        ClassCounts counts{};
        for (std::size_t i = begin; i < end; ++i) ++counts[index_of(data_.label(samples_[i]))];
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;

        Split best;
        if (!pure && depth < hp_.max_depth && n >= hp_.min_samples_split && n >= 2 * hp_.min_samples_leaf) {
            best = find_split(begin, end, counts, gini_of(counts, n));
        }
        if (!best.found) {
            nodes_[static_cast<std::size_t>(id)].counts = counts;
            return id;
        }

        auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                  samples_.begin() + static_cast<std::ptrdiff_t>(end),
                                  [&](std::size_t s) { return data_.value(best.feature, s) <= best.threshold; });
        const std::size_t split_at = static_cast<std::size_t>(mid - samples_.begin());
        const auto left = grow(begin, split_at, depth + 1);
        const auto right = grow(split_at, end, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = static_cast<std::int32_t>(best.feature);
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    // Visits features in random order until `per_node_` non-constant ones
    // have been evaluated (or all features are exhausted).
    Split find_split(std::size_t begin, std::size_t end, const ClassCounts& parent, double parent_gini) {
        Split best;
        std::size_t evaluated = 0;
        const std::size_t d = perm_.size();
        for (std::size_t i = 0; i < d && evaluated < per_node_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(d - i));
            std::swap(perm_[i], perm_[j]);
            const std::size_t f = perm_[i];
            if (evaluate_feature(f, begin, end, parent, parent_gini, best)) ++evaluated;
        }
        return best;
    }

    void consider(std::size_t f, double threshold, const ClassCounts& left, std::uint32_t nl, const ClassCounts& parent,
                  std::uint32_t n, double parent_gini, Split& best) const {
        const std::uint32_t nr = n - nl;
        if (nl < hp_.min_samples_leaf || nr < hp_.min_samples_leaf) return;
        ClassCounts right{};
        for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = parent[c] - left[c];
        const double gain = parent_gini - (static_cast<double>(nl) / n) * gini_of(left, nl) -
                            (static_cast<double>(nr) / n) * gini_of(right, nr);
        Split cand{true, f, threshold, gain};
        if (better(cand, best)) best = cand;
    }

    // Returns false when the feature is constant over the node.
    bool evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, const ClassCounts& parent,
                          double parent_gini, Split& best) {
        const auto col = data_.column(f);
        const auto n = static_cast<std::uint32_t>(end - begin);
        double lo = col[samples_[begin]], hi = lo;
        bool small_ints = true;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = col[samples_[i]];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            small_ints = small_ints && v >= 0.0 && v < static_cast<double>(kHistogramValues) && v == std::floor(v);
        }
        if (lo == hi) return false;

        if (small_ints) {
            std::array<ClassCounts, kHistogramValues> hist{};
            for (std::size_t i = begin; i < end; ++i) {
                const auto s = samples_[i];
                ++hist[static_cast<std::size_t>(col[s])][index_of(data_.label(s))];
            }
            ClassCounts left{};
            std::uint32_t nl = 0;
            const auto top = static_cast<std::size_t>(hi);
            std::size_t prev = static_cast<std::size_t>(lo);
            for (std::size_t v = prev; v < top;) {
                for (std::size_t c = 0; c < kNumClasses; ++c) {
                    left[c] += hist[v][c];
                    nl += hist[v][c];
                }
                std::size_t next = v + 1;
                while (next <= top && hist[next][0] + hist[next][1] + hist[next][2] == 0) ++next;
                consider(f, (static_cast<double>(v) + static_cast<double>(next)) / 2.0, left, nl, parent, n,
                         parent_gini, best);
                v = next;
            }
            return true;
        }

        pairs_.clear();
        for (std::size_t i = begin; i < end; ++i) {
            const auto s = samples_[i];
            pairs_.emplace_back(col[s], static_cast<std::uint8_t>(index_of(data_.label(s))));
        }
        std::sort(pairs_.begin(), pairs_.end());
        ClassCounts left{};
        std::uint32_t nl = 0;
        for (std::size_t i = 0; i + 1 < pairs_.size(); ++i) {
            ++left[pairs_[i].second];
            ++nl;
            if (pairs_[i].first == pairs_[i + 1].first) continue;
            consider(f, pairs_[i].first + (pairs_[i + 1].first - pairs_[i].first) / 2.0, left, nl, parent, n,
                     parent_gini, best);
        }
        return true;
    }

    const TrainingSet& data_;
    const Hyperparams& hp_;
    SplitMix64 rng_;
    std::size_t per_node_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> samples_;
    std::vector<DecisionTree::Node> nodes_;
    std::vector<std::pair<double, std::uint8_t>> pairs_;
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

Appropriateness plurality(const ClassCounts& votes) { return majority(votes); }

ordered_json node_to_json(const DecisionTree& tree, std::size_t id) {
    const auto& n = tree.nodes()[id];
    ordered_json j;
    if (n.is_leaf()) {
        j["counts"] = n.counts;
        return j;
    }
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(tree, static_cast<std::size_t>(n.left));
    j["right"] = node_to_json(tree, static_cast<std::size_t>(n.right));
    return j;
}

std::int32_t node_from_json(const json& j, std::vector<DecisionTree::Node>& out, std::size_t dimension,
                            std::size_t depth) {
    if (depth > 10000) throw DataError("model: tree too deep");
    const auto id = static_cast<std::int32_t>(out.size());
    out.emplace_back();
    if (j.contains("counts")) {
        ClassCounts c{};
        const auto& jc = j.at("counts");
        if (!jc.is_array() || jc.size() != kNumClasses) throw DataError("model: leaf counts must have 3 entries");
        for (std::size_t k = 0; k < kNumClasses; ++k) c[k] = jc[k].get<std::uint32_t>();
        out[static_cast<std::size_t>(id)].counts = c;
        return id;
    }
    const auto feature = j.at("feature").get<std::int64_t>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= dimension) {
        throw DataError("model: split feature " + std::to_string(feature) + " outside the schema");
    }
    const double threshold = j.at("threshold").get<double>();
    const auto left = node_from_json(j.at("left"), out, dimension, depth + 1);
    const auto right = node_from_json(j.at("right"), out, dimension, depth + 1);
    auto& n = out[static_cast<std::size_t>(id)];
    n.feature = static_cast<std::int32_t>(feature);
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    return id;
}

ordered_json hyperparams_to_json(const Hyperparams& hp) {
    ordered_json j;
    j["n_trees"] = hp.n_trees;
    j["max_depth"] = hp.max_depth;
    j["min_samples_leaf"] = hp.min_samples_leaf;
    j["min_samples_split"] = hp.min_samples_split;
    j["features_per_split"] = to_string(hp.features_per_split);
    j["seed"] = hp.seed;
    return j;
}

Hyperparams hyperparams_from_json(const json& j, std::uint64_t default_seed) {
    Hyperparams hp;
    hp.seed = default_seed;
    auto positive = [&](const char* key, std::size_t& field) {
        if (!j.contains(key)) return;
        const auto v = j.at(key).get<std::int64_t>();
        if (v <= 0) throw UsageError(std::string("hyperparams: ") + key + " must be positive");
        field = static_cast<std::size_t>(v);
    };
    positive("n_trees", hp.n_trees);
    positive("max_depth", hp.max_depth);
    positive("min_samples_leaf", hp.min_samples_leaf);
    positive("min_samples_split", hp.min_samples_split);
    if (j.contains("features_per_split")) {
        const auto s = j.at("features_per_split").get<std::string>();
        auto f = parse_features_per_split(s);
        if (!f) throw UsageError("hyperparams: unknown features_per_split '" + s + "'");
        hp.features_per_split = *f;
    }
    if (j.contains("seed")) hp.seed = j.at("seed").get<std::uint64_t>();
    return hp;
}

} // namespace

std::string_view to_string(FeaturesPerSplit f) {
    switch (f) {
        case FeaturesPerSplit::Sqrt: return "sqrt";
        case FeaturesPerSplit::Log2: return "log2";
        case FeaturesPerSplit::All: return "all";
    }
    return "sqrt";
}

std::optional<FeaturesPerSplit> parse_features_per_split(std::string_view s) {
    if (s == "sqrt") return FeaturesPerSplit::Sqrt;
    if (s == "log2") return FeaturesPerSplit::Log2;
    if (s == "all") return FeaturesPerSplit::All;
    return std::nullopt;
}

void Hyperparams::validate() const {
    if (n_trees == 0) throw UsageError("hyperparams: n_trees must be positive");
    if (max_depth == 0) throw UsageError("hyperparams: max_depth must be positive");
    if (min_samples_leaf == 0) throw UsageError("hyperparams: min_samples_leaf must be positive");
    if (min_samples_split == 0) throw UsageError("hyperparams: min_samples_split must be positive");
}

std::size_t Hyperparams::features_for(std::size_t n_features) const {
    if (n_features == 0) return 0;
    std::size_t k = n_features;
    switch (features_per_split) {
        case FeaturesPerSplit::Sqrt: k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))); break;
        case FeaturesPerSplit::Log2: k = static_cast<std::size_t>(std::log2(static_cast<double>(n_features))); break;
        case FeaturesPerSplit::All: break;
    }
    return std::clamp<std::size_t>(k, 1, n_features);
}

std::string Hyperparams::describe() const {
    std::ostringstream os;
    os << "n_trees=" << n_trees << " max_depth=" << max_depth << " min_samples_leaf=" << min_samples_leaf
       << " min_samples_split=" << min_samples_split << " features_per_split=" << to_string(features_per_split)
       << " seed=" << seed;
    return os.str();
}

double gini(std::span<const std::uint32_t> class_counts) {
    std::uint64_t n = 0;
    for (auto c : class_counts) n += c;
    if (n == 0) throw DataError("gini: all class counts are zero");
    double s = 0.0;
    for (auto c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        s += p * p;
    }
    return 1.0 - s;
}

TrainingSet::TrainingSet(std::size_t n_features, std::vector<double> columns, std::vector<Appropriateness> labels)
    : n_features_(n_features), columns_(std::move(columns)), labels_(std::move(labels)) {
    if (columns_.size() != n_features_ * labels_.size()) throw Error("training set: column storage size mismatch");
}

TrainingSet TrainingSet::from(const std::vector<FeatureVector>& data, std::size_t dimension) {
    const std::size_t n = data.size();
    std::vector<double> cols(dimension * n, 0.0);
    std::vector<Appropriateness> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fv = data[i];
        if (!fv.label) {
            throw DataError("training set: response " + fv.provenance.dialogue_id + "#" +
                            std::to_string(fv.provenance.turn_index) + " has no gold label");
        }
        labels.push_back(*fv.label);
        for (const auto& [f, v] : fv.values) {
            if (f >= dimension) throw DataError("training set: feature index outside the schema");
            cols[f * n + i] = v;
        }
    }
    return TrainingSet(dimension, std::move(cols), std::move(labels));
}

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const auto& n = nodes_[id];
        if (!n.is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
        }
    }
    return best;
}

std::size_t DecisionTree::internal_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf(); }));
}

Appropriateness majority(const ClassCounts& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<Appropriateness>(best);
}

std::uint32_t Prediction::margin() const {
    auto sorted = votes;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return sorted[0] - sorted[1];
}

DecisionTree train_tree(const TrainingSet& data, std::span<const std::size_t> sample_indices, const Hyperparams& hp,
                        std::uint64_t seed) {
    hp.validate();
    if (sample_indices.empty()) throw DataError("train_tree: empty dataset");
    for (auto s : sample_indices) {
        if (s >= data.size()) throw Error("train_tree: sample index out of range");
    }
    TreeBuilder builder(data, hp, seed);
    return builder.build(std::vector<std::size_t>(sample_indices.begin(), sample_indices.end()));
}

DecisionTree train_tree(const TrainingSet& data, const Hyperparams& hp, std::uint64_t seed) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return train_tree(data, all, hp, seed);
}

std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_ordinal) {
    return derive_seed(master_seed, tree_ordinal);
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed ^ 0xB0075724A9ULL);
    std::vector<std::size_t> out(n);
    for (auto& s : out) s = static_cast<std::size_t>(rng.below(n));
    return out;
}

ForestModel train_forest(const TrainingSet& data, const Hyperparams& hp, const Vocabulary& vocab,
                         const std::string& schema_fingerprint, unsigned threads) {
    hp.validate();
    if (data.size() == 0) throw DataError("train_forest: empty dataset");
    ForestModel model;
    model.hyperparams = hp;
    model.vocabulary = vocab;
    model.schema_fingerprint = schema_fingerprint;
    model.trees.resize(hp.n_trees);
    parallel_for(hp.n_trees, threads, [&](std::size_t t) {
        const auto seed = tree_seed(hp.seed, t);
        const auto sample = bootstrap_indices(data.size(), seed);
        model.trees[t] = train_tree(data, sample, hp, seed);
    });
    return model;
}

Prediction predict_dense(const ForestModel& model, std::span<const double> values) {
    Prediction p;
    for (const auto& tree : model.trees) {
        const auto& leaf = tree.leaf_for([&](std::size_t f) { return f < values.size() ? values[f] : 0.0; });
        ++p.votes[index_of(majority(leaf.counts))];
    }
    p.label = plurality(p.votes);
    return p;
}

Prediction predict(const ForestModel& model, const FeatureVector& vector) {
    if (vector.schema_fingerprint != model.schema_fingerprint) {
        throw DataError("schema fingerprint mismatch: model " + model.schema_fingerprint + ", features " +
                        vector.schema_fingerprint);
    }
    Prediction p;
    for (const auto& tree : model.trees) {
        const auto& leaf = tree.leaf_for([&](std::size_t f) { return vector.at(f); });
        ++p.votes[index_of(majority(leaf.counts))];
    }
    p.label = plurality(p.votes);
    return p;
}

DecisionPath decision_path(const DecisionTree& tree, const FeatureVector& vector) {
    DecisionPath path;
    const auto& nodes = tree.nodes();
    const DecisionTree::Node* n = &nodes.front();
    while (!n->is_leaf()) {
        PathStep step;
        step.feature = static_cast<std::size_t>(n->feature);
        step.threshold = n->threshold;
        step.value = vector.at(step.feature);
        step.went_left = step.value <= n->threshold;
        path.steps.push_back(step);
        n = &nodes[static_cast<std::size_t>(step.went_left ? n->left : n->right)];
    }
    path.leaf_counts = n->counts;
    return path;
}

GridResult grid_search(const TrainingSet& train, const TrainingSet& dev, const std::vector<Hyperparams>& grid,
                       const Vocabulary& vocab, const std::string& schema_fingerprint, unsigned threads) {
    if (grid.empty()) throw UsageError("grid_search: empty grid");
    if (train.size() == 0 || dev.size() == 0) throw DataError("grid_search: empty train or dev split");
    for (const auto& hp : grid) hp.validate();

    // Configurations that differ only in n_trees share a tree sequence (per-tree
    // seeds depend only on the master seed and ordinal), so each group is
    // trained once at its largest size and smaller sizes are evaluated on prefixes.
    auto group_key = [](Hyperparams hp) {
        hp.n_trees = 0;
        return hp;
    };
    std::vector<Hyperparams> groups;
    std::vector<std::size_t> group_of(grid.size());
    std::vector<std::size_t> group_trees;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto key = group_key(grid[i]);
        auto it = std::find(groups.begin(), groups.end(), key);
        if (it == groups.end()) {
            groups.push_back(key);
            group_trees.push_back(0);
            it = groups.end() - 1;
        }
        const auto g = static_cast<std::size_t>(it - groups.begin());
        group_of[i] = g;
        group_trees[g] = std::max(group_trees[g], grid[i].n_trees);
    }

    GridResult result;
    result.report.resize(grid.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Hyperparams hp = groups[g];
        hp.n_trees = group_trees[g];
        const auto model = train_forest(train, hp, vocab, schema_fingerprint, threads);

        // votes_by_prefix[s] accumulates per-tree votes for dev sample s.
        std::vector<Appropriateness> tree_vote(dev.size() * model.trees.size());
        parallel_for(model.trees.size(), threads, [&](std::size_t t) {
            for (std::size_t s = 0; s < dev.size(); ++s) {
                const auto& leaf = model.trees[t].leaf_for([&](std::size_t f) { return dev.value(f, s); });
                tree_vote[t * dev.size() + s] = majority(leaf.counts);
            }
        });
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (group_of[i] != g) continue;
            std::vector<Appropriateness> predicted(dev.size());
            for (std::size_t s = 0; s < dev.size(); ++s) {
                ClassCounts votes{};
                for (std::size_t t = 0; t < grid[i].n_trees; ++t) ++votes[index_of(tree_vote[t * dev.size() + s])];
                predicted[s] = plurality(votes);
            }
            result.report[i] = {grid[i], evaluate(dev.labels(), predicted)};
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto& a = result.report[i];
        const auto& b = result.report[best];
        if (a.dev.weighted_f1 > b.dev.weighted_f1) {
            best = i;
        } else if (a.dev.weighted_f1 == b.dev.weighted_f1) {
            if (a.hyperparams.n_trees < b.hyperparams.n_trees ||
                (a.hyperparams.n_trees == b.hyperparams.n_trees && a.hyperparams.max_depth < b.hyperparams.max_depth)) {
                best = i;
            }
        }
    }
    result.best = grid[best];
    return result;
}

std::vector<Hyperparams> default_grid(std::uint64_t seed) {
    std::vector<Hyperparams> grid;
    for (std::size_t trees : {100, 300, 500}) {
        for (std::size_t depth : {15, 30, 45}) {
            for (std::size_t leaf : {1, 5}) {
                for (auto fps : {FeaturesPerSplit::Sqrt, FeaturesPerSplit::Log2}) {
                    Hyperparams hp;
                    hp.n_trees = trees;
                    hp.max_depth = depth;
                    hp.min_samples_leaf = leaf;
                    hp.features_per_split = fps;
                    hp.seed = seed;
                    grid.push_back(hp);
                }
            }
        }
    }
    return grid;
}

std::vector<Hyperparams> parse_grid_json(std::string_view text, std::uint64_t default_seed) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("grid: invalid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("grid")) doc = doc.at("grid");
    if (!doc.is_array()) throw UsageError("grid: expected an array of hyperparameter objects");
    std::vector<Hyperparams> grid;
    try {
        for (const auto& j : doc) grid.push_back(hyperparams_from_json(j, default_seed));
    } catch (const json::exception& e) {
        throw UsageError(std::string("grid: ") + e.what());
    }
    if (grid.empty()) throw UsageError("grid: empty grid");
    return grid;
}

std::string model_to_json(const ForestModel& model) {
    ordered_json j;
    j["format_version"] = model.format_version;
    j["classes"] = {"inappropriate", "neutral", "appropriate"};
    j["hyperparams"] = hyperparams_to_json(model.hyperparams);
    j["schema_fingerprint"] = model.schema_fingerprint;
    j["vocabulary"] = model.vocabulary.tokens();
    auto trees = ordered_json::array();
    for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
    j["trees"] = std::move(trees);
    return j.dump() + "\n";
}

ForestModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model: corrupt file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("format_version")) throw DataError("model: corrupt file: no format_version");
    try {
        ForestModel m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kModelFormatVersion) {
            throw DataError("model: unsupported format_version " + std::to_string(m.format_version) +
                            " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
        }
        const auto classes = j.at("classes").get<std::vector<std::string>>();
        if (classes != std::vector<std::string>{"inappropriate", "neutral", "appropriate"}) {
            throw DataError("model: unexpected class order");
        }
        m.hyperparams = hyperparams_from_json(j.at("hyperparams"), 0);
        m.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
        m.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
        const std::size_t dimension = FeatureSchema::kFixedDims + m.vocabulary.size();
        if (FeatureSchema(m.vocabulary).fingerprint() != m.schema_fingerprint) {
            throw DataError("model: schema fingerprint does not match the stored vocabulary");
        }
        for (const auto& jt : j.at("trees")) {
            std::vector<DecisionTree::Node> nodes;
            node_from_json(jt, nodes, dimension, 0);
            m.trees.emplace_back(std::move(nodes));
        }
        if (m.trees.size() != m.hyperparams.n_trees) {
            throw DataError("model: tree count " + std::to_string(m.trees.size()) + " differs from n_trees " +
                            std::to_string(m.hyperparams.n_trees));
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("model: corrupt file: ") + e.what());
    } catch (const UsageError& e) {
        throw DataError(std::string("model: corrupt file: ") + e.what());
    }
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write model file " + path.string());
    os << model_to_json(model);
    if (!os) throw DataError("write failed: " + path.string());
}

ForestModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return model_from_json(ss.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

ModelSize model_size(const ForestModel& model) {
    ModelSize s;
    s.trees = model.trees.size();
    for (const auto& t : model.trees) {
        s.nodes += t.nodes().size();
        s.internal_nodes += t.internal_count();
        s.max_depth = std::max(s.max_depth, t.depth());
    }
    s.leaves = s.nodes - s.internal_nodes;
    s.parameters = 2 * s.internal_nodes + kNumClasses * s.leaves;
    s.serialized_bytes = model_to_json(model).size();
    return s;
}

} // namespace chatda
