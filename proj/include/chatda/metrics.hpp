#pragma once

#include "chatda/common.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace chatda {

// Rows are gold labels, columns predictions, both in Appropriateness order.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

    std::size_t total() const;
    std::size_t support(Appropriateness gold) const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    std::array<ClassMetrics, kNumClasses> per_class{};
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    // Metric cells whose denominator was zero and were reported as 0.
    std::vector<std::string> zero_division;

    const ClassMetrics& of(Appropriateness c) const { return per_class[index_of(c)]; }
};

// Throws DataError on length mismatch or empty input.
EvalReport evaluate(std::span<const Appropriateness> gold, std::span<const Appropriateness> predicted);

struct KappaResult {
    double kappa = 0.0;
    double observed = 0.0;  // p_o
    double expected = 0.0;  // p_e
    bool degenerate = false;  // p_e == 1
    ConfusionMatrix joint;    // rows: annotator A, columns: annotator B
};

KappaResult cohen_kappa(std::span<const Appropriateness> a, std::span<const Appropriateness> b);

// Per-class rows plus accuracy, as an aligned plain-text table.
std::string render_table(const EvalReport& report, const std::string& title = "");
std::string render_confusion(const ConfusionMatrix& m, const std::string& row_label = "gold",
                             const std::string& col_label = "predicted");
std::string report_to_json(const EvalReport& report);

} // namespace chatda
