#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

namespace coevo {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GroundTruth {
    bool is_id = false;
    std::size_t class_index = 0;  // meaningful only when is_id
};

struct EvalSummary {
    double auroc = 0;
    double fpr95 = 0;
    std::optional<double> id_acc;
    std::size_t n_id = 0;
    std::size_t n_ood = 0;
};

/// P(score_id > score_ood) with ties counted 1/2, via midranks.
double auroc(std::span<const double> scores, std::span<const GroundTruth> labels);

/// OOD acceptance rate at the largest threshold t keeping >= 95% of ID
/// scores at or above t.
double fpr95(std::span<const double> scores, std::span<const GroundTruth> labels);

/// Fraction of ID samples whose predicted class equals the true class.
/// Missing predictions count as wrong.
double id_acc(std::span<const std::optional<std::size_t>> predicted,
              std::span<const GroundTruth> labels);

EvalSummary summarize(std::span<const double> scores, std::span<const GroundTruth> labels,
                      std::span<const std::optional<std::size_t>> predicted = {});

}  // namespace coevo
