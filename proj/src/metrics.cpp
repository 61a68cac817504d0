#include "coevo/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace coevo {

namespace {

void check_inputs(std::span<const double> scores, std::span<const GroundTruth> labels,
                  std::size_t& n_id, std::size_t& n_ood) {
    if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
    n_id = static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](const GroundTruth& g) { return g.is_id; }));
    n_ood = labels.size() - n_id;
    if (n_id == 0 || n_ood == 0) throw MetricError("need at least one ID and one OOD sample");
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const GroundTruth> labels) {
    std::size_t n_id = 0, n_ood = 0;
    check_inputs(scores, labels, n_id, n_ood);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // twice the midrank keeps everything integral
    double rank_sum_x2 = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank_x2 = static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]].is_id) rank_sum_x2 += midrank_x2;
        }
        i = j;
    }
    const double nid = static_cast<double>(n_id);
    const double u = rank_sum_x2 / 2.0 - nid * (nid + 1.0) / 2.0;
    return u / (nid * static_cast<double>(n_ood));
}

double fpr95(std::span<const double> scores, std::span<const GroundTruth> labels) {
    std::size_t n_id = 0, n_ood = 0;
    check_inputs(scores, labels, n_id, n_ood);

    std::vector<double> id_scores;
    id_scores.reserve(n_id);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i].is_id) id_scores.push_back(scores[i]);
    }
    std::sort(id_scores.begin(), id_scores.end(), std::greater<>());
    // smallest count k with k / n_id >= 0.95
    const std::size_t k = (95 * n_id + 99) / 100;
    const double t = id_scores[k - 1];

    std::size_t accepted = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i].is_id && scores[i] >= t) ++accepted;
    }
    return static_cast<double>(accepted) / static_cast<double>(n_ood);
}

double id_acc(std::span<const std::optional<std::size_t>> predicted,
              std::span<const GroundTruth> labels) {
    if (predicted.size() != labels.size()) throw MetricError("predictions and labels differ in length");
    std::size_t n_id = 0, hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i].is_id) continue;
        ++n_id;
        if (predicted[i] && *predicted[i] == labels[i].class_index) ++hits;
    }
    if (n_id == 0) throw MetricError("id_acc: no ID samples");
    return static_cast<double>(hits) / static_cast<double>(n_id);
}

EvalSummary summarize(std::span<const double> scores, std::span<const GroundTruth> labels,
                      std::span<const std::optional<std::size_t>> predicted) {
    EvalSummary s;
    check_inputs(scores, labels, s.n_id, s.n_ood);
    s.auroc = auroc(scores, labels);
    s.fpr95 = fpr95(scores, labels);
    if (!predicted.empty()) s.id_acc = id_acc(predicted, labels);
    return s;
}

}  // namespace coevo
