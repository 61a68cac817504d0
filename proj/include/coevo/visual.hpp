#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "coevo/numeric.hpp"
#include "coevo/textual.hpp"

namespace coevo {

/// Entropy carried by text-seeded slots. Compares above every finite
/// entropy, so the seed is the first slot displaced once a queue is full.
inline constexpr double kSeedEntropy = std::numeric_limits<double>::infinity();

struct VisualSlot {
    Embedding embedding;
    double entropy = kSeedEntropy;
    std::uint64_t seq = 0;

    bool is_seed() const noexcept { return entropy == kSeedEntropy; }
    bool operator==(const VisualSlot&) const = default;
};

enum class InsertOutcome { Appended, Replaced, Rejected };

struct InsertResult {
    InsertOutcome outcome;
    std::size_t slot = 0;  // valid for Appended and Replaced
};

/// Bounded per-proxy exemplar queue (capacity L).
class VisualQueue {
public:
    VisualQueue(std::size_t capacity, Embedding seed, std::uint64_t seq);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t populated() const noexcept { return slots_.size(); }
    bool full() const noexcept { return slots_.size() == capacity_; }
    const std::vector<VisualSlot>& slots() const noexcept { return slots_; }

    /// Appends while there is room; otherwise replaces the highest-entropy
    /// slot (oldest seq on ties) when h is strictly lower.
    InsertResult insert(const Embedding& f_v, double h, std::uint64_t seq);

    bool operator==(const VisualQueue&) const = default;

private:
    std::size_t capacity_;
    std::vector<VisualSlot> slots_;
};

struct VisualCache {
    std::vector<VisualQueue> positive;
    std::vector<VisualQueue> negative;
    std::size_t capacity = 0;
    std::uint64_t next_seq = 0;

    bool operator==(const VisualCache&) const = default;
};

VisualCache init_visual(const PositiveTextQueue& t_p, const NegativeTextQueue& t_n,
                        std::size_t capacity);

/// Attention-weighted combination of the populated slots. Not renormalized.
std::vector<double> aggregate(const Embedding& f_v, const VisualQueue& q, double beta);

/// Cosines from f_v to the aggregate of each queue.
std::vector<double> proxy_cosines(const Embedding& f_v, std::span<const VisualQueue> queues,
                                  double beta);

double visual_score(const Embedding& f_v, const VisualCache& cache, double tau, double beta);

struct Assignment {
    std::vector<double> probs;
    std::size_t index = 0;
};

/// Softmax over cosines to the aggregated proxies; index = argmax cosine.
Assignment assign(const Embedding& f_v, std::span<const std::vector<double>> aggregates);
/// Same assignment from precomputed cosines.
Assignment assign_from_cosines(std::span<const double> cosines);

InsertResult insert_with_entropy(VisualQueue& q, const Embedding& f_v, double h,
                                 std::uint64_t seq);

/// One seed-only negative queue per new text entry.
void expand_negatives(VisualCache& cache, std::span<const LabeledEmbedding> new_text);

}  // namespace coevo
