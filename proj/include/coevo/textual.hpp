#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coevo/numeric.hpp"

namespace coevo {

class InitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabeledEmbedding {
    std::string label;
    Embedding embedding;

    bool operator==(const LabeledEmbedding&) const = default;
};

/// Fixed ID-class text proxies (one row per class).
class PositiveTextQueue {
public:
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t dim() const noexcept { return entries_.front().embedding.dim(); }
    const std::vector<LabeledEmbedding>& entries() const noexcept { return entries_; }
    const LabeledEmbedding& operator[](std::size_t k) const { return entries_[k]; }
    bool contains(const std::string& label) const { return labels_.contains(label); }

    bool operator==(const PositiveTextQueue& o) const { return entries_ == o.entries_; }

private:
    friend PositiveTextQueue init_positive(std::vector<LabeledEmbedding> id_classes);
    std::vector<LabeledEmbedding> entries_;
    std::unordered_set<std::string> labels_;
};

/// Candidate vocabulary for negative mining. Entries whose label collides
/// with an ID class are dropped at construction; each surviving entry
/// carries an "already in the negative queue" flag.
class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<LabeledEmbedding> entries, const PositiveTextQueue& t_p);

    std::size_t size() const noexcept { return entries_.size(); }
    const LabeledEmbedding& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<LabeledEmbedding>& entries() const noexcept { return entries_; }
    std::size_t dropped() const noexcept { return dropped_; }

    bool enqueued(std::size_t i) const { return enqueued_[i]; }
    std::size_t eligible_count() const;
    /// Flags the entry with this label, if present. Returns whether found.
    bool mark_enqueued(const std::string& label);

    bool operator==(const Corpus& o) const {
        return entries_ == o.entries_ && enqueued_ == o.enqueued_;
    }

private:
    std::vector<LabeledEmbedding> entries_;
    std::vector<bool> enqueued_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dropped_ = 0;
};

/// Growable negative text proxies. Labels stay pairwise distinct and
/// disjoint from the positive labels; entries are never removed.
class NegativeTextQueue {
public:
    NegativeTextQueue() = default;
    NegativeTextQueue(const PositiveTextQueue& t_p, std::optional<std::size_t> max_entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<LabeledEmbedding>& entries() const noexcept { return entries_; }
    const LabeledEmbedding& operator[](std::size_t m) const { return entries_[m]; }
    bool contains(const std::string& label) const { return labels_.contains(label); }
    std::optional<std::size_t> max_entries() const noexcept { return max_entries_; }

    /// Appends unless the label is already present, belongs to an ID class,
    /// or the cap is reached.
    bool append(const LabeledEmbedding& entry);

    bool operator==(const NegativeTextQueue& o) const { return entries_ == o.entries_; }

private:
    std::vector<LabeledEmbedding> entries_;
    std::unordered_set<std::string> labels_;
    std::unordered_set<std::string> positive_labels_;
    std::optional<std::size_t> max_entries_;
};

enum class NegativeInit { Farthest, GivenList };

PositiveTextQueue init_positive(std::vector<LabeledEmbedding> id_classes);

/// Farthest: the m eligible entries whose largest cosine to any positive row
/// is smallest (ties by corpus index), queued in that order. GivenList: the
/// first m eligible entries in corpus order. Selected entries are flagged.
NegativeTextQueue init_negative(Corpus& corpus, const PositiveTextQueue& t_p, std::size_t m,
                                NegativeInit mode,
                                std::optional<std::size_t> max_entries = std::nullopt);

double textual_score(const Embedding& f_v, const PositiveTextQueue& t_p,
                     const NegativeTextQueue& t_n, double tau);

/// Top-n unflagged corpus entries by descending cosine to f_v.
std::vector<LabeledEmbedding> retrieve_near(const Embedding& f_v, const Corpus& corpus,
                                            std::size_t n);
/// Top-n unflagged corpus entries by ascending cosine to f_v.
std::vector<LabeledEmbedding> retrieve_far(const Embedding& f_v, const Corpus& corpus,
                                           std::size_t n);

/// Appends fresh candidates and flags them in the corpus. Returns the
/// entries actually appended, in order.
std::vector<LabeledEmbedding> enqueue_negatives(NegativeTextQueue& t_n, Corpus& corpus,
                                                std::span<const LabeledEmbedding> candidates);

}  // namespace coevo
