#include "coevo/textual.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace coevo {

PositiveTextQueue init_positive(std::vector<LabeledEmbedding> id_classes) {
    if (id_classes.empty()) throw InitError("positive queue: no ID classes");
    PositiveTextQueue q;
    const std::size_t d = id_classes.front().embedding.dim();
    for (auto& e : id_classes) {
        if (e.label.empty()) throw InitError("positive queue: empty class label");
        if (e.embedding.dim() != d) throw InitError("positive queue: mixed embedding dims");
        if (!q.labels_.insert(e.label).second) {
            throw InitError("positive queue: duplicate class label '" + e.label + "'");
        }
        q.entries_.push_back(std::move(e));
    }
    return q;
}

Corpus::Corpus(std::vector<LabeledEmbedding> entries, const PositiveTextQueue& t_p) {
    for (auto& e : entries) {
        if (e.label.empty()) throw InitError("corpus: empty label");
        if (e.embedding.dim() != t_p.dim()) throw InitError("corpus: embedding dim mismatch");
        if (t_p.contains(e.label)) {
            ++dropped_;
            continue;
        }
        if (!index_.emplace(e.label, entries_.size()).second) {
            throw InitError("corpus: duplicate label '" + e.label + "'");
        }
        entries_.push_back(std::move(e));
    }
    enqueued_.assign(entries_.size(), false);
}

std::size_t Corpus::eligible_count() const {
    return static_cast<std::size_t>(std::count(enqueued_.begin(), enqueued_.end(), false));
}

bool Corpus::mark_enqueued(const std::string& label) {
    auto it = index_.find(label);
    if (it == index_.end()) return false;
    enqueued_[it->second] = true;
    return true;
}

NegativeTextQueue::NegativeTextQueue(const PositiveTextQueue& t_p,
                                     std::optional<std::size_t> max_entries)
    : max_entries_(max_entries) {
    for (const auto& e : t_p.entries()) positive_labels_.insert(e.label);
}

bool NegativeTextQueue::append(const LabeledEmbedding& entry) {
    if (max_entries_ && entries_.size() >= *max_entries_) return false;
    if (positive_labels_.contains(entry.label)) return false;
    if (!labels_.insert(entry.label).second) return false;
    entries_.push_back(entry);
    return true;
}

NegativeTextQueue init_negative(Corpus& corpus, const PositiveTextQueue& t_p, std::size_t m,
                                NegativeInit mode, std::optional<std::size_t> max_entries) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus.enqueued(i)) eligible.push_back(i);
    }
    if (m > eligible.size()) {
        throw InitError("negative queue: requested " + std::to_string(m) + " entries but corpus has " +
                        std::to_string(eligible.size()) + " eligible");
    }

    std::vector<std::size_t> chosen;
    if (mode == NegativeInit::GivenList) {
        chosen.assign(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
        std::vector<double> closest(corpus.size(), -std::numeric_limits<double>::infinity());
        for (std::size_t i : eligible) {
            for (const auto& p : t_p.entries()) {
                closest[i] = std::max(closest[i], cosine(corpus[i].embedding, p.embedding));
            }
        }
        std::stable_sort(eligible.begin(), eligible.end(),
                         [&](std::size_t a, std::size_t b) { return closest[a] < closest[b]; });
        chosen.assign(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(m));
    }

    NegativeTextQueue q(t_p, max_entries);
    for (std::size_t i : chosen) {
        if (q.append(corpus[i])) corpus.mark_enqueued(corpus[i].label);
    }
    return q;
}

double textual_score(const Embedding& f_v, const PositiveTextQueue& t_p,
                     const NegativeTextQueue& t_n, double tau) {
    std::vector<double> pos(t_p.size());
    for (std::size_t k = 0; k < t_p.size(); ++k) pos[k] = cosine(f_v, t_p[k].embedding);
    std::vector<double> neg(t_n.size());
    for (std::size_t m = 0; m < t_n.size(); ++m) neg[m] = cosine(f_v, t_n[m].embedding);
    return group_ratio_score(pos, neg, tau);
}

namespace {

// sign = +1 keeps the most similar entries, -1 the least similar.
std::vector<LabeledEmbedding> retrieve(const Embedding& f_v, const Corpus& corpus, std::size_t n,
                                       double sign) {
    if (n == 0) throw ContractViolation("retrieve: n must be >= 1");
    struct Candidate {
        double key;
        std::size_t index;
    };
    std::vector<Candidate> pool;
    pool.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus.enqueued(i)) continue;
        pool.push_back({sign * cosine(f_v, corpus[i].embedding), i});
    }
    const std::size_t take = std::min(n, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                      [](const Candidate& a, const Candidate& b) {
                          if (a.key != b.key) return a.key > b.key;
                          return a.index < b.index;
                      });
    std::vector<LabeledEmbedding> out;
    out.reserve(take);
    for (std::size_t j = 0; j < take; ++j) out.push_back(corpus[pool[j].index]);
    return out;
}

}  // namespace

std::vector<LabeledEmbedding> retrieve_near(const Embedding& f_v, const Corpus& corpus,
                                            std::size_t n) {
    return retrieve(f_v, corpus, n, 1.0);
}

std::vector<LabeledEmbedding> retrieve_far(const Embedding& f_v, const Corpus& corpus,
                                           std::size_t n) {
    return retrieve(f_v, corpus, n, -1.0);
}

std::vector<LabeledEmbedding> enqueue_negatives(NegativeTextQueue& t_n, Corpus& corpus,
                                                std::span<const LabeledEmbedding> candidates) {
    std::vector<LabeledEmbedding> appended;
    for (const auto& c : candidates) {
        if (t_n.append(c)) {
            corpus.mark_enqueued(c.label);
            appended.push_back(c);
        }
    }
    return appended;
}

}  // namespace coevo
