#include "coevo/visual.hpp"

#include <cmath>

namespace coevo {

VisualQueue::VisualQueue(std::size_t capacity, Embedding seed, std::uint64_t seq)
    : capacity_(capacity) {
    if (capacity == 0) throw ContractViolation("visual queue: capacity must be >= 1");
    slots_.reserve(capacity);
    slots_.push_back({std::move(seed), kSeedEntropy, seq});
}

InsertResult VisualQueue::insert(const Embedding& f_v, double h, std::uint64_t seq) {
    if (!std::isfinite(h) || h < 0.0) throw ContractViolation("visual insert: entropy must be finite and >= 0");
    if (!slots_.empty() && f_v.dim() != slots_.front().embedding.dim()) {
        throw ContractViolation("visual insert: dimension mismatch");
    }
    if (slots_.size() < capacity_) {
        slots_.push_back({f_v, h, seq});
        return {InsertOutcome::Appended, slots_.size() - 1};
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < slots_.size(); ++i) {
        const auto& s = slots_[i];
        const auto& w = slots_[worst];
        if (s.entropy > w.entropy || (s.entropy == w.entropy && s.seq < w.seq)) worst = i;
    }
    if (h < slots_[worst].entropy) {
        slots_[worst] = {f_v, h, seq};
        return {InsertOutcome::Replaced, worst};
    }
    return {InsertOutcome::Rejected, 0};
}

VisualCache init_visual(const PositiveTextQueue& t_p, const NegativeTextQueue& t_n,
                        std::size_t capacity) {
    VisualCache cache;
    cache.capacity = capacity;
    cache.positive.reserve(t_p.size());
    for (const auto& e : t_p.entries()) cache.positive.emplace_back(capacity, e.embedding, cache.next_seq++);
    cache.negative.reserve(t_n.size());
    for (const auto& e : t_n.entries()) cache.negative.emplace_back(capacity, e.embedding, cache.next_seq++);
    return cache;
}

std::vector<double> aggregate(const Embedding& f_v, const VisualQueue& q, double beta) {
    const auto& slots = q.slots();
    if (slots.empty()) throw ContractViolation("aggregate: empty queue");
    if (slots.size() == 1) {
        const auto v = slots.front().embedding.values();
        if (v.size() != f_v.dim()) throw ContractViolation("aggregate: dimension mismatch");
        return {v.begin(), v.end()};
    }
    std::vector<double> sims(slots.size());
    for (std::size_t l = 0; l < slots.size(); ++l) sims[l] = cosine(f_v, slots[l].embedding);
    const auto w = attention_weights(sims, beta);
    std::vector<double> out(f_v.dim(), 0.0);
    for (std::size_t l = 0; l < slots.size(); ++l) {
        const auto v = slots[l].embedding.values();
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += w[l] * v[d];
    }
    return out;
}

std::vector<double> proxy_cosines(const Embedding& f_v, std::span<const VisualQueue> queues,
                                  double beta) {
    std::vector<double> out;
    out.reserve(queues.size());
    for (const auto& q : queues) {
        // a lone slot is unit-norm and its aggregate is itself
        if (q.populated() == 1) {
            out.push_back(cosine(f_v, q.slots().front().embedding));
        } else {
            out.push_back(cosine(f_v.values(), aggregate(f_v, q, beta)));
        }
    }
    return out;
}

double visual_score(const Embedding& f_v, const VisualCache& cache, double tau, double beta) {
    const auto pos = proxy_cosines(f_v, cache.positive, beta);
    const auto neg = proxy_cosines(f_v, cache.negative, beta);
    return group_ratio_score(pos, neg, tau);
}

Assignment assign_from_cosines(std::span<const double> cosines) {
    if (cosines.empty()) throw ContractViolation("assign: no proxies");
    return {softmax(cosines), argmax(cosines)};
}

Assignment assign(const Embedding& f_v, std::span<const std::vector<double>> aggregates) {
    std::vector<double> cos(aggregates.size());
    for (std::size_t i = 0; i < aggregates.size(); ++i) cos[i] = cosine(f_v.values(), aggregates[i]);
    return assign_from_cosines(cos);
}

InsertResult insert_with_entropy(VisualQueue& q, const Embedding& f_v, double h,
                                 std::uint64_t seq) {
    return q.insert(f_v, h, seq);
}

void expand_negatives(VisualCache& cache, std::span<const LabeledEmbedding> new_text) {
    for (const auto& e : new_text) cache.negative.emplace_back(cache.capacity, e.embedding, cache.next_seq++);
}

}  // namespace coevo
