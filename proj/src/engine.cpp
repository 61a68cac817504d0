#include "coevo/engine.hpp"

#include <algorithm>
#include <cmath>

#include "coevo/config.hpp"

namespace coevo {

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::Full: return "full";
        case Ablation::TextualOnly: return "textual-only";
        case Ablation::VisualOnly: return "visual-only";
        case Ablation::Static: return "static";
    }
    return "?";
}

std::optional<Ablation> parse_ablation(std::string_view s) {
    if (s == "full") return Ablation::Full;
    if (s == "textual-only") return Ablation::TextualOnly;
    if (s == "visual-only") return Ablation::VisualOnly;
    if (s == "static") return Ablation::Static;
    return std::nullopt;
}

void EngineConfig::validate() const {
    auto fail = [](const char* key, const std::string& why) {
        throw ConfigError(key, why);
    };
    if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau", "must be a positive finite number");
    if (!(lambda >= 0.5 && lambda < 1.0)) fail("lambda", "must lie in [0.5, 1)");
    if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta", "must be a positive finite number");
    if (queue_len < 1) fail("queue_len", "must be >= 1");
    if (top_n < 1) fail("top_n", "must be >= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0, 1]");
    if (window < 1) fail("window", "must be >= 1");
    if (bins < 2) fail("bins", "must be >= 2");
}

double fuse_pre(double s_t, double s_v, double lambda) {
    return std::clamp(lambda * s_t + (1.0 - lambda) * s_v, 0.0, 1.0);
}

double fuse_post(double s_t, double s_v, double lambda) {
    return std::clamp((1.0 - lambda) * s_t + lambda * s_v, 0.0, 1.0);
}

Engine::Engine(EngineConfig config, PositiveTextQueue t_p, Corpus corpus)
    : config_(config),
      t_p_(std::move(t_p)),
      corpus_(std::move(corpus)),
      window_(config.window, config.bins) {
    config_.validate();
    t_n_ = init_negative(corpus_, t_p_, config_.init_negatives, config_.init_mode,
                         config_.max_negatives);
    cache_ = init_visual(t_p_, t_n_, config_.queue_len);
    negative_origin_.assign(t_n_.size(), std::nullopt);
}

ScoreRecord Engine::process(const Embedding& f_v, std::uint64_t sample_id) {
    if (f_v.dim() != dim()) {
        throw ContractViolation("sample dimension " + std::to_string(f_v.dim()) +
                                " does not match engine dimension " + std::to_string(dim()));
    }
    const double tau = config_.tau;
    const double beta = config_.beta;

    ScoreRecord r;
    r.sample_id = sample_id;

    r.s_t_pre = textual_score(f_v, t_p_, t_n_, tau);
    auto pos_cos = proxy_cosines(f_v, cache_.positive, beta);
    auto neg_cos = proxy_cosines(f_v, cache_.negative, beta);
    r.s_v_pre = group_ratio_score(pos_cos, neg_cos, tau);
    r.s_pre = fuse_pre(r.s_t_pre, r.s_v_pre, config_.lambda);

    r.delta = compute_delta(window_);
    window_.push(r.s_pre);
    r.decision = gate(r.s_pre, r.delta, config_.gamma, config_.margin_form);

    const Assignment positive_assignment = assign_from_cosines(pos_cos);
    r.predicted_class = positive_assignment.index;

    const bool evolve_text =
        config_.ablation == Ablation::Full || config_.ablation == Ablation::TextualOnly;
    const bool evolve_visual =
        config_.ablation == Ablation::Full || config_.ablation == Ablation::VisualOnly;

    if (r.decision != Decision::Ambiguous && config_.ablation != Ablation::Static) {
        const bool is_id = r.decision == Decision::PredID;
        if (evolve_text) {
            const auto found = is_id ? retrieve_far(f_v, corpus_, config_.top_n)
                                     : retrieve_near(f_v, corpus_, config_.top_n);
            const auto added = enqueue_negatives(t_n_, corpus_, found);
            expand_negatives(cache_, added);
            negative_origin_.insert(negative_origin_.end(), added.size(), sample_id);
            for (const auto& e : added) neg_cos.push_back(cosine(f_v, e.embedding));
        }
        if (is_id) {
            if (evolve_visual) {
                auto& q = cache_.positive[*r.predicted_class];
                const auto res = insert_with_entropy(q, f_v, entropy(positive_assignment.probs),
                                                     cache_.next_seq++);
                if (res.outcome != InsertOutcome::Rejected) {
                    pos_cos[*r.predicted_class] = proxy_cosines(f_v, {&q, 1}, beta).front();
                }
            }
        } else if (!neg_cos.empty()) {
            // assignment runs over the expanded negative set
            const Assignment negative_assignment = assign_from_cosines(neg_cos);
            r.predicted_negative = negative_assignment.index;
            if (evolve_visual) {
                auto& q = cache_.negative[negative_assignment.index];
                const auto res = insert_with_entropy(q, f_v, entropy(negative_assignment.probs),
                                                     cache_.next_seq++);
                if (res.outcome != InsertOutcome::Rejected) {
                    neg_cos[negative_assignment.index] = proxy_cosines(f_v, {&q, 1}, beta).front();
                }
            }
        }
    } else if (r.decision == Decision::PredOOD && !neg_cos.empty()) {
        // static mode: report the assignment without touching the caches
        r.predicted_negative = argmax(neg_cos);
    }

    r.s_t_post = textual_score(f_v, t_p_, t_n_, tau);
    r.s_v_post = group_ratio_score(pos_cos, neg_cos, tau);
    r.s_post = fuse_post(r.s_t_post, r.s_v_post, config_.lambda);
    r.negatives = t_n_.size();
    return r;
}

RunResult run_stream(Engine& engine, std::span<const Embedding> samples) {
    RunResult out;
    out.records.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].dim() != engine.dim()) {
            out.skipped.push_back({i, "sample " + std::to_string(i) + ": dimension " +
                                          std::to_string(samples[i].dim()) + " != " +
                                          std::to_string(engine.dim())});
            continue;
        }
        out.records.push_back(engine.process(samples[i], i));
    }
    return out;
}

}  // namespace coevo
