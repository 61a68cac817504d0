#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/numeric.hpp"
#include "coevo/textual.hpp"
#include "coevo/threshold.hpp"
#include "coevo/visual.hpp"

namespace coevo {

enum class Ablation { Full, TextualOnly, VisualOnly, Static };

std::string_view to_string(Ablation a);
std::optional<Ablation> parse_ablation(std::string_view s);

struct EngineConfig {
    double tau = 0.01;
    double lambda = 0.8;
    double beta = 5.5;
    std::size_t queue_len = 10;  // L
    std::size_t top_n = 5;       // N
    double gamma = 0.2;
    std::size_t window = 2048;
    std::size_t bins = 256;
    Ablation ablation = Ablation::Full;
    MarginForm margin_form = MarginForm::Alg1;
    std::uint64_t seed = 0;
    std::size_t init_negatives = 100;  // M
    NegativeInit init_mode = NegativeInit::Farthest;
    std::optional<std::size_t> max_negatives;

    /// Throws ConfigError naming the first out-of-range key.
    void validate() const;

    bool operator==(const EngineConfig&) const = default;
};

struct ScoreRecord {
    std::uint64_t sample_id = 0;
    double s_t_pre = 0, s_v_pre = 0, s_pre = 0;
    double delta = 0;
    Decision decision = Decision::Ambiguous;
    /// Argmax of the positive assignment, computed for every sample.
    std::optional<std::size_t> predicted_class;
    /// Argmax of the negative assignment; set only for PredOOD samples.
    std::optional<std::size_t> predicted_negative;
    double s_t_post = 0, s_v_post = 0, s_post = 0;
    /// |T_n| after this sample.
    std::size_t negatives = 0;

    bool operator==(const ScoreRecord&) const = default;
};

double fuse_pre(double s_t, double s_v, double lambda);
double fuse_post(double s_t, double s_v, double lambda);

/// Full streaming state: text queues, corpus flags, visual cache and the
/// threshold window. Single writer; process() must not overlap reads.
class Engine {
public:
    Engine(EngineConfig config, PositiveTextQueue t_p, Corpus corpus);

    /// One step of the co-evolution loop for sample f_v.
    ScoreRecord process(const Embedding& f_v, std::uint64_t sample_id);

    const EngineConfig& config() const noexcept { return config_; }
    const PositiveTextQueue& positive() const noexcept { return t_p_; }
    const NegativeTextQueue& negative() const noexcept { return t_n_; }
    const Corpus& corpus() const noexcept { return corpus_; }
    const VisualCache& cache() const noexcept { return cache_; }
    const ScoreWindow& window() const noexcept { return window_; }
    std::size_t dim() const noexcept { return t_p_.dim(); }
    /// Sample id that enqueued each T_n entry; nullopt for the initial M.
    const std::vector<std::optional<std::uint64_t>>& negative_origin() const noexcept {
        return negative_origin_;
    }

private:
    EngineConfig config_;
    PositiveTextQueue t_p_;
    Corpus corpus_;
    NegativeTextQueue t_n_;
    VisualCache cache_;
    ScoreWindow window_;
    std::vector<std::optional<std::uint64_t>> negative_origin_;
};

struct SampleError {
    std::size_t index;
    std::string message;
};

struct RunResult {
    std::vector<ScoreRecord> records;
    std::vector<SampleError> skipped;
};

/// Processes the test samples strictly in order.
RunResult run_stream(Engine& engine, std::span<const Embedding> samples);

}  // namespace coevo
