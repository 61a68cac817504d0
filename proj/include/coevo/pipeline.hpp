#pragma once

#include <optional>
#include <vector>

#include "coevo/engine.hpp"
#include "coevo/metrics.hpp"
#include "coevo/table_io.hpp"

namespace coevo {

/// Engine-ready view of the three input tables.
struct StreamInputs {
    std::vector<LabeledEmbedding> id_text;
    std::vector<LabeledEmbedding> corpus;
    std::vector<Embedding> samples;
    /// nullopt for unlabeled test records.
    std::vector<std::optional<GroundTruth>> truth;
};

/// Throws InitError when the table dimensions disagree.
StreamInputs prepare_inputs(const Table& id_text, const Table& corpus, const Table& test);

std::vector<LabeledEmbedding> labeled_embeddings(const Table& table);
std::vector<std::optional<GroundTruth>> ground_truth(const Table& table);

/// Builds a fresh engine from the inputs and runs every sample in order.
RunResult run_inputs(const EngineConfig& config, const StreamInputs& inputs);

}  // namespace coevo
