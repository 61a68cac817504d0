#include "coevo/pipeline.hpp"

namespace coevo {

std::vector<LabeledEmbedding> labeled_embeddings(const Table& table) {
    std::vector<LabeledEmbedding> out;
    out.reserve(table.records.size());
    for (const auto& r : table.records) out.push_back({r.label, r.embedding()});
    return out;
}

std::vector<std::optional<GroundTruth>> ground_truth(const Table& table) {
    std::vector<std::optional<GroundTruth>> out;
    out.reserve(table.records.size());
    for (const auto& r : table.records) {
        switch (r.flag) {
            case RecordFlag::ID: out.push_back(GroundTruth{true, r.class_index}); break;
            case RecordFlag::OOD: out.push_back(GroundTruth{false, 0}); break;
            case RecordFlag::Unlabeled: out.push_back(std::nullopt); break;
        }
    }
    return out;
}

StreamInputs prepare_inputs(const Table& id_text, const Table& corpus, const Table& test) {
    if (corpus.dim != id_text.dim && !corpus.records.empty()) {
        throw InitError("corpus dim " + std::to_string(corpus.dim) + " != id-text dim " +
                        std::to_string(id_text.dim));
    }
    if (test.dim != id_text.dim && !test.records.empty()) {
        throw InitError("test dim " + std::to_string(test.dim) + " != id-text dim " +
                        std::to_string(id_text.dim));
    }
    StreamInputs in;
    in.id_text = labeled_embeddings(id_text);
    in.corpus = labeled_embeddings(corpus);
    in.samples.reserve(test.records.size());
    for (const auto& r : test.records) in.samples.push_back(r.embedding());
    in.truth = ground_truth(test);
    return in;
}

RunResult run_inputs(const EngineConfig& config, const StreamInputs& inputs) {
    auto t_p = init_positive(inputs.id_text);
    Corpus corpus(inputs.corpus, t_p);
    Engine engine(config, std::move(t_p), std::move(corpus));
    return run_stream(engine, inputs.samples);
}

}  // namespace coevo
