#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "coevo/table_io.hpp"

namespace coevo {

class SynthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of a synthetic embedding stream. Samples are
/// normalize(center + N(0, 1/kappa) per component), which approximates a
/// von Mises-Fisher draw of concentration kappa for large kappa.
struct SynthSpec {
    std::size_t dim = 64;
    std::size_t id_classes = 10;
    std::size_t ood_clusters = 5;
    std::size_t samples_per_class = 100;  // ID samples per class
    double kappa = 200.0;
    double drift_deg_per_100 = 0.0;       // in-plane rotation per 100 samples
    double id_ood_ratio = 1.0;            // ID count / OOD count
    std::size_t corpus_size = 1000;
    std::uint64_t seed = 0;

    double max_center_cos = 0.5;
    /// Concentration of class text embeddings around their centers; 0 puts
    /// the text exactly on the center.
    double text_kappa = 0.0;
    /// Perturbed copies of each center placed in the corpus, and their
    /// concentration.
    std::size_t corpus_copies = 4;
    double corpus_kappa = 100.0;

    void validate() const;
};

struct SynthTables {
    Table id_text;
    Table corpus;
    Table test;
};

SynthTables generate(const SynthSpec& spec);

}  // namespace coevo
