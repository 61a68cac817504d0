#include "coevo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace coevo {

namespace {

using Vec = std::vector<double>;
constexpr std::size_t kMaxRejections = 100000;

void normalize(Vec& v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
}

double dotv(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    Vec uniform_direction(std::size_t dim) {
        Vec v(dim);
        do {
            for (double& x : v) x = normal_(rng_);
        } while (dotv(v, v) < 1e-12);
        normalize(v);
        return v;
    }

    Vec perturb(const Vec& center, double kappa) {
        Vec v = center;
        if (kappa > 0) {
            const double sd = 1.0 / std::sqrt(kappa);
            for (double& x : v) x += sd * normal_(rng_);
        }
        normalize(v);
        return v;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::vector<float> to_floats(const Vec& v) { return {v.begin(), v.end()}; }

}  // namespace

void SynthSpec::validate() const {
    if (dim < 2) throw SynthError("dim must be >= 2");
    if (id_classes < 1) throw SynthError("need at least one ID class");
    if (!(kappa > 0)) throw SynthError("kappa must be positive");
    if (!(id_ood_ratio > 0)) throw SynthError("id_ood_ratio must be positive");
    if (!(corpus_kappa > 0)) throw SynthError("corpus_kappa must be positive");
    if (text_kappa < 0) throw SynthError("text_kappa must be >= 0");
    if (corpus_size < corpus_copies * (id_classes + ood_clusters)) {
        throw SynthError("corpus_size is smaller than the perturbed center copies it must hold");
    }
}

SynthTables generate(const SynthSpec& spec) {
    spec.validate();
    Sampler s(spec.seed);
    const std::size_t n_centers = spec.id_classes + spec.ood_clusters;

    std::vector<Vec> centers;
    for (std::size_t c = 0; c < n_centers; ++c) {
        std::size_t attempts = 0;
        while (true) {
            Vec v = s.uniform_direction(spec.dim);
            const bool ok = std::all_of(centers.begin(), centers.end(),
                                        [&](const Vec& o) { return dotv(o, v) <= spec.max_center_cos; });
            if (ok) {
                centers.push_back(std::move(v));
                break;
            }
            if (++attempts == kMaxRejections) {
                throw SynthError("cannot place " + std::to_string(n_centers) +
                                 " centers with pairwise cosine <= " + std::to_string(spec.max_center_cos) +
                                 "; use fewer classes or a larger dim");
            }
        }
    }

    SynthTables out;
    const auto dim32 = static_cast<std::uint32_t>(spec.dim);
    out.id_text.dim = out.corpus.dim = out.test.dim = dim32;

    for (std::size_t k = 0; k < spec.id_classes; ++k) {
        const Vec t = spec.text_kappa > 0 ? s.perturb(centers[k], spec.text_kappa) : centers[k];
        out.id_text.records.push_back(
            {RecordFlag::ID, static_cast<std::uint32_t>(k), "class_" + std::to_string(k), to_floats(t)});
    }

    for (std::size_t c = 0; c < n_centers; ++c) {
        const std::string stem =
            c < spec.id_classes ? "id" + std::to_string(c) : "ood" + std::to_string(c - spec.id_classes);
        for (std::size_t j = 0; j < spec.corpus_copies; ++j) {
            out.corpus.records.push_back({RecordFlag::Unlabeled, kNoClass, stem + "_w" + std::to_string(j),
                                          to_floats(s.perturb(centers[c], spec.corpus_kappa))});
        }
    }
    for (std::size_t i = out.corpus.records.size(); i < spec.corpus_size; ++i) {
        out.corpus.records.push_back(
            {RecordFlag::Unlabeled, kNoClass, "word_" + std::to_string(i), to_floats(s.uniform_direction(spec.dim))});
    }

    // Drift plane: orthonormal pair (u, w).
    Vec u = s.uniform_direction(spec.dim);
    Vec w = s.uniform_direction(spec.dim);
    const double uw = dotv(u, w);
    for (std::size_t d = 0; d < spec.dim; ++d) w[d] -= uw * u[d];
    normalize(w);

    const std::size_t n_id = spec.id_classes * spec.samples_per_class;
    const auto n_ood = spec.ood_clusters == 0
                           ? std::size_t{0}
                           : static_cast<std::size_t>(std::llround(static_cast<double>(n_id) / spec.id_ood_ratio));
    struct Slot {
        bool is_id;
        std::size_t cluster;
    };
    std::vector<Slot> order;
    order.reserve(n_id + n_ood);
    for (std::size_t i = 0; i < n_id; ++i) order.push_back({true, i % spec.id_classes});
    for (std::size_t i = 0; i < n_ood; ++i) order.push_back({false, i % spec.ood_clusters});
    std::shuffle(order.begin(), order.end(), s.rng());

    const double step = spec.drift_deg_per_100 / 100.0 * std::numbers::pi / 180.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& slot = order[i];
        const std::size_t c = slot.is_id ? slot.cluster : spec.id_classes + slot.cluster;
        Vec x = s.perturb(centers[c], spec.kappa);
        if (step != 0.0) {
            const double theta = step * static_cast<double>(i);
            const double a = dotv(x, u), b = dotv(x, w);
            const double ca = std::cos(theta), sa = std::sin(theta);
            const double a2 = ca * a - sa * b, b2 = sa * a + ca * b;
            for (std::size_t d = 0; d < spec.dim; ++d) x[d] += (a2 - a) * u[d] + (b2 - b) * w[d];
            normalize(x);
        }
        if (slot.is_id) {
            out.test.records.push_back({RecordFlag::ID, static_cast<std::uint32_t>(slot.cluster),
                                        "id" + std::to_string(slot.cluster) + "_s" + std::to_string(i), to_floats(x)});
        } else {
            out.test.records.push_back({RecordFlag::OOD, kNoClass,
                                        "ood" + std::to_string(slot.cluster) + "_s" + std::to_string(i), to_floats(x)});
        }
    }
    return out;
}

}  // namespace coevo
