#include "coevo/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coevo {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw ContractViolation(std::string(what) + ": non-finite value");
    }
}

}  // namespace

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ContractViolation("embedding: zero dimension");
    require_finite(values_, "embedding");
    const double n = norm(values_);
    if (!(n > 0.0)) throw ContractViolation("embedding: zero vector cannot be normalized");
    for (double& x : values_) x /= n;
}

Embedding Embedding::from_floats(std::span<const float> values) {
    return Embedding(std::vector<double>(values.begin(), values.end()));
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ContractViolation("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

double cosine(const Embedding& a, const Embedding& b) {
    return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double d = dot(a, b);
    const double na = norm(a);
    const double nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw ContractViolation("cosine: zero vector");
    return std::clamp(d / (na * nb), -1.0, 1.0);
}

double group_ratio_score(std::span<const double> pos_sims, std::span<const double> neg_sims,
                         double tau) {
    if (pos_sims.empty()) throw ContractViolation("group_ratio_score: empty positive group");
    if (!(tau > 0.0)) throw ContractViolation("group_ratio_score: tau must be positive");
    require_finite(pos_sims, "group_ratio_score");
    require_finite(neg_sims, "group_ratio_score");
    if (neg_sims.empty()) return 1.0;

    double top = -std::numeric_limits<double>::infinity();
    for (double s : pos_sims) top = std::max(top, s);
    for (double s : neg_sims) top = std::max(top, s);

    double pos = 0.0;
    for (double s : pos_sims) pos += std::exp((s - top) / tau);
    double neg = 0.0;
    for (double s : neg_sims) neg += std::exp((s - top) / tau);
    return std::clamp(pos / (pos + neg), 0.0, 1.0);
}

std::vector<double> softmax(std::span<const double> v) {
    if (v.empty()) throw ContractViolation("softmax: empty input");
    require_finite(v, "softmax");
    const double top = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double z = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - top);
        z += out[i];
    }
    for (double& x : out) x /= z;
    return out;
}

double entropy(std::span<const double> p) {
    if (p.empty()) throw ContractViolation("entropy: empty distribution");
    double total = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) throw ContractViolation("entropy: invalid probability");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-6) throw ContractViolation("entropy: probabilities do not sum to 1");
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log(x);
    }
    return std::clamp(h, 0.0, std::log(static_cast<double>(p.size())));
}

std::vector<double> attention_weights(std::span<const double> sims, double beta) {
    if (sims.empty()) throw ContractViolation("attention_weights: empty input");
    if (!(beta > 0.0)) throw ContractViolation("attention_weights: beta must be positive");
    require_finite(sims, "attention_weights");
    // exp(-beta (1 - s)) shifted by the largest exponent
    const double top = *std::max_element(sims.begin(), sims.end());
    const double shift = -beta * (1.0 - top);
    std::vector<double> w(sims.size());
    double z = 0.0;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        w[i] = std::exp(-beta * (1.0 - sims[i]) - shift);
        z += w[i];
    }
    for (double& x : w) x /= z;
    return w;
}

std::size_t argmax(std::span<const double> v) {
    if (v.empty()) throw ContractViolation("argmax: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace coevo
