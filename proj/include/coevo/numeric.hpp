#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coevo {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Unit-norm vector. Construction renormalizes and rejects zero or
/// non-finite input, so every Embedding in the engine satisfies
/// |norm - 1| <= 1e-12 and has only finite components.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(std::vector<double> values);
    static Embedding from_floats(std::span<const float> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const Embedding&) const = default;

private:
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Dot product of two unit vectors, clamped to [-1, 1].
double cosine(const Embedding& a, const Embedding& b);

/// a.b / (|a||b|) for vectors that need not be unit-norm (aggregated
/// visual proxies). Clamped to [-1, 1]; a zero vector is a contract
/// violation.
double cosine(std::span<const double> a, std::span<const double> b);

/// sum_pos exp(s/tau) / (sum_pos exp(s/tau) + sum_neg exp(s/tau)).
/// The largest similarity across both groups is subtracted before
/// exponentiation, so tau = 0.01 cannot overflow. Empty neg_sims gives 1.
double group_ratio_score(std::span<const double> pos_sims,
                         std::span<const double> neg_sims, double tau);

std::vector<double> softmax(std::span<const double> v);

/// Natural-log Shannon entropy; 0 log 0 = 0.
double entropy(std::span<const double> p);

/// w_l proportional to exp(-beta (1 - s_l)).
std::vector<double> attention_weights(std::span<const double> sims, double beta);

/// Index of the largest value, lowest index on ties.
std::size_t argmax(std::span<const double> v);

}  // namespace coevo
