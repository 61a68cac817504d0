#include "coevo/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "coevo/numeric.hpp"

namespace coevo {

ScoreWindow::ScoreWindow(std::size_t capacity, std::size_t bins) : capacity_(capacity), counts_(bins, 0) {
    if (capacity == 0) throw ContractViolation("score window: capacity must be >= 1");
    if (bins < 2) throw ContractViolation("score window: need at least 2 bins");
}

std::size_t ScoreWindow::bin_of(double score) const {
    const auto b = static_cast<std::size_t>(std::floor(score * static_cast<double>(counts_.size())));
    return std::min(b, counts_.size() - 1);
}

void ScoreWindow::push(double score) {
    if (!(score >= 0.0 && score <= 1.0)) throw ContractViolation("score window: score outside [0, 1]");
    if (buffer_.size() == capacity_) {
        --counts_[bin_of(buffer_.front())];
        buffer_.pop_front();
    }
    buffer_.push_back(score);
    ++counts_[bin_of(score)];
}

void push_score(ScoreWindow& w, double s) { w.push(s); }

namespace {

__extension__ typedef __int128 i128;

// Bin i has center (2i + 1) / (2B); working in the odd integers c = 2i + 1
// keeps every sum exact. For a side with count n, sum S and sum of squares
// Q, n^2 var = n Q - S^2 (in units of 1 / (2B)^2).
struct Side {
    i128 n = 0, sum = 0, sq = 0;
    i128 scaled_var_num() const { return n * sq - sum * sum; }
    i128 scaled_var_den() const { return n * n; }
};

// Objective as an exact fraction num/den. Exact comparison needs the cross
// products to fit in 127 bits, which holds for n <= 4096 and B <= 1024;
// larger windows fall back to extended-precision floating point.
struct Fraction {
    i128 num, den;
};

Fraction objective(const Side& lo, const Side& hi) {
    const i128 a = lo.scaled_var_num(), ad = lo.scaled_var_den();
    const i128 b = hi.scaled_var_num(), bd = hi.scaled_var_den();
    return {a * bd + b * ad, ad * bd};
}

long double approx_objective(const Side& lo, const Side& hi) {
    return static_cast<long double>(lo.scaled_var_num()) / static_cast<long double>(lo.scaled_var_den()) +
           static_cast<long double>(hi.scaled_var_num()) / static_cast<long double>(hi.scaled_var_den());
}

}  // namespace

double compute_delta(const ScoreWindow& w) {
    const auto& counts = w.histogram();
    const std::size_t bins = counts.size();
    std::size_t occupied = 0;
    Side total;
    for (std::size_t i = 0; i < bins; ++i) {
        if (counts[i] == 0) continue;
        ++occupied;
        const i128 c = 2 * static_cast<i128>(i) + 1;
        const i128 n = counts[i];
        total.n += n;
        total.sum += n * c;
        total.sq += n * c * c;
    }
    if (w.size() < 2 || occupied < 2) return kColdStartDelta;

    const bool exact = total.n <= 4096 && bins <= 1024;
    Side lo;
    std::optional<Fraction> best;
    long double best_approx = 0.0L;
    std::size_t best_edge = 0;
    for (std::size_t j = 1; j < bins; ++j) {
        const std::size_t i = j - 1;
        const i128 c = 2 * static_cast<i128>(i) + 1;
        const i128 n = counts[i];
        lo.n += n;
        lo.sum += n * c;
        lo.sq += n * c * c;
        const Side hi{total.n - lo.n, total.sum - lo.sum, total.sq - lo.sq};
        if (lo.n == 0 || hi.n == 0) continue;
        if (exact) {
            const Fraction f = objective(lo, hi);
            if (!best || f.num * best->den < best->num * f.den) {
                best = f;
                best_edge = j;
            }
        } else {
            const long double f = approx_objective(lo, hi);
            if (best_edge == 0 || f < best_approx) {
                best_approx = f;
                best_edge = j;
            }
        }
    }
    return static_cast<double>(best_edge) / static_cast<double>(bins);
}

double lower_bound(double delta, double gamma, MarginForm form) {
    return form == MarginForm::Alg1 ? delta * (1.0 - gamma) : delta - gamma * (1.0 - delta);
}

double upper_bound(double delta, double gamma) { return delta + gamma * (1.0 - delta); }

Decision gate(double s, double delta, double gamma, MarginForm form) {
    if (s >= upper_bound(delta, gamma)) return Decision::PredID;
    if (s < lower_bound(delta, gamma, form)) return Decision::PredOOD;
    return Decision::Ambiguous;
}

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::PredID: return "id";
        case Decision::PredOOD: return "ood";
        case Decision::Ambiguous: return "ambiguous";
    }
    return "?";
}

}  // namespace coevo
