#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "coevo/numeric.hpp"
#include "coevo/threshold.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace coevo;

namespace {

ScoreWindow window_of(const std::vector<double>& scores, std::size_t bins, std::size_t cap = 0) {
    ScoreWindow w(cap ? cap : std::max<std::size_t>(scores.size(), 1), bins);
    for (double s : scores) push_score(w, s);
    return w;
}

std::vector<double> mixture(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_real_distribution<double> sd(0.005, 0.08);
    const double m1 = u(rng) * 0.5, m2 = 0.5 + u(rng) * 0.5;
    const double s1 = sd(rng), s2 = sd(rng);
    const double frac = 0.2 + 0.6 * u(rng);
    std::normal_distribution<double> g;
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(rng) < frac ? m1 + s1 * g(rng) : m2 + s2 * g(rng);
        out.push_back(std::clamp(x, 0.0, 1.0));
    }
    return out;
}

}  // namespace

TEST_CASE("push_score ring semantics") {
    ScoreWindow w(5, 16);
    push_score(w, 0.1);
    push_score(w, 0.2);
    push_score(w, 0.3);
    CHECK(w.size() == 3);
    for (double s : {0.4, 0.5, 0.6}) push_score(w, s);
    CHECK(w.size() == 5);
    CHECK(w.scores().front() == 0.2);
    CHECK(w.scores().back() == 0.6);
    CHECK_THROWS_AS(push_score(w, 1.5), ContractViolation);
    CHECK_THROWS_AS(push_score(w, -0.1), ContractViolation);
    CHECK_THROWS_AS(ScoreWindow(0, 16), ContractViolation);
}

TEST_CASE("histogram matches a recount after many pushes") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    ScoreWindow w(777, 64);
    for (int i = 0; i < 10000; ++i) {
        push_score(w, i % 97 == 0 ? 1.0 : u(rng));
        if (i % 1000 == 999) {
            std::vector<std::uint64_t> recount(64, 0);
            for (double s : w.scores()) ++recount[std::min<std::size_t>(static_cast<std::size_t>(s * 64), 63)];
            CHECK(recount == w.histogram());
            CHECK(std::accumulate(w.histogram().begin(), w.histogram().end(), std::uint64_t{0}) == w.size());
        }
    }
}

TEST_CASE("compute_delta examples") {
    CHECK(compute_delta(window_of({0.1, 0.1, 0.9, 0.9}, 4)) == 0.25);
    CHECK(compute_delta(window_of({0.42, 0.42, 0.42}, 256)) == kColdStartDelta);
    CHECK(compute_delta(window_of({0.7}, 256)) == kColdStartDelta);
    CHECK(compute_delta(ScoreWindow(10, 256)) == kColdStartDelta);
    // same bin counts as one cluster
    CHECK(compute_delta(window_of({0.5001, 0.5002}, 256)) == kColdStartDelta);
}

TEST_CASE("two gaussian clusters land within one bin of the midpoint oracle") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<double> scores;
    for (int i = 0; i < 500; ++i) scores.push_back(std::clamp(0.2 + 0.02 * g(rng), 0.0, 1.0));
    for (int i = 0; i < 500; ++i) scores.push_back(std::clamp(0.8 + 0.02 * g(rng), 0.0, 1.0));
    const double d = compute_delta(window_of(scores, 256));
    const auto mid = oracle::midpoint_delta(scores);
    CHECK(d > mid.below - 1.0 / 256);
    CHECK(d <= mid.above + 1.0 / 256);
}

TEST_CASE("compute_delta matches the exhaustive edge oracle") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> n(2, 600);
    const std::size_t bin_choices[] = {4, 16, 64, 256, 1000};
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t bins = bin_choices[trial % 5];
        std::vector<double> scores;
        if (trial % 3 == 0) {
            std::uniform_real_distribution<double> u(0, 1);
            for (std::size_t i = n(rng); i > 0; --i) scores.push_back(u(rng));
        } else {
            scores = mixture(rng, n(rng));
        }
        CHECK(compute_delta(window_of(scores, bins)) == oracle::edge_delta(scores, bins));
    }
}

TEST_CASE("compute_delta large window takes the floating path and still matches") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto scores = mixture(rng, 6000);
        CHECK(compute_delta(window_of(scores, 256)) == oracle::edge_delta(scores, 256, 1e-9L));
    }
}

TEST_CASE("compute_delta is permutation invariant") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto scores = mixture(rng, 300);
        const double d = compute_delta(window_of(scores, 256));
        std::shuffle(scores.begin(), scores.end(), rng);
        CHECK(compute_delta(window_of(scores, 256)) == d);
    }
}

TEST_CASE("two point masses are separated") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (static_cast<int>(a * 256) == static_cast<int>(b * 256)) continue;
        std::vector<double> scores(20, a);
        scores.insert(scores.end(), 20, b);
        const double d = compute_delta(window_of(scores, 256));
        CHECK(d > a);
        CHECK(d <= b);
    }
}

TEST_CASE("gate examples") {
    CHECK(gate(0.7, 0.5, 0.2) == Decision::PredID);
    CHECK(gate(0.3, 0.5, 0.2) == Decision::PredOOD);
    CHECK(gate(0.5, 0.5, 0.2) == Decision::Ambiguous);
    // boundaries: upper is inclusive, lower is strict
    CHECK(gate(0.6, 0.5, 0.2) == Decision::PredID);
    CHECK(gate(0.4, 0.5, 0.2) == Decision::Ambiguous);
    CHECK(to_string(Decision::PredID) == "id");
    CHECK(to_string(Decision::PredOOD) == "ood");
    CHECK(to_string(Decision::Ambiguous) == "ambiguous");
}

TEST_CASE("margin forms differ only in the lower bound") {
    CHECK(lower_bound(0.5, 0.2, MarginForm::Alg1) == doctest::Approx(0.4));
    CHECK(lower_bound(0.5, 0.2, MarginForm::MainText) == doctest::Approx(0.4));
    CHECK(lower_bound(0.8, 0.5, MarginForm::Alg1) == doctest::Approx(0.4));
    CHECK(lower_bound(0.8, 0.5, MarginForm::MainText) == doctest::Approx(0.7));
    CHECK(gate(0.5, 0.8, 0.5, MarginForm::Alg1) == Decision::Ambiguous);
    CHECK(gate(0.5, 0.8, 0.5, MarginForm::MainText) == Decision::PredOOD);
}

TEST_CASE("gamma 0 never yields ambiguous") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const double s = u(rng), d = u(rng);
        for (auto form : {MarginForm::Alg1, MarginForm::MainText}) {
            const auto dec = gate(s, d, 0.0, form);
            CHECK(dec != Decision::Ambiguous);
            CHECK((dec == Decision::PredID) == (s >= d));
        }
    }
}

TEST_CASE("ambiguous band is nested in gamma") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const double s = u(rng), d = u(rng);
        double g1 = u(rng), g2 = u(rng);
        if (g1 > g2) std::swap(g1, g2);
        for (auto form : {MarginForm::Alg1, MarginForm::MainText}) {
            if (gate(s, d, g1, form) == Decision::Ambiguous) CHECK(gate(s, d, g2, form) == Decision::Ambiguous);
        }
    }
}
