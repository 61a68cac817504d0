#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "coevo/textual.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace coevo;

namespace {

LabeledEmbedding word(std::string label, std::vector<double> v) { return {std::move(label), Embedding(std::move(v))}; }

std::vector<LabeledEmbedding> random_words(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                           const std::string& prefix) {
    std::vector<LabeledEmbedding> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), Embedding(oracle::random_unit(rng, dim))});
    return out;
}

std::vector<std::vector<double>> raw(const Corpus& c) {
    std::vector<std::vector<double>> out;
    for (const auto& e : c.entries()) out.emplace_back(e.embedding.values().begin(), e.embedding.values().end());
    return out;
}

std::vector<bool> flags(const Corpus& c) {
    std::vector<bool> f;
    for (std::size_t i = 0; i < c.size(); ++i) f.push_back(c.enqueued(i));
    return f;
}

// Embedding at angle theta from e0 in the (e0, e1) plane.
LabeledEmbedding at_cos(std::string label, double c) {
    return word(std::move(label), {c, std::sqrt(std::max(0.0, 1 - c * c)), 0});
}

}  // namespace

TEST_CASE("init_positive") {
    auto t_p = init_positive({word("cat", {1, 0, 0}), word("dog", {0, 1, 0}), word("owl", {0, 0, 1})});
    CHECK(t_p.size() == 3);
    CHECK(t_p.contains("dog"));
    CHECK_THROWS_AS(init_positive({word("cat", {1, 0}), word("cat", {0, 1})}), InitError);
    CHECK_THROWS_AS(init_positive({}), InitError);
    CHECK_THROWS_AS(init_positive({word("a", {1, 0}), word("b", {0, 1, 0})}), InitError);
}

TEST_CASE("corpus drops entries colliding with ID labels") {
    auto t_p = init_positive({word("cat", {1, 0, 0})});
    Corpus c({word("cat", {0, 1, 0}), word("car", {0, 0, 1})}, t_p);
    CHECK(c.size() == 1);
    CHECK(c.dropped() == 1);
    CHECK(c[0].label == "car");
    CHECK_THROWS_AS(Corpus({word("x", {0, 1, 0}), word("x", {0, 0, 1})}, t_p), InitError);
}

TEST_CASE("init_negative given-list takes entries in order") {
    std::mt19937_64 rng(1);
    auto t_p = init_positive({word("id", {1, 0, 0})});
    auto entries = random_words(rng, 5, 3, "w");
    Corpus c(entries, t_p);
    auto t_n = init_negative(c, t_p, 5, NegativeInit::GivenList);
    REQUIRE(t_n.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(t_n[i] == entries[i]);
        CHECK(c.enqueued(i));
    }
    Corpus c2(entries, t_p);
    CHECK_THROWS_AS(init_negative(c2, t_p, 6, NegativeInit::GivenList), InitError);
}

TEST_CASE("init_negative farthest picks the most distant entry") {
    auto t_p = init_positive({word("id", {1, 0, 0})});
    Corpus c({at_cos("near", 0.9), at_cos("far", -0.8)}, t_p);
    auto t_n = init_negative(c, t_p, 1, NegativeInit::Farthest);
    REQUIRE(t_n.size() == 1);
    CHECK(t_n[0].label == "far");
    CHECK(c.enqueued(1));
    CHECK_FALSE(c.enqueued(0));
}

TEST_CASE("init_negative farthest matches a full-sort oracle") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        auto id = random_words(rng, 3, 8, "id");
        auto t_p = init_positive(id);
        auto entries = random_words(rng, 10, 8, "w");
        Corpus c(entries, t_p);
        auto t_n = init_negative(c, t_p, 3, NegativeInit::Farthest);

        std::vector<std::pair<long double, std::size_t>> key;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            long double mx = -2;
            const std::vector<double> e(entries[i].embedding.values().begin(), entries[i].embedding.values().end());
            for (const auto& p : id) {
                const std::vector<double> q(p.embedding.values().begin(), p.embedding.values().end());
                mx = std::max(mx, oracle::cos(e, q));
            }
            key.push_back({mx, i});
        }
        std::sort(key.begin(), key.end());
        for (std::size_t j = 0; j < 3; ++j) CHECK(t_n[j].label == entries[key[j].second].label);
    }
}

TEST_CASE("textual_score examples") {
    auto t_p = init_positive({word("id", {1, 0})});
    Corpus c({word("neg", {0, 1})}, t_p);
    auto t_n = init_negative(c, t_p, 1, NegativeInit::GivenList);
    CHECK(textual_score(Embedding({1, 1}), t_p, t_n, 0.01) == doctest::Approx(0.5).epsilon(1e-15));

    Corpus empty({}, t_p);
    auto none = init_negative(empty, t_p, 0, NegativeInit::GivenList);
    CHECK(textual_score(Embedding({0.3, 1}), t_p, none, 0.01) == 1.0);
}

TEST_CASE("textual_score matches the extended precision oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto id = random_words(rng, 2, 16, "id");
        auto t_p = init_positive(id);
        auto entries = random_words(rng, 3, 16, "w");
        Corpus c(entries, t_p);
        auto t_n = init_negative(c, t_p, 3, NegativeInit::GivenList);
        const auto x = oracle::random_unit(rng, 16);
        std::vector<double> pos, neg;
        for (const auto& p : id) pos.push_back(static_cast<double>(oracle::cos(x, {p.embedding.values().begin(), p.embedding.values().end()})));
        for (const auto& n : entries) neg.push_back(static_cast<double>(oracle::cos(x, {n.embedding.values().begin(), n.embedding.values().end()})));
        const auto want = oracle::exp_ratio(pos, neg, 0.01);
        const double got = textual_score(Embedding(x), t_p, t_n, 0.01);
        if (want > 1e-200L) CHECK(std::abs(got - want) / want < 1e-9);
    }
}

TEST_CASE("retrieval examples") {
    auto t_p = init_positive({word("id", {0, 0, 1})});
    const Embedding x({1, 0, 0});
    Corpus c({at_cos("a", 0.9), at_cos("b", 0.5), at_cos("c", -0.2)}, t_p);

    auto near = retrieve_near(x, c, 2);
    REQUIRE(near.size() == 2);
    CHECK(near[0].label == "a");
    CHECK(near[1].label == "b");
    auto far = retrieve_far(x, c, 1);
    REQUIRE(far.size() == 1);
    CHECK(far[0].label == "c");

    c.mark_enqueued("a");
    near = retrieve_near(x, c, 1);
    CHECK(near[0].label == "b");

    c.mark_enqueued("b");
    c.mark_enqueued("c");
    CHECK(retrieve_far(x, c, 3).empty());
    CHECK(retrieve_near(x, c, 3).empty());
    CHECK_THROWS_AS(retrieve_near(x, c, 0), ContractViolation);
}

TEST_CASE("retrieval ties break by ascending corpus index") {
    auto t_p = init_positive({word("id", {0, 0, 1})});
    const Embedding x({1, 0, 0});
    Corpus c({at_cos("p", 0.5), at_cos("q", 0.5), at_cos("r", 0.5)}, t_p);
    auto near = retrieve_near(x, c, 2);
    CHECK(near[0].label == "p");
    CHECK(near[1].label == "q");
    auto far = retrieve_far(x, c, 2);
    CHECK(far[0].label == "p");
    CHECK(far[1].label == "q");
}

TEST_CASE("retrieval matches the naive sort-and-filter oracle") {
    std::mt19937_64 rng(4);
    auto t_p = init_positive(random_words(rng, 2, 12, "id"));
    Corpus c(random_words(rng, 1000, 12, "w"), t_p);
    std::bernoulli_distribution flip(0.2);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (flip(rng)) c.mark_enqueued(c[i].label);
    const auto corpus = raw(c);
    const auto flagged = flags(c);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = oracle::random_unit(rng, 12);
        const auto near = retrieve_near(Embedding(x), c, 7);
        const auto far = retrieve_far(Embedding(x), c, 7);
        const auto want_near = oracle::naive_retrieve(x, corpus, flagged, 7, +1);
        const auto want_far = oracle::naive_retrieve(x, corpus, flagged, 7, -1);
        REQUIRE(near.size() == 7);
        REQUIRE(far.size() == 7);
        for (std::size_t j = 0; j < 7; ++j) {
            CHECK(near[j].label == c[want_near[j]].label);
            CHECK(far[j].label == c[want_far[j]].label);
        }
        std::set<std::string> a, b;
        for (const auto& e : near) a.insert(e.label);
        for (const auto& e : far) b.insert(e.label);
        for (const auto& l : a) CHECK_FALSE(b.contains(l));
    }
}

TEST_CASE("retrieval can return fewer than n") {
    auto t_p = init_positive({word("id", {0, 0, 1})});
    Corpus c({at_cos("a", 0.9), at_cos("b", 0.5)}, t_p);
    CHECK(retrieve_near(Embedding({1, 0, 0}), c, 5).size() == 2);
}

TEST_CASE("enqueue_negatives dedups") {
    std::mt19937_64 rng(5);
    auto t_p = init_positive(random_words(rng, 2, 6, "id"));
    auto entries = random_words(rng, 20, 6, "w");
    Corpus c(entries, t_p);
    auto t_n = init_negative(c, t_p, 4, NegativeInit::GivenList);

    std::vector<LabeledEmbedding> fresh(entries.begin() + 4, entries.begin() + 9);
    CHECK(enqueue_negatives(t_n, c, fresh).size() == 5);
    CHECK(t_n.size() == 9);
    CHECK(enqueue_negatives(t_n, c, fresh).empty());
    CHECK(t_n.size() == 9);
    for (std::size_t i = 4; i < 9; ++i) CHECK(c.enqueued(i));

    // ID labels are refused
    CHECK(enqueue_negatives(t_n, c, std::vector{t_p[0]}).empty());
}

TEST_CASE("enqueue_negatives count matches the set-difference oracle") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        auto t_p = init_positive(random_words(rng, 2, 4, "id"));
        auto entries = random_words(rng, 30, 4, "w");
        Corpus c(entries, t_p);
        auto t_n = init_negative(c, t_p, 5, NegativeInit::GivenList);
        std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
        std::vector<LabeledEmbedding> cand;
        for (int k = 0; k < 12; ++k) cand.push_back(entries[pick(rng)]);

        std::set<std::string> have;
        for (const auto& e : t_n.entries()) have.insert(e.label);
        std::set<std::string> want;
        for (const auto& e : cand)
            if (!have.contains(e.label)) want.insert(e.label);

        const auto added = enqueue_negatives(t_n, c, cand);
        CHECK(added.size() == want.size());

        std::set<std::string> labels;
        for (const auto& e : t_n.entries()) {
            CHECK(labels.insert(e.label).second);
            CHECK_FALSE(t_p.contains(e.label));
        }
    }
}

TEST_CASE("max_negatives cap") {
    std::mt19937_64 rng(7);
    auto t_p = init_positive(random_words(rng, 1, 4, "id"));
    auto entries = random_words(rng, 10, 4, "w");
    Corpus c(entries, t_p);
    auto t_n = init_negative(c, t_p, 2, NegativeInit::GivenList, 4);
    std::vector<LabeledEmbedding> more(entries.begin() + 2, entries.begin() + 6);
    CHECK(enqueue_negatives(t_n, c, more).size() == 2);
    CHECK(t_n.size() == 4);
    CHECK(enqueue_negatives(t_n, c, more).empty());
    CHECK_FALSE(c.enqueued(4));
}

TEST_CASE("nearer negatives never raise the textual score") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        auto t_p = init_positive(random_words(rng, 2, 8, "id"));
        auto entries = random_words(rng, 40, 8, "w");
        Corpus c(entries, t_p);
        auto t_n = init_negative(c, t_p, 5, NegativeInit::GivenList);
        const Embedding x(oracle::random_unit(rng, 8));
        double max_neg = -1;
        for (const auto& e : t_n.entries()) max_neg = std::max(max_neg, cosine(x, e.embedding));
        const double before = textual_score(x, t_p, t_n, 0.1);
        std::vector<LabeledEmbedding> nearer;
        for (const auto& e : retrieve_near(x, c, 3))
            if (cosine(x, e.embedding) >= max_neg) nearer.push_back(e);
        enqueue_negatives(t_n, c, nearer);
        CHECK(textual_score(x, t_p, t_n, 0.1) <= before);
    }
}
