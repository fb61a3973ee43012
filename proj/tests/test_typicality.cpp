#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qbclab/entropics.hpp"
#include "qbclab/errors.hpp"
#include "qbclab/typicality.hpp"
#include "support.hpp"

using namespace qbclab;

namespace {

std::set<Word> as_set(const std::vector<Word>& words) {
    return std::set<Word>(words.begin(), words.end());
}

double iid_prob(const std::vector<double>& p, const Word& w) {
    double prob = 1.0;
    for (std::uint16_t x : w) prob *= p[x];
    return prob;
}

// brute-force reference: every word passing the count window + support rule
std::vector<Word> brute_typical(const std::vector<double>& p, int n, double delta) {
    std::vector<Word> result;
    const std::size_t k = p.size();
    Word w(static_cast<std::size_t>(n), 0);
    while (true) {
        TypeVector type = word_type(w, k);
        bool ok = true;
        for (std::size_t x = 0; x < k && ok; ++x) {
            const double count = static_cast<double>(type.counts[x]);
            if (std::abs(count - p[x] * n) > n * delta + 1e-12) ok = false;
            if ((p[x] == 0.0) != (type.counts[x] == 0)) ok = false;
        }
        if (ok) result.push_back(w);
        int i = n - 1;
        while (i >= 0 && w[static_cast<std::size_t>(i)] + 1 == k) {
            w[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++w[static_cast<std::size_t>(i)];
    }
    return result;
}

}  // namespace

TEST_CASE("type counting and enumeration") {
    CHECK(count_types(3, 4) == 15);  // C(6, 2)
    CHECK(count_types(2, 6) == 7);
    const auto types = enumerate_types(3, 4);
    CHECK(types.size() == 15);
    std::set<std::vector<std::int64_t>> seen;
    for (const TypeVector& t : types) {
        CHECK(t.n() == 4);
        seen.insert(t.counts);
    }
    CHECK(seen.size() == 15);

    const TypeVector t = word_type({1, 0, 1, 1, 2}, 3);
    CHECK(t.counts == std::vector<std::int64_t>{1, 3, 1});
    CHECK_THROWS_AS(word_type({3}, 3), validation_error);
}

TEST_CASE("typical sets on small exact cases") {
    // delta = 0 keeps exactly the balanced words
    const auto exact = as_set(typical_set({0.5, 0.5}, 2, 0.0));
    CHECK(exact == as_set({{0, 1}, {1, 0}}));

    // n = 3, delta = 1/3: counts within [0.5, 2.5], i.e. one or two of each
    const auto mid = typical_set({0.5, 0.5}, 3, 1.0 / 3.0);
    CHECK(mid.size() == 6);

    // support rule: a zero-probability letter never appears, and every
    // positive-probability letter must appear even when delta is generous,
    // so the constant words are excluded
    const auto supported = typical_set({0.5, 0.5, 0.0}, 2, 2.0);
    CHECK(as_set(supported) == as_set({{0, 1}, {1, 0}}));

    for (double delta : {0.05, 0.2, 0.5}) {
        const auto fast = typical_set({0.3, 0.2, 0.5}, 5, delta);
        const auto slow = brute_typical({0.3, 0.2, 0.5}, 5, delta);
        CHECK(as_set(fast) == as_set(slow));
    }
}

TEST_CASE("conditionally typical sets") {
    Eigen::MatrixXd t(2, 2);
    t << 1.0, 0.0, 0.0, 1.0;
    // deterministic channel: the only conditionally typical word is the copy
    const auto copies = conditionally_typical_set(t, {0, 1, 1, 0}, 0.3);
    CHECK(copies == std::vector<Word>{{0, 1, 1, 0}});

    // constant conditioning word reduces to the unconditional set of the row
    Eigen::MatrixXd noisy(2, 2);
    noisy << 0.7, 0.3, 0.4, 0.6;
    const Word zeros = {0, 0, 0, 0, 0};
    const auto conditional = conditionally_typical_set(noisy, zeros, 0.25);
    const auto row = typical_set({0.7, 0.3}, 5, 0.25);
    CHECK(as_set(conditional) == as_set(row));
}

TEST_CASE("pruned distribution") {
    const std::vector<double> p = {0.25, 0.75};
    const PrunedDistribution pd = pruned(p, 6, 0.2);
    REQUIRE(!pd.support.empty());
    double mass = 0.0, renorm = 0.0;
    for (std::size_t i = 0; i < pd.support.size(); ++i) {
        mass += iid_prob(p, pd.support[i]);
        renorm += pd.prob[i];
        CHECK(pd.prob[i] == doctest::Approx(iid_prob(p, pd.support[i]) / pd.iid_mass)
                                .epsilon(1e-12));
    }
    CHECK(pd.iid_mass == doctest::Approx(mass).epsilon(1e-12));
    CHECK(renorm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pd.l1_to_iid() == doctest::Approx(2.0 * (1.0 - mass)).epsilon(1e-12));
    CHECK(pd.cumulative.back() == doctest::Approx(1.0).epsilon(1e-12));

    // sampling must land in the support and be seed-reproducible
    rng::Stream a = rng::stream(31, {0});
    rng::Stream b = rng::stream(31, {0});
    for (int i = 0; i < 50; ++i) {
        const Word& w = pd.sample(a);
        CHECK(std::find(pd.support.begin(), pd.support.end(), w) != pd.support.end());
        CHECK(pd.sample(b) == w);
    }

    CHECK_THROWS_AS(pruned({0.5, 0.5}, 3, 0.0), validation_error);  // empty set

    Eigen::MatrixXd t(2, 2);
    t << 0.8, 0.2, 0.2, 0.8;
    // each conditioning letter appears twice so the support rule is satisfiable
    const PrunedDistribution cond = pruned_conditional(t, {0, 0, 1, 1}, 0.3);
    const auto reference = conditionally_typical_set(t, {0, 0, 1, 1}, 0.3);
    CHECK(as_set(cond.support) == as_set(reference));
}

TEST_CASE("typical projector structure") {
    // all letters maximally mixed: the projector is spectrally flat, so its
    // overlap equals rank / 2^n; each letter appears twice so the pair window
    // forces one occurrence of each eigen-index per letter (rank 2 * 2)
    const std::vector<DensityOperator> mixed = {
        support::diag_state({0.5, 0.5}), support::diag_state({0.5, 0.5})};
    const TypicalProjector flat = state_typical_projector(mixed, {0, 1, 0, 1}, 0.2);
    CHECK(flat.stats.rank == 4);
    CHECK(flat.stats.overlap ==
          doctest::Approx(static_cast<double>(flat.stats.rank) / 16.0).epsilon(1e-10));
    CHECK(flat.stats.log2_rank ==
          doctest::Approx(std::log2(static_cast<double>(flat.stats.rank))).epsilon(1e-12));

    // pure letters: rank-one projector equal to the word state itself
    const std::vector<DensityOperator> pures = {support::pure_ket(2, 0),
                                                support::pure_ket(2, 1)};
    const TypicalProjector pure = state_typical_projector(pures, {0, 1, 1}, 0.4);
    CHECK(pure.stats.rank == 1);
    CHECK(pure.stats.overlap == doctest::Approx(1.0).epsilon(1e-10));

    // idempotence and hermiticity on a generic instance
    rng::Stream st = rng::stream(31, {1});
    const std::vector<DensityOperator> generic = {support::random_density(2, st),
                                                  support::random_density(2, st)};
    const TypicalProjector proj = state_typical_projector(generic, {0, 1, 0, 1}, 0.25);
    const Operator& pmat = proj.projector;
    CHECK((pmat * pmat - pmat).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((pmat - pmat.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(proj.stats.lambda_max <= 1.0 + 1e-12);
}

TEST_CASE("projector overlap grows with block length") {
    const DensityOperator rho = support::diag_state({0.25, 0.75});
    const double delta = 0.3;
    // single-letter family; constant conditioning word of matching length.
    // Exact combinatorial values: overlap = sum_{k in window} C(n,k) .75^{n-k} .25^k
    const std::vector<double> expected = {0.375, 0.6328125, 0.7844238, 0.8725891};
    double prev = 0.0, prev_rate = 0.0;
    std::size_t step = 0;
    for (int n : {2, 4, 6, 8}) {
        const Word word(static_cast<std::size_t>(n), 0);
        const TypicalProjector proj = state_typical_projector({rho}, word, delta);
        CHECK(proj.stats.overlap == doctest::Approx(expected[step]).epsilon(1e-6));
        CHECK(proj.stats.overlap > prev);
        // the miss probability 1 - overlap decays at an improving rate, the
        // measured form of the exponential-overlap guarantee
        const double rate = -std::log2(1.0 - proj.stats.overlap) / n;
        CHECK(rate > prev_rate);
        prev = proj.stats.overlap;
        prev_rate = rate;
        ++step;
    }
    CHECK(prev > 0.85);  // n = 8 already concentrates
}

TEST_CASE("rank and eigenvalue surrogates tighten as delta shrinks") {
    // diag(0.25, 0.75) at n = 8: the count window over the smaller eigenvalue
    // is k in {1..4} at delta = 0.3 and exactly k = 2 at delta = 0.1, so rank
    // and lambda_max have closed combinatorial forms.
    const DensityOperator rho = support::diag_state({0.25, 0.75});
    const Word word(8, 0);
    const double n = 8.0;
    const TypicalProjector wide = state_typical_projector({rho}, word, 0.3);
    const TypicalProjector narrow = state_typical_projector({rho}, word, 0.1);

    CHECK(wide.stats.rank == 162);  // C(8,1)+C(8,2)+C(8,3)+C(8,4)
    CHECK(narrow.stats.rank == 28);
    CHECK(wide.stats.lambda_max ==
          doctest::Approx(std::pow(0.75, 7) * 0.25).epsilon(1e-12));
    CHECK(narrow.stats.lambda_max ==
          doctest::Approx(std::pow(0.75, 6) * 0.0625).epsilon(1e-12));
    CHECK(wide.entropy_rate == doctest::Approx(binary_entropy(0.25)).epsilon(1e-12));

    // measured slacks in the subspace-size and eigenvalue bounds:
    //   rank <= 2^{n (S + slack_rank)},  lambda_max <= 2^{-n (S - slack_eig)}
    auto slack_rank = [&](const TypicalProjector& p) {
        return p.stats.log2_rank / n - p.entropy_rate;
    };
    auto slack_eig = [&](const TypicalProjector& p) {
        return p.entropy_rate + std::log2(p.stats.lambda_max) / n;
    };
    CHECK(slack_rank(narrow) < slack_rank(wide));
    CHECK(slack_eig(narrow) < slack_eig(wide));
    CHECK(slack_eig(narrow) >= -1e-12);  // exact type is attainable at n = 8
    CHECK(slack_eig(narrow) <= 1e-12);
    CHECK(narrow.stats.overlap <= wide.stats.overlap + 1e-12);
    CHECK(wide.stats.overlap <= 1.0 + 1e-12);
}

TEST_CASE("conditional projector kinds") {
    rng::Stream st = rng::stream(31, {2});
    const CqChannel w = support::random_cq(2, 2, st, 0.05);
    Eigen::MatrixXd r(2, 2);
    r << 0.5, 0.5, 0.5, 0.5;
    const Word x_word = {0, 1, 0, 1};
    const Word y_word = {0, 1, 1, 0};

    const TypicalProjector cond =
        channel_conditional_projector(w.outputs, x_word, y_word, 0.3);
    CHECK(cond.kind == ProjectorKind::Conditional);
    CHECK(cond.n == 4);
    // with r supplied the y-word must be conditionally typical for r
    CHECK_NOTHROW(channel_conditional_projector(w.outputs, x_word, y_word, 0.3, r));
    Eigen::MatrixXd deterministic(2, 2);
    deterministic << 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(channel_conditional_projector(w.outputs, x_word, {1, 0, 1, 0}, 0.3,
                                                  deterministic),
                    validation_error);

    const TypicalProjector total = total_conditional_projector(w.outputs, r, x_word, 0.3);
    CHECK(total.kind == ProjectorKind::TotalConditional);
    // the total projector acts on the averaged letter states: overlap of the
    // average word state is positive and at most one
    std::vector<DensityOperator> averaged;
    for (std::size_t x = 0; x < 2; ++x) {
        Operator acc = 0.5 * w.outputs[0].mat + 0.5 * w.outputs[1].mat;
        averaged.push_back(DensityOperator::trusted(acc));
    }
    const double overlap = projector_overlap(total, averaged, x_word);
    CHECK(overlap > 0.0);
    CHECK(overlap <= 1.0 + 1e-10);

    // generic front-end dispatch agrees with the specific builders
    ProjectorConditioning conditioning;
    conditioning.r = r;
    conditioning.y_word = y_word;
    const TypicalProjector via_front =
        typical_projector(w.outputs, x_word, 0.3, ProjectorKind::Conditional, conditioning);
    CHECK((via_front.projector - cond.projector).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projector_overlap matches a direct trace") {
    rng::Stream st = rng::stream(31, {3});
    const std::vector<DensityOperator> states = {support::random_density(2, st),
                                                 support::random_density(2, st)};
    const Word word = {0, 1, 1};
    const TypicalProjector proj = state_typical_projector(states, word, 0.4);
    DensityOperator state = states[0];
    state = tensor(state, states[1]);
    state = tensor(state, states[1]);
    const double direct = (proj.projector * state.mat).trace().real();
    CHECK(projector_overlap(proj, states, word) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(proj.stats.overlap == doctest::Approx(direct).epsilon(1e-10));
}
