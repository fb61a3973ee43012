#include "qbclab/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qbclab {

int TypeVector::n() const {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    return static_cast<int>(total);
}

std::uint64_t count_types(std::size_t alphabet, int n) {
    if (alphabet == 0 || n < 0) throw domain_error("count_types: bad arguments");
    // C(n + |X| - 1, |X| - 1), overflow-guarded
    std::uint64_t result = 1;
    std::uint64_t k = alphabet - 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        std::uint64_t num = static_cast<std::uint64_t>(n) + i;
        if (result > (std::numeric_limits<std::uint64_t>::max() / num))
            throw guard_error("count_types: overflow");
        result = result * num / i;  // exact: prefix products of C are integers
    }
    return result;
}

std::vector<TypeVector> enumerate_types(std::size_t alphabet, int n) {
    std::uint64_t total = count_types(alphabet, n);
    if (total > kTypeGuard)
        throw guard_error("enumerate_types: " + std::to_string(total) +
                          " types exceeds guard " + std::to_string(kTypeGuard));
    std::vector<TypeVector> out;
    out.reserve(total);
    std::vector<std::int64_t> cur(alphabet, 0);
    // lexicographic recursion over compositions of n
    struct Rec {
        std::size_t alphabet;
        int n;
        std::vector<TypeVector>& out;
        std::vector<std::int64_t>& cur;
        void go(std::size_t pos, int rest) {
            if (pos + 1 == alphabet) {
                cur[pos] = rest;
                out.push_back(TypeVector{cur});
                return;
            }
            for (int c = 0; c <= rest; ++c) {
                cur[pos] = c;
                go(pos + 1, rest - c);
            }
        }
    } rec{alphabet, n, out, cur};
    rec.go(0, n);
    return out;
}

TypeVector word_type(const Word& w, std::size_t alphabet) {
    TypeVector t;
    t.counts.assign(alphabet, 0);
    for (auto letter : w) {
        if (letter >= alphabet) throw validation_error("word_type: letter outside alphabet");
        ++t.counts[letter];
    }
    return t;
}

namespace {

void check_word_space(std::size_t alphabet, int n) {
    if (alphabet == 0 || n <= 0) throw domain_error("word enumeration: bad arguments");
    double total = std::pow(static_cast<double>(alphabet), n);
    if (total > static_cast<double>(kWordGuard))
        throw guard_error("word enumeration: |X|^n exceeds guard 1e7");
}

// invoke f on every word of length n over {0..alphabet-1}
template <typename F>
void for_each_word(std::size_t alphabet, int n, F&& f) {
    Word w(static_cast<std::size_t>(n), 0);
    for (;;) {
        f(w);
        int pos = n - 1;
        while (pos >= 0) {
            if (++w[static_cast<std::size_t>(pos)] < alphabet) break;
            w[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
}

void validate_distribution(const std::vector<double>& p, const char* where) {
    if (p.empty()) throw validation_error(std::string(where) + ": empty distribution");
    double sum = 0.0;
    for (double x : p) {
        if (x < -1e-12) throw validation_error(std::string(where) + ": negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw validation_error(std::string(where) + ": probabilities sum to " +
                               std::to_string(sum));
}

void validate_stochastic(const Eigen::MatrixXd& t, const char* where) {
    if (t.rows() == 0 || t.cols() == 0)
        throw validation_error(std::string(where) + ": empty stochastic matrix");
    for (Eigen::Index x = 0; x < t.rows(); ++x) {
        double sum = 0.0;
        for (Eigen::Index y = 0; y < t.cols(); ++y) {
            if (t(x, y) < -1e-12)
                throw validation_error(std::string(where) + ": negative entry in row " +
                                       std::to_string(x));
            sum += t(x, y);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw validation_error(std::string(where) + ": row " + std::to_string(x) +
                                   " sums to " + std::to_string(sum));
    }
}

}  // namespace

std::vector<Word> typical_set(const std::vector<double>& p, int n, double delta) {
    validate_distribution(p, "typical_set");
    if (delta < 0.0) throw domain_error("typical_set: negative delta");
    check_word_space(p.size(), n);
    const std::size_t a = p.size();
    std::vector<Word> out;
    for_each_word(a, n, [&](const Word& w) {
        std::vector<std::int64_t> counts(a, 0);
        for (auto letter : w) ++counts[letter];
        for (std::size_t x = 0; x < a; ++x) {
            const bool pzero = p[x] <= 0.0;
            if (pzero != (counts[x] == 0)) return;  // support biconditional
            if (std::abs(static_cast<double>(counts[x]) / n - p[x]) > delta) return;
        }
        out.push_back(w);
    });
    return out;
}

std::vector<Word> conditionally_typical_set(const Eigen::MatrixXd& t, const Word& x_word,
                                            double delta) {
    validate_stochastic(t, "conditionally_typical_set");
    if (delta < 0.0) throw domain_error("conditionally_typical_set: negative delta");
    if (x_word.empty()) throw validation_error("conditionally_typical_set: empty word");
    const int n = static_cast<int>(x_word.size());
    const std::size_t ax = static_cast<std::size_t>(t.rows());
    const std::size_t ay = static_cast<std::size_t>(t.cols());
    std::vector<std::int64_t> nx(ax, 0);
    for (auto letter : x_word) {
        if (letter >= ax)
            throw validation_error("conditionally_typical_set: x letter outside alphabet");
        ++nx[letter];
    }
    check_word_space(ay, n);
    const double nd = static_cast<double>(n) * delta;
    std::vector<Word> out;
    std::vector<std::int64_t> joint(ax * ay, 0);
    for_each_word(ay, n, [&](const Word& y) {
        std::fill(joint.begin(), joint.end(), 0);
        for (int i = 0; i < n; ++i) ++joint[x_word[static_cast<std::size_t>(i)] * ay + y[static_cast<std::size_t>(i)]];
        for (std::size_t x = 0; x < ax; ++x) {
            if (nx[x] == 0) continue;  // support clause quantifies over present letters
            for (std::size_t yy = 0; yy < ay; ++yy) {
                const std::int64_t nxy = joint[x * ay + yy];
                const bool tzero = t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(yy)) <= 0.0;
                if (tzero != (nxy == 0)) return;
                const double target = t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(yy)) *
                                      static_cast<double>(nx[x]);
                if (std::abs(static_cast<double>(nxy) - target) > nd) return;
            }
        }
        out.push_back(y);
    });
    return out;
}

const Word& PrunedDistribution::sample(rng::Stream& stream) const {
    if (support.empty()) throw validation_error("PrunedDistribution: empty support");
    return support[stream.discrete(cumulative)];
}

namespace {

PrunedDistribution assemble_pruned(std::vector<Word> support, std::vector<double> iid_weights,
                                   int n, const char* where) {
    if (support.empty())
        throw validation_error(std::string(where) + ": typical set is empty");
    double mass = 0.0;
    for (double w : iid_weights) mass += w;
    if (mass <= 0.0)
        throw validation_error(std::string(where) + ": typical set has zero mass");
    PrunedDistribution out;
    out.n = n;
    out.support = std::move(support);
    out.prob.resize(iid_weights.size());
    out.cumulative.resize(iid_weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < iid_weights.size(); ++i) {
        out.prob[i] = iid_weights[i] / mass;
        acc += out.prob[i];
        out.cumulative[i] = acc;
    }
    out.iid_mass = mass;
    return out;
}

}  // namespace

PrunedDistribution pruned(const std::vector<double>& p, int n, double delta) {
    std::vector<Word> set = typical_set(p, n, delta);
    std::vector<double> weights;
    weights.reserve(set.size());
    for (const Word& w : set) {
        double prod = 1.0;
        for (auto letter : w) prod *= p[letter];
        weights.push_back(prod);
    }
    return assemble_pruned(std::move(set), std::move(weights), n, "pruned");
}

PrunedDistribution pruned_conditional(const Eigen::MatrixXd& t, const Word& x_word, double delta) {
    std::vector<Word> set = conditionally_typical_set(t, x_word, delta);
    std::vector<double> weights;
    weights.reserve(set.size());
    for (const Word& y : set) {
        double prod = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            prod *= t(static_cast<Eigen::Index>(x_word[i]), static_cast<Eigen::Index>(y[i]));
        weights.push_back(prod);
    }
    return assemble_pruned(std::move(set), std::move(weights), static_cast<int>(x_word.size()),
                           "pruned_conditional");
}

namespace {

struct PatternDecomposition {
    Word pattern;                    // per-position compressed pattern ids
    std::vector<Spectral> spec;      // per pattern id, descending eigenvalues
    std::vector<double> weight;      // pattern-id frequency in the word
};

// Compress raw per-position pattern codes to first-appearance ids and
// eigendecompose the state attached to each id once. Distinct codes stay
// distinct even when their states coincide: the conditioning is on the
// pattern, not on the state value.
PatternDecomposition decompose(const std::vector<std::uint32_t>& codes,
                               const std::vector<const DensityOperator*>& states) {
    PatternDecomposition out;
    const std::size_t n = codes.size();
    out.pattern.resize(n);
    std::vector<std::uint32_t> rep_codes;
    std::vector<const DensityOperator*> reps;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t id = rep_codes.size();
        for (std::size_t k = 0; k < rep_codes.size(); ++k) {
            if (rep_codes[k] == codes[i]) {
                id = k;
                break;
            }
        }
        if (id == rep_codes.size()) {
            rep_codes.push_back(codes[i]);
            reps.push_back(states[i]);
        }
        out.pattern[i] = static_cast<std::uint16_t>(id);
    }
    out.spec.reserve(reps.size());
    for (const DensityOperator* st : reps) out.spec.push_back(spectral(st->mat));
    out.weight.assign(reps.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) out.weight[out.pattern[i]] += 1.0 / static_cast<double>(n);
    return out;
}

TypicalProjector build_projector(const PatternDecomposition& pd, double delta,
                                 ProjectorKind kind) {
    const int n = static_cast<int>(pd.pattern.size());
    const Eigen::Index d = pd.spec.front().eigenvectors.rows();
    for (const Spectral& s : pd.spec)
        if (s.eigenvectors.rows() != d)
            throw dimension_error("typical_projector: letter states on different spaces");

    // spectral law: row per pattern id, clipped eigenvalues
    Eigen::MatrixXd law(static_cast<Eigen::Index>(pd.spec.size()), d);
    for (std::size_t c = 0; c < pd.spec.size(); ++c)
        for (Eigen::Index k = 0; k < d; ++k) {
            double l = pd.spec[c].eigenvalues(k);
            law(static_cast<Eigen::Index>(c), k) = l < tol::kEntropyEigClip ? 0.0 : l;
        }

    std::vector<Word> index_set = conditionally_typical_set(law, pd.pattern, delta);

    std::size_t full_dim = 1;
    for (int i = 0; i < n; ++i) {
        full_dim *= static_cast<std::size_t>(d);
        check_dim(full_dim, "typical_projector");
    }

    TypicalProjector out;
    out.kind = kind;
    out.n = n;
    out.delta = delta;
    for (std::size_t c = 0; c < pd.spec.size(); ++c) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            double l = law(static_cast<Eigen::Index>(c), k);
            if (l > 0.0) s -= l * std::log2(l);
        }
        out.entropy_rate += pd.weight[c] * s;
    }

    // exact index-space statistics
    out.stats.rank = static_cast<std::int64_t>(index_set.size());
    if (!index_set.empty()) {
        out.stats.log2_rank = std::log2(static_cast<double>(index_set.size()));
        for (const Word& idx : index_set) {
            double prod = 1.0;
            for (int i = 0; i < n; ++i)
                prod *= law(static_cast<Eigen::Index>(pd.pattern[static_cast<std::size_t>(i)]),
                            static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
            out.stats.overlap += prod;
            out.stats.lambda_max = std::max(out.stats.lambda_max, prod);
        }
    }

    // materialize: U diag(indicator) U^dagger with U = (x)_i V_{pattern_i}
    Operator u = Operator::Identity(1, 1);
    for (int i = 0; i < n; ++i) u = tensor(u, pd.spec[pd.pattern[static_cast<std::size_t>(i)]].eigenvectors);
    Eigen::VectorXd indicator = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full_dim));
    for (const Word& idx : index_set) {
        std::size_t flat = 0;
        for (int i = 0; i < n; ++i)
            flat = flat * static_cast<std::size_t>(d) + idx[static_cast<std::size_t>(i)];
        indicator(static_cast<Eigen::Index>(flat)) = 1.0;
    }
    out.projector = u * indicator.asDiagonal() * u.adjoint();
    return out;
}

}  // namespace

TypicalProjector state_typical_projector(const std::vector<DensityOperator>& states_by_letter,
                                         const Word& x_word, double delta) {
    if (states_by_letter.empty() || x_word.empty())
        throw validation_error("state_typical_projector: empty inputs");
    std::vector<std::uint32_t> codes;
    std::vector<const DensityOperator*> per_position;
    codes.reserve(x_word.size());
    per_position.reserve(x_word.size());
    for (auto letter : x_word) {
        if (letter >= states_by_letter.size())
            throw validation_error("state_typical_projector: letter outside family");
        codes.push_back(letter);
        per_position.push_back(&states_by_letter[letter]);
    }
    return build_projector(decompose(codes, per_position), delta, ProjectorKind::Unconditional);
}

TypicalProjector channel_conditional_projector(const std::vector<DensityOperator>& outputs_by_y,
                                               const Word& x_word, const Word& y_word,
                                               double delta,
                                               const std::optional<Eigen::MatrixXd>& r) {
    if (outputs_by_y.empty()) throw validation_error("channel_conditional_projector: no outputs");
    if (x_word.size() != y_word.size() || x_word.empty())
        throw validation_error("channel_conditional_projector: word length mismatch");
    if (r) {
        std::vector<Word> admissible = conditionally_typical_set(*r, x_word, delta);
        if (std::find(admissible.begin(), admissible.end(), y_word) == admissible.end())
            throw validation_error(
                "channel_conditional_projector: y_word not conditionally typical");
    }
    // the conditioning pattern is the (x, y) pair sequence; the state at each
    // position depends on y alone
    std::vector<std::uint32_t> codes;
    std::vector<const DensityOperator*> per_position;
    codes.reserve(x_word.size());
    per_position.reserve(x_word.size());
    for (std::size_t i = 0; i < x_word.size(); ++i) {
        if (y_word[i] >= outputs_by_y.size())
            throw validation_error("channel_conditional_projector: y letter outside family");
        codes.push_back(static_cast<std::uint32_t>(x_word[i]) *
                            static_cast<std::uint32_t>(outputs_by_y.size()) +
                        y_word[i]);
        per_position.push_back(&outputs_by_y[y_word[i]]);
    }
    return build_projector(decompose(codes, per_position), delta, ProjectorKind::Conditional);
}

TypicalProjector total_conditional_projector(const std::vector<DensityOperator>& outputs_by_y,
                                             const Eigen::MatrixXd& r, const Word& x_word,
                                             double delta) {
    if (outputs_by_y.empty()) throw validation_error("total_conditional_projector: no outputs");
    validate_stochastic(r, "total_conditional_projector");
    if (static_cast<std::size_t>(r.cols()) != outputs_by_y.size())
        throw dimension_error("total_conditional_projector: r columns != |Y|");
    const Eigen::Index d = outputs_by_y.front().dim();
    std::vector<DensityOperator> averaged;
    averaged.reserve(static_cast<std::size_t>(r.rows()));
    for (Eigen::Index x = 0; x < r.rows(); ++x) {
        Operator acc = Operator::Zero(d, d);
        for (Eigen::Index y = 0; y < r.cols(); ++y)
            if (r(x, y) > 0.0) acc += r(x, y) * outputs_by_y[static_cast<std::size_t>(y)].mat;
        averaged.push_back(DensityOperator::trusted(std::move(acc)));
    }
    TypicalProjector out = state_typical_projector(averaged, x_word, delta);
    out.kind = ProjectorKind::TotalConditional;
    return out;
}

TypicalProjector typical_projector(const std::vector<DensityOperator>& states, const Word& x_word,
                                   double delta, ProjectorKind kind,
                                   const std::optional<ProjectorConditioning>& conditioning) {
    switch (kind) {
        case ProjectorKind::Unconditional:
            return state_typical_projector(states, x_word, delta);
        case ProjectorKind::Conditional: {
            if (!conditioning || !conditioning->y_word)
                throw validation_error("typical_projector: conditional kind needs y_word");
            return channel_conditional_projector(states, x_word, *conditioning->y_word, delta,
                                                 conditioning->r);
        }
        case ProjectorKind::TotalConditional: {
            if (!conditioning || !conditioning->r)
                throw validation_error("typical_projector: total-conditional kind needs r");
            return total_conditional_projector(states, *conditioning->r, x_word, delta);
        }
    }
    throw domain_error("typical_projector: unknown kind");
}

double projector_overlap(const TypicalProjector& proj,
                         const std::vector<DensityOperator>& states_by_letter, const Word& word) {
    Operator state = Operator::Identity(1, 1);
    for (auto letter : word) {
        if (letter >= states_by_letter.size())
            throw validation_error("projector_overlap: letter outside family");
        state = tensor(state, states_by_letter[letter].mat);
    }
    if (state.rows() != proj.projector.rows())
        throw dimension_error("projector_overlap: dimension mismatch");
    return (proj.projector * state).trace().real();
}

}  // namespace qbclab
