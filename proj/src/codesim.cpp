// Finite-blocklength simulation of universal superposition codes: codebook
// sampling from pruned typical laws, pretty-good / threshold decoders built
// against the uniform member average, two-stage wiretap composition, exact
// error and leakage bookkeeping, operator-sampling concentration checks, and
// the doubly compressed eavesdropper outputs used by the security analysis.

#include "qbclab/codesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qbclab/errors.hpp"

namespace qbclab {

namespace {

constexpr double kEigKeep = 1e-12;         // strict-positive-part cutoff
constexpr std::size_t kInnerGuard = 100000;  // inner codewords per outer word
constexpr std::size_t kPrePass = 100000;     // covering mean-estimate samples

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Operator hermitized(const Operator& m) { return 0.5 * (m + m.adjoint()); }

double real_trace_product(const Operator& a, const Operator& b) {
    // tr(a b) without forming the product
    return (a.transpose().cwiseProduct(b)).sum().real();
}

}  // namespace

SuperpositionCodebook sample_superposition_codebook(const Eigen::VectorXd& q,
                                                    const Eigen::MatrixXd& r,
                                                    const CodebookLayout& layout, int n,
                                                    double delta, std::uint64_t seed) {
    if (layout.m0 == 0 || layout.j == 0 || layout.l_rand == 0)
        throw validation_error("sample_superposition_codebook: empty layout layer");
    if (q.size() != r.rows())
        throw dimension_error("sample_superposition_codebook: q/r layer mismatch");
    if (layout.j > kInnerGuard / layout.l_rand)
        throw capacity_error("sample_superposition_codebook: inner codebook too large");

    SuperpositionCodebook cb;
    cb.layout = layout;
    cb.n = n;
    cb.delta = delta;

    const PrunedDistribution outer_law = pruned(to_vector(q), n, delta);
    rng::Stream outer_stream = rng::stream(seed, {0x6f75746572ull});
    cb.outer.reserve(layout.m0);
    for (std::size_t m = 0; m < layout.m0; ++m) cb.outer.push_back(outer_law.sample(outer_stream));

    cb.inner.resize(layout.m0);
    const std::size_t inner_count = layout.j * layout.l_rand;
    for (std::size_t m = 0; m < layout.m0; ++m) {
        const PrunedDistribution inner_law = pruned_conditional(r, cb.outer[m], delta);
        rng::Stream inner_stream = rng::stream(seed, {0x696e6e6572ull, m});
        cb.inner[m].reserve(inner_count);
        for (std::size_t i = 0; i < inner_count; ++i)
            cb.inner[m].push_back(inner_law.sample(inner_stream));
    }
    return cb;
}

SuperpositionCodebook prefix_randomization(const SuperpositionCodebook& cb, std::size_t l_rand) {
    if (l_rand == 0 || l_rand > cb.layout.l_rand)
        throw validation_error("prefix_randomization: l_rand outside the sampled range");
    SuperpositionCodebook out;
    out.layout = cb.layout;
    out.layout.l_rand = l_rand;
    out.n = cb.n;
    out.delta = cb.delta;
    out.outer = cb.outer;
    out.inner.resize(cb.outer.size());
    for (std::size_t m = 0; m < cb.outer.size(); ++m) {
        out.inner[m].reserve(cb.layout.j * l_rand);
        for (std::size_t jj = 0; jj < cb.layout.j; ++jj)
            for (std::size_t l = 0; l < l_rand; ++l)
                out.inner[m].push_back(cb.inner[m][jj * cb.layout.l_rand + l]);
    }
    return out;
}

Povm build_decoder(const std::vector<DensityOperator>& codeword_states, DecoderMethod method,
                   double hn_threshold) {
    if (codeword_states.empty()) throw validation_error("build_decoder: no codeword states");
    const Eigen::Index d = codeword_states.front().mat.rows();
    for (const auto& s : codeword_states)
        if (s.mat.rows() != d) throw dimension_error("build_decoder: mixed dimensions");

    std::vector<Operator> elems;
    elems.reserve(codeword_states.size() + 1);

    if (method == DecoderMethod::Pgm) {
        Operator gram = Operator::Zero(d, d);
        for (const auto& s : codeword_states) gram += s.mat;
        const Operator root = operator_power(gram, -0.5);
        Operator total = Operator::Zero(d, d);
        for (const auto& s : codeword_states) {
            Operator lambda = hermitized(root * s.mat * root);
            total += lambda;
            elems.push_back(std::move(lambda));
        }
        elems.push_back(hermitized(Operator::Identity(d, d) - total));
    } else {
        if (hn_threshold <= 0.0)
            throw validation_error("build_decoder: threshold must be positive");
        Operator mean = Operator::Zero(d, d);
        for (const auto& s : codeword_states) mean += s.mat;
        mean /= static_cast<double>(codeword_states.size());
        std::vector<Operator> parts;
        Operator sum = Operator::Zero(d, d);
        for (const auto& s : codeword_states) {
            const Spectral sp = spectral(s.mat - hn_threshold * mean);
            Operator proj = Operator::Zero(d, d);
            for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k)
                if (sp.eigenvalues(k) > kEigKeep)
                    proj += sp.eigenvectors.col(k) * sp.eigenvectors.col(k).adjoint();
            sum += proj;
            parts.push_back(std::move(proj));
        }
        const Operator root = operator_power(sum, -0.5);
        Operator total = Operator::Zero(d, d);
        for (const auto& p : parts) {
            Operator lambda = hermitized(root * p * root);
            total += lambda;
            elems.push_back(std::move(lambda));
        }
        elems.push_back(hermitized(Operator::Identity(d, d) - total));
    }
    return Povm::validated(std::move(elems));
}

double average_error(const std::vector<DensityOperator>& true_states, const Povm& decoder) {
    const std::size_t m = true_states.size();
    if (decoder.elements.size() != m + 1)
        throw dimension_error("average_error: decoder does not match the message count");
    double success = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        success += real_trace_product(decoder.elements[k], true_states[k].mat);
    return 1.0 - success / static_cast<double>(m);
}

CqChannel compose_letterwise(const CqChannel& w, const Eigen::MatrixXd& t) {
    if (static_cast<std::size_t>(t.cols()) != w.alphabet())
        throw dimension_error("compose_letterwise: t columns must index the channel alphabet");
    std::vector<DensityOperator> outputs;
    outputs.reserve(static_cast<std::size_t>(t.rows()));
    for (Eigen::Index y = 0; y < t.rows(); ++y) {
        Operator acc = Operator::Zero(static_cast<Eigen::Index>(w.dim),
                                      static_cast<Eigen::Index>(w.dim));
        for (Eigen::Index x = 0; x < t.cols(); ++x)
            if (t(y, x) > 0.0) acc += t(y, x) * w.outputs[static_cast<std::size_t>(x)].mat;
        outputs.push_back(DensityOperator::validated(std::move(acc)));
    }
    return CqChannel::validated(w.dim, std::move(outputs));
}

Povm compose_superposition_decoder(const Povm& outer, const std::vector<Povm>& inner,
                                   const CodebookLayout& layout) {
    if (outer.elements.size() != layout.m0 + 1)
        throw dimension_error("compose_superposition_decoder: outer outcome count");
    if (inner.size() != layout.m0)
        throw dimension_error("compose_superposition_decoder: one inner POVM per outer word");
    const std::size_t per_message = layout.j * layout.l_rand;
    const Eigen::Index d = outer.elements.front().rows();

    std::vector<Operator> elems;
    elems.reserve(layout.m0 * layout.j + 1);
    Operator total = Operator::Zero(d, d);
    for (std::size_t m = 0; m < layout.m0; ++m) {
        if (inner[m].elements.size() != per_message + 1)
            throw dimension_error("compose_superposition_decoder: inner outcome count");
        const Operator root = operator_power(outer.elements[m], 0.5);
        for (std::size_t jj = 0; jj < layout.j; ++jj) {
            Operator acc = Operator::Zero(d, d);
            for (std::size_t l = 0; l < layout.l_rand; ++l)
                acc += inner[m].elements[jj * layout.l_rand + l];
            Operator composed = hermitized(root * acc * root);
            total += composed;
            elems.push_back(std::move(composed));
        }
    }
    elems.push_back(hermitized(Operator::Identity(d, d) - total));
    return Povm::validated(std::move(elems));
}

WiretapCode build_wiretap_code(SuperpositionCodebook codebook, const Eigen::MatrixXd& t,
                               const Povm& outer_bob, const std::vector<Povm>& inner_bob,
                               const Povm& outer_eve) {
    if (outer_eve.elements.size() != codebook.layout.m0 + 1)
        throw dimension_error("build_wiretap_code: eavesdropper outcome count");
    WiretapCode code;
    code.codebook = std::move(codebook);
    code.t = t;
    code.bob = compose_superposition_decoder(outer_bob, inner_bob, code.codebook.layout);
    code.eve = outer_eve;
    return code;
}

namespace {

// rho_g^{m0,jj} = (1/L) sum_l V^{(x)n}(y_{m0,jj,l}) for the composed channel V.
std::vector<std::vector<DensityOperator>> message_states(const SuperpositionCodebook& cb,
                                                         const CqChannel& composed) {
    const std::size_t l_rand = cb.layout.l_rand;
    std::vector<std::vector<DensityOperator>> out(cb.layout.m0);
    for (std::size_t m = 0; m < cb.layout.m0; ++m) {
        out[m].reserve(cb.layout.j);
        for (std::size_t jj = 0; jj < cb.layout.j; ++jj) {
            Operator acc;
            for (std::size_t l = 0; l < l_rand; ++l) {
                const Operator rho = apply_word(composed, cb.inner[m][jj * l_rand + l]).mat;
                if (l == 0)
                    acc = rho;
                else
                    acc += rho;
            }
            out[m].push_back(DensityOperator::trusted(acc / static_cast<double>(l_rand)));
        }
    }
    return out;
}

}  // namespace

double wiretap_error_bob(const WiretapCode& code, const CqqBroadcastChannel& member) {
    const CqChannel composed = compose_letterwise(marginal(member, Receiver::B), code.t);
    const auto states = message_states(code.codebook, composed);
    const std::size_t j = code.codebook.layout.j;
    double success = 0.0;
    for (std::size_t m = 0; m < code.codebook.layout.m0; ++m)
        for (std::size_t jj = 0; jj < j; ++jj)
            success += real_trace_product(code.bob.elements[m * j + jj], states[m][jj].mat);
    return 1.0 - success / static_cast<double>(code.codebook.layout.m0 * j);
}

double wiretap_error_eve(const WiretapCode& code, const CqqBroadcastChannel& member) {
    const CqChannel composed = compose_letterwise(marginal(member, Receiver::E), code.t);
    const auto states = message_states(code.codebook, composed);
    const std::size_t j = code.codebook.layout.j;
    double success = 0.0;
    for (std::size_t m = 0; m < code.codebook.layout.m0; ++m)
        for (std::size_t jj = 0; jj < j; ++jj)
            success += real_trace_product(code.eve.elements[m], states[m][jj].mat);
    return 1.0 - success / static_cast<double>(code.codebook.layout.m0 * j);
}

LeakageReport wiretap_leakage(const WiretapCode& code, const CqqBroadcastChannel& member) {
    const CqChannel composed = compose_letterwise(marginal(member, Receiver::E), code.t);
    const auto states = message_states(code.codebook, composed);
    const std::size_t m0 = code.codebook.layout.m0;
    const std::size_t j = code.codebook.layout.j;
    const Eigen::Index d = states.front().front().mat.rows();
    check_dim(static_cast<std::size_t>(d) * j, "wiretap_leakage");

    LeakageReport report;
    std::vector<double> weights(m0, 1.0 / static_cast<double>(m0));
    std::vector<DensityOperator> blocks;
    blocks.reserve(m0);
    for (std::size_t m = 0; m < m0; ++m) {
        Operator mean = Operator::Zero(d, d);
        for (std::size_t jj = 0; jj < j; ++jj) mean += states[m][jj].mat;
        mean /= static_cast<double>(j);
        for (std::size_t jj = 0; jj < j; ++jj)
            report.max_deviation =
                std::max(report.max_deviation, trace_norm(states[m][jj].mat - mean));
        Operator block = Operator::Zero(static_cast<Eigen::Index>(j) * d,
                                        static_cast<Eigen::Index>(j) * d);
        for (std::size_t jj = 0; jj < j; ++jj)
            block.block(static_cast<Eigen::Index>(jj) * d, static_cast<Eigen::Index>(jj) * d, d,
                        d) = states[m][jj].mat / static_cast<double>(j);
        blocks.push_back(DensityOperator::trusted(std::move(block)));
    }
    report.leakage = conditional_mutual_information(
        Ensemble::validated(std::move(weights), std::move(blocks)), j,
        static_cast<std::size_t>(d));
    return report;
}

std::vector<std::pair<Word, double>> encoder_distribution(const WiretapCode& code,
                                                          std::size_t m0, std::size_t jj) {
    const auto& layout = code.codebook.layout;
    if (m0 >= layout.m0 || jj >= layout.j)
        throw validation_error("encoder_distribution: message index out of range");
    const std::size_t nx = static_cast<std::size_t>(code.t.cols());
    const int n = code.codebook.n;

    std::map<Word, double> acc;
    for (std::size_t l = 0; l < layout.l_rand; ++l) {
        const Word& y = code.codebook.inner[m0][jj * layout.l_rand + l];
        // per-position supports of t(.|y_i)
        std::vector<std::vector<std::uint16_t>> support(static_cast<std::size_t>(n));
        std::size_t total = 1;
        for (int i = 0; i < n; ++i) {
            auto& s = support[static_cast<std::size_t>(i)];
            for (std::size_t x = 0; x < nx; ++x)
                if (code.t(static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]),
                           static_cast<Eigen::Index>(x)) > 0.0)
                    s.push_back(static_cast<std::uint16_t>(x));
            if (s.empty()) throw validation_error("encoder_distribution: empty row support");
            if (total > kWordGuard / s.size())
                throw capacity_error("encoder_distribution: support enumeration too large");
            total *= s.size();
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        for (std::size_t k = 0; k < total; ++k) {
            Word x(static_cast<std::size_t>(n));
            double p = 1.0 / static_cast<double>(layout.l_rand);
            for (int i = 0; i < n; ++i) {
                x[static_cast<std::size_t>(i)] =
                    support[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
                p *= code.t(static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]),
                            static_cast<Eigen::Index>(x[static_cast<std::size_t>(i)]));
            }
            acc[x] += p;
            for (int i = n; i-- > 0;) {
                if (++idx[static_cast<std::size_t>(i)] <
                    support[static_cast<std::size_t>(i)].size())
                    break;
                idx[static_cast<std::size_t>(i)] = 0;
            }
        }
    }
    return std::vector<std::pair<Word, double>>(acc.begin(), acc.end());
}

CoveringSampler bernoulli_diag_sampler(std::size_t dim, double p, double eps,
                                       std::uint64_t seed) {
    if (dim == 0) throw validation_error("bernoulli_diag_sampler: empty dimension");
    if (p < 0.0 || p > 1.0) throw domain_error("bernoulli_diag_sampler: p outside [0,1]");
    CoveringSampler s;
    s.dim = dim;
    s.mu = 1.0;
    s.eps = eps;
    s.sample = [dim, p, seed](std::uint64_t k) {
        rng::Stream st = rng::stream(seed, {0x636f76ull, k});
        Operator m = Operator::Zero(static_cast<Eigen::Index>(dim),
                                    static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
                st.uniform() < p ? 1.0 : 0.0;
        return m;
    };
    return s;
}

CoveringReport covering_check(const CoveringSampler& sampler,
                              const std::vector<std::size_t>& l_grid, std::size_t trials) {
    if (sampler.dim == 0 || !sampler.sample)
        throw validation_error("covering_check: sampler is not set up");
    if (sampler.eps <= 0.0 || sampler.eps >= 0.5)
        throw domain_error("covering_check: eps must lie in (0, 1/2)");
    if (sampler.mu <= 0.0) throw domain_error("covering_check: mu must be positive");
    if (l_grid.empty() || trials == 0)
        throw validation_error("covering_check: empty grid or no trials");

    const Eigen::Index d = static_cast<Eigen::Index>(sampler.dim);
    const auto draw = [&](std::uint64_t k) {
        Operator x = sampler.sample(k);
        if (x.rows() != d || x.cols() != d)
            throw validation_error("covering_check: sample has the wrong dimension");
        Eigen::SelfAdjointEigenSolver<Operator> es(hermitized(x),
                                                   Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9 ||
            es.eigenvalues().maxCoeff() > sampler.mu + 1e-9)
            throw validation_error("covering_check: draw violates 0 <= X <= mu*I");
        return x;
    };

    CoveringReport report;
    Operator mean = Operator::Zero(d, d);
    std::uint64_t counter = 0;
    for (std::size_t k = 0; k < kPrePass; ++k) mean += draw(counter++);
    mean /= static_cast<double>(kPrePass);
    {
        Eigen::SelfAdjointEigenSolver<Operator> es(hermitized(mean), Eigen::EigenvaluesOnly);
        report.mean_min_eig = es.eigenvalues().minCoeff();
    }
    report.mean_estimate = mean;
    report.hypotheses_ok = report.mean_min_eig >= sampler.eps - 0.01;

    const double log_bound_scale = 2.0 * static_cast<double>(sampler.dim);
    for (std::size_t l : l_grid) {
        if (l == 0) throw validation_error("covering_check: grid contains L = 0");
        std::size_t violations = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            Operator acc = Operator::Zero(d, d);
            for (std::size_t i = 0; i < l; ++i) acc += draw(counter++);
            acc /= static_cast<double>(l);
            if (trace_norm(acc - mean) > sampler.eps) ++violations;
        }
        CoveringPoint point;
        point.l = l;
        point.empirical = static_cast<double>(violations) / static_cast<double>(trials);
        point.bound = log_bound_scale *
                      std::exp(-static_cast<double>(l) * std::pow(sampler.eps, 3) /
                               (2.0 * static_cast<double>(sampler.dim) * sampler.mu *
                                std::log(2.0)));
        point.slack3 =
            3.0 * std::sqrt(point.empirical * (1.0 - point.empirical) /
                            static_cast<double>(trials));
        point.ok = point.empirical <= std::min(point.bound, 1.0) + point.slack3 + 1e-12;
        report.points.push_back(point);
    }
    report.decreasing = true;
    for (std::size_t i = 1; i < report.points.size(); ++i)
        if (report.points[i].empirical > report.points[i - 1].empirical + 1e-12)
            report.decreasing = false;
    report.pass = report.hypotheses_ok && report.decreasing;
    for (const auto& p : report.points) report.pass = report.pass && p.ok;
    return report;
}

namespace {

ProjectedEveOutput projected_instance(const CqChannel& eve, const Eigen::MatrixXd& r,
                                      const Word& u_word, const Word& y_word, double delta,
                                      const Operator& pi_tot) {
    const TypicalProjector cond =
        channel_conditional_projector(eve.outputs, u_word, y_word, delta, r);
    const Operator w = apply_word(eve, y_word).mat;
    const Operator a = cond.projector * w * cond.projector;

    ProjectedEveOutput out;
    out.deficit_cond = 1.0 - real_trace_product(w, cond.projector);
    out.compressed_mass = real_trace_product(a, pi_tot);
    out.q = pi_tot * a * pi_tot;
    out.lhs = trace_norm(w - out.q);
    const double tail = std::max(0.0, (1.0 - out.deficit_cond) - out.compressed_mass);
    out.rhs = std::sqrt(2.0 * std::max(0.0, out.deficit_cond)) + 2.0 * std::sqrt(tail);
    return out;
}

}  // namespace

ProjectedEveOutput projected_eve_output(const CqChannel& eve, const Eigen::MatrixXd& r,
                                        const Word& u_word, const Word& y_word, double delta) {
    const TypicalProjector total = total_conditional_projector(eve.outputs, r, u_word, delta);
    return projected_instance(eve, r, u_word, y_word, delta, total.projector);
}

Operator theta_state(const CqChannel& eve, const Eigen::MatrixXd& r, const Word& u_word,
                     double delta) {
    const TypicalProjector total = total_conditional_projector(eve.outputs, r, u_word, delta);
    const PrunedDistribution law = pruned_conditional(r, u_word, delta);
    Operator theta;
    for (std::size_t k = 0; k < law.support.size(); ++k) {
        const ProjectedEveOutput inst =
            projected_instance(eve, r, u_word, law.support[k], delta, total.projector);
        if (k == 0)
            theta = law.prob[k] * inst.q;
        else
            theta += law.prob[k] * inst.q;
    }
    return theta;
}

CodebookLayout resolve_layout(const LayoutPolicy& policy, const CompoundSet& set,
                              const FactorizedInput& input, int n) {
    const auto floor2 = [](double bits) {
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::exp2(bits) + 1e-9)));
    };
    const auto ceil2 = [](double bits) {
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(std::exp2(bits) - 1e-9)));
    };

    CodebookLayout layout;
    switch (policy.mode) {
        case LayoutPolicy::Mode::Explicit:
            layout = policy.layout;
            if (layout.m0 == 0 || layout.j == 0 || layout.l_rand == 0)
                throw validation_error("resolve_layout: empty explicit layer");
            break;
        case LayoutPolicy::Mode::Rates:
            layout.m0 = floor2(n * policy.rate_pub);
            layout.j = floor2(n * policy.rate_conf);
            layout.l_rand = ceil2(n * policy.rate_rand);
            break;
        case LayoutPolicy::Mode::Entropic: {
            EvaluationContext ctx(set, input.l, input.blocks());
            const CornerTerms terms = ctx.terms(input);
            double r_pub = std::numeric_limits<double>::infinity();
            double r_bob = std::numeric_limits<double>::infinity();
            double r_eve = 0.0;
            for (std::size_t s = 0; s < terms.i_ub.size(); ++s) {
                r_pub = std::min(r_pub, std::min(terms.i_ub[s], terms.i_ue[s]));
                r_bob = std::min(r_bob, terms.i_yb_u[s]);
                r_eve = std::max(r_eve, terms.i_ye_u[s]);
            }
            const double back = 1.0 - policy.margin;
            layout.m0 = floor2(n * back * r_pub);
            layout.j = floor2(n * back * std::max(0.0, r_bob - r_eve));
            layout.l_rand = ceil2(n * (1.0 + policy.margin) * r_eve);
            break;
        }
    }
    if (layout.j > kInnerGuard / layout.l_rand)
        throw capacity_error("resolve_layout: inner codebook exceeds the size guard");
    return layout;
}

ExperimentReport run_universal_experiment(const CompoundSet& set, const FactorizedInput& input,
                                          const LayoutPolicy& policy,
                                          const ExperimentConfig& config) {
    if (input.l != 1)
        throw validation_error("run_universal_experiment: per-letter (l = 1) inputs only");
    if (set.members.empty())
        throw validation_error("run_universal_experiment: empty compound set");
    if (config.n_grid.empty() || config.seeds == 0)
        throw validation_error("run_universal_experiment: empty n grid or seed count");
    const std::size_t ns = set.size();

    // Per-member composed inner channels and effective outer channels; these
    // are per-letter objects, so they are shared across the whole n grid.
    std::vector<CqChannel> v_b, v_e, hat_b, hat_e;
    for (const auto& member : set.members) {
        CqChannel vb = compose_letterwise(marginal(member, Receiver::B), input.t);
        CqChannel ve = compose_letterwise(marginal(member, Receiver::E), input.t);
        std::vector<DensityOperator> hb, he;
        for (std::size_t u = 0; u < input.size_u(); ++u) {
            Operator ab = Operator::Zero(vb.outputs.front().mat.rows(),
                                         vb.outputs.front().mat.rows());
            Operator ae = Operator::Zero(ve.outputs.front().mat.rows(),
                                         ve.outputs.front().mat.rows());
            for (std::size_t y = 0; y < input.size_y(); ++y) {
                const double w = input.r(static_cast<Eigen::Index>(u),
                                         static_cast<Eigen::Index>(y));
                if (w <= 0.0) continue;
                ab += w * vb.outputs[y].mat;
                ae += w * ve.outputs[y].mat;
            }
            hb.push_back(DensityOperator::trusted(std::move(ab)));
            he.push_back(DensityOperator::trusted(std::move(ae)));
        }
        hat_b.push_back(CqChannel::trusted(vb.dim, std::move(hb)));
        hat_e.push_back(CqChannel::trusted(ve.dim, std::move(he)));
        v_b.push_back(std::move(vb));
        v_e.push_back(std::move(ve));
    }

    const auto member_average = [ns](const std::vector<CqChannel>& family, const Word& word) {
        Operator acc = apply_word(family.front(), word).mat;
        for (std::size_t s = 1; s < family.size(); ++s) acc += apply_word(family[s], word).mat;
        return DensityOperator::trusted(acc / static_cast<double>(ns));
    };

    ExperimentReport report;
    for (int n : config.n_grid) {
        const CodebookLayout layout = resolve_layout(policy, set, input, n);
        for (std::size_t k = 0; k < config.seeds; ++k) {
            const std::uint64_t seed =
                rng::derive(config.master_seed, {static_cast<std::uint64_t>(n), k});
            SuperpositionCodebook cb = sample_superposition_codebook(
                input.q, input.r, layout, n, config.delta, seed);

            std::vector<Povm> inner_bob;
            inner_bob.reserve(layout.m0);
            for (std::size_t m = 0; m < layout.m0; ++m) {
                std::vector<DensityOperator> states;
                states.reserve(cb.inner[m].size());
                for (const Word& w : cb.inner[m]) states.push_back(member_average(v_b, w));
                inner_bob.push_back(build_decoder(states, config.method, config.hn_threshold));
            }

            const Eigen::Index db = inner_bob.front().elements.front().rows();
            Povm outer_bob = Povm::trusted({Operator::Identity(db, db),
                                            Operator::Zero(db, db)});
            Povm outer_eve;
            if (layout.m0 > 1) {
                std::vector<DensityOperator> sb, se;
                sb.reserve(layout.m0);
                se.reserve(layout.m0);
                for (const Word& w : cb.outer) {
                    sb.push_back(member_average(hat_b, w));
                    se.push_back(member_average(hat_e, w));
                }
                outer_bob = build_decoder(sb, config.method, config.hn_threshold);
                outer_eve = build_decoder(se, config.method, config.hn_threshold);
            } else {
                std::size_t de = 1;
                for (int i = 0; i < n; ++i) de *= v_e.front().dim;
                const Eigen::Index de_i = static_cast<Eigen::Index>(de);
                outer_eve =
                    Povm::trusted({Operator::Identity(de_i, de_i), Operator::Zero(de_i, de_i)});
            }

            const WiretapCode code =
                build_wiretap_code(std::move(cb), input.t, outer_bob, inner_bob, outer_eve);

            RunOutcome run;
            run.n = n;
            run.seed = seed;
            run.layout = layout;
            for (std::size_t s = 0; s < ns; ++s) {
                MemberOutcome mo;
                mo.member = s;
                mo.error_bob = wiretap_error_bob(code, set.members[s]);
                mo.error_eve = wiretap_error_eve(code, set.members[s]);
                if (config.compute_leakage) {
                    const LeakageReport lr = wiretap_leakage(code, set.members[s]);
                    mo.leakage = lr.leakage;
                    mo.deviation = lr.max_deviation;
                }
                run.max_error_bob = std::max(run.max_error_bob, mo.error_bob);
                run.max_error_eve = std::max(run.max_error_eve, mo.error_eve);
                run.max_leakage = std::max(run.max_leakage, mo.leakage);
                run.max_deviation = std::max(run.max_deviation, mo.deviation);
                run.members.push_back(mo);
            }
            report.runs.push_back(std::move(run));
        }
    }
    return report;
}

}  // namespace qbclab
