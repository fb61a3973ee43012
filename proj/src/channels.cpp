#include "qbclab/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbclab/rng.hpp"

namespace qbclab {

CqChannel CqChannel::validated(std::size_t dim, std::vector<DensityOperator> outputs) {
    if (outputs.empty()) throw validation_error("CqChannel: empty alphabet");
    for (std::size_t x = 0; x < outputs.size(); ++x) {
        if (static_cast<std::size_t>(outputs[x].dim()) != dim)
            throw dimension_error("CqChannel: output " + std::to_string(x) +
                                  " has wrong dimension");
        outputs[x] = DensityOperator::validated(outputs[x].mat);
    }
    return CqChannel{dim, std::move(outputs)};
}

CqqBroadcastChannel CqqBroadcastChannel::validated(std::size_t dim_b, std::size_t dim_e,
                                                   std::vector<DensityOperator> outputs) {
    if (outputs.empty()) throw validation_error("CqqBroadcastChannel: empty alphabet");
    if (dim_b == 0 || dim_e == 0) throw dimension_error("CqqBroadcastChannel: zero dimension");
    for (std::size_t x = 0; x < outputs.size(); ++x) {
        if (static_cast<std::size_t>(outputs[x].dim()) != dim_b * dim_e)
            throw dimension_error("CqqBroadcastChannel: output " + std::to_string(x) +
                                  " is not on B (x) E");
        outputs[x] = DensityOperator::validated(outputs[x].mat);
    }
    return CqqBroadcastChannel{dim_b, dim_e, std::move(outputs)};
}

namespace {

template <typename Channel>
DensityOperator apply_word_impl(const Channel& w, const Word& word) {
    if (word.empty()) throw validation_error("apply_word: empty word");
    Operator acc = Operator::Identity(1, 1);
    for (auto letter : word) {
        if (letter >= w.alphabet()) throw validation_error("apply_word: letter outside alphabet");
        acc = tensor(acc, w.outputs[letter].mat);
    }
    return DensityOperator::trusted(std::move(acc));
}

}  // namespace

DensityOperator apply_word(const CqChannel& w, const Word& word) {
    return apply_word_impl(w, word);
}

DensityOperator apply_word(const CqqBroadcastChannel& w, const Word& word) {
    return apply_word_impl(w, word);
}

CqChannel marginal(const CqqBroadcastChannel& w, Receiver which) {
    std::vector<DensityOperator> outs;
    outs.reserve(w.alphabet());
    for (const DensityOperator& o : w.outputs)
        outs.push_back(DensityOperator::trusted(
            partial_trace(o.mat, w.dim_b, w.dim_e, which == Receiver::B ? 0 : 1)));
    return CqChannel::trusted(which == Receiver::B ? w.dim_b : w.dim_e, std::move(outs));
}

namespace {

template <typename Channel>
double cq_distance_impl(const Channel& a, const Channel& b) {
    if (a.alphabet() != b.alphabet()) throw dimension_error("cq_distance: alphabet mismatch");
    double best = 0.0;
    for (std::size_t x = 0; x < a.alphabet(); ++x) {
        if (a.outputs[x].dim() != b.outputs[x].dim())
            throw dimension_error("cq_distance: output dimension mismatch");
        best = std::max(best, trace_norm(a.outputs[x].mat - b.outputs[x].mat));
    }
    return best;
}

}  // namespace

double cq_distance(const CqChannel& a, const CqChannel& b) { return cq_distance_impl(a, b); }

double cq_distance(const CqqBroadcastChannel& a, const CqqBroadcastChannel& b) {
    return cq_distance_impl(a, b);
}

CptpChannel CptpChannel::validated(std::size_t dim_in, std::size_t dim_out,
                                   std::vector<Operator> kraus) {
    if (kraus.empty()) throw validation_error("CptpChannel: no Kraus operators");
    Operator sum = Operator::Zero(static_cast<Eigen::Index>(dim_in),
                                  static_cast<Eigen::Index>(dim_in));
    for (const Operator& k : kraus) {
        if (static_cast<std::size_t>(k.rows()) != dim_out ||
            static_cast<std::size_t>(k.cols()) != dim_in)
            throw dimension_error("CptpChannel: Kraus operator has wrong shape");
        sum += k.adjoint() * k;
    }
    if (max_abs(sum - identity(dim_in)) > 1e-8)
        throw validation_error("CptpChannel: Kraus operators are not trace-preserving");
    return CptpChannel{dim_in, dim_out, std::move(kraus)};
}

DensityOperator CptpChannel::apply(const DensityOperator& rho) const {
    if (static_cast<std::size_t>(rho.dim()) != dim_in)
        throw dimension_error("CptpChannel: state dimension mismatch");
    Operator out = Operator::Zero(static_cast<Eigen::Index>(dim_out),
                                  static_cast<Eigen::Index>(dim_out));
    for (const Operator& k : kraus) out += k * rho.mat * k.adjoint();
    return DensityOperator::trusted(std::move(out));
}

double net_log2_size_bound(std::size_t alphabet, std::size_t dim, double tau) {
    return 2.0 * static_cast<double>(alphabet) * static_cast<double>(dim * dim) *
           std::log2(6.0 / tau);
}

namespace {

constexpr double kInvE = 0.36787944117144233;

void validate_family(const ChannelFamily& family) {
    if (!family.sample || family.alphabet == 0 || family.dim_b == 0 || family.dim_e == 0)
        throw validation_error("ChannelFamily: incomplete family description");
}

}  // namespace

CompoundSet build_net(const ChannelFamily& family, double tau, std::size_t budget,
                      const NetBuildConfig& config) {
    validate_family(family);
    if (!(tau > 0.0 && tau < kInvE))
        throw domain_error("build_net: tau must lie in (0, 1/e)");
    if (budget == 0) throw domain_error("build_net: zero budget");
    if (config.build_samples == 0) throw domain_error("build_net: zero build samples");

    std::vector<CqqBroadcastChannel> samples;
    samples.reserve(config.build_samples);
    for (std::size_t i = 0; i < config.build_samples; ++i)
        samples.push_back(family.sample(config.sample_offset + i));

    const double target = config.shrink * tau;
    std::vector<std::size_t> centers{0};
    std::vector<double> dist(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        dist[i] = cq_distance(samples[i], samples[0]);

    for (;;) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (dist[i] > dist[far]) far = i;
        if (dist[far] <= target) break;
        if (centers.size() >= budget)
            throw partial_net_error("build_net: budget " + std::to_string(budget) +
                                        " exhausted at covering radius " +
                                        std::to_string(dist[far]),
                                    dist[far], centers.size());
        centers.push_back(far);
        for (std::size_t i = 0; i < samples.size(); ++i)
            dist[i] = std::min(dist[i], cq_distance(samples[i], samples[far]));
    }

    CompoundSet net;
    net.members.reserve(centers.size());
    for (std::size_t c : centers) net.members.push_back(samples[c]);
    net.net = NetProvenance{tau, config.sample_offset};
    return net;
}

NetReport verify_net(const CompoundSet& net, const ChannelFamily& family, double tau,
                     std::size_t samples, std::uint64_t sample_offset) {
    validate_family(family);
    if (net.members.empty()) throw validation_error("verify_net: empty net");
    NetReport report;
    report.samples = samples;

    rng::Stream words = rng::stream(sample_offset, {0x6e657477u});  // word sampling stream
    std::vector<NetReport::NLetterCheck> nchecks;
    for (int n = 1; n <= 3; ++n)
        nchecks.push_back({n, 0.0, 2.0 * n * tau, true});

    for (std::size_t i = 0; i < samples; ++i) {
        CqqBroadcastChannel w = family.sample(sample_offset + i);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t k = 0; k < net.members.size(); ++k) {
            double d = cq_distance(w, net.members[k]);
            if (d < best) {
                best = d;
                best_idx = k;
            }
        }
        report.max_distance = std::max(report.max_distance, best);
        // n-letter product check on a random word against the assigned member
        for (auto& check : nchecks) {
            Word word(static_cast<std::size_t>(check.n));
            for (auto& letter : word)
                letter = static_cast<std::uint16_t>(words.index(family.alphabet));
            double d = trace_norm(apply_word(w, word).mat -
                                  apply_word(net.members[best_idx], word).mat);
            check.max_distance = std::max(check.max_distance, d);
        }
    }

    report.radius_ok = report.max_distance <= tau;
    for (auto& check : nchecks) check.ok = check.max_distance <= check.bound + 1e-12;
    report.n_letter = std::move(nchecks);
    report.log2_size = std::log2(static_cast<double>(net.members.size()));
    report.log2_size_bound =
        net_log2_size_bound(family.alphabet, family.dim_b * family.dim_e, tau);
    report.size_ok = report.log2_size <= report.log2_size_bound;
    report.pass = report.radius_ok && report.size_ok;
    for (const auto& check : report.n_letter) report.pass = report.pass && check.ok;
    return report;
}

ChannelFamily convex_mixture_family(const CompoundSet& generators, std::uint64_t seed) {
    if (generators.members.empty())
        throw validation_error("convex_mixture_family: no generators");
    const auto& first = generators.members.front();
    for (const auto& m : generators.members)
        if (m.alphabet() != first.alphabet() || m.dim_b != first.dim_b || m.dim_e != first.dim_e)
            throw dimension_error("convex_mixture_family: inhomogeneous generators");
    ChannelFamily fam;
    fam.alphabet = first.alphabet();
    fam.dim_b = first.dim_b;
    fam.dim_e = first.dim_e;
    CompoundSet gens = generators;
    fam.sample = [gens, seed](std::uint64_t k) {
        rng::Stream s = rng::stream(seed, {0x6d6978u, k});
        // Dirichlet(1,...,1) via normalized exponentials
        std::vector<double> w(gens.members.size());
        double total = 0.0;
        for (double& wi : w) {
            double u = s.uniform();
            while (u <= 1e-300) u = s.uniform();
            wi = -std::log(u);
            total += wi;
        }
        const auto& f = gens.members.front();
        std::vector<DensityOperator> outs;
        outs.reserve(f.alphabet());
        for (std::size_t x = 0; x < f.alphabet(); ++x) {
            Operator acc = Operator::Zero(f.outputs[x].dim(), f.outputs[x].dim());
            for (std::size_t m = 0; m < gens.members.size(); ++m)
                acc += (w[m] / total) * gens.members[m].outputs[x].mat;
            outs.push_back(DensityOperator::trusted(std::move(acc)));
        }
        return CqqBroadcastChannel::trusted(f.dim_b, f.dim_e, std::move(outs));
    };
    return fam;
}

}  // namespace qbclab
