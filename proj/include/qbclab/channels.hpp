// Classical-quantum channels, cq-to-quantum-pair broadcast channels, compound
// sets, CPTP maps (for the fully quantum reduction), and tau-net discretization
// of infinite channel families.
//
// The cq norm is ||W||_CQ = max_x ||W(x)||_1; distances between channels use
// the induced metric. Nets are built greedily (farthest-point) over seeded
// Monte Carlo samples of a family and verified on fresh samples.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qbclab/quantum.hpp"

namespace qbclab {

struct CqChannel {
    std::size_t dim = 0;                   // output Hilbert-space dimension
    std::vector<DensityOperator> outputs;  // indexed by the input letter

    static CqChannel validated(std::size_t dim, std::vector<DensityOperator> outputs);
    static CqChannel trusted(std::size_t dim, std::vector<DensityOperator> outputs) {
        return CqChannel{dim, std::move(outputs)};
    }
    std::size_t alphabet() const { return outputs.size(); }
};

struct CqqBroadcastChannel {
    std::size_t dim_b = 0;
    std::size_t dim_e = 0;
    std::vector<DensityOperator> outputs;  // states on B (x) E, indexed by letter

    static CqqBroadcastChannel validated(std::size_t dim_b, std::size_t dim_e,
                                         std::vector<DensityOperator> outputs);
    static CqqBroadcastChannel trusted(std::size_t dim_b, std::size_t dim_e,
                                       std::vector<DensityOperator> outputs) {
        return CqqBroadcastChannel{dim_b, dim_e, std::move(outputs)};
    }
    std::size_t alphabet() const { return outputs.size(); }
};

enum class Receiver { B, E };

struct NetProvenance {
    double tau = 0.0;
    std::uint64_t seed = 0;
};

struct CompoundSet {
    std::vector<CqqBroadcastChannel> members;
    std::optional<NetProvenance> net;  // present when discretized from a family

    std::size_t size() const { return members.size(); }
};

// n-fold product output state W(x_1) (x) ... (x) W(x_n), left fold
DensityOperator apply_word(const CqChannel& w, const Word& word);
DensityOperator apply_word(const CqqBroadcastChannel& w, const Word& word);

CqChannel marginal(const CqqBroadcastChannel& w, Receiver which);

double cq_distance(const CqChannel& a, const CqChannel& b);
double cq_distance(const CqqBroadcastChannel& a, const CqqBroadcastChannel& b);

// completely positive trace-preserving map given by Kraus operators
struct CptpChannel {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    std::vector<Operator> kraus;

    static CptpChannel validated(std::size_t dim_in, std::size_t dim_out,
                                 std::vector<Operator> kraus);
    DensityOperator apply(const DensityOperator& rho) const;
};

// Seeded sampler view of a parametric channel family. sample(k) must be a pure
// function of k; callers use disjoint counter ranges so that net construction
// and verification never share samples.
struct ChannelFamily {
    std::size_t alphabet = 0;
    std::size_t dim_b = 0;
    std::size_t dim_e = 0;
    std::function<CqqBroadcastChannel(std::uint64_t)> sample;
};

struct NetBuildConfig {
    std::size_t build_samples = 2048;
    double shrink = 0.95;  // greedy cover targets shrink*tau over build samples
    std::uint64_t sample_offset = 0;
};

// Greedy farthest-point cover of the sampled family at radius shrink*tau.
// Throws partial_net_error (carrying the achieved radius) if budget is
// exhausted first. tau must lie in (0, 1/e).
CompoundSet build_net(const ChannelFamily& family, double tau, std::size_t budget,
                      const NetBuildConfig& config = {});

// log2 of the family-cardinality bound (6/tau)^{2 |X| dim^2}
double net_log2_size_bound(std::size_t alphabet, std::size_t dim, double tau);

struct NetReport {
    double max_distance = 0.0;  // verified covering radius over fresh samples
    bool radius_ok = false;
    std::size_t samples = 0;
    struct NLetterCheck {
        int n = 0;
        double max_distance = 0.0;
        double bound = 0.0;  // 2 n tau
        bool ok = false;
    };
    std::vector<NLetterCheck> n_letter;
    double log2_size = 0.0;
    double log2_size_bound = 0.0;
    bool size_ok = false;
    bool pass = false;
};

// Verification is reported, not thrown: radius over fresh samples, the
// n-letter product bound 2*n*tau for n in {1,2,3} on random words, and the
// cardinality bound.
NetReport verify_net(const CompoundSet& net, const ChannelFamily& family, double tau,
                     std::size_t samples, std::uint64_t sample_offset = 1ull << 32);

// Convex-mixture family generated by a finite member list: samples Dirichlet(1)
// weights and mixes output-wise. Recovers e.g. a depolarizing segment from its
// endpoints. Used by the CLI net subcommand.
ChannelFamily convex_mixture_family(const CompoundSet& generators, std::uint64_t seed);

}  // namespace qbclab
