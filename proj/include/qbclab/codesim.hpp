#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qbclab/channels.hpp"
#include "qbclab/entropics.hpp"
#include "qbclab/quantum.hpp"
#include "qbclab/regions.hpp"
#include "qbclab/rng.hpp"
#include "qbclab/typicality.hpp"

namespace qbclab {

// Codebook shape: m0 common (or public) messages, j confidential messages,
// l_rand local randomization words per confidential message.
struct CodebookLayout {
    std::size_t m0 = 1;
    std::size_t j = 1;
    std::size_t l_rand = 1;
};

// Two-layer random codebook: outer words drawn from the pruned law of q,
// inner words drawn per outer word from the pruned conditional law of r.
struct SuperpositionCodebook {
    CodebookLayout layout;
    int n = 0;
    double delta = 0.0;
    std::vector<Word> outer;               // size m0, words over U
    std::vector<std::vector<Word>> inner;  // [m0][jj * l_rand + l], words over Y
};

SuperpositionCodebook sample_superposition_codebook(const Eigen::VectorXd& q,
                                                    const Eigen::MatrixXd& r,
                                                    const CodebookLayout& layout, int n,
                                                    double delta, std::uint64_t seed);

// Keep only the first l_rand randomization words of each confidential message.
// Sampling order makes this a prefix of the original draw, so codebooks with
// different l_rand can be compared on matched randomness.
SuperpositionCodebook prefix_randomization(const SuperpositionCodebook& cb, std::size_t l_rand);

enum class DecoderMethod { Pgm, HayashiNagaoka };

// One POVM outcome per codeword state plus a trailing abort outcome.
Povm build_decoder(const std::vector<DensityOperator>& codeword_states, DecoderMethod method,
                   double hn_threshold = 1.0);

// 1 - (1/M) sum_m tr(decoder[m] rho_m). The abort outcome always counts as an
// error; true_states.size() must be decoder.elements.size() - 1.
double average_error(const std::vector<DensityOperator>& true_states, const Povm& decoder);

// Per-letter randomization composition V(y) = sum_x t(x|y) W(x), rows of t
// indexed by y.
CqChannel compose_letterwise(const CqChannel& w, const Eigen::MatrixXd& t);

// Bob's two-stage measurement: outer has m0+1 outcomes, inner[m] has
// j*l_rand+1 outcomes for the inner codebook of outer word m. The composed
// POVM has m0*j message outcomes (randomization summed out) plus abort:
//   D_{m,jj} = sqrt(outer_m) (sum_l inner_m[jj*l_rand+l]) sqrt(outer_m).
Povm compose_superposition_decoder(const Povm& outer, const std::vector<Povm>& inner,
                                   const CodebookLayout& layout);

struct WiretapCode {
    SuperpositionCodebook codebook;
    Eigen::MatrixXd t;  // per-letter randomization map, |Y| x |X| rows y
    Povm bob;           // m0*j outcomes + abort
    Povm eve;           // m0 outcomes + abort (common layer)
};

WiretapCode build_wiretap_code(SuperpositionCodebook codebook, const Eigen::MatrixXd& t,
                               const Povm& outer_bob, const std::vector<Povm>& inner_bob,
                               const Povm& outer_eve);

// Exact average error of Bob's (m0, j) decoding against one compound member.
// The stochastic encoder composes letter-wise, so no input-word enumeration
// is involved.
double wiretap_error_bob(const WiretapCode& code, const CqqBroadcastChannel& member);

// Eve's common-layer decoding error.
double wiretap_error_eve(const WiretapCode& code, const CqqBroadcastChannel& member);

struct LeakageReport {
    double leakage = 0.0;        // exact I(J;E|M0) in bits
    double max_deviation = 0.0;  // max_{m0,j} || rho_E^{m0,j} - mean_j rho_E^{m0,j} ||_1
};

LeakageReport wiretap_leakage(const WiretapCode& code, const CqqBroadcastChannel& member);

// Explicit encoder distribution over n-letter channel inputs for one message:
// E(x|m0,jj) = (1/l_rand) sum_l prod_i t(x_i | y_i). Support enumeration is
// guarded; deterministic t reduces to the randomization words themselves.
std::vector<std::pair<Word, double>> encoder_distribution(const WiretapCode& code,
                                                          std::size_t m0, std::size_t jj);

// ---------------------------------------------------------------------------
// Operator-sampling concentration (covering) check
// ---------------------------------------------------------------------------

// Seeded PSD operator sampler with the two hypotheses of the concentration
// bound: every draw satisfies X <= mu*I (validated per draw) and the mean is
// at least eps*I (checked on a 100000-sample pre-pass estimate).
struct CoveringSampler {
    std::size_t dim = 0;
    double mu = 1.0;
    double eps = 0.0;
    std::function<Operator(std::uint64_t)> sample;  // pure function of the counter
};

// Diagonal of independent Bernoulli(p) entries; mean is p*I, so any
// eps <= p is a valid deviation threshold.
CoveringSampler bernoulli_diag_sampler(std::size_t dim, double p, double eps,
                                       std::uint64_t seed);

struct CoveringPoint {
    std::size_t l = 0;        // number of averaged draws
    double empirical = 0.0;   // observed deviation-rate Pr(||mean_L - EX||_1 > eps)
    double bound = 0.0;       // 2 d exp(-L eps^3 / (2 d mu ln 2))
    double slack3 = 0.0;      // 3 binomial standard errors of the empirical rate
    bool ok = false;          // empirical <= min(bound,1) + slack3
};

struct CoveringReport {
    Operator mean_estimate;
    double mean_min_eig = 0.0;
    bool hypotheses_ok = false;
    std::vector<CoveringPoint> points;
    bool decreasing = false;  // empirical rate non-increasing along the L grid
    bool pass = false;
};

// Deterministic given the sampler: the pre-pass consumes counters
// [0, 100000) and the trials continue sequentially from there.
CoveringReport covering_check(const CoveringSampler& sampler,
                              const std::vector<std::size_t>& l_grid, std::size_t trials);

// ---------------------------------------------------------------------------
// Eve-side smoothing (doubly compressed outputs)
// ---------------------------------------------------------------------------

struct ProjectedEveOutput {
    Operator q;              // Pi_tot Pi(y) W(y) Pi(y) Pi_tot
    double deficit_cond;     // 1 - tr(W(y) Pi(y))
    double compressed_mass;  // tr(Pi(y) W(y) Pi(y) Pi_tot)
    double lhs;              // || W(y) - Q ||_1
    double rhs;              // sqrt(2 deficit_cond) + 2 sqrt((1-deficit_cond) - compressed_mass)
};

// eve holds the (already randomization-composed) per-letter states indexed by
// y; r is the outer->inner map whose conditional typicality defines Pi_tot.
ProjectedEveOutput projected_eve_output(const CqChannel& eve, const Eigen::MatrixXd& r,
                                        const Word& u_word, const Word& y_word, double delta);

// Theta = sum over the pruned conditional law of Q(y); trace <= 1.
Operator theta_state(const CqChannel& eve, const Eigen::MatrixXd& r, const Word& u_word,
                     double delta);

// ---------------------------------------------------------------------------
// End-to-end universal-code experiment
// ---------------------------------------------------------------------------

struct LayoutPolicy {
    enum class Mode { Explicit, Rates, Entropic };
    Mode mode = Mode::Explicit;
    CodebookLayout layout;  // Explicit
    double rate_pub = 0.0;  // Rates: bits per channel use
    double rate_conf = 0.5;
    double rate_rand = 0.0;
    double margin = 0.15;  // Entropic: rate back-off / randomization head-room
};

// Entropic mode sizes the layers from the evaluated corner of the input:
//   m0 = max(1, floor(2^{n (1-margin) r_pub}))
//   j  = max(1, floor(2^{n (1-margin) max(0, inf I(Y;B|U) - sup I(Y;E|U))}))
//   l  = ceil(2^{n (1+margin) sup_s I(Y;E|U)})
CodebookLayout resolve_layout(const LayoutPolicy& policy, const CompoundSet& set,
                              const FactorizedInput& input, int n);

struct MemberOutcome {
    std::size_t member = 0;
    double error_bob = 0.0;
    double error_eve = 0.0;
    double leakage = 0.0;
    double deviation = 0.0;
};

struct RunOutcome {
    int n = 0;
    std::uint64_t seed = 0;
    CodebookLayout layout;
    std::vector<MemberOutcome> members;
    double max_error_bob = 0.0;
    double max_error_eve = 0.0;
    double max_leakage = 0.0;
    double max_deviation = 0.0;
};

struct ExperimentConfig {
    std::vector<int> n_grid;
    std::size_t seeds = 1;
    std::uint64_t master_seed = 1;
    double delta = 0.5;
    DecoderMethod method = DecoderMethod::Pgm;
    double hn_threshold = 1.0;
    bool compute_leakage = true;
};

struct ExperimentReport {
    std::vector<RunOutcome> runs;
};

// Samples a codebook per (n, seed), builds the universal decoders against the
// uniform member average, and evaluates exact per-member error and leakage.
ExperimentReport run_universal_experiment(const CompoundSet& set, const FactorizedInput& input,
                                          const LayoutPolicy& policy,
                                          const ExperimentConfig& config);

}  // namespace qbclab
