#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qbclab/channels.hpp"
#include "qbclab/entropics.hpp"
#include "qbclab/quantum.hpp"

namespace qbclab {

// Factorized input distribution p(u) p(y|u) p(x_1..x_l | y): the auxiliary
// chain that drives both rate-region evaluation and code construction. The
// last stage acts on blocks of l channel uses, so t has |X|^l columns.
struct FactorizedInput {
    int l = 1;
    std::size_t alphabet_x = 0;  // per-letter input alphabet of the channel
    Eigen::VectorXd q;           // |U|
    Eigen::MatrixXd r;           // |U| x |Y|, rows are p(.|u)
    Eigen::MatrixXd t;           // |Y| x |X|^l, rows are p(.|y)

    std::size_t size_u() const { return static_cast<std::size_t>(q.size()); }
    std::size_t size_y() const { return static_cast<std::size_t>(r.cols()); }
    std::size_t blocks() const { return static_cast<std::size_t>(t.cols()); }

    static FactorizedInput validated(int l, std::size_t alphabet_x, Eigen::VectorXd q,
                                     Eigen::MatrixXd r, Eigen::MatrixXd t);

    // Expand a per-letter map |Y| x |X| into the product map |Y| x |X|^l with
    // t_l(x_1..x_l | y) = prod_i t(x_i | y).
    static Eigen::MatrixXd letterwise_blocks(const Eigen::MatrixXd& t_letter, int l);

    // Uniform q and r, product-uniform t, for the given layer sizes.
    static FactorizedInput uniform(int l, std::size_t alphabet_x, std::size_t nu, std::size_t ny);
};

// One point of the achievable region, in bits per channel use.
struct RegionCorner {
    double r_pub = 0.0;       // common layer (BCC) or public layer (TPC)
    double r_c = 0.0;         // confidential layer, clamped at zero
    double r_c_raw = 0.0;     // before clamping (can be negative)
    int member_pub = -1;      // state attaining the public-rate infimum
    int member_bob = -1;      // state attaining inf_s I(Y;B|U)
    int member_eve = -1;      // state attaining sup_s I(Y;E|U)
    double slack = 0.0;       // continuity penalty when the set came from a net
};

// Per-member mutual-information terms backing a corner; exposed for tests
// and for layout selection in the coding layer.
struct CornerTerms {
    std::vector<double> i_ub, i_ue;      // I(U;B), I(U;E) per member (per block)
    std::vector<double> i_yb_u, i_ye_u;  // I(Y;B|U), I(Y;E|U) per member (per block)
};

enum class Scenario { Bcc, Tpc };

// Caches the l-fold marginal word states of every member so repeated corner
// evaluations (the optimizer's inner loop) do not rebuild tensor powers.
class EvaluationContext {
  public:
    EvaluationContext(const CompoundSet& set, int l, std::size_t blocks);

    std::size_t members() const { return bob_.size(); }
    std::size_t blocks() const { return bob_.empty() ? 0 : bob_.front().size(); }
    int block_length() const { return l_; }
    // Marginal state of member s on B^l (resp. E^l) for block index b.
    const DensityOperator& bob(std::size_t s, std::size_t b) const { return bob_[s][b]; }
    const DensityOperator& eve(std::size_t s, std::size_t b) const { return eve_[s][b]; }

    CornerTerms terms(const FactorizedInput& input) const;

  private:
    int l_;
    std::vector<std::vector<DensityOperator>> bob_, eve_;
};

RegionCorner corner_from_terms(const CornerTerms& terms, int l, Scenario scenario);

// One-shot corner evaluation; builds a context internally.
RegionCorner evaluate_bcc_corner(const CompoundSet& set, const FactorizedInput& input);
RegionCorner evaluate_tpc_corner(const CompoundSet& set, const FactorizedInput& input);

// Explicit evaluation state omega_s = sum_{u,y} q(u) r(y|u) |u><u| (x) |y><y|
// (x) sum_b t(b|y) W_s(block b), with the channel factors regrouped so the
// quantum part reads B^l (x) E^l. Intended for brute-force cross-checks.
DensityOperator evaluation_state(const CqqBroadcastChannel& member, const FactorizedInput& input);

struct OptimizerConfig {
    std::vector<double> weights;  // scalarization weights; empty = 0,0.1,...,1
    int restarts = 6;
    int max_sweeps = 60;
    double init_step = 0.25;
    double min_step = 1e-4;
    std::uint64_t seed = 1;
    std::size_t size_u = 0;  // 0 = match channel alphabet
    std::size_t size_y = 0;  // 0 = match channel alphabet
    int l = 1;
    Scenario scenario = Scenario::Bcc;
};

struct WeightedCorner {
    double weight = 0.0;
    RegionCorner corner;
    FactorizedInput input;
};

struct RateRegion {
    std::vector<WeightedCorner> corners;   // one best corner per weight
    std::vector<RegionCorner> frontier;    // Pareto-maximal subset, r_pub ascending
};

RateRegion optimize_region(const CompoundSet& set, const OptimizerConfig& config);

// Builds the cq-q broadcast members induced by sending the given signal
// states through each fully quantum channel: tilde W_s(y) = N_s^{(x)l}(rho_y),
// regrouped to B^l (x) E^l. Every member must map into C^{db} (x) C^{de}.
CompoundSet reduce_full_quantum(const std::vector<CptpChannel>& members, std::size_t dim_b,
                                std::size_t dim_e, const std::vector<DensityOperator>& signals,
                                int l);

}  // namespace qbclab
