// Achievable-rate-region evaluation for compound cq broadcast channels with a
// common/public layer and a confidential layer.
//
// Corners are evaluated through the effective per-layer channels induced by a
// factorized input q(u) r(y|u) t(x-block|y):
//     V_g(y)  = sum_b t(b|y) W_g(block b)      (inner layer, receiver g)
//     hatW_g(u) = sum_y r(y|u) V_g(y)          (outer layer)
// so that I(U;g) = holevo(q, hatW_g) and I(Y;g|U) = sum_u q(u) holevo(r_u, V_g).
// All rates are reported per channel use (divided by the block length l).

#include "qbclab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbclab/errors.hpp"
#include "qbclab/rng.hpp"

namespace qbclab {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kEntryFloor = -1e-12;
constexpr double kImprove = 1e-12;

void check_stochastic_vector(const Eigen::VectorXd& v, const char* what) {
    if (v.size() == 0) throw validation_error(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < kEntryFloor)
            throw validation_error(std::string(what) + ": negative probability entry");
        sum += v(i);
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw validation_error(std::string(what) + ": row does not sum to one");
}

void check_stochastic_rows(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() == 0 || m.cols() == 0)
        throw validation_error(std::string(what) + ": empty stochastic matrix");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        check_stochastic_vector(m.row(r).transpose(), what);
}

std::size_t checked_pow(std::size_t base, int exp, const char* where) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
            throw capacity_error(std::string(where) + ": block alphabet overflows");
        out *= base;
    }
    return out;
}

Word block_word(std::size_t block, std::size_t alphabet, int l) {
    Word w(static_cast<std::size_t>(l));
    for (int i = l; i-- > 0;) {
        w[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(block % alphabet);
        block /= alphabet;
    }
    return w;
}

// Mix a family of equal-dimension states with the given weights.
DensityOperator mix(const Eigen::VectorXd& weights,
                    const std::vector<DensityOperator>& states) {
    Operator acc = Operator::Zero(states.front().mat.rows(), states.front().mat.cols());
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (weights(i) > 0.0) acc += weights(i) * states[static_cast<std::size_t>(i)].mat;
    return DensityOperator::trusted(std::move(acc));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

FactorizedInput FactorizedInput::validated(int l, std::size_t alphabet_x, Eigen::VectorXd q,
                                           Eigen::MatrixXd r, Eigen::MatrixXd t) {
    if (l < 1) throw validation_error("FactorizedInput: block length must be positive");
    if (alphabet_x == 0) throw validation_error("FactorizedInput: empty channel alphabet");
    check_stochastic_vector(q, "FactorizedInput q");
    check_stochastic_rows(r, "FactorizedInput r");
    check_stochastic_rows(t, "FactorizedInput t");
    if (r.rows() != q.size())
        throw dimension_error("FactorizedInput: r must have one row per u");
    if (t.rows() != r.cols())
        throw dimension_error("FactorizedInput: t must have one row per y");
    const std::size_t blocks = checked_pow(alphabet_x, l, "FactorizedInput");
    if (static_cast<std::size_t>(t.cols()) != blocks)
        throw dimension_error("FactorizedInput: t must have |X|^l columns");
    return FactorizedInput{l, alphabet_x, std::move(q), std::move(r), std::move(t)};
}

Eigen::MatrixXd FactorizedInput::letterwise_blocks(const Eigen::MatrixXd& t_letter, int l) {
    if (l < 1) throw validation_error("letterwise_blocks: block length must be positive");
    const std::size_t nx = static_cast<std::size_t>(t_letter.cols());
    const std::size_t blocks = checked_pow(nx, l, "letterwise_blocks");
    Eigen::MatrixXd out(t_letter.rows(), static_cast<Eigen::Index>(blocks));
    for (Eigen::Index y = 0; y < t_letter.rows(); ++y)
        for (std::size_t b = 0; b < blocks; ++b) {
            double prod = 1.0;
            std::size_t rest = b;
            for (int i = 0; i < l; ++i) {
                prod *= t_letter(y, static_cast<Eigen::Index>(rest % nx));
                rest /= nx;
            }
            out(y, static_cast<Eigen::Index>(b)) = prod;
        }
    return out;
}

FactorizedInput FactorizedInput::uniform(int l, std::size_t alphabet_x, std::size_t nu,
                                         std::size_t ny) {
    const std::size_t blocks = checked_pow(alphabet_x, l, "FactorizedInput::uniform");
    Eigen::VectorXd q = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nu), 1.0 / nu);
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(nu),
                                                  static_cast<Eigen::Index>(ny), 1.0 / ny);
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(ny),
                                                  static_cast<Eigen::Index>(blocks),
                                                  1.0 / static_cast<double>(blocks));
    return FactorizedInput{l, alphabet_x, std::move(q), std::move(r), std::move(t)};
}

EvaluationContext::EvaluationContext(const CompoundSet& set, int l, std::size_t blocks)
    : l_(l) {
    if (set.members.empty()) throw validation_error("EvaluationContext: empty compound set");
    if (l < 1) throw validation_error("EvaluationContext: block length must be positive");
    const std::size_t alphabet = set.members.front().alphabet();
    if (blocks != checked_pow(alphabet, l, "EvaluationContext"))
        throw dimension_error("EvaluationContext: block count does not match alphabet^l");
    bob_.reserve(set.size());
    eve_.reserve(set.size());
    for (const auto& member : set.members) {
        if (member.alphabet() != alphabet)
            throw dimension_error("EvaluationContext: members disagree on the alphabet");
        const CqChannel wb = marginal(member, Receiver::B);
        const CqChannel we = marginal(member, Receiver::E);
        std::vector<DensityOperator> sb, se;
        sb.reserve(blocks);
        se.reserve(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            const Word w = block_word(b, alphabet, l);
            sb.push_back(apply_word(wb, w));
            se.push_back(apply_word(we, w));
        }
        bob_.push_back(std::move(sb));
        eve_.push_back(std::move(se));
    }
}

CornerTerms EvaluationContext::terms(const FactorizedInput& input) const {
    if (input.l != l_ || input.blocks() != blocks())
        throw dimension_error("EvaluationContext: input block shape mismatch");
    const std::size_t nu = input.size_u();
    const std::size_t ny = input.size_y();
    const std::vector<double> q = to_vector(input.q);

    CornerTerms out;
    for (std::size_t s = 0; s < members(); ++s) {
        for (int side = 0; side < 2; ++side) {
            const auto& word_states = side == 0 ? bob_[s] : eve_[s];
            std::vector<DensityOperator> v;  // V_g(y)
            v.reserve(ny);
            for (std::size_t y = 0; y < ny; ++y)
                v.push_back(mix(input.t.row(static_cast<Eigen::Index>(y)).transpose(),
                                word_states));
            std::vector<DensityOperator> hat;  // hatW_g(u)
            hat.reserve(nu);
            for (std::size_t u = 0; u < nu; ++u)
                hat.push_back(mix(input.r.row(static_cast<Eigen::Index>(u)).transpose(), v));
            double outer = holevo(q, hat);
            double inner = 0.0;
            for (std::size_t u = 0; u < nu; ++u) {
                if (q[u] <= 0.0) continue;
                inner += q[u] *
                         holevo(to_vector(input.r.row(static_cast<Eigen::Index>(u)).transpose()),
                                v);
            }
            (side == 0 ? out.i_ub : out.i_ue).push_back(outer);
            (side == 0 ? out.i_yb_u : out.i_ye_u).push_back(inner);
        }
    }
    return out;
}

RegionCorner corner_from_terms(const CornerTerms& terms, int l, Scenario scenario) {
    const std::size_t ns = terms.i_ub.size();
    if (ns == 0) throw validation_error("corner_from_terms: no members");
    RegionCorner c;
    double best_pub = std::numeric_limits<double>::infinity();
    double min_bob = std::numeric_limits<double>::infinity();
    double max_eve = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ns; ++s) {
        const double pub = scenario == Scenario::Bcc
                               ? std::min(terms.i_ub[s], terms.i_ue[s])
                               : terms.i_ub[s];
        if (pub < best_pub) {
            best_pub = pub;
            c.member_pub = static_cast<int>(s);
        }
        if (terms.i_yb_u[s] < min_bob) {
            min_bob = terms.i_yb_u[s];
            c.member_bob = static_cast<int>(s);
        }
        if (terms.i_ye_u[s] > max_eve) {
            max_eve = terms.i_ye_u[s];
            c.member_eve = static_cast<int>(s);
        }
    }
    c.r_pub = best_pub / l;
    c.r_c_raw = (min_bob - max_eve) / l;
    c.r_c = std::max(0.0, c.r_c_raw);
    return c;
}

namespace {

double net_slack(const CompoundSet& set, int l) {
    if (!set.net) return 0.0;
    const std::size_t d_b = set.members.front().dim_b;
    const std::size_t d_e = set.members.front().dim_e;
    std::size_t d = std::max(d_b, d_e);
    std::size_t dl = 1;
    for (int i = 0; i < l; ++i) dl *= d;
    const double dev = std::min(2.0, 2.0 * l * set.net->tau);
    return continuity_bounds(dev, std::max<std::size_t>(dl, 2), BoundKind::Cmi);
}

RegionCorner evaluate_corner(const CompoundSet& set, const FactorizedInput& input,
                             Scenario scenario) {
    EvaluationContext ctx(set, input.l, input.blocks());
    RegionCorner c = corner_from_terms(ctx.terms(input), input.l, scenario);
    c.slack = net_slack(set, input.l);
    return c;
}

}  // namespace

RegionCorner evaluate_bcc_corner(const CompoundSet& set, const FactorizedInput& input) {
    return evaluate_corner(set, input, Scenario::Bcc);
}

RegionCorner evaluate_tpc_corner(const CompoundSet& set, const FactorizedInput& input) {
    return evaluate_corner(set, input, Scenario::Tpc);
}

DensityOperator evaluation_state(const CqqBroadcastChannel& member,
                                 const FactorizedInput& input) {
    const std::size_t alphabet = member.alphabet();
    const std::size_t blocks = input.blocks();
    if (blocks != checked_pow(alphabet, input.l, "evaluation_state"))
        throw dimension_error("evaluation_state: input does not match the channel alphabet");
    const std::size_t nu = input.size_u();
    const std::size_t ny = input.size_y();
    std::size_t dq = 1;
    for (int i = 0; i < input.l; ++i) dq *= member.dim_b * member.dim_e;
    check_dim(nu * ny * dq, "evaluation_state");

    // Regroup each block state from (B E)^l to B^l E^l.
    std::vector<std::size_t> dims, perm;
    for (int i = 0; i < input.l; ++i) {
        dims.push_back(member.dim_b);
        dims.push_back(member.dim_e);
    }
    for (int i = 0; i < input.l; ++i) perm.push_back(2 * static_cast<std::size_t>(i));
    for (int i = 0; i < input.l; ++i) perm.push_back(2 * static_cast<std::size_t>(i) + 1);
    std::vector<Operator> block_states;
    block_states.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        Operator rho = apply_word(member, block_word(b, alphabet, input.l)).mat;
        block_states.push_back(input.l == 1 ? std::move(rho)
                                            : permute_factors(rho, dims, perm));
    }

    const Eigen::Index d = static_cast<Eigen::Index>(dq);
    Operator omega = Operator::Zero(static_cast<Eigen::Index>(nu * ny * dq),
                                    static_cast<Eigen::Index>(nu * ny * dq));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t y = 0; y < ny; ++y) {
            const double w = input.q(static_cast<Eigen::Index>(u)) *
                             input.r(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(y));
            if (w <= 0.0) continue;
            Operator m = Operator::Zero(d, d);
            for (std::size_t b = 0; b < blocks; ++b) {
                const double tb = input.t(static_cast<Eigen::Index>(y),
                                          static_cast<Eigen::Index>(b));
                if (tb > 0.0) m += tb * block_states[b];
            }
            const Eigen::Index off = static_cast<Eigen::Index>((u * ny + y) * dq);
            omega.block(off, off, d, d) = w * m;
        }
    return DensityOperator::trusted(std::move(omega));
}

namespace {

// Euclidean projection onto the probability simplex, then an exact
// renormalization so row sums meet the 1e-12 validation budget.
void project_simplex(Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = std::max(0.0, v(i) - theta);
        sum += v(i);
    }
    if (sum <= 0.0) {
        v.setConstant(1.0 / static_cast<double>(n));
        return;
    }
    v /= sum;
}

struct RowRef {
    // 0 = q, 1 = row of r, 2 = row of t
    int kind;
    Eigen::Index row;
};

Eigen::VectorXd dirichlet_row(rng::Stream& st, Eigen::Index n) {
    Eigen::VectorXd v(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double u = st.uniform();
        if (u <= 0.0) u = std::numeric_limits<double>::min();
        v(i) = -std::log(u);
        sum += v(i);
    }
    v /= sum;
    return v;
}

}  // namespace

RateRegion optimize_region(const CompoundSet& set, const OptimizerConfig& config) {
    if (set.members.empty()) throw validation_error("optimize_region: empty compound set");
    const std::size_t alphabet = set.members.front().alphabet();
    const std::size_t nu = config.size_u == 0 ? alphabet : config.size_u;
    const std::size_t ny = config.size_y == 0 ? alphabet : config.size_y;
    const std::size_t blocks = checked_pow(alphabet, config.l, "optimize_region");
    if (config.restarts < 1) throw validation_error("optimize_region: needs >= 1 restart");

    EvaluationContext ctx(set, config.l, blocks);
    std::vector<double> weights = config.weights;
    if (weights.empty())
        for (int i = 0; i <= 10; ++i) weights.push_back(0.1 * i);

    const auto objective = [&](const FactorizedInput& input, double w) {
        const RegionCorner c = corner_from_terms(ctx.terms(input), config.l, config.scenario);
        return w * c.r_pub + (1.0 - w) * c.r_c;
    };

    RateRegion region;
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
        const double w = weights[wi];
        FactorizedInput best;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int restart = 0; restart < config.restarts; ++restart) {
            FactorizedInput cur = FactorizedInput::uniform(config.l, alphabet, nu, ny);
            if (restart > 0) {
                rng::Stream st = rng::stream(
                    config.seed, {0x726567696f6eull, static_cast<std::uint64_t>(wi),
                                  static_cast<std::uint64_t>(restart)});
                cur.q = dirichlet_row(st, cur.q.size());
                for (Eigen::Index i = 0; i < cur.r.rows(); ++i)
                    cur.r.row(i) = dirichlet_row(st, cur.r.cols()).transpose();
                for (Eigen::Index i = 0; i < cur.t.rows(); ++i)
                    cur.t.row(i) = dirichlet_row(st, cur.t.cols()).transpose();
            }
            double value = objective(cur, w);

            std::vector<RowRef> rows;
            rows.push_back({0, 0});
            for (Eigen::Index i = 0; i < cur.r.rows(); ++i) rows.push_back({1, i});
            for (Eigen::Index i = 0; i < cur.t.rows(); ++i) rows.push_back({2, i});

            const auto get_row = [&](const RowRef& ref) -> Eigen::VectorXd {
                if (ref.kind == 0) return cur.q;
                if (ref.kind == 1) return cur.r.row(ref.row).transpose();
                return cur.t.row(ref.row).transpose();
            };
            const auto set_row = [&](const RowRef& ref, const Eigen::VectorXd& v) {
                if (ref.kind == 0)
                    cur.q = v;
                else if (ref.kind == 1)
                    cur.r.row(ref.row) = v.transpose();
                else
                    cur.t.row(ref.row) = v.transpose();
            };

            double step = config.init_step;
            for (int sweep = 0; sweep < config.max_sweeps && step >= config.min_step; ++sweep) {
                bool improved = false;
                for (const RowRef& ref : rows) {
                    const Eigen::Index cols = get_row(ref).size();
                    for (Eigen::Index c = 0; c < cols; ++c) {
                        for (int dir = 0; dir < 2; ++dir) {
                            const Eigen::VectorXd saved = get_row(ref);
                            Eigen::VectorXd cand = saved;
                            cand(c) += dir == 0 ? step : -step;
                            project_simplex(cand);
                            set_row(ref, cand);
                            const double v = objective(cur, w);
                            if (v > value + kImprove) {
                                value = v;
                                improved = true;
                                break;  // keep the move, go to the next coordinate
                            }
                            set_row(ref, saved);
                        }
                    }
                }
                if (!improved) step *= 0.5;
            }
            if (value > best_value) {
                best_value = value;
                best = cur;
            }
        }
        RegionCorner corner = corner_from_terms(ctx.terms(best), config.l, config.scenario);
        corner.slack = net_slack(set, config.l);
        region.corners.push_back({w, corner, std::move(best)});
    }

    // Pareto-maximal frontier, r_pub ascending.
    std::vector<RegionCorner> pts;
    for (const auto& wc : region.corners) pts.push_back(wc.corner);
    std::sort(pts.begin(), pts.end(), [](const RegionCorner& a, const RegionCorner& b) {
        if (a.r_pub != b.r_pub) return a.r_pub > b.r_pub;
        return a.r_c > b.r_c;
    });
    double best_rc = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        if (p.r_c > best_rc + 1e-15) {
            region.frontier.push_back(p);
            best_rc = p.r_c;
        }
    }
    std::reverse(region.frontier.begin(), region.frontier.end());
    return region;
}

CompoundSet reduce_full_quantum(const std::vector<CptpChannel>& members, std::size_t dim_b,
                                std::size_t dim_e, const std::vector<DensityOperator>& signals,
                                int l) {
    if (members.empty()) throw validation_error("reduce_full_quantum: no channel members");
    if (signals.empty()) throw validation_error("reduce_full_quantum: no signal states");
    if (l < 1) throw validation_error("reduce_full_quantum: block length must be positive");
    const std::size_t din = members.front().dim_in;
    std::size_t din_l = 1, dout_l = 1;
    for (int i = 0; i < l; ++i) {
        din_l *= din;
        dout_l *= dim_b * dim_e;
    }
    check_dim(dout_l, "reduce_full_quantum");
    for (const auto& m : members) {
        if (m.dim_in != din)
            throw dimension_error("reduce_full_quantum: members disagree on the input space");
        if (m.dim_out != dim_b * dim_e)
            throw dimension_error("reduce_full_quantum: member output is not B (x) E");
    }
    for (const auto& s : signals)
        if (s.mat.rows() != static_cast<Eigen::Index>(din_l))
            throw dimension_error("reduce_full_quantum: signal is not on the l-fold input space");

    std::vector<std::size_t> dims, perm;
    for (int i = 0; i < l; ++i) {
        dims.push_back(dim_b);
        dims.push_back(dim_e);
    }
    for (int i = 0; i < l; ++i) perm.push_back(2 * static_cast<std::size_t>(i));
    for (int i = 0; i < l; ++i) perm.push_back(2 * static_cast<std::size_t>(i) + 1);

    CompoundSet out;
    for (const auto& m : members) {
        // l-fold product Kraus family via an odometer over member Kraus indices
        const std::size_t nk = m.kraus.size();
        std::size_t total = 1;
        for (int i = 0; i < l; ++i) {
            if (total > 1000000ull / std::max<std::size_t>(nk, 1))
                throw capacity_error("reduce_full_quantum: Kraus family too large");
            total *= nk;
        }
        std::vector<Operator> kraus_l;
        kraus_l.reserve(total);
        std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
        for (std::size_t k = 0; k < total; ++k) {
            Operator prod = Operator::Identity(1, 1);
            for (int i = 0; i < l; ++i) prod = tensor(prod, m.kraus[idx[static_cast<std::size_t>(i)]]);
            kraus_l.push_back(std::move(prod));
            for (int i = l; i-- > 0;) {
                if (++idx[static_cast<std::size_t>(i)] < nk) break;
                idx[static_cast<std::size_t>(i)] = 0;
            }
        }
        std::vector<DensityOperator> outputs;
        outputs.reserve(signals.size());
        for (const auto& s : signals) {
            Operator rho = Operator::Zero(static_cast<Eigen::Index>(dout_l),
                                          static_cast<Eigen::Index>(dout_l));
            for (const auto& k : kraus_l) rho += k * s.mat * k.adjoint();
            if (l > 1) rho = permute_factors(rho, dims, perm);
            outputs.push_back(DensityOperator::validated(std::move(rho)));
        }
        std::size_t db_l = 1, de_l = 1;
        for (int i = 0; i < l; ++i) {
            db_l *= dim_b;
            de_l *= dim_e;
        }
        out.members.push_back(
            CqqBroadcastChannel::validated(db_l, de_l, std::move(outputs)));
    }
    return out;
}

}  // namespace qbclab
