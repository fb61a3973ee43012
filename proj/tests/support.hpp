// Shared fixtures and independent oracles for the test binaries: seeded random
// states and channels, classical entropies, a Blahut-Arimoto style capacity
// oracle, and a direct pattern-search minimizer for the Renyi radius. The
// oracles take no shortcuts through the library paths they are checking.
#pragma once

#include <cmath>
#include <vector>

#include "qbclab/channels.hpp"
#include "qbclab/entropics.hpp"
#include "qbclab/quantum.hpp"
#include "qbclab/rng.hpp"

namespace support {

using qbclab::Complex;
using qbclab::CqChannel;
using qbclab::CqqBroadcastChannel;
using qbclab::DensityOperator;
using qbclab::Operator;

inline Operator ginibre(std::size_t d, qbclab::rng::Stream& st) {
    Operator g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(st.gaussian(), st.gaussian());
    return g;
}

inline DensityOperator random_density(std::size_t d, qbclab::rng::Stream& st) {
    const Operator g = ginibre(d, st);
    Operator rho = g * g.adjoint();
    rho = 0.5 * (rho + Operator(rho.adjoint()));
    rho /= rho.trace().real();
    return DensityOperator::trusted(std::move(rho));
}

// Mixes towards the maximally mixed state so every eigenvalue is bounded away
// from zero (relative-entropy and Renyi oracles need full support).
inline DensityOperator random_full_rank(std::size_t d, qbclab::rng::Stream& st,
                                        double mix = 0.1) {
    const DensityOperator rho = random_density(d, st);
    Operator m = (1.0 - mix) * rho.mat +
                 (mix / static_cast<double>(d)) *
                     Operator::Identity(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d));
    return DensityOperator::trusted(std::move(m));
}

inline DensityOperator diag_state(const std::vector<double>& p) {
    Operator m = Operator::Zero(static_cast<Eigen::Index>(p.size()),
                                static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
    return DensityOperator::trusted(std::move(m));
}

inline DensityOperator pure_ket(std::size_t d, std::size_t k) {
    Operator m = Operator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    return DensityOperator::trusted(std::move(m));
}

inline CqChannel random_cq(std::size_t alphabet, std::size_t dim, qbclab::rng::Stream& st,
                           double mix = 0.0) {
    std::vector<DensityOperator> outputs;
    for (std::size_t x = 0; x < alphabet; ++x)
        outputs.push_back(mix > 0.0 ? random_full_rank(dim, st, mix) : random_density(dim, st));
    return CqChannel::validated(dim, std::move(outputs));
}

inline CqqBroadcastChannel random_broadcast(std::size_t alphabet, std::size_t dim_b,
                                            std::size_t dim_e, qbclab::rng::Stream& st,
                                            double mix = 0.0) {
    std::vector<DensityOperator> outputs;
    for (std::size_t x = 0; x < alphabet; ++x)
        outputs.push_back(mix > 0.0 ? random_full_rank(dim_b * dim_e, st, mix)
                                    : random_density(dim_b * dim_e, st));
    return CqqBroadcastChannel::validated(dim_b, dim_e, std::move(outputs));
}

inline double shannon(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

// Capacity of a cq channel by exponentiated-gradient iteration:
//   p'(x) proportional to p(x) 2^{D(W_x || rho_p)}.
// The sandwich chi(p) <= C <= max_x D(W_x || rho_p) certifies convergence.
inline double ba_capacity(const CqChannel& w, double tol = 1e-10, int max_iters = 20000) {
    const std::size_t nx = w.alphabet();
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
    double lower = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Operator avg = Operator::Zero(w.outputs.front().mat.rows(),
                                      w.outputs.front().mat.rows());
        for (std::size_t x = 0; x < nx; ++x) avg += p[x] * w.outputs[x].mat;
        const DensityOperator rho = DensityOperator::trusted(std::move(avg));
        std::vector<double> div(nx);
        double upper = 0.0;
        lower = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            div[x] = qbclab::relative_entropy(w.outputs[x], rho);
            upper = std::max(upper, div[x]);
            lower += p[x] * div[x];
        }
        if (upper - lower < tol) break;
        double norm = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            p[x] *= std::exp2(div[x]);
            norm += p[x];
        }
        for (double& v : p) v /= norm;
    }
    return lower;
}

// Direct minimization of sigma -> (1/(alpha-1)) log2 sum_y p(y) tr(W_y^alpha
// sigma^{1-alpha}) by pattern search over mixtures with random densities. The
// objective is convex in sigma, so shrinking steps converge to the infimum.
inline double direct_chi_alpha(const std::vector<double>& p,
                               const std::vector<DensityOperator>& outputs, double alpha,
                               qbclab::rng::Stream& st) {
    const std::size_t d = static_cast<std::size_t>(outputs.front().mat.rows());
    std::vector<Operator> wa;
    for (const auto& w : outputs) wa.push_back(qbclab::operator_power(w.mat, alpha));
    const auto objective = [&](const Operator& sigma) {
        const Operator spow = qbclab::operator_power(sigma, 1.0 - alpha);
        double acc = 0.0;
        for (std::size_t y = 0; y < outputs.size(); ++y)
            acc += p[y] * (wa[y] * spow).trace().real();
        return std::log2(acc) / (alpha - 1.0);
    };

    Operator sigma = Operator::Identity(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d)) /
                     static_cast<double>(d);
    double value = objective(sigma);
    double step = 0.5;
    while (step > 1e-7) {
        bool improved = false;
        for (int trial = 0; trial < 48; ++trial) {
            const DensityOperator dir = random_density(d, st);
            Operator cand = (1.0 - step) * sigma + step * dir.mat;
            const double v = objective(cand);
            if (v < value - 1e-13) {
                sigma = std::move(cand);
                value = v;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return value;
}

}  // namespace support
