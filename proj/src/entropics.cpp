#include "qbclab/entropics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qbclab {

Ensemble Ensemble::validated(std::vector<double> w, std::vector<DensityOperator> s) {
    if (w.size() != s.size() || w.empty())
        throw validation_error("Ensemble: weights/states size mismatch");
    double total = 0.0;
    for (double x : w) {
        if (x < -1e-12) throw validation_error("Ensemble: negative weight");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw validation_error("Ensemble: weights sum to " + std::to_string(total));
    const Eigen::Index d = s.front().dim();
    for (const auto& st : s)
        if (st.dim() != d) throw dimension_error("Ensemble: states on different spaces");
    return Ensemble{std::move(w), std::move(s)};
}

double binary_entropy(double x) {
    if (x < 0.0) throw domain_error("binary_entropy: negative argument");
    if (x >= 1.0 || x <= 0.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        double l = eigenvalues(i);
        if (l < tol::kEntropyEigClip) continue;
        s -= l * std::log2(l);
    }
    return s;
}

double entropy(const DensityOperator& rho) {
    return entropy_of_spectrum(spectral(rho.mat).eigenvalues);
}

double mutual_information(const DensityOperator& rho_ab, std::size_t dim_a, std::size_t dim_b) {
    DensityOperator a = DensityOperator::trusted(partial_trace(rho_ab.mat, dim_a, dim_b, 0));
    DensityOperator b = DensityOperator::trusted(partial_trace(rho_ab.mat, dim_a, dim_b, 1));
    return entropy(a) + entropy(b) - entropy(rho_ab);
}

double conditional_mutual_information(const Ensemble& ens, std::size_t dim_a, std::size_t dim_b) {
    double acc = 0.0;
    for (std::size_t x = 0; x < ens.weights.size(); ++x) {
        if (ens.weights[x] <= 0.0) continue;
        acc += ens.weights[x] * mutual_information(ens.states[x], dim_a, dim_b);
    }
    return acc;
}

double holevo(const std::vector<double>& p, const std::vector<DensityOperator>& outputs) {
    if (p.size() != outputs.size() || p.empty())
        throw validation_error("holevo: distribution/outputs size mismatch");
    const Eigen::Index d = outputs.front().dim();
    Operator avg = Operator::Zero(d, d);
    double cond = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) {
        if (outputs[y].dim() != d) throw dimension_error("holevo: outputs on different spaces");
        if (p[y] < -1e-12) throw validation_error("holevo: negative probability");
        if (p[y] <= 0.0) continue;
        avg += p[y] * outputs[y].mat;
        cond += p[y] * entropy(outputs[y]);
    }
    return entropy(DensityOperator::trusted(avg)) - cond;
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw dimension_error("relative_entropy: dimension mismatch");
    Spectral sr = spectral(rho.mat);
    Spectral ss = spectral(sigma.mat);
    // support check: rho's range must lie in sigma's support
    for (Eigen::Index i = 0; i < sr.eigenvalues.size(); ++i) {
        if (sr.eigenvalues(i) < tol::kEntropyEigClip) continue;
        double outside = 0.0;
        for (Eigen::Index j = 0; j < ss.eigenvalues.size(); ++j) {
            if (ss.eigenvalues(j) >= tol::kEntropyEigClip) continue;
            Complex ov = ss.eigenvectors.col(j).adjoint() * sr.eigenvectors.col(i);
            outside += std::norm(ov);
        }
        if (outside * sr.eigenvalues(i) > 1e-10) return std::numeric_limits<double>::infinity();
    }
    double tr_rho_log_sigma = 0.0;
    for (Eigen::Index j = 0; j < ss.eigenvalues.size(); ++j) {
        double l = ss.eigenvalues(j);
        if (l < tol::kEntropyEigClip) continue;
        double w = (ss.eigenvectors.col(j).adjoint() * rho.mat * ss.eigenvectors.col(j))(0).real();
        tr_rho_log_sigma += w * std::log2(l);
    }
    return -entropy(rho) - tr_rho_log_sigma;
}

double renyi_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw domain_error("renyi_divergence: alpha must lie in (0,1)");
    if (rho.dim() != sigma.dim()) throw dimension_error("renyi_divergence: dimension mismatch");
    Operator ra = operator_power(rho.mat, alpha);
    Operator sb = operator_power(sigma.mat, 1.0 - alpha);
    double q = (ra * sb).trace().real();
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(q) / (alpha - 1.0);
}

namespace {

// A = sum_y p(y) W(y)^alpha: the Sibson kernel of the channel optimization
Operator sibson_kernel(const std::vector<double>& p, const std::vector<DensityOperator>& outputs,
                       double alpha) {
    if (p.size() != outputs.size() || p.empty())
        throw validation_error("chi_alpha: distribution/outputs size mismatch");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("chi_alpha: alpha must lie in (0,1)");
    const Eigen::Index d = outputs.front().dim();
    Operator a = Operator::Zero(d, d);
    for (std::size_t y = 0; y < p.size(); ++y) {
        if (p[y] <= 0.0) continue;
        a += p[y] * operator_power(outputs[y].mat, alpha);
    }
    return a;
}

}  // namespace

double chi_alpha(const std::vector<double>& p, const std::vector<DensityOperator>& outputs,
                 double alpha) {
    Operator a = sibson_kernel(p, outputs, alpha);
    double t = operator_power(a, 1.0 / alpha).trace().real();
    return alpha / (alpha - 1.0) * std::log2(t);
}

DensityOperator chi_alpha_minimizer(const std::vector<double>& p,
                                    const std::vector<DensityOperator>& outputs, double alpha) {
    Operator a = sibson_kernel(p, outputs, alpha);
    Operator m = operator_power(a, 1.0 / alpha);
    return DensityOperator::trusted(m / m.trace().real());
}

double continuity_bounds(double delta, std::size_t d, BoundKind kind) {
    if (delta < 0.0 || delta > 2.0)
        throw domain_error("continuity_bounds: delta must lie in [0,2]");
    if (d < 2) throw domain_error("continuity_bounds: dimension must be >= 2");
    const double dd = static_cast<double>(d);
    switch (kind) {
        case BoundKind::Entropy:
            return delta * std::log2(dd - 1.0) + binary_entropy(delta);
        case BoundKind::Cmi:
            return 2.0 * (delta * std::log2(dd) +
                          (1.0 + delta) * binary_entropy(delta / (1.0 + delta)));
    }
    throw domain_error("continuity_bounds: unknown kind");
}

}  // namespace qbclab
