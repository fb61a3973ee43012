// Entropic functionals in bits: von Neumann entropy, mutual information,
// ensemble-weighted conditional mutual information, Holevo quantity, the
// Petz-Renyi divergence on alpha in (0,1) with its Sibson-style channel
// optimization chi_alpha, and the entropy/CMI continuity bound oracles.
#pragma once

#include <vector>

#include "qbclab/quantum.hpp"

namespace qbclab {

// classical-label ensemble of states on a common space
struct Ensemble {
    std::vector<double> weights;
    std::vector<DensityOperator> states;

    static Ensemble validated(std::vector<double> w, std::vector<DensityOperator> s);
};

double binary_entropy(double x);  // h(x) on [0,1]; extended by h(x>1) := 0

double entropy(const DensityOperator& rho);  // bits; eigenvalues < 1e-12 contribute 0
double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues);

// I(A;B) = S(A) + S(B) - S(AB) of a state on C^{da} (x) C^{db}
double mutual_information(const DensityOperator& rho_ab, std::size_t dim_a, std::size_t dim_b);

// I(A;B|X) = sum_x p(x) I(A;B, omega^x): the ensemble-weighted sum over the
// classical conditioning label. Each state lives on C^{da} (x) C^{db}.
double conditional_mutual_information(const Ensemble& ens, std::size_t dim_a, std::size_t dim_b);

// chi(p, W) = S(sum p W) - sum p S(W)
double holevo(const std::vector<double>& p, const std::vector<DensityOperator>& outputs);

// D(rho||sigma) in bits; +infinity if supp(rho) is not contained in supp(sigma)
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

// Petz-Renyi divergence, alpha in (0,1):
//   D_alpha = (1/(alpha-1)) log2 tr(rho^alpha sigma^{1-alpha}),
// powers taken on supports.
double renyi_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha);

// chi_alpha(p, W) = inf_sigma D_alpha(joint || marginal (x) sigma). The infimum
// has the closed-form minimizer sigma* prop (sum_y p(y) W(y)^alpha)^{1/alpha}.
double chi_alpha(const std::vector<double>& p, const std::vector<DensityOperator>& outputs,
                 double alpha);
DensityOperator chi_alpha_minimizer(const std::vector<double>& p,
                                    const std::vector<DensityOperator>& outputs, double alpha);

enum class BoundKind { Entropy, Cmi };

// Continuity-bound oracles at trace-norm deviation delta in [0,2]:
//   Entropy: delta*log2(d-1) + h(delta)          (valid for delta <= 2/3)
//   Cmi:     2*(delta*log2(d) + (1+delta)*h(delta/(1+delta)))
double continuity_bounds(double delta, std::size_t d, BoundKind kind);

}  // namespace qbclab
