// Dense finite-dimensional operator core: states, POVMs, tensor/partial-trace
// plumbing, spectral decomposition with a deterministic ordering, operator
// functions, and norms. Dense complex linear algebra is delegated to Eigen;
// everything here is the contract layer that the rest of the library builds on.
//
// Conventions: Hilbert spaces are C^d with the computational basis; composite
// spaces use row-major Kronecker ordering (index of A varies slowest). All
// logarithms elsewhere are base 2; this header is log-free.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "qbclab/errors.hpp"

namespace qbclab {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

// classical word over a finite alphabet
using Word = std::vector<std::uint16_t>;

namespace tol {
inline constexpr double kHermitian = 1e-10;        // density-operator hermiticity
inline constexpr double kEigenFloor = -1e-10;      // density-operator eigenvalue floor
inline constexpr double kTrace = 1e-10;            // |tr - 1|
inline constexpr double kPovmPsd = -1e-9;          // POVM element eigenvalue floor
inline constexpr double kPovmSum = 1e-8;           // ||sum - id||_op
inline constexpr double kSpectralHermitian = 1e-8; // spectral() input hermiticity
inline constexpr double kSpectralResidPerDim = 1e-8;
inline constexpr double kOpFuncFloor = -1e-8;      // operator_function hard floor
inline constexpr double kEntropyEigClip = 1e-12;   // eigenvalues below this add 0 entropy
}  // namespace tol

double max_abs(const Operator& m);
bool is_hermitian(const Operator& m, double tolerance);

// Unit-trace positive semidefinite operator. validated() enforces the
// invariants; trusted() is for internal paths where they hold by construction
// (tensor products, partial traces, convex mixtures of valid states).
struct DensityOperator {
    Operator mat;

    static DensityOperator validated(Operator m);
    static DensityOperator trusted(Operator m) { return DensityOperator{std::move(m)}; }

    Eigen::Index dim() const { return mat.rows(); }
};

// POVM: PSD elements summing to the identity. The final element may be an
// abort outcome added by decoder completion; it is an ordinary element here.
struct Povm {
    std::vector<Operator> elements;

    static Povm validated(std::vector<Operator> elems);
    static Povm trusted(std::vector<Operator> elems) { return Povm{std::move(elems)}; }

    std::size_t size() const { return elements.size(); }
    void validate() const;  // re-check invariants (throws validation_error)
};

// Spectral decomposition, eigenvalues descending. Ties are broken by
// lexicographic comparison of eigenvector entries (re, then im) so the
// ordering is a pure function of the matrix bits.
struct Spectral {
    Eigen::VectorXd eigenvalues;  // descending
    Operator eigenvectors;        // columns aligned with eigenvalues
};

Operator identity(std::size_t d);
Operator ket_bra(const Eigen::VectorXcd& v);  // |v><v| (v need not be normalized)

// Kronecker product with the composite-dimension cap. One multiplication per
// output entry; no additions, so dyadic inputs stay exact.
Operator tensor(const Operator& a, const Operator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Trace out one factor of a bipartite operator on C^{da} (x) C^{db}.
// keep = 0 keeps the A factor, keep = 1 keeps B.
Operator partial_trace(const Operator& m, std::size_t dim_a, std::size_t dim_b, int keep);

// Reorder tensor factors: the operator lives on (x)_k C^{dims[k]}, and factor
// perm[k] of the source becomes factor k of the result. Pure index remapping.
Operator permute_factors(const Operator& m, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& perm);

Spectral spectral(const Operator& hermitian, double herm_tol = tol::kSpectralHermitian);

// f applied to the spectrum of a PSD operator. Eigenvalues in
// [kOpFuncFloor, 0) are clipped to 0; below the floor is a validation error.
// power(): 0^t := 0 for t != 0 (support convention; t < 0 is the
// pseudo-inverse power on the support). log2_(): zero eigenvalues contribute 0.
Operator operator_power(const Operator& psd, double exponent);
Operator operator_log2(const Operator& psd);

double trace_norm(const Operator& m);     // sum of singular values
double operator_norm(const Operator& m);  // largest singular value
double trace_distance(const DensityOperator& a, const DensityOperator& b);  // ||a-b||_1 / 2

}  // namespace qbclab
