#include "qbclab/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qbclab {

double max_abs(const Operator& m) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            v = std::max(v, std::abs(m(i, j)));
    return v;
}

bool is_hermitian(const Operator& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tolerance;
}

DensityOperator DensityOperator::validated(Operator m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw dimension_error("DensityOperator: matrix must be square and nonempty");
    if (!is_hermitian(m, tol::kHermitian))
        throw validation_error("DensityOperator: not Hermitian within 1e-10");
    double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace)
        throw validation_error("DensityOperator: trace " + std::to_string(tr) +
                               " differs from 1 beyond 1e-10");
    Eigen::SelfAdjointEigenSolver<Operator> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::kEigenFloor)
        throw validation_error("DensityOperator: eigenvalue " +
                               std::to_string(es.eigenvalues().minCoeff()) +
                               " below -1e-10");
    return DensityOperator{std::move(m)};
}

Povm Povm::validated(std::vector<Operator> elems) {
    Povm p{std::move(elems)};
    p.validate();
    return p;
}

void Povm::validate() const {
    if (elements.empty()) throw validation_error("Povm: no elements");
    const Eigen::Index d = elements.front().rows();
    Operator sum = Operator::Zero(d, d);
    for (std::size_t k = 0; k < elements.size(); ++k) {
        const Operator& e = elements[k];
        if (e.rows() != d || e.cols() != d)
            throw dimension_error("Povm: element " + std::to_string(k) + " has wrong shape");
        if (!is_hermitian(e, 1e-9))
            throw validation_error("Povm: element " + std::to_string(k) + " not Hermitian");
        Eigen::SelfAdjointEigenSolver<Operator> es(e, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < tol::kPovmPsd)
            throw validation_error("Povm: element " + std::to_string(k) +
                                   " has eigenvalue below -1e-9");
        sum += e;
    }
    if (operator_norm(sum - identity(static_cast<std::size_t>(d))) > tol::kPovmSum)
        throw validation_error("Povm: elements do not sum to identity within 1e-8");
}

Operator identity(std::size_t d) {
    return Operator::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

Operator ket_bra(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

Operator tensor(const Operator& a, const Operator& b) {
    const std::size_t rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
    const std::size_t cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
    check_dim(std::max(rows, cols), "tensor");
    Operator out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator::trusted(tensor(a.mat, b.mat));
}

Operator partial_trace(const Operator& m, std::size_t dim_a, std::size_t dim_b, int keep) {
    const Eigen::Index da = static_cast<Eigen::Index>(dim_a);
    const Eigen::Index db = static_cast<Eigen::Index>(dim_b);
    if (m.rows() != da * db || m.cols() != da * db)
        throw dimension_error("partial_trace: operator is not on the declared bipartition");
    if (keep != 0 && keep != 1) throw domain_error("partial_trace: keep must be 0 or 1");
    if (keep == 0) {
        Operator out = Operator::Zero(da, da);
        for (Eigen::Index i = 0; i < da; ++i)
            for (Eigen::Index j = 0; j < da; ++j) {
                Complex acc(0, 0);
                for (Eigen::Index k = 0; k < db; ++k) acc += m(i * db + k, j * db + k);
                out(i, j) = acc;
            }
        return out;
    }
    Operator out = Operator::Zero(db, db);
    for (Eigen::Index k = 0; k < db; ++k)
        for (Eigen::Index l = 0; l < db; ++l) {
            Complex acc(0, 0);
            for (Eigen::Index i = 0; i < da; ++i) acc += m(i * db + k, i * db + l);
            out(k, l) = acc;
        }
    return out;
}

Operator permute_factors(const Operator& m, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& perm) {
    const std::size_t k = dims.size();
    if (perm.size() != k) throw dimension_error("permute_factors: perm/dims size mismatch");
    std::vector<bool> seen(k, false);
    std::size_t total = 1;
    for (std::size_t f = 0; f < k; ++f) {
        if (perm[f] >= k || seen[perm[f]])
            throw domain_error("permute_factors: perm is not a permutation");
        seen[perm[f]] = true;
        if (dims[f] == 0) throw dimension_error("permute_factors: zero factor dimension");
        total *= dims[f];
    }
    if (m.rows() != static_cast<Eigen::Index>(total) || m.cols() != m.rows())
        throw dimension_error("permute_factors: operator does not match factor dimensions");

    // Strides of each source factor in the flat index, then the map
    // new_index(digits) = sum_f digits[perm[f]] * new_stride_f.
    std::vector<std::size_t> src_stride(k, 1);
    for (std::size_t f = k; f-- > 1;) src_stride[f - 1] = src_stride[f] * dims[f];
    std::vector<std::size_t> remap(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx, out_idx = 0;
        std::vector<std::size_t> digit(k);
        for (std::size_t f = 0; f < k; ++f) {
            digit[f] = rest / src_stride[f];
            rest %= src_stride[f];
        }
        for (std::size_t f = 0; f < k; ++f) out_idx = out_idx * dims[perm[f]] + digit[perm[f]];
        remap[idx] = out_idx;
    }
    Operator out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(remap[static_cast<std::size_t>(i)]),
                static_cast<Eigen::Index>(remap[static_cast<std::size_t>(j)])) = m(i, j);
    return out;
}

namespace {

// lexicographic (re, im) comparison of eigenvector columns for tie-breaking
bool lex_less(const Operator& vecs, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
        const Complex& x = vecs(i, a);
        const Complex& y = vecs(i, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

}  // namespace

Spectral spectral(const Operator& hermitian, double herm_tol) {
    if (hermitian.rows() != hermitian.cols())
        throw dimension_error("spectral: matrix must be square");
    if (!is_hermitian(hermitian, herm_tol))
        throw validation_error("spectral: matrix not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Operator> es((hermitian + hermitian.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
        throw validation_error("spectral: eigensolver failed to converge");
    const Eigen::Index d = hermitian.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Operator& vecs = es.eigenvectors();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (ev(a) != ev(b)) return ev(a) > ev(b);
        return lex_less(vecs, a, b);
    });
    Spectral out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        out.eigenvalues(k) = ev(order[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

namespace {

Operator apply_spectral_function(const Operator& psd, double (*f)(double, double), double arg) {
    Spectral s = spectral(psd);
    Eigen::VectorXd vals = s.eigenvalues;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < tol::kOpFuncFloor)
            throw validation_error("operator_function: eigenvalue " + std::to_string(vals(i)) +
                                   " below -1e-8");
        if (vals(i) < 0.0) vals(i) = 0.0;
        vals(i) = f(vals(i), arg);
    }
    return s.eigenvectors * vals.asDiagonal() * s.eigenvectors.adjoint();
}

}  // namespace

Operator operator_power(const Operator& psd, double exponent) {
    return apply_spectral_function(psd,
                                   [](double x, double t) {
                                       if (x <= 0.0) return t == 0.0 ? 1.0 : 0.0;
                                       return std::pow(x, t);
                                   },
                                   exponent);
}

Operator operator_log2(const Operator& psd) {
    return apply_spectral_function(psd,
                                   [](double x, double) {
                                       if (x <= 0.0) return 0.0;
                                       return std::log2(x);
                                   },
                                   0.0);
}

double trace_norm(const Operator& m) {
    Eigen::JacobiSVD<Operator> svd(m);
    return svd.singularValues().sum();
}

double operator_norm(const Operator& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Operator> svd(m);
    return svd.singularValues()(0);
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    if (a.dim() != b.dim()) throw dimension_error("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(a.mat - b.mat);
}

}  // namespace qbclab
