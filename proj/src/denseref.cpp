#include "pdnsim/denseref.hpp"

#include "pdnsim/sparsela.hpp"

#include <Eigen/Eigenvalues>

namespace pdnsim {

namespace {

bool diagonal_positive(const SpMat& c) {
    for (int k = 0; k < c.outerSize(); ++k)
        for (SpMat::InnerIterator it(c, k); it; ++it)
            if (it.row() != it.col() || !(it.value() > 0.0)) return false;
    return c.rows() == c.cols();
}

bool symmetric(const SpMat& g) {
    const SpMat gt = SpMat(g.transpose());
    const double scale = g.nonZeros() ? g.coeffs().cwiseAbs().maxCoeff() : 0.0;
    const SpMat diff = g - gt;
    const double dmax = diff.nonZeros() ? diff.coeffs().cwiseAbs().maxCoeff() : 0.0;
    return dmax <= 1e-12 * (scale + 1.0);
}

Vec diagonal_of(const SpMat& c) {
    Vec d = Vec::Zero(c.rows());
    for (int k = 0; k < c.outerSize(); ++k)
        for (SpMat::InnerIterator it(c, k); it; ++it) d[it.row()] = it.value();
    return d;
}

/// -C^{-1/2} G C^{-1/2}, symmetric when C is diagonal positive and G symmetric.
DenseMat symmetrized_a(const SpMat& g, const Vec& sqrt_c) {
    DenseMat at = DenseMat(g);
    const long n = at.rows();
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) at(i, j) = -at(i, j) / (sqrt_c[i] * sqrt_c[j]);
    return at;
}

} // namespace

DenseMat dense_a(const SpMat& c, const SpMat& g) {
    const DenseMat cd = DenseMat(c);
    Eigen::FullPivLU<DenseMat> lu(cd);
    if (!lu.isInvertible())
        throw OracleUnavailable("C is singular");
    return -lu.solve(DenseMat(g));
}

Vec expmv_dense(const SpMat& c, const SpMat& g, const Vec& v, double h) {
    if (diagonal_positive(c) && symmetric(g)) {
        const Vec s = diagonal_of(c).cwiseSqrt();
        Eigen::SelfAdjointEigenSolver<DenseMat> es(symmetrized_a(g, s));
        if (es.info() != Eigen::Success)
            throw OracleUnavailable("eigendecomposition failed");
        // e^{hA} v = S^{-1} Q e^{h Lambda} Q^T S v with S = diag(sqrt(C)).
        const Vec w = (es.eigenvalues().array() * h).exp();
        const Vec sv = s.cwiseProduct(v);
        const Vec z = es.eigenvectors() * (w.asDiagonal() * (es.eigenvectors().transpose() * sv));
        return z.cwiseQuotient(s);
    }
    const DenseMat a = dense_a(c, g);
    return expm_dense(a, h) * v;
}

std::pair<double, double> eigen_range(const SpMat& c, const SpMat& g) {
    if (diagonal_positive(c) && symmetric(g)) {
        const Vec s = diagonal_of(c).cwiseSqrt();
        Eigen::SelfAdjointEigenSolver<DenseMat> es(symmetrized_a(g, s));
        return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }
    const DenseMat a = dense_a(c, g);
    Eigen::EigenSolver<DenseMat> es(a);
    const Eigen::VectorXd re = es.eigenvalues().real();
    return {re.minCoeff(), re.maxCoeff()};
}

} // namespace pdnsim
