#include "pdnsim/krylov.hpp"

#include "pdnsim/denseref.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace pdnsim {

std::string KrylovVariant::name() const {
    switch (kind) {
    case Kind::Standard: return "standard";
    case Kind::Invert: return "invert";
    case Kind::Rational: return "rational";
    }
    return "?";
}

KrylovOperator KrylovOperator::make(const SpMat& c, const SpMat& g, KrylovVariant variant,
                                    int kernel_threads) {
    KrylovOperator op;
    op.variant_ = variant;
    op.threads_ = kernel_threads;
    switch (variant.kind) {
    case KrylovVariant::Kind::Standard:
        op.x1_ = LuFactor::decompose(c);
        op.x2_ = kernels::CsrMatrix::from_sparse(g);
        op.weight_ = kernels::CsrMatrix::from_sparse(c);
        op.weight_scale_ = 1.0;
        op.sign_ = -1.0; // A = -C^{-1} G
        break;
    case KrylovVariant::Kind::Invert:
        op.x1_ = LuFactor::decompose(g);
        op.x2_ = kernels::CsrMatrix::from_sparse(c);
        op.weight_ = kernels::CsrMatrix::from_sparse(g);
        op.weight_scale_ = 1.0;
        op.sign_ = -1.0; // A^{-1} = -G^{-1} C
        break;
    case KrylovVariant::Kind::Rational: {
        const SpMat x1 = c + variant.gamma * g;
        op.x1_ = LuFactor::decompose(x1);
        op.x2_ = kernels::CsrMatrix::from_sparse(c);
        op.weight_ = kernels::CsrMatrix::from_sparse(x1);
        op.weight_scale_ = 1.0 / variant.gamma;
        op.sign_ = 1.0; // (I - gamma*A)^{-1} = (C + gamma*G)^{-1} C
        break;
    }
    }
    return op;
}

Vec KrylovOperator::apply(const Vec& v) const {
    Vec t(x2_.rows);
    kernels::spmv(x2_, v.data(), t.data(), threads_);
    Vec w = x1_.solve(t);
    if (sign_ < 0) w = -w;
    return w;
}

double KrylovOperator::weighted_norm(const Vec& v) const {
    Vec t(weight_.rows);
    kernels::spmv(weight_, v.data(), t.data(), threads_);
    return weight_scale_ * kernels::norm2(t, threads_);
}

DenseMat KrylovBasis::propagator() const {
    const DenseMat h = hm();
    switch (variant.kind) {
    case KrylovVariant::Kind::Standard:
        return h;
    case KrylovVariant::Kind::Invert:
    case KrylovVariant::Kind::Rational: {
        Eigen::FullPivLU<DenseMat> lu(h);
        if (!lu.isInvertible())
            throw SingularHessenberg();
        const DenseMat hinv = lu.inverse();
        if (variant.kind == KrylovVariant::Kind::Invert) return hinv;
        return (DenseMat::Identity(m, m) - hinv) / variant.gamma;
    }
    }
    return h;
}

KrylovBasis KrylovBasis::truncated(int mm) const {
    if (mm >= m) return *this;
    if (mm < 1) throw Error("cannot truncate basis below dimension 1");
    KrylovBasis b;
    b.V = V.leftCols(mm);
    b.H_raw = H_raw.topLeftCorner(mm + 1, mm);
    b.beta = beta;
    b.m = mm;
    b.variant = variant;
    b.anchor_t = anchor_t;
    b.v_next = V.col(mm);
    b.h_next = H_raw(mm, mm - 1);
    b.happy = false;
    return b;
}

namespace {

/// Scalar bracket of the residual estimate: e_m^T M e^{h Hp} e_1 with
/// M = I (standard) or H_m^{-1} (invert/rational).
double residual_bracket(const KrylovBasis& basis, double h) {
    const DenseMat hp = basis.propagator();
    const Vec col = expm_dense(hp, h).col(0);
    switch (basis.variant.kind) {
    case KrylovVariant::Kind::Standard:
        return col[basis.m - 1];
    case KrylovVariant::Kind::Invert:
    case KrylovVariant::Kind::Rational: {
        Eigen::PartialPivLU<DenseMat> lu(basis.hm());
        const Vec z = lu.solve(col);
        if (!z.allFinite())
            throw SingularHessenberg();
        return z[basis.m - 1];
    }
    }
    return 0.0;
}

struct ArnoldiOptions {
    double h = 0.0;
    double eps = 0.0; // <= 0: never stop on the residual
    int m_max = 30;
    bool throw_on_budget = true;
};

KrylovBasis arnoldi_core(const KrylovOperator& op, const Vec& v, const ArnoldiOptions& opt) {
    const long n = v.size();
    const int threads = op.kernel_threads();
    KrylovBasis basis;
    basis.variant = op.variant();
    basis.beta = kernels::norm2(v, threads);
    if (basis.beta == 0.0) {
        // Zero start vector: the exact propagated vector is zero.
        basis.m = 0;
        basis.happy = true;
        basis.v_next = Vec::Zero(n);
        return basis;
    }

    const int m_max = opt.m_max;
    DenseMat V(n, m_max + 1);
    DenseMat H = DenseMat::Zero(m_max + 1, m_max);
    V.col(0) = v / basis.beta;

    auto finalize = [&](int m, bool happy, double last_r) {
        basis.m = m;
        basis.V = V.leftCols(m);
        basis.H_raw = H.topLeftCorner(m + 1, m);
        basis.happy = happy;
        const bool no_next = happy || m == 0;
        basis.h_next = no_next ? 0.0 : H(m, m - 1);
        basis.v_next = no_next ? Vec(Vec::Zero(n)) : Vec(V.col(m));
        basis.last_residual = last_r;
        return basis;
    };

    double last_r = 0.0;
    for (int j = 0; j < m_max; ++j) {
        Vec w = op.apply(V.col(j));
        const double wnorm0 = kernels::norm2(w, threads);

        for (int i = 0; i <= j; ++i) {
            const double hij = kernels::dot(w.data(), V.col(i).data(), n, threads);
            H(i, j) = hij;
            kernels::axpy(-hij, V.col(i).data(), w.data(), n, threads);
        }
        double wnorm = kernels::norm2(w, threads);
        if (wnorm < 0.7 * wnorm0) {
            // One reorthogonalization pass against loss of orthogonality.
            for (int i = 0; i <= j; ++i) {
                const double corr = kernels::dot(w.data(), V.col(i).data(), n, threads);
                H(i, j) += corr;
                kernels::axpy(-corr, V.col(i).data(), w.data(), n, threads);
            }
            wnorm = kernels::norm2(w, threads);
        }
        H(j + 1, j) = wnorm;

        if (wnorm <= 1e-14 * std::max(wnorm0, 1e-300)) {
            // Happy breakdown: the subspace is invariant and the result exact.
            return finalize(j + 1, true, 0.0);
        }
        V.col(j + 1) = w / wnorm;

        if (opt.eps > 0.0) {
            // Residual probe needs only the Hessenberg block and v_{j+2}.
            KrylovBasis probe;
            probe.variant = basis.variant;
            probe.beta = basis.beta;
            probe.m = j + 1;
            probe.H_raw = H.topLeftCorner(j + 2, j + 1);
            probe.h_next = wnorm;
            probe.v_next = V.col(j + 1);
            last_r = residual_estimate(op, probe, opt.h);
            if (last_r < opt.eps * basis.beta)
                return finalize(j + 1, false, last_r);
        }
    }
    if (opt.eps > 0.0 && opt.throw_on_budget)
        throw NoConvergence(m_max, last_r);
    return finalize(m_max, false, last_r);
}

} // namespace

KrylovBasis arnoldi(const KrylovOperator& op, const Vec& v, double h, double eps,
                    int m_max) {
    return arnoldi_core(op, v, {h, eps, m_max, true});
}

KrylovBasis arnoldi_fixed(const KrylovOperator& op, const Vec& v, int m_max) {
    return arnoldi_core(op, v, {0.0, 0.0, m_max, false});
}

double residual_estimate(const KrylovOperator& op, const KrylovBasis& basis, double h) {
    if (basis.m == 0 || basis.h_next == 0.0)
        return 0.0;
    const double bracket = residual_bracket(basis, h);
    return basis.beta * basis.h_next * std::abs(bracket) * op.weighted_norm(basis.v_next);
}

Vec mevp_eval(const KrylovBasis& basis, double h) {
    if (basis.m == 0)
        return basis.v_next; // zero vector of the right size
    const DenseMat hp = basis.propagator();
    const Vec col = expm_dense(hp, h).col(0);
    return basis.V * (basis.beta * col);
}

std::vector<SurfaceRow> error_surface(const SpMat& c, const SpMat& g, const Vec& v,
                                      KrylovVariant variant,
                                      const std::vector<double>& h_grid,
                                      const std::vector<int>& m_grid) {
    const int m_top = *std::max_element(m_grid.begin(), m_grid.end());
    KrylovOperator op = KrylovOperator::make(c, g, variant);
    const KrylovBasis full = arnoldi_fixed(op, v, m_top);

    std::vector<SurfaceRow> rows;
    rows.reserve(h_grid.size() * m_grid.size());
    for (double h : h_grid) {
        const Vec exact = expmv_dense(c, g, v, h);
        const double scale = exact.norm();
        for (int m : m_grid) {
            SurfaceRow row;
            row.variant = variant.name();
            row.h = h;
            row.m = std::min(m, full.m);
            row.gamma = variant.kind == KrylovVariant::Kind::Rational ? variant.gamma : 0.0;
            const Vec approx = mevp_eval(full.truncated(row.m), h);
            row.rel_err = (exact - approx).norm() / (scale > 0.0 ? scale : 1.0);
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace pdnsim
