#include "pdnsim/sparsela.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace pdnsim {

namespace stats {
namespace {
std::atomic<std::uint64_t> g_lu_count{0};
std::atomic<std::uint64_t> g_pairs{0};
} // namespace

std::uint64_t lu_count() { return g_lu_count.load(std::memory_order_relaxed); }
std::uint64_t substitution_pairs() { return g_pairs.load(std::memory_order_relaxed); }
void reset() {
    g_lu_count.store(0, std::memory_order_relaxed);
    g_pairs.store(0, std::memory_order_relaxed);
}
} // namespace stats

struct LuFactor::Impl {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

LuFactor LuFactor::decompose(const SpMat& a) {
    if (a.rows() != a.cols())
        throw DimensionMismatch(a.rows(), a.cols());

    LuFactor f;
    f.impl_ = std::make_shared<Impl>();
    f.pair_count_ = std::make_shared<std::atomic<std::uint64_t>>(0);
    f.n_ = a.rows();
    f.fill_.nnz_input = a.nonZeros();

    SpMat ac = a;
    ac.makeCompressed();
    f.impl_->lu.analyzePattern(ac);
    f.impl_->lu.factorize(ac);
    if (f.impl_->lu.info() != Eigen::Success)
        throw SingularMatrix(-1);
    f.fill_.nnz_factors = f.impl_->lu.nnzL() + f.impl_->lu.nnzU();

    // A probe solve catches pivots below ~1e-14*max|A| that the factorization
    // accepted: the residual blows up or turns non-finite.
    if (f.n_ > 0) {
        Vec probe = Vec::Ones(f.n_);
        Vec x = f.impl_->lu.solve(probe);
        if (!x.allFinite())
            throw SingularMatrix(-1);
        const double amax = Vec(ac.coeffs()).cwiseAbs().maxCoeff();
        const double resid = (ac * x - probe).cwiseAbs().maxCoeff();
        const double scale = amax * x.cwiseAbs().maxCoeff() + 1.0;
        if (!(resid <= 1e-8 * scale))
            throw SingularMatrix(-1);
    }

    stats::g_lu_count.fetch_add(1, std::memory_order_relaxed);
    return f;
}

Vec LuFactor::solve(const Vec& b) const {
    if (!impl_)
        throw Error("solve on an empty LuFactor");
    if (b.size() != n_)
        throw DimensionMismatch(n_, b.size());
    pair_count_->fetch_add(1, std::memory_order_relaxed);
    stats::g_pairs.fetch_add(1, std::memory_order_relaxed);
    return impl_->lu.solve(b);
}

std::uint64_t LuFactor::pairs() const {
    return pair_count_ ? pair_count_->load(std::memory_order_relaxed) : 0;
}

// ---------------------------------------------------------------------------
// Dense matrix exponential: scaling-and-squaring with the [13/13] diagonal
// Pade approximant (Higham 2005).
// ---------------------------------------------------------------------------

namespace {

DenseMat pade13(const DenseMat& a) {
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const long n = a.rows();
    const DenseMat ident = DenseMat::Identity(n, n);
    const DenseMat a2 = a * a;
    const DenseMat a4 = a2 * a2;
    const DenseMat a6 = a4 * a2;
    const DenseMat u =
        a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
             b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const DenseMat v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
        b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

} // namespace

DenseMat expm_dense(const DenseMat& h, double scale) {
    if (h.rows() != h.cols())
        throw DimensionMismatch(h.rows(), h.cols());
    DenseMat a = scale * h;
    if (!a.allFinite())
        throw Overflow();
    if (a.rows() == 0)
        return a;

    const double theta13 = 5.371920351148152;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        a /= std::pow(2.0, squarings);
    }
    DenseMat e = pade13(a);
    for (int i = 0; i < squarings; ++i)
        e = e * e;
    if (!e.allFinite())
        throw Overflow();
    return e;
}

} // namespace pdnsim
