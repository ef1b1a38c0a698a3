#pragma once

#include "pdnsim/kernels.hpp"
#include "pdnsim/sparsela.hpp"
#include "pdnsim/types.hpp"

#include <string>
#include <vector>

namespace pdnsim {

class NoConvergence : public Error {
public:
    NoConvergence(int m_max, double last_r)
        : Error("Krylov residual " + std::to_string(last_r) +
                " did not meet the budget within m_max=" + std::to_string(m_max)),
          m_max(m_max), last_r(last_r) {}
    int m_max;
    double last_r;
};

class SingularHessenberg : public Error {
public:
    SingularHessenberg() : Error("Hessenberg matrix is singular") {}
};

/// Subspace flavor. Standard uses A = -C^{-1}G directly; Invert uses A^{-1};
/// Rational uses the shift-and-invert operator (I - gamma*A)^{-1}.
struct KrylovVariant {
    enum class Kind { Standard, Invert, Rational };
    Kind kind = Kind::Rational;
    double gamma = 1e-10; // Rational only

    static KrylovVariant standard() { return {Kind::Standard, 0.0}; }
    static KrylovVariant invert() { return {Kind::Invert, 0.0}; }
    static KrylovVariant rational(double gamma) {
        if (!(gamma > 0.0)) throw Error("rational gamma must be positive");
        return {Kind::Rational, gamma};
    }
    [[nodiscard]] std::string name() const;
};

/// Factorized operator for one subspace variant. Each Arnoldi iteration costs
/// one sparse mat-vec with X2 plus one substitution pair against X1:
///   Standard: X1 = C,          X2 = G
///   Invert:   X1 = G,          X2 = C
///   Rational: X1 = C + gamma*G, X2 = C
class KrylovOperator {
public:
    static KrylovOperator make(const SpMat& c, const SpMat& g, KrylovVariant variant,
                               int kernel_threads = 0);

    /// One operator application: A v, A^{-1} v, or (I-gamma*A)^{-1} v.
    [[nodiscard]] Vec apply(const Vec& v) const;

    [[nodiscard]] const KrylovVariant& variant() const { return variant_; }
    [[nodiscard]] const LuFactor& x1_factor() const { return x1_; }
    [[nodiscard]] long n() const { return x1_.n(); }
    [[nodiscard]] int kernel_threads() const { return threads_; }

    /// Residual weight |W v_{m+1}|: W = C, G, or (C+gamma*G)/gamma.
    [[nodiscard]] double weighted_norm(const Vec& v) const;

private:
    KrylovVariant variant_;
    LuFactor x1_;
    kernels::CsrMatrix x2_;
    kernels::CsrMatrix weight_;
    double weight_scale_ = 1.0;
    double sign_ = 1.0;
    int threads_ = 0;
};

/// Arnoldi output: orthonormal basis, raw Hessenberg entries, and the
/// (m+1)-th vector for the posterior residual. Immutable; evaluation at any
/// step h reuses it without further sparse solves.
struct KrylovBasis {
    DenseMat V;      // n x m, orthonormal columns
    DenseMat H_raw;  // (m+1) x m
    double beta = 0.0;
    int m = 0;
    KrylovVariant variant;
    double anchor_t = 0.0;
    Vec v_next;          // zero vector on happy breakdown
    double h_next = 0.0; // h_{m+1,m}
    bool happy = false;
    double last_residual = 0.0;

    [[nodiscard]] DenseMat hm() const { return H_raw.topLeftCorner(m, m); }
    /// Effective exponent generator: H_m, H_m^{-1}, or (I - H_m^{-1})/gamma.
    [[nodiscard]] DenseMat propagator() const;
    /// Leading mm-dimensional sub-basis (Arnoldi nesting).
    [[nodiscard]] KrylovBasis truncated(int mm) const;
};

/// Modified Gram-Schmidt Arnoldi with one reorthogonalization pass. Stops at
/// the first dimension whose posterior residual drops below eps*|v|, or on
/// happy breakdown. Throws NoConvergence if m_max is reached first.
KrylovBasis arnoldi(const KrylovOperator& op, const Vec& v, double h, double eps,
                    int m_max);

/// Arnoldi run to exactly m_max dimensions (or happy breakdown); never
/// throws NoConvergence. Used by the error-surface studies.
KrylovBasis arnoldi_fixed(const KrylovOperator& op, const Vec& v, int m_max);

/// Posterior residual estimate r(m,h) for the basis's variant:
///   Standard:  |beta h_{m+1,m} C v_{m+1}| * |e_m^T e^{h Hp} e_1|
///   Invert:    |beta h_{m+1,m} G v_{m+1}| * |e_m^T H_m^{-1} e^{h Hp} e_1|
///   Rational:  |beta h_{m+1,m} (C+gG)/g v_{m+1}| * |e_m^T H_m^{-1} e^{h Hp} e_1|
double residual_estimate(const KrylovOperator& op, const KrylovBasis& basis, double h);

/// beta * V_m * e^{h*Hp} * e_1, approximating e^{hA} v. h may differ from the
/// step the basis was built for (scaling invariance); no sparse solves.
Vec mevp_eval(const KrylovBasis& basis, double h);

struct SurfaceRow {
    std::string variant;
    double h = 0.0;
    int m = 0;
    double gamma = 0.0;
    double rel_err = 0.0;
};

/// True relative MEVP error against the dense reference, for each (h, m) of
/// the grid. Requires nonsingular C (dense oracle); n <= 500 intended.
std::vector<SurfaceRow> error_surface(const SpMat& c, const SpMat& g, const Vec& v,
                                      KrylovVariant variant,
                                      const std::vector<double>& h_grid,
                                      const std::vector<int>& m_grid);

} // namespace pdnsim
