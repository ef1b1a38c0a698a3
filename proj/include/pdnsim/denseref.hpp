#pragma once

#include "pdnsim/types.hpp"

namespace pdnsim {

class OracleUnavailable : public Error {
public:
    explicit OracleUnavailable(const std::string& why)
        : Error("dense reference unavailable: " + why) {}
};

/// Dense A = -C^{-1} G. Throws OracleUnavailable when C is singular.
DenseMat dense_a(const SpMat& c, const SpMat& g);

/// Reference e^{hA} v for small systems. Uses a symmetric eigendecomposition
/// (via the C^{-1/2} similarity) when C is diagonal and G symmetric, which
/// keeps the reference path independent of the Pade exponential; otherwise
/// falls back to expm_dense on the dense A.
Vec expmv_dense(const SpMat& c, const SpMat& g, const Vec& v, double h);

/// Extreme eigenvalue real parts of A (most negative, least negative),
/// computed densely. Used to verify generated stiffness ratios.
std::pair<double, double> eigen_range(const SpMat& c, const SpMat& g);

} // namespace pdnsim
