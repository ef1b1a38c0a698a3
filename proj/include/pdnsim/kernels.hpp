#pragma once

#include "pdnsim/types.hpp"

#include <cstddef>
#include <vector>

namespace pdnsim::kernels {

/// Upper bound on threads used by the OpenMP kernels (and the DR-MATEX pool).
/// 0 restores the OpenMP default. Thread count never changes results: every
/// kernel is blocked so that partial sums are formed in a fixed order.
void set_max_threads(int n);
int max_threads();

/// Row-major compressed sparse storage used by the matrix-vector kernels.
/// Column-major Eigen matrices are converted once and reused for a whole run.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> vals;

    static CsrMatrix from_sparse(const SpMat& a);
    [[nodiscard]] bool empty() const { return rows == 0; }
};

// Production kernels. OpenMP-parallel, bitwise-deterministic in the thread
// count: per-row (spmv) and per-block (dot) sums are sequential, and blocks
// are combined in index order.
void spmv(const CsrMatrix& a, const double* x, double* y, int threads = 0);
double dot(const double* x, const double* y, std::size_t n, int threads = 0);
void axpy(double alpha, const double* x, double* y, std::size_t n, int threads = 0);
void scal(double alpha, double* x, std::size_t n, int threads = 0);
double norm2(const double* x, std::size_t n, int threads = 0);

// Serial reference implementations, kept for correctness tests and the
// kernel benchmark. spmv/axpy references are bitwise-identical to the
// parallel kernels; dot_ref uses a plain running sum and differs only by
// rounding.
void spmv_ref(const CsrMatrix& a, const double* x, double* y);
double dot_ref(const double* x, const double* y, std::size_t n);
void axpy_ref(double alpha, const double* x, double* y, std::size_t n);

// Eigen conveniences.
inline Vec spmv(const CsrMatrix& a, const Vec& x, int threads = 0) {
    Vec y(a.rows);
    spmv(a, x.data(), y.data(), threads);
    return y;
}
inline double dot(const Vec& x, const Vec& y, int threads = 0) {
    return dot(x.data(), y.data(), static_cast<std::size_t>(x.size()), threads);
}
inline double norm2(const Vec& x, int threads = 0) {
    return norm2(x.data(), static_cast<std::size_t>(x.size()), threads);
}

} // namespace pdnsim::kernels
