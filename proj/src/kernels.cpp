#include "pdnsim/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pdnsim::kernels {

namespace {

std::atomic<int> g_max_threads{0};

int resolve_threads(int requested) {
    int cap = g_max_threads.load(std::memory_order_relaxed);
    int n = requested;
    if (n <= 0) n = cap;
#ifdef _OPENMP
    if (n <= 0) n = omp_get_max_threads();
    if (cap > 0) n = std::min(n, cap);
#else
    n = 1;
#endif
    return std::max(n, 1);
}

// Fixed accumulation block: partial sums are always formed per 1024-element
// block and combined in block order, so results do not depend on the thread
// count or schedule.
constexpr std::size_t kBlock = 1024;

} // namespace

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

int max_threads() { return resolve_threads(0); }

CsrMatrix CsrMatrix::from_sparse(const SpMat& a) {
    CsrMatrix m;
    m.rows = static_cast<int>(a.rows());
    m.cols = static_cast<int>(a.cols());
    Eigen::SparseMatrix<double, Eigen::RowMajor> r = a;
    r.makeCompressed();
    m.row_ptr.assign(r.outerIndexPtr(), r.outerIndexPtr() + r.rows() + 1);
    m.col_idx.assign(r.innerIndexPtr(), r.innerIndexPtr() + r.nonZeros());
    m.vals.assign(r.valuePtr(), r.valuePtr() + r.nonZeros());
    return m;
}

void spmv(const CsrMatrix& a, const double* x, double* y, int threads) {
    const int nt = resolve_threads(threads);
    const int n = a.rows;
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            acc += a.vals[k] * x[a.col_idx[k]];
        y[i] = acc;
    }
}

void spmv_ref(const CsrMatrix& a, const double* x, double* y) {
    for (int i = 0; i < a.rows; ++i) {
        double acc = 0.0;
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            acc += a.vals[k] * x[a.col_idx[k]];
        y[i] = acc;
    }
}

double dot(const double* x, const double* y, std::size_t n, int threads) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    if (nblocks == 1) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
        return acc;
    }
    std::vector<double> partial(nblocks);
    const int nt = resolve_threads(threads);
    const long long nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += x[i] * y[i];
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double dot_ref(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n, int threads) {
    const int nt = resolve_threads(threads);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < nn; ++i) y[i] += alpha * x[i];
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, double* x, std::size_t n, int threads) {
    const int nt = resolve_threads(threads);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < nn; ++i) x[i] *= alpha;
}

double norm2(const double* x, std::size_t n, int threads) {
    return std::sqrt(dot(x, x, n, threads));
}

} // namespace pdnsim::kernels
