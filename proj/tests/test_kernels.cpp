#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdnsim/kernels.hpp"

#include "oracles.hpp"

#include <cstring>
#include <random>

using namespace pdnsim;

namespace {

kernels::CsrMatrix random_csr(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, n - 1);
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, i, 2.0 + dist(rng));
        for (int k = 0; k < 4; ++k) trips.emplace_back(i, col(rng), dist(rng));
    }
    SpMat a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    return kernels::CsrMatrix::from_sparse(a);
}

} // namespace

TEST_CASE("csr conversion matches eigen product") {
    const int n = 64;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; j += 7) trips.emplace_back(i, j, dist(rng));
    SpMat a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    const auto csr = kernels::CsrMatrix::from_sparse(a);

    const Vec x = oracle::random_vec(n, 11);
    const Vec want = a * x;
    Vec got(n);
    kernels::spmv(csr, x.data(), got.data());
    CHECK((want - got).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("spmv is bitwise identical across thread counts and vs reference") {
    const int n = 5000;
    const auto a = random_csr(n, 5);
    const Vec x = oracle::random_vec(n, 6);
    Vec ref(n), par(n);
    kernels::spmv_ref(a, x.data(), ref.data());
    for (int threads : {1, 2, 3, 8}) {
        kernels::spmv(a, x.data(), par.data(), threads);
        CHECK(std::memcmp(ref.data(), par.data(), sizeof(double) * n) == 0);
    }
}

TEST_CASE("blocked dot is deterministic in the thread count") {
    const std::size_t n = 100000;
    const Vec x = oracle::random_vec(static_cast<long>(n), 7);
    const Vec y = oracle::random_vec(static_cast<long>(n), 8);
    const double d1 = kernels::dot(x.data(), y.data(), n, 1);
    for (int threads : {2, 3, 4, 8})
        CHECK(kernels::dot(x.data(), y.data(), n, threads) == d1);
    // Against the plain running sum the difference is only rounding.
    const double dref = kernels::dot_ref(x.data(), y.data(), n);
    CHECK(std::abs(d1 - dref) <= 1e-10 * std::abs(dref));
}

TEST_CASE("axpy matches reference bitwise") {
    const std::size_t n = 30000;
    const Vec x = oracle::random_vec(static_cast<long>(n), 9);
    Vec y1 = oracle::random_vec(static_cast<long>(n), 10);
    Vec y2 = y1;
    kernels::axpy_ref(0.37, x.data(), y1.data(), n);
    kernels::axpy(0.37, x.data(), y2.data(), n, 4);
    CHECK(std::memcmp(y1.data(), y2.data(), sizeof(double) * n) == 0);
}

TEST_CASE("norm2 of a unit axis vector") {
    Vec e = Vec::Zero(1500);
    e[7] = -3.0;
    CHECK(kernels::norm2(e) == 3.0);
}
