#pragma once

#include "pdnsim/types.hpp"

#include <atomic>
#include <cstdint>
#include <memory>

namespace pdnsim {

class SingularMatrix : public Error {
public:
    explicit SingularMatrix(long pivot_index)
        : Error("singular matrix (zero pivot near index " + std::to_string(pivot_index) + ")"),
          pivot(pivot_index) {}
    long pivot;
};

class Overflow : public Error {
public:
    Overflow() : Error("matrix exponential overflow: non-finite entries") {}
};

/// Process-wide operation counters. Acceptance tests assert on these, and the
/// runtime cost model reads them. All counters are atomic aggregates.
namespace stats {
std::uint64_t lu_count();
std::uint64_t substitution_pairs();
void reset();
} // namespace stats

/// Sparse LU factorization with reusable forward/backward substitution.
/// Immutable after creation; copies share the factorization, and solve() is
/// reentrant so worker threads may call it concurrently.
class LuFactor {
public:
    LuFactor() = default;

    /// Factorize with partial pivoting and fill-reducing column ordering.
    /// Throws SingularMatrix on a structurally or numerically singular input.
    static LuFactor decompose(const SpMat& a);

    /// One pair of forward and backward substitutions. Increments the pair
    /// counters (per-factor and global).
    Vec solve(const Vec& b) const;

    [[nodiscard]] long n() const { return n_; }
    [[nodiscard]] bool valid() const { return impl_ != nullptr; }

    /// Substitution pairs served by this factor.
    [[nodiscard]] std::uint64_t pairs() const;

    struct FillInfo {
        long nnz_input = 0;
        long nnz_factors = 0;
    };
    [[nodiscard]] FillInfo fill() const { return fill_; }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    std::shared_ptr<std::atomic<std::uint64_t>> pair_count_;
    long n_ = 0;
    FillInfo fill_;
};

/// e^{scale*H} for a small dense matrix, by scaling-and-squaring with the
/// degree-13 diagonal Pade approximant. Throws Overflow if non-finite
/// entries appear.
DenseMat expm_dense(const DenseMat& h, double scale = 1.0);

} // namespace pdnsim
