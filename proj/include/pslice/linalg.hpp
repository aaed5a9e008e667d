#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pslice/padic.hpp"

namespace pslice {

class DigitStream;

/// Dense row-major matrix over Q_p.
class PadicMatrix {
public:
    PadicMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols);

    static PadicMatrix identity(const ContextPtr& ctx, std::size_t n);
    static PadicMatrix from_integers(const ContextPtr& ctx, std::size_t rows, std::size_t cols,
                                     std::initializer_list<long> row_major);
    static PadicMatrix from_columns(const ContextPtr& ctx, std::size_t rows,
                                    const std::vector<PadicVector>& columns);
    static PadicMatrix uniform_O(const ContextPtr& ctx, std::size_t rows, std::size_t cols,
                                 DigitStream& rng);

    const ContextPtr& context() const noexcept { return ctx_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    PadicScalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const PadicScalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    PadicVector column(std::size_t j) const;
    PadicVector row(std::size_t i) const;
    /// Columns [first, first + count).
    PadicMatrix column_block(std::size_t first, std::size_t count) const;
    PadicMatrix transpose() const;

    /// Products skip entries whose partial sums cancel below precision (read as zero).
    friend PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b);
    friend PadicVector operator*(const PadicMatrix& a, const PadicVector& x);

private:
    ContextPtr ctx_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<PadicScalar> data_;
};

/// M = U * D * V with U, V unimodular over Z_p and D = diag(p^{v_i}).
///
/// Divisors are listed in pivot order (nondecreasing valuation), with
/// kInfiniteValuation for positions past the rank.
struct SmithDecomposition {
    PadicMatrix U;
    PadicMatrix U_inv;
    PadicMatrix V;
    PadicMatrix V_inv;
    std::vector<Valuation> divisor_valuations;
    std::size_t rank = 0;
    /// Set when an entry was read as zero because cancellation exhausted its digits.
    bool precision_flag = false;

    PadicMatrix diagonal(std::size_t rows, std::size_t cols) const;
};

SmithDecomposition smith_normal_form(const PadicMatrix& m);

/// q^{-(v_1 + ... + v_min(a,b))}, or 0 when some divisor is infinite.
AbsValue absolute_det(const PadicMatrix& m);

/// Columns in Z_p^N spanning ker M and extending to a Z_p-basis of Z_p^N.
///
/// With `rank` given, the first `rank` Smith pivots are taken as the row space
/// and the kernel has N - rank columns regardless of smaller divisors.
PadicMatrix orthonormal_kernel_basis(const PadicMatrix& m,
                                     std::optional<std::size_t> rank = std::nullopt);

/// U in GL(N, Z_p) with U x = (0, ..., 0, p^{val(x)})^T. Throws ZeroVector.
PadicMatrix unimodular_transport(const PadicVector& x);

/// Inverse of a square matrix by Gauss-Jordan elimination with minimal-valuation pivots.
PadicMatrix inverse(const PadicMatrix& m);

/// Solves a square system M y = rhs. Throws RankDeficient when M is singular.
PadicVector solve_square(const PadicMatrix& m, const PadicVector& rhs);

/// x in L_{A,b} ∩ Z_p^N iff x = base + directions * t with t in Z_p^{N-n}.
struct AffineParametrization {
    PadicVector base;
    PadicMatrix directions;
};

/// Parametrizes {x : A x = b} ∩ Z_p^N. Returns nullopt when that set is empty.
/// Throws RankDeficient when rank A < n at working precision.
std::optional<AffineParametrization> solve_affine_in_O(const PadicMatrix& a, const PadicVector& b);

}  // namespace pslice
