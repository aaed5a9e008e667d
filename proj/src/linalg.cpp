#include "pslice/linalg.hpp"

#include <algorithm>
#include <utility>

#include "pslice/random.hpp"

namespace pslice {

// ---------------------------------------------------------------------------
// PadicMatrix
// ---------------------------------------------------------------------------

PadicMatrix::PadicMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(rows * cols, PadicScalar(ctx_)) {}

PadicMatrix PadicMatrix::identity(const ContextPtr& ctx, std::size_t n) {
    PadicMatrix m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = PadicScalar::from_int(ctx, 1);
    return m;
}

PadicMatrix PadicMatrix::from_integers(const ContextPtr& ctx, std::size_t rows, std::size_t cols,
                                       std::initializer_list<long> row_major) {
    if (row_major.size() != rows * cols) throw InvalidArgument("matrix literal has wrong size");
    PadicMatrix m(ctx, rows, cols);
    std::size_t k = 0;
    for (long e : row_major) {
        m.data_[k++] = PadicScalar::from_int(ctx, e);
    }
    return m;
}

PadicMatrix PadicMatrix::from_columns(const ContextPtr& ctx, std::size_t rows,
                                      const std::vector<PadicVector>& columns) {
    PadicMatrix m(ctx, rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) throw InvalidArgument("column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
}

PadicMatrix PadicMatrix::uniform_O(const ContextPtr& ctx, std::size_t rows, std::size_t cols,
                                   DigitStream& rng) {
    PadicMatrix m(ctx, rows, cols);
    for (auto& e : m.data_) e = sample_uniform_O(ctx, rng);
    return m;
}

PadicVector PadicMatrix::column(std::size_t j) const {
    PadicVector out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back((*this)(i, j));
    return out;
}

PadicVector PadicMatrix::row(std::size_t i) const {
    return PadicVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                       data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

PadicMatrix PadicMatrix::column_block(std::size_t first, std::size_t count) const {
    PadicMatrix out(ctx_, rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
    return out;
}

PadicMatrix PadicMatrix::transpose() const {
    PadicMatrix out(ctx_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("matrix product dimension mismatch");
    PadicMatrix out(a.ctx_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t j = 0; j < b.cols_; ++j) {
            PadicScalar acc(a.ctx_);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
                acc = add_or_zero(acc, a(i, k) * b(k, j));
            }
            out(i, j) = std::move(acc);
        }
    }
    return out;
}

PadicVector operator*(const PadicMatrix& a, const PadicVector& x) {
    if (a.cols_ != x.size()) throw InvalidArgument("matrix-vector dimension mismatch");
    PadicVector out;
    out.reserve(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        PadicScalar acc(a.ctx_);
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a(i, k).is_zero() || x[k].is_zero()) continue;
            acc = add_or_zero(acc, a(i, k) * x[k]);
        }
        out.push_back(std::move(acc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

namespace {

// Tracks M = U * W * V while W is reduced to diagonal form.
class SmithReducer {
public:
    explicit SmithReducer(const PadicMatrix& m)
        : ctx_(m.context()),
          w_(m),
          u_(PadicMatrix::identity(ctx_, m.rows())),
          u_inv_(PadicMatrix::identity(ctx_, m.rows())),
          v_(PadicMatrix::identity(ctx_, m.cols())),
          v_inv_(PadicMatrix::identity(ctx_, m.cols())) {}

    SmithDecomposition run() {
        const std::size_t a = w_.rows();
        const std::size_t b = w_.cols();
        const std::size_t steps = std::min(a, b);
        std::vector<Valuation> divisors(steps, kInfiniteValuation);
        std::size_t rank = 0;
        for (std::size_t t = 0; t < steps; ++t) {
            // First minimal-valuation entry in row-major order.
            std::size_t pi = a;
            std::size_t pj = b;
            Valuation best = kInfiniteValuation;
            for (std::size_t i = t; i < a; ++i) {
                for (std::size_t j = t; j < b; ++j) {
                    const Valuation v = w_(i, j).valuation();
                    if (v < best) {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if (best == kInfiniteValuation) break;
            swap_rows(t, pi);
            swap_cols(t, pj);

            const PadicScalar pivot = w_(t, t);
            scale_row(t, pivot.inverse().shifted(best));
            w_(t, t) = PadicScalar::from_int(ctx_, 1).shifted(best);

            for (std::size_t i = t + 1; i < a; ++i) {
                if (w_(i, t).is_zero()) continue;
                add_row_multiple(i, t, -(w_(i, t).shifted(-best)), t);
            }
            for (std::size_t j = t + 1; j < b; ++j) {
                if (w_(t, j).is_zero()) continue;
                const PadicScalar c = -(w_(t, j).shifted(-best));
                add_col_multiple(j, t, c);
            }
            divisors[t] = best;
            ++rank;
        }
        SmithDecomposition out{std::move(u_),   std::move(u_inv_), std::move(v_),
                               std::move(v_inv_), std::move(divisors), rank, flag_};
        return out;
    }

private:
    PadicScalar accumulate(const PadicScalar& x, const PadicScalar& y) {
        bool exhausted = false;
        PadicScalar r = add_or_zero(x, y, &exhausted);
        if (exhausted) flag_ = true;
        return r;
    }

    void swap_rows(std::size_t i, std::size_t k) {
        if (i == k) return;
        for (std::size_t j = 0; j < w_.cols(); ++j) std::swap(w_(i, j), w_(k, j));
        for (std::size_t r = 0; r < u_.rows(); ++r) std::swap(u_(r, i), u_(r, k));
        for (std::size_t j = 0; j < u_inv_.cols(); ++j) std::swap(u_inv_(i, j), u_inv_(k, j));
    }

    void swap_cols(std::size_t j, std::size_t k) {
        if (j == k) return;
        for (std::size_t i = 0; i < w_.rows(); ++i) std::swap(w_(i, j), w_(i, k));
        for (std::size_t c = 0; c < v_.cols(); ++c) std::swap(v_(j, c), v_(k, c));
        for (std::size_t r = 0; r < v_inv_.rows(); ++r) std::swap(v_inv_(r, j), v_inv_(r, k));
    }

    void scale_row(std::size_t k, const PadicScalar& lambda) {
        for (std::size_t j = 0; j < w_.cols(); ++j) w_(k, j) *= lambda;
        const PadicScalar inv = lambda.inverse();
        for (std::size_t r = 0; r < u_.rows(); ++r) u_(r, k) *= inv;
        for (std::size_t j = 0; j < u_inv_.cols(); ++j) u_inv_(k, j) *= lambda;
    }

    // row_i += c * row_k; the pivot column entry of row_i becomes exactly zero.
    void add_row_multiple(std::size_t i, std::size_t k, const PadicScalar& c, std::size_t pivot_col) {
        for (std::size_t j = pivot_col + 1; j < w_.cols(); ++j) {
            if (w_(k, j).is_zero()) continue;
            w_(i, j) = accumulate(w_(i, j), c * w_(k, j));
        }
        w_(i, pivot_col) = PadicScalar(ctx_);
        for (std::size_t r = 0; r < u_.rows(); ++r) {
            if (u_(r, i).is_zero()) continue;
            u_(r, k) = accumulate(u_(r, k), -(c * u_(r, i)));
        }
        for (std::size_t j = 0; j < u_inv_.cols(); ++j) {
            if (u_inv_(k, j).is_zero()) continue;
            u_inv_(i, j) = accumulate(u_inv_(i, j), c * u_inv_(k, j));
        }
    }

    // col_j += c * col_k where only the pivot row has a nonzero entry in col_k.
    void add_col_multiple(std::size_t j, std::size_t k, const PadicScalar& c) {
        w_(k, j) = PadicScalar(ctx_);
        for (std::size_t col = 0; col < v_.cols(); ++col) {
            if (v_(j, col).is_zero()) continue;
            v_(k, col) = accumulate(v_(k, col), -(c * v_(j, col)));
        }
        for (std::size_t r = 0; r < v_inv_.rows(); ++r) {
            if (v_inv_(r, k).is_zero()) continue;
            v_inv_(r, j) = accumulate(v_inv_(r, j), c * v_inv_(r, k));
        }
    }

    ContextPtr ctx_;
    PadicMatrix w_;
    PadicMatrix u_;
    PadicMatrix u_inv_;
    PadicMatrix v_;
    PadicMatrix v_inv_;
    bool flag_ = false;
};

}  // namespace

PadicMatrix SmithDecomposition::diagonal(std::size_t rows, std::size_t cols) const {
    const ContextPtr& ctx = U.context();
    PadicMatrix d(ctx, rows, cols);
    for (std::size_t i = 0; i < divisor_valuations.size(); ++i) {
        if (divisor_valuations[i] == kInfiniteValuation) continue;
        d(i, i) = PadicScalar::from_int(ctx, 1).shifted(divisor_valuations[i]);
    }
    return d;
}

SmithDecomposition smith_normal_form(const PadicMatrix& m) {
    return SmithReducer(m).run();
}

AbsValue absolute_det(const PadicMatrix& m) {
    AbsValue out{m.context()->prime(), 0};
    if (std::min(m.rows(), m.cols()) == 0) return out;
    const auto snf = smith_normal_form(m);
    for (Valuation v : snf.divisor_valuations) {
        if (v == kInfiniteValuation) return AbsValue{out.p, kInfiniteValuation};
        out.val += v;
    }
    return out;
}

PadicMatrix orthonormal_kernel_basis(const PadicMatrix& m, std::optional<std::size_t> rank) {
    const auto snf = smith_normal_form(m);
    const std::size_t r = rank.value_or(snf.rank);
    if (r > snf.rank || r > m.cols()) throw RankDeficient();
    return snf.V_inv.column_block(r, m.cols() - r);
}

PadicMatrix unimodular_transport(const PadicVector& x) {
    if (x.empty()) throw ZeroVector();
    const ContextPtr& ctx = x.front().context();
    const std::size_t n = x.size();
    std::size_t k = n;
    Valuation best = kInfiniteValuation;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].valuation() < best) {
            best = x[i].valuation();
            k = i;
        }
    }
    if (best == kInfiniteValuation) throw ZeroVector();

    // U = E * P with P swapping coordinates k and n-1 and E clearing the other entries.
    auto sigma = [&](std::size_t i) {
        if (i == k) return n - 1;
        if (i == n - 1) return k;
        return i;
    };
    PadicMatrix u(ctx, n, n);
    const PadicScalar pivot_inv = x[k].inverse();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        u(i, sigma(i)) = PadicScalar::from_int(ctx, 1);
        if (!x[sigma(i)].is_zero()) u(i, k) = -(x[sigma(i)] * pivot_inv);
    }
    u(n - 1, k) = pivot_inv.shifted(best);
    return u;
}

PadicMatrix inverse(const PadicMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    const ContextPtr& ctx = m.context();
    PadicMatrix a = m;
    PadicMatrix inv = PadicMatrix::identity(ctx, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pr = n;
        Valuation best = kInfiniteValuation;
        for (std::size_t r = c; r < n; ++r) {
            if (a(r, c).valuation() < best) {
                best = a(r, c).valuation();
                pr = r;
            }
        }
        if (pr == n) throw RankDeficient();
        if (pr != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pr, j), a(c, j));
                std::swap(inv(pr, j), inv(c, j));
            }
        }
        const PadicScalar piv_inv = a(c, c).inverse();
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) *= piv_inv;
            inv(c, j) *= piv_inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a(r, c).is_zero()) continue;
            const PadicScalar f = a(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                if (!a(c, j).is_zero()) a(r, j) = add_or_zero(a(r, j), -(f * a(c, j)));
                if (!inv(c, j).is_zero()) inv(r, j) = add_or_zero(inv(r, j), -(f * inv(c, j)));
            }
            a(r, c) = PadicScalar(ctx);
        }
    }
    return inv;
}

PadicVector solve_square(const PadicMatrix& m, const PadicVector& rhs) {
    if (m.rows() != m.cols() || rhs.size() != m.rows()) {
        throw InvalidArgument("solve_square dimension mismatch");
    }
    const std::size_t n = m.rows();
    const ContextPtr& ctx = m.context();
    PadicMatrix a = m;
    PadicVector y = rhs;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pr = n;
        Valuation best = kInfiniteValuation;
        for (std::size_t r = c; r < n; ++r) {
            if (a(r, c).valuation() < best) {
                best = a(r, c).valuation();
                pr = r;
            }
        }
        if (pr == n) throw RankDeficient();
        if (pr != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pr, j), a(c, j));
            std::swap(y[pr], y[c]);
        }
        const PadicScalar piv_inv = a(c, c).inverse();
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a(r, c).is_zero()) continue;
            const PadicScalar f = a(r, c) * piv_inv;
            for (std::size_t j = c + 1; j < n; ++j) {
                if (!a(c, j).is_zero()) a(r, j) = add_or_zero(a(r, j), -(f * a(c, j)));
            }
            if (!y[c].is_zero()) y[r] = add_or_zero(y[r], -(f * y[c]));
            a(r, c) = PadicScalar(ctx);
        }
    }
    PadicVector x(n, PadicScalar(ctx));
    for (std::size_t c = n; c-- > 0;) {
        PadicScalar acc = y[c];
        for (std::size_t j = c + 1; j < n; ++j) {
            if (!a(c, j).is_zero() && !x[j].is_zero()) acc = add_or_zero(acc, -(a(c, j) * x[j]));
        }
        x[c] = acc / a(c, c);
    }
    return x;
}

std::optional<AffineParametrization> solve_affine_in_O(const PadicMatrix& a, const PadicVector& b) {
    if (b.size() != a.rows()) throw InvalidArgument("right-hand side length mismatch");
    const std::size_t n = a.rows();
    const std::size_t big_n = a.cols();
    const ContextPtr& ctx = a.context();
    const auto snf = smith_normal_form(a);
    if (snf.rank < n || snf.precision_flag) throw RankDeficient();

    const PadicVector c = snf.U_inv * b;
    PadicVector y(big_n, PadicScalar(ctx));
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = c[i].shifted(-snf.divisor_valuations[i]);
        if (!y[i].is_zero() && y[i].valuation() < 0) return std::nullopt;
    }
    AffineParametrization out{snf.V_inv * y, snf.V_inv.column_block(n, big_n - n)};
    return out;
}

}  // namespace pslice
