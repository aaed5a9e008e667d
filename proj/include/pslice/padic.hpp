#pragma once

/**
 * Capped-precision arithmetic over Q_p.
 *
 * A nonzero scalar is stored as u * p^v where u is a unit known modulo
 * p^r, r being the scalar's relative precision (1 <= r <= kappa). Values
 * built from integers, digits or the uniform sampler carry the full kappa
 * digits; cancellation in a sum shrinks r. The canonical zero is exact.
 *
 * Sums whose known digits cancel completely are exact zero only when both
 * operands carried the full kappa digits. Otherwise the sum is unknown
 * beyond a power of p and PrecisionExhausted is raised.
 */

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "pslice/errors.hpp"

namespace pslice {

using Valuation = long;
inline constexpr Valuation kInfiniteValuation = std::numeric_limits<long>::max();

/// Deterministic primality test valid for all 32-bit inputs.
bool is_prime(std::uint64_t n);

class PadicContext {
public:
    static constexpr int kDefaultPrecision = 32;

    /// Throws InvalidArgument if p is not a prime in [2, 2^31 - 1] or precision < 2.
    static std::shared_ptr<const PadicContext> create(std::uint32_t p,
                                                      int precision = kDefaultPrecision,
                                                      std::uint64_t seed = 0);

    std::uint32_t prime() const noexcept { return p_; }
    int precision() const noexcept { return kappa_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const mpz_class& prime_z() const noexcept { return p_z_; }

    /// p^k for k >= 0; cached for k <= 2 * precision.
    mpz_class power(long k) const;
    const mpz_class& cached_power(int k) const { return powers_.at(static_cast<std::size_t>(k)); }

    /// Two contexts are compatible when they agree on p and precision.
    bool compatible(const PadicContext& other) const noexcept {
        return p_ == other.p_ && kappa_ == other.kappa_;
    }

private:
    PadicContext(std::uint32_t p, int precision, std::uint64_t seed);

    std::uint32_t p_;
    int kappa_;
    std::uint64_t seed_;
    mpz_class p_z_;
    std::vector<mpz_class> powers_;
};

using ContextPtr = std::shared_ptr<const PadicContext>;

/// A nonnegative real of the form p^{-v}, or 0 when v is infinite.
struct AbsValue {
    std::uint32_t p = 2;
    Valuation val = kInfiniteValuation;

    bool is_zero() const noexcept { return val == kInfiniteValuation; }
    double to_double() const;

    friend AbsValue operator*(AbsValue a, AbsValue b);
    friend bool operator==(const AbsValue& a, const AbsValue& b) noexcept {
        return a.val == b.val;
    }
    /// Ordering by magnitude: a < b iff |a| < |b|.
    friend bool operator<(const AbsValue& a, const AbsValue& b) noexcept { return a.val > b.val; }
    friend bool operator<=(const AbsValue& a, const AbsValue& b) noexcept {
        return a.val >= b.val;
    }
};

class PadicScalar {
public:
    /// Exact zero in the given context.
    explicit PadicScalar(ContextPtr ctx);

    static PadicScalar from_integer(ContextPtr ctx, const mpz_class& n);
    static PadicScalar from_int(ContextPtr ctx, long n) { return from_integer(std::move(ctx), mpz_class(n)); }
    static PadicScalar from_rational(ContextPtr ctx, const mpz_class& num, const mpz_class& den);
    /// p^v * (d_0 + d_1 p + ...); an empty or all-zero digit list gives exact zero.
    static PadicScalar from_digits(ContextPtr ctx, Valuation v, std::span<const std::uint32_t> digits);
    /// unit must be prime to p; it is reduced modulo p^relative_precision.
    static PadicScalar from_parts(ContextPtr ctx, Valuation v, mpz_class unit, int relative_precision);

    const ContextPtr& context() const noexcept { return ctx_; }
    std::uint32_t prime() const noexcept { return ctx_->prime(); }

    bool is_zero() const noexcept { return v_ == kInfiniteValuation; }
    Valuation valuation() const noexcept { return v_; }
    const mpz_class& unit() const noexcept { return u_; }
    int relative_precision() const noexcept { return is_zero() ? 0 : r_; }
    bool full_precision() const noexcept { return is_zero() || r_ == ctx_->precision(); }
    /// v + r, or kInfiniteValuation for the exact zero.
    Valuation absolute_precision() const noexcept {
        return is_zero() ? kInfiniteValuation : v_ + r_;
    }
    /// The relative_precision() base-p digits of the unit, least significant first.
    std::vector<std::uint32_t> digits() const;

    AbsValue abs() const noexcept { return AbsValue{prime(), v_}; }
    bool is_integral() const noexcept { return v_ >= 0; }

    /// Reads the digits beyond the known precision as zeros, giving a full-precision value.
    PadicScalar with_full_precision() const;
    /// Multiplication by p^k.
    PadicScalar shifted(Valuation k) const;
    PadicScalar inverse() const;

    /// Integer representative in [0, p^j) of an element of Z_p.
    /// Throws NegativeValuationCoefficient if v < 0 and PrecisionExhausted if
    /// fewer than j absolute digits are known.
    mpz_class residue(int j) const;

    PadicScalar operator-() const;
    PadicScalar& operator+=(const PadicScalar& o);
    PadicScalar& operator-=(const PadicScalar& o);
    PadicScalar& operator*=(const PadicScalar& o);
    PadicScalar& operator/=(const PadicScalar& o);

    friend PadicScalar operator+(PadicScalar a, const PadicScalar& b) { return a += b; }
    friend PadicScalar operator-(PadicScalar a, const PadicScalar& b) { return a -= b; }
    friend PadicScalar operator*(PadicScalar a, const PadicScalar& b) { return a *= b; }
    friend PadicScalar operator/(PadicScalar a, const PadicScalar& b) { return a /= b; }

    /// Identical representation: same valuation, precision and unit digits.
    friend bool operator==(const PadicScalar& a, const PadicScalar& b);

    std::string to_string() const;

private:
    PadicScalar(ContextPtr ctx, Valuation v, mpz_class u, int r);
    void add_impl(const PadicScalar& o, bool negate);

    ContextPtr ctx_;
    Valuation v_ = kInfiniteValuation;
    mpz_class u_;
    int r_ = 0;
};

/// Valuation of x - y, reading exhausted cancellation as "at least its level".
Valuation difference_valuation(const PadicScalar& x, const PadicScalar& y);

/// Sums a + b, mapping exhausted cancellation to the exact zero.
PadicScalar add_or_zero(const PadicScalar& a, const PadicScalar& b, bool* exhausted = nullptr);

/// Sum of all terms with a single rounding: the result is known to the
/// smallest absolute precision among the terms. Raises PrecisionExhausted
/// when every known digit cancels and some term was not at full precision.
PadicScalar padic_sum(const ContextPtr& ctx, const std::vector<PadicScalar>& terms);

using PadicVector = std::vector<PadicScalar>;

struct VectorNorm {
    Valuation valuation = kInfiniteValuation;
    AbsValue norm;
};

/// Minimum entry valuation and the max-norm p^{-valuation}.
VectorNorm vec_val_norm(const PadicVector& x);

PadicVector integer_vector(const ContextPtr& ctx, std::initializer_list<long> entries);

/// {"v": int, "digits": [...]} or {"v": null} for the exact zero.
nlohmann::json scalar_to_json(const PadicScalar& x);
PadicScalar scalar_from_json(const ContextPtr& ctx, const nlohmann::json& j);

}  // namespace pslice
