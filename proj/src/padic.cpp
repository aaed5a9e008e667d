#include "pslice/padic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pslice {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Removes all factors p from s (s != 0) and returns how many were removed.
long strip_prime(mpz_class& s, const mpz_class& p) {
    return static_cast<long>(mpz_remove(s.get_mpz_t(), s.get_mpz_t(), p.get_mpz_t()));
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % small == 0) return n == small;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are deterministic for every n < 2^64.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// PadicContext
// ---------------------------------------------------------------------------

PadicContext::PadicContext(std::uint32_t p, int precision, std::uint64_t seed)
    : p_(p), kappa_(precision), seed_(seed), p_z_(p) {
    powers_.reserve(static_cast<std::size_t>(2 * precision + 1));
    mpz_class acc = 1;
    for (int k = 0; k <= 2 * precision; ++k) {
        powers_.push_back(acc);
        acc *= p_z_;
    }
}

std::shared_ptr<const PadicContext> PadicContext::create(std::uint32_t p, int precision,
                                                         std::uint64_t seed) {
    if (p < 2 || p > 2147483647U || !is_prime(p)) {
        throw InvalidArgument(std::to_string(p) + " is not prime (need a prime 2 <= p <= 2^31-1)");
    }
    if (precision < 2) {
        throw InvalidArgument("precision must be at least 2 digits");
    }
    return std::shared_ptr<const PadicContext>(new PadicContext(p, precision, seed));
}

mpz_class PadicContext::power(long k) const {
    if (k < 0) throw InvalidArgument("negative exponent");
    if (k < static_cast<long>(powers_.size())) return powers_[static_cast<std::size_t>(k)];
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), p_z_.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

// ---------------------------------------------------------------------------
// AbsValue
// ---------------------------------------------------------------------------

double AbsValue::to_double() const {
    if (is_zero()) return 0.0;
    return std::pow(static_cast<double>(p), -static_cast<double>(val));
}

AbsValue operator*(AbsValue a, AbsValue b) {
    if (a.is_zero() || b.is_zero()) return AbsValue{a.p, kInfiniteValuation};
    return AbsValue{a.p, a.val + b.val};
}

// ---------------------------------------------------------------------------
// PadicScalar
// ---------------------------------------------------------------------------

PadicScalar::PadicScalar(ContextPtr ctx) : ctx_(std::move(ctx)) {}

PadicScalar::PadicScalar(ContextPtr ctx, Valuation v, mpz_class u, int r)
    : ctx_(std::move(ctx)), v_(v), u_(std::move(u)), r_(r) {}

PadicScalar PadicScalar::from_integer(ContextPtr ctx, const mpz_class& n) {
    if (n == 0) return PadicScalar(std::move(ctx));
    mpz_class s = n;
    Valuation v = strip_prime(s, ctx->prime_z());
    const int kappa = ctx->precision();
    mpz_class u;
    mpz_mod(u.get_mpz_t(), s.get_mpz_t(), ctx->cached_power(kappa).get_mpz_t());
    return PadicScalar(std::move(ctx), v, std::move(u), kappa);
}

PadicScalar PadicScalar::from_rational(ContextPtr ctx, const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DivisionByZero();
    auto a = from_integer(ctx, num);
    auto b = from_integer(ctx, den);
    return a / b;
}

PadicScalar PadicScalar::from_digits(ContextPtr ctx, Valuation v,
                                     std::span<const std::uint32_t> digits) {
    if (static_cast<int>(digits.size()) > ctx->precision()) {
        throw InvalidArgument("more digits than the working precision");
    }
    const std::uint32_t p = ctx->prime();
    std::size_t first = digits.size();
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] >= p) throw InvalidArgument("digit out of range for the prime");
        if (digits[i] != 0 && first == digits.size()) first = i;
    }
    if (first == digits.size()) return PadicScalar(std::move(ctx));
    mpz_class u = 0;
    for (std::size_t i = digits.size(); i-- > first;) {
        u *= p;
        u += digits[i];
    }
    const int r = static_cast<int>(digits.size() - first);
    return PadicScalar(std::move(ctx), v + static_cast<Valuation>(first), std::move(u), r);
}

PadicScalar PadicScalar::from_parts(ContextPtr ctx, Valuation v, mpz_class unit,
                                    int relative_precision) {
    if (relative_precision < 1 || relative_precision > ctx->precision()) {
        throw InvalidArgument("relative precision out of range");
    }
    mpz_class u;
    mpz_mod(u.get_mpz_t(), unit.get_mpz_t(), ctx->cached_power(relative_precision).get_mpz_t());
    if (mpz_divisible_ui_p(u.get_mpz_t(), ctx->prime()) != 0) {
        throw InvalidArgument("unit part is divisible by p");
    }
    return PadicScalar(std::move(ctx), v, std::move(u), relative_precision);
}

std::vector<std::uint32_t> PadicScalar::digits() const {
    std::vector<std::uint32_t> out;
    if (is_zero()) return out;
    out.reserve(static_cast<std::size_t>(r_));
    mpz_class t = u_;
    const mpz_class& p = ctx_->prime_z();
    mpz_class d;
    for (int i = 0; i < r_; ++i) {
        mpz_fdiv_qr(t.get_mpz_t(), d.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
        out.push_back(static_cast<std::uint32_t>(d.get_ui()));
    }
    return out;
}

PadicScalar PadicScalar::with_full_precision() const {
    if (is_zero()) return *this;
    return PadicScalar(ctx_, v_, u_, ctx_->precision());
}

PadicScalar PadicScalar::shifted(Valuation k) const {
    if (is_zero()) return *this;
    return PadicScalar(ctx_, v_ + k, u_, r_);
}

PadicScalar PadicScalar::inverse() const {
    if (is_zero()) throw DivisionByZero();
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), u_.get_mpz_t(), ctx_->cached_power(r_).get_mpz_t());
    return PadicScalar(ctx_, -v_, std::move(inv), r_);
}

mpz_class PadicScalar::residue(int j) const {
    if (is_zero()) return 0;
    if (v_ < 0) throw NegativeValuationCoefficient();
    if (v_ >= j) return 0;
    if (v_ + r_ < j) throw PrecisionExhausted(v_ + r_);
    mpz_class out = u_ * ctx_->cached_power(static_cast<int>(v_));
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), ctx_->power(j).get_mpz_t());
    return out;
}

PadicScalar PadicScalar::operator-() const {
    if (is_zero()) return *this;
    mpz_class u = ctx_->cached_power(r_) - u_;
    return PadicScalar(ctx_, v_, std::move(u), r_);
}

void PadicScalar::add_impl(const PadicScalar& o, bool negate) {
    if (o.is_zero()) return;
    if (is_zero()) {
        *this = negate ? -o : o;
        return;
    }
    const Valuation abs_prec = std::min(v_ + r_, o.v_ + o.r_);
    const Valuation vmin = std::min(v_, o.v_);
    const long window = abs_prec - vmin;  // 1 <= window <= kappa
    const mpz_class& modulus = ctx_->cached_power(static_cast<int>(window));

    mpz_class s = 0;
    if (v_ - vmin < window) s = u_ * ctx_->cached_power(static_cast<int>(v_ - vmin));
    if (o.v_ - vmin < window) {
        mpz_class t = o.u_ * ctx_->cached_power(static_cast<int>(o.v_ - vmin));
        if (negate) s -= t;
        else s += t;
    }
    mpz_mod(s.get_mpz_t(), s.get_mpz_t(), modulus.get_mpz_t());
    if (s == 0) {
        if (full_precision() && o.full_precision()) {
            *this = PadicScalar(ctx_);
            return;
        }
        throw PrecisionExhausted(abs_prec);
    }
    const long w = strip_prime(s, ctx_->prime_z());
    v_ = vmin + w;
    r_ = static_cast<int>(window - w);
    u_ = std::move(s);
}

PadicScalar& PadicScalar::operator+=(const PadicScalar& o) {
    add_impl(o, false);
    return *this;
}

PadicScalar& PadicScalar::operator-=(const PadicScalar& o) {
    add_impl(o, true);
    return *this;
}

PadicScalar& PadicScalar::operator*=(const PadicScalar& o) {
    if (is_zero()) return *this;
    if (o.is_zero()) {
        *this = PadicScalar(ctx_);
        return *this;
    }
    r_ = std::min(r_, o.r_);
    v_ += o.v_;
    u_ *= o.u_;
    mpz_mod(u_.get_mpz_t(), u_.get_mpz_t(), ctx_->cached_power(r_).get_mpz_t());
    return *this;
}

PadicScalar& PadicScalar::operator/=(const PadicScalar& o) {
    return *this *= o.inverse();
}

bool operator==(const PadicScalar& a, const PadicScalar& b) {
    if (a.prime() != b.prime()) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.v_ == b.v_ && a.r_ == b.r_ && a.u_ == b.u_;
}

std::string PadicScalar::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    os << u_.get_str() << "*" << prime() << "^" << v_ << " + O(" << prime() << "^" << (v_ + r_)
       << ")";
    return os.str();
}

Valuation difference_valuation(const PadicScalar& x, const PadicScalar& y) {
    try {
        return (x - y).valuation();
    } catch (const PrecisionExhausted& e) {
        return e.level();
    }
}

PadicScalar add_or_zero(const PadicScalar& a, const PadicScalar& b, bool* exhausted) {
    try {
        return a + b;
    } catch (const PrecisionExhausted&) {
        if (exhausted != nullptr) *exhausted = true;
        return PadicScalar(a.context());
    }
}

PadicScalar padic_sum(const ContextPtr& ctx, const std::vector<PadicScalar>& terms) {
    Valuation vmin = kInfiniteValuation;
    Valuation abs_prec = kInfiniteValuation;
    bool all_full = true;
    std::size_t nonzero = 0;
    const PadicScalar* single = nullptr;
    for (const auto& t : terms) {
        if (t.is_zero()) continue;
        ++nonzero;
        single = &t;
        vmin = std::min(vmin, t.valuation());
        abs_prec = std::min(abs_prec, t.absolute_precision());
        all_full = all_full && t.full_precision();
    }
    if (nonzero == 0) return PadicScalar(ctx);
    if (nonzero == 1) return *single;
    const long window = abs_prec - vmin;
    mpz_class s = 0;
    for (const auto& t : terms) {
        if (t.is_zero()) continue;
        const long shift = t.valuation() - vmin;
        if (shift >= window) continue;
        s += t.unit() * ctx->cached_power(static_cast<int>(shift));
    }
    mpz_mod(s.get_mpz_t(), s.get_mpz_t(), ctx->cached_power(static_cast<int>(window)).get_mpz_t());
    if (s == 0) {
        if (all_full) return PadicScalar(ctx);
        throw PrecisionExhausted(abs_prec);
    }
    const long w = strip_prime(s, ctx->prime_z());
    return PadicScalar::from_parts(ctx, vmin + w, std::move(s), static_cast<int>(window - w));
}

VectorNorm vec_val_norm(const PadicVector& x) {
    VectorNorm out;
    if (x.empty()) return out;
    out.norm.p = x.front().prime();
    for (const auto& xi : x) out.valuation = std::min(out.valuation, xi.valuation());
    out.norm.val = out.valuation;
    return out;
}

PadicVector integer_vector(const ContextPtr& ctx, std::initializer_list<long> entries) {
    PadicVector out;
    out.reserve(entries.size());
    for (long e : entries) out.push_back(PadicScalar::from_int(ctx, e));
    return out;
}

nlohmann::json scalar_to_json(const PadicScalar& x) {
    if (x.is_zero()) return nlohmann::json{{"v", nullptr}};
    return nlohmann::json{{"v", x.valuation()}, {"digits", x.digits()}};
}

PadicScalar scalar_from_json(const ContextPtr& ctx, const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("v")) throw InvalidArgument("scalar record needs a \"v\" field");
    if (j.at("v").is_null()) return PadicScalar(ctx);
    const auto v = j.at("v").get<Valuation>();
    const auto digits = j.at("digits").get<std::vector<std::uint32_t>>();
    if (digits.empty() || digits.front() == 0) {
        throw InvalidArgument("nonzero scalar must start with a nonzero digit");
    }
    return PadicScalar::from_digits(ctx, v, digits);
}

}  // namespace pslice
