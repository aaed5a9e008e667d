#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "pslice/linalg.hpp"
#include "pslice/padic.hpp"

namespace pslice {

using Exponent = std::vector<std::uint32_t>;

std::uint32_t total_degree(const Exponent& e);

/// Polynomial with arbitrary-size integer coefficients in named variables.
/// Terms are kept expanded with no zero coefficients.
class MultiPoly {
public:
    explicit MultiPoly(std::vector<std::string> variables);

    static MultiPoly constant(std::vector<std::string> variables, const mpz_class& c);
    static MultiPoly variable(std::vector<std::string> variables, std::size_t index);

    const std::vector<std::string>& variables() const noexcept { return vars_; }
    std::size_t arity() const noexcept { return vars_.size(); }
    const std::map<Exponent, mpz_class>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// -1 for the zero polynomial.
    int total_degree() const;
    bool is_homogeneous() const;
    mpz_class coefficient(const Exponent& e) const;

    void add_term(const Exponent& e, const mpz_class& c);

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly pow(std::uint32_t k) const;
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }

    /// Formal partial derivative; coefficients are never reduced.
    MultiPoly derivative(std::size_t var) const;

    /// Canonical text: terms by decreasing total degree, then decreasing exponent vector.
    std::string to_string() const;

private:
    void check_compatible(const MultiPoly& o) const;

    std::vector<std::string> vars_;
    std::map<Exponent, mpz_class> terms_;
};

/// Parses integers, variable names, + - * ^ and parentheses into canonical expanded form.
/// Throws SyntaxError (with position) or UnknownVariable.
MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& variables);

struct PolySystem {
    std::vector<std::string> variables;
    std::vector<MultiPoly> polys;
    bool homogeneous = false;

    /// Builds the system and sets `homogeneous` from the polynomials themselves.
    static PolySystem make(std::vector<std::string> variables, std::vector<MultiPoly> polys);
    std::size_t arity() const noexcept { return variables.size(); }
};

PadicScalar eval(const MultiPoly& f, const PadicVector& x);
PadicVector eval(const PolySystem& sys, const PadicVector& x);

/// r x N matrix of formal partial derivatives.
std::vector<std::vector<MultiPoly>> jacobian(const PolySystem& sys);
PadicMatrix eval_jacobian(const std::vector<std::vector<MultiPoly>>& jac, const PadicVector& x);

/// Each polynomial multiplied by z^(deg - deg term); z is appended as the last variable.
PolySystem homogenize(const PolySystem& sys, const std::string& new_variable);
/// Sets variable `chart` to 1 and drops it. Throws NotHomogeneous.
PolySystem dehomogenize(const PolySystem& sys, std::size_t chart);

/// Polynomial with Q_p coefficients in anonymous variables t_0, ..., t_{m-1}.
class PadicPoly {
public:
    PadicPoly(ContextPtr ctx, std::size_t arity);

    static PadicPoly from_integer_poly(const ContextPtr& ctx, const MultiPoly& f);
    static PadicPoly constant(const ContextPtr& ctx, std::size_t arity, const PadicScalar& c);

    const ContextPtr& context() const noexcept { return ctx_; }
    std::size_t arity() const noexcept { return arity_; }
    const std::map<Exponent, PadicScalar>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    int total_degree() const;

    /// Adds c to the coefficient of t^e; a sum whose digits cancel is dropped.
    void add_term(const Exponent& e, const PadicScalar& c);

    PadicPoly& operator+=(const PadicPoly& o);
    friend PadicPoly operator*(const PadicPoly& a, const PadicPoly& b);
    PadicPoly scaled(const PadicScalar& c) const;
    PadicPoly derivative(std::size_t var) const;

    /// Minimum coefficient valuation (kInfiniteValuation for zero).
    Valuation content_valuation() const;
    /// Divides by p^{content valuation} so some coefficient is a unit.
    PadicPoly primitive() const;

    PadicScalar eval(const PadicVector& t) const;

private:
    ContextPtr ctx_;
    std::size_t arity_;
    std::map<Exponent, PadicScalar> terms_;
};

/// f(u + W t) expanded in the columns of W. Coefficient arithmetic happens in Q_p.
PadicPoly substitute_affine(const PadicPoly& f, const PadicVector& u, const PadicMatrix& w);
std::vector<PadicPoly> substitute_affine(const PolySystem& sys, const ContextPtr& ctx,
                                         const PadicVector& u, const PadicMatrix& w);

/// Polynomial with coefficients in Z / p^j, for moduli below 2^62.
class ModPoly {
public:
    ModPoly(std::uint64_t modulus, std::size_t arity);

    std::uint64_t modulus() const noexcept { return modulus_; }
    std::size_t arity() const noexcept { return arity_; }
    const std::vector<std::pair<Exponent, std::uint64_t>>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    void add_term(const Exponent& e, std::uint64_t c);
    std::uint64_t eval(const std::vector<std::uint64_t>& x) const;

private:
    std::uint64_t modulus_;
    std::size_t arity_;
    std::vector<std::pair<Exponent, std::uint64_t>> terms_;
};

/// Coefficientwise reduction modulo p^j. Throws NegativeValuationCoefficient
/// for a coefficient outside Z_p and PrecisionExhausted when a coefficient is
/// not known modulo p^j.
ModPoly reduce_mod(const PadicPoly& f, int j);
ModPoly reduce_mod(const MultiPoly& f, std::uint32_t p, int j);

}  // namespace pslice
