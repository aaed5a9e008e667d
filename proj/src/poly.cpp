#include "pslice/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pslice {

std::uint32_t total_degree(const Exponent& e) {
    std::uint32_t d = 0;
    for (auto k : e) d += k;
    return d;
}

namespace {

Exponent add_exponents(const Exponent& a, const Exponent& b) {
    Exponent out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// Per-variable power tables x_i^0 .. x_i^{max degree}.
template <typename T, typename Mul>
std::vector<std::vector<T>> power_tables(const std::vector<T>& x, const std::vector<std::uint32_t>& max_deg,
                                         const T& one, Mul mul) {
    std::vector<std::vector<T>> pw(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        pw[i].reserve(max_deg[i] + 1);
        pw[i].push_back(one);
        for (std::uint32_t k = 1; k <= max_deg[i]; ++k) pw[i].push_back(mul(pw[i].back(), x[i]));
    }
    return pw;
}

template <typename Map>
std::vector<std::uint32_t> max_degrees(const Map& terms, std::size_t arity) {
    std::vector<std::uint32_t> out(arity, 0);
    for (const auto& [e, c] : terms) {
        for (std::size_t i = 0; i < arity; ++i) out[i] = std::max(out[i], e[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

    MultiPoly parse() {
        MultiPoly out = expr();
        skip_ws();
        if (pos_ != s_.size()) throw SyntaxError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    MultiPoly expr() {
        MultiPoly acc = term();
        for (;;) {
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    MultiPoly term() {
        MultiPoly acc = unary();
        while (accept('*')) acc = acc * unary();
        return acc;
    }

    MultiPoly unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    MultiPoly power() {
        MultiPoly base = atom();
        if (accept('^')) {
            skip_ws();
            const std::size_t start = pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                throw SyntaxError("exponent must be a nonnegative integer literal", pos_);
            }
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string digits(s_.substr(start, pos_ - start));
            if (digits.size() > 4) throw SyntaxError("exponent too large", start);
            base = base.pow(static_cast<std::uint32_t>(std::stoul(digits)));
        }
        return base;
    }

    MultiPoly atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            MultiPoly inner = expr();
            if (!accept(')')) throw SyntaxError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return MultiPoly::constant(vars_, mpz_class(std::string(s_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name(s_.substr(start, pos_ - start));
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) throw UnknownVariable(name);
            return MultiPoly::variable(vars_, static_cast<std::size_t>(it - vars_.begin()));
        }
        throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    std::string_view s_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// MultiPoly
// ---------------------------------------------------------------------------

MultiPoly::MultiPoly(std::vector<std::string> variables) : vars_(std::move(variables)) {}

MultiPoly MultiPoly::constant(std::vector<std::string> variables, const mpz_class& c) {
    MultiPoly out(std::move(variables));
    out.add_term(Exponent(out.arity(), 0), c);
    return out;
}

MultiPoly MultiPoly::variable(std::vector<std::string> variables, std::size_t index) {
    MultiPoly out(std::move(variables));
    if (index >= out.arity()) throw InvalidArgument("variable index out of range");
    Exponent e(out.arity(), 0);
    e[index] = 1;
    out.add_term(e, 1);
    return out;
}

int MultiPoly::total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(pslice::total_degree(e)));
    return d;
}

bool MultiPoly::is_homogeneous() const {
    const int d = total_degree();
    for (const auto& [e, c] : terms_) {
        if (static_cast<int>(pslice::total_degree(e)) != d) return false;
    }
    return true;
}

mpz_class MultiPoly::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? mpz_class(0) : it->second;
}

void MultiPoly::add_term(const Exponent& e, const mpz_class& c) {
    if (e.size() != arity()) throw InvalidArgument("exponent arity mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void MultiPoly::check_compatible(const MultiPoly& o) const {
    if (vars_ != o.vars_) throw InvalidArgument("polynomials over different variables");
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out(*this);
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly out(a.vars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) out.add_term(add_exponents(ea, eb), ca * cb);
    }
    return out;
}

MultiPoly MultiPoly::pow(std::uint32_t k) const {
    MultiPoly result = constant(vars_, 1);
    MultiPoly base = *this;
    while (k > 0) {
        if (k & 1U) result = result * base;
        k >>= 1U;
        if (k > 0) base = base * base;
    }
    return result;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
    if (var >= arity()) throw InvalidArgument("variable index out of range");
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent d = e;
        d[var] -= 1;
        out.add_term(d, c * e[var]);
    }
    return out;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Exponent, mpz_class>> sorted(terms_.begin(), terms_.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
        const auto dx = pslice::total_degree(x.first);
        const auto dy = pslice::total_degree(y.first);
        if (dx != dy) return dx > dy;
        return x.first > y.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : sorted) {
        const bool negative = c < 0;
        if (first) {
            if (negative) os << "-";
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        const mpz_class mag = abs(c);
        const bool constant_term = pslice::total_degree(e) == 0;
        bool need_star = false;
        if (mag != 1 || constant_term) {
            os << mag.get_str();
            need_star = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (need_star) os << "*";
            os << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
            need_star = true;
        }
    }
    return os.str();
}

MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& variables) {
    return Parser(text, variables).parse();
}

PolySystem PolySystem::make(std::vector<std::string> variables, std::vector<MultiPoly> polys) {
    PolySystem sys{std::move(variables), std::move(polys), true};
    for (const auto& f : sys.polys) {
        if (f.variables() != sys.variables) throw InvalidArgument("system polynomials disagree on variables");
        if (!f.is_homogeneous()) sys.homogeneous = false;
    }
    if (sys.polys.empty()) sys.homogeneous = false;
    return sys;
}

// ---------------------------------------------------------------------------
// Evaluation and derivatives
// ---------------------------------------------------------------------------

PadicScalar eval(const MultiPoly& f, const PadicVector& x) {
    if (x.size() != f.arity()) throw InvalidArgument("evaluation point has wrong length");
    if (x.empty()) {
        throw InvalidArgument("evaluation of a polynomial in zero variables");
    }
    const ContextPtr& ctx = x.front().context();
    const auto pw = power_tables(x, max_degrees(f.terms(), f.arity()), PadicScalar::from_int(ctx, 1),
                                 [](const PadicScalar& a, const PadicScalar& b) { return a * b; });
    std::vector<PadicScalar> terms;
    terms.reserve(f.terms().size());
    for (const auto& [e, c] : f.terms()) {
        PadicScalar t = PadicScalar::from_integer(ctx, c);
        for (std::size_t i = 0; i < e.size() && !t.is_zero(); ++i) {
            if (e[i] > 0) t *= pw[i][e[i]];
        }
        terms.push_back(std::move(t));
    }
    return padic_sum(ctx, terms);
}

PadicVector eval(const PolySystem& sys, const PadicVector& x) {
    PadicVector out;
    out.reserve(sys.polys.size());
    for (const auto& f : sys.polys) out.push_back(eval(f, x));
    return out;
}

std::vector<std::vector<MultiPoly>> jacobian(const PolySystem& sys) {
    std::vector<std::vector<MultiPoly>> out;
    out.reserve(sys.polys.size());
    for (const auto& f : sys.polys) {
        std::vector<MultiPoly> row;
        row.reserve(sys.arity());
        for (std::size_t j = 0; j < sys.arity(); ++j) row.push_back(f.derivative(j));
        out.push_back(std::move(row));
    }
    return out;
}

PadicMatrix eval_jacobian(const std::vector<std::vector<MultiPoly>>& jac, const PadicVector& x) {
    if (x.empty()) throw InvalidArgument("empty evaluation point");
    const std::size_t rows = jac.size();
    const std::size_t cols = rows == 0 ? x.size() : jac.front().size();
    PadicMatrix m(x.front().context(), rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            try {
                m(i, j) = eval(jac[i][j], x);
            } catch (const PrecisionExhausted&) {
                m(i, j) = PadicScalar(x.front().context());
            }
        }
    }
    return m;
}

PolySystem homogenize(const PolySystem& sys, const std::string& new_variable) {
    if (std::find(sys.variables.begin(), sys.variables.end(), new_variable) != sys.variables.end()) {
        throw InvalidArgument("homogenizing variable '" + new_variable + "' already in use");
    }
    std::vector<std::string> vars = sys.variables;
    vars.push_back(new_variable);
    std::vector<MultiPoly> polys;
    for (const auto& f : sys.polys) {
        const int d = f.total_degree();
        MultiPoly h(vars);
        for (const auto& [e, c] : f.terms()) {
            Exponent he = e;
            he.push_back(static_cast<std::uint32_t>(d) - pslice::total_degree(e));
            h.add_term(he, c);
        }
        polys.push_back(std::move(h));
    }
    return PolySystem::make(std::move(vars), std::move(polys));
}

PolySystem dehomogenize(const PolySystem& sys, std::size_t chart) {
    if (!sys.homogeneous) throw NotHomogeneous();
    if (chart >= sys.arity()) throw InvalidArgument("chart index out of range");
    std::vector<std::string> vars = sys.variables;
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(chart));
    std::vector<MultiPoly> polys;
    for (const auto& f : sys.polys) {
        MultiPoly g(vars);
        for (const auto& [e, c] : f.terms()) {
            Exponent ge = e;
            ge.erase(ge.begin() + static_cast<std::ptrdiff_t>(chart));
            g.add_term(ge, c);
        }
        polys.push_back(std::move(g));
    }
    return PolySystem::make(std::move(vars), std::move(polys));
}

// ---------------------------------------------------------------------------
// PadicPoly
// ---------------------------------------------------------------------------

PadicPoly::PadicPoly(ContextPtr ctx, std::size_t arity) : ctx_(std::move(ctx)), arity_(arity) {}

PadicPoly PadicPoly::from_integer_poly(const ContextPtr& ctx, const MultiPoly& f) {
    PadicPoly out(ctx, f.arity());
    for (const auto& [e, c] : f.terms()) out.terms_.emplace(e, PadicScalar::from_integer(ctx, c));
    return out;
}

PadicPoly PadicPoly::constant(const ContextPtr& ctx, std::size_t arity, const PadicScalar& c) {
    PadicPoly out(ctx, arity);
    out.add_term(Exponent(arity, 0), c);
    return out;
}

int PadicPoly::total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(pslice::total_degree(e)));
    return d;
}

void PadicPoly::add_term(const Exponent& e, const PadicScalar& c) {
    if (e.size() != arity_) throw InvalidArgument("exponent arity mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second = add_or_zero(it->second, c);
        if (it->second.is_zero()) terms_.erase(it);
    }
}

PadicPoly& PadicPoly::operator+=(const PadicPoly& o) {
    if (o.arity_ != arity_) throw InvalidArgument("arity mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

PadicPoly operator*(const PadicPoly& a, const PadicPoly& b) {
    if (a.arity_ != b.arity_) throw InvalidArgument("arity mismatch");
    PadicPoly out(a.ctx_, a.arity_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) out.add_term(add_exponents(ea, eb), ca * cb);
    }
    return out;
}

PadicPoly PadicPoly::scaled(const PadicScalar& c) const {
    PadicPoly out(ctx_, arity_);
    if (c.is_zero()) return out;
    for (const auto& [e, coeff] : terms_) out.terms_.emplace(e, coeff * c);
    return out;
}

PadicPoly PadicPoly::derivative(std::size_t var) const {
    if (var >= arity_) throw InvalidArgument("variable index out of range");
    PadicPoly out(ctx_, arity_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent d = e;
        d[var] -= 1;
        out.add_term(d, c * PadicScalar::from_int(ctx_, static_cast<long>(e[var])));
    }
    return out;
}

Valuation PadicPoly::content_valuation() const {
    Valuation v = kInfiniteValuation;
    for (const auto& [e, c] : terms_) v = std::min(v, c.valuation());
    return v;
}

PadicPoly PadicPoly::primitive() const {
    const Valuation v = content_valuation();
    if (v == kInfiniteValuation || v == 0) return *this;
    PadicPoly out(ctx_, arity_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c.shifted(-v));
    return out;
}

PadicScalar PadicPoly::eval(const PadicVector& t) const {
    if (t.size() != arity_) throw InvalidArgument("evaluation point has wrong length");
    const auto pw = power_tables(t, max_degrees(terms_, arity_), PadicScalar::from_int(ctx_, 1),
                                 [](const PadicScalar& a, const PadicScalar& b) { return a * b; });
    std::vector<PadicScalar> parts;
    parts.reserve(terms_.size());
    for (const auto& [e, c] : terms_) {
        PadicScalar x = c;
        for (std::size_t i = 0; i < arity_ && !x.is_zero(); ++i) {
            if (e[i] > 0) x *= pw[i][e[i]];
        }
        parts.push_back(std::move(x));
    }
    return padic_sum(ctx_, parts);
}

PadicPoly substitute_affine(const PadicPoly& f, const PadicVector& u, const PadicMatrix& w) {
    const std::size_t n = f.arity();
    if (u.size() != n || w.rows() != n) throw InvalidArgument("substitution dimension mismatch");
    const ContextPtr& ctx = f.context();
    const std::size_t m = w.cols();

    std::vector<PadicPoly> forms;
    forms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PadicPoly l(ctx, m);
        l.add_term(Exponent(m, 0), u[i]);
        for (std::size_t j = 0; j < m; ++j) {
            Exponent e(m, 0);
            e[j] = 1;
            l.add_term(e, w(i, j));
        }
        forms.push_back(std::move(l));
    }
    const auto pw = power_tables(forms, max_degrees(f.terms(), n),
                                 PadicPoly::constant(ctx, m, PadicScalar::from_int(ctx, 1)),
                                 [](const PadicPoly& a, const PadicPoly& b) { return a * b; });
    PadicPoly out(ctx, m);
    for (const auto& [e, c] : f.terms()) {
        PadicPoly term = PadicPoly::constant(ctx, m, c);
        for (std::size_t i = 0; i < n && !term.is_zero(); ++i) {
            if (e[i] > 0) term = term * pw[i][e[i]];
        }
        out += term;
    }
    return out;
}

std::vector<PadicPoly> substitute_affine(const PolySystem& sys, const ContextPtr& ctx,
                                         const PadicVector& u, const PadicMatrix& w) {
    std::vector<PadicPoly> out;
    out.reserve(sys.polys.size());
    for (const auto& f : sys.polys) {
        out.push_back(substitute_affine(PadicPoly::from_integer_poly(ctx, f), u, w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// ModPoly
// ---------------------------------------------------------------------------

ModPoly::ModPoly(std::uint64_t modulus, std::size_t arity) : modulus_(modulus), arity_(arity) {
    if (modulus < 1 || modulus >= (std::uint64_t{1} << 62)) {
        throw InvalidArgument("modulus must lie in [1, 2^62)");
    }
}

void ModPoly::add_term(const Exponent& e, std::uint64_t c) {
    if (e.size() != arity_) throw InvalidArgument("exponent arity mismatch");
    c %= modulus_;
    if (c == 0) return;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].first != e) continue;
        terms_[i].second = (terms_[i].second + c) % modulus_;
        if (terms_[i].second == 0) terms_.erase(terms_.begin() + static_cast<std::ptrdiff_t>(i));
        return;
    }
    terms_.emplace_back(e, c);
}

std::uint64_t ModPoly::eval(const std::vector<std::uint64_t>& x) const {
    if (x.size() != arity_) throw InvalidArgument("evaluation point has wrong length");
    std::vector<std::uint64_t> reduced(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) reduced[i] = x[i] % modulus_;
    const std::uint64_t m = modulus_;
    const auto pw = power_tables(reduced, max_degrees(terms_, arity_), std::uint64_t{1} % m,
                                 [m](std::uint64_t a, std::uint64_t b) { return mul_mod(a, b, m); });
    std::uint64_t acc = 0;
    for (const auto& [e, c] : terms_) {
        std::uint64_t t = c;
        for (std::size_t i = 0; i < arity_ && t != 0; ++i) {
            if (e[i] > 0) t = mul_mod(t, pw[i][e[i]], m);
        }
        acc += t;
        if (acc >= m) acc -= m;
    }
    return acc;
}

ModPoly reduce_mod(const PadicPoly& f, int j) {
    const ContextPtr& ctx = f.context();
    const mpz_class modulus = ctx->power(j);
    if (modulus >= mpz_class(std::uint64_t{1} << 62)) throw InvalidArgument("modulus too large");
    ModPoly out(modulus.get_ui(), f.arity());
    for (const auto& [e, c] : f.terms()) out.add_term(e, c.residue(j).get_ui());
    return out;
}

ModPoly reduce_mod(const MultiPoly& f, std::uint32_t p, int j) {
    mpz_class modulus;
    mpz_ui_pow_ui(modulus.get_mpz_t(), p, static_cast<unsigned long>(j));
    if (modulus >= mpz_class(std::uint64_t{1} << 62)) throw InvalidArgument("modulus too large");
    ModPoly out(modulus.get_ui(), f.arity());
    for (const auto& [e, c] : f.terms()) {
        mpz_class r;
        mpz_mod(r.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
        out.add_term(e, r.get_ui());
    }
    return out;
}

}  // namespace pslice
