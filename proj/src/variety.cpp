#include "pslice/variety.hpp"

#include <algorithm>

namespace pslice {

Variety::Variety(std::string name, Ambient ambient, PolySystem system, std::size_t dim,
                 std::optional<std::uint32_t> degree)
    : name_(std::move(name)), ambient_(ambient), system_(std::move(system)), dim_(dim), degree_(1) {
    const std::size_t n_coords = system_.arity();
    const std::size_t space_dim = ambient_ == Ambient::affine ? n_coords : n_coords - 1;
    if (n_coords == 0 || (ambient_ == Ambient::projective && n_coords < 2)) {
        throw InvalidArgument("ambient space has too few coordinates");
    }
    if (dim_ < 1 || dim_ >= space_dim) {
        throw InvalidArgument("dimension must satisfy 1 <= n < " + std::to_string(space_dim));
    }
    if (system_.polys.size() < codim()) {
        throw InvalidArgument("need at least " + std::to_string(codim()) + " equations for codimension " +
                              std::to_string(codim()));
    }
    for (const auto& f : system_.polys) {
        if (f.is_zero()) throw InvalidArgument("zero polynomial in the defining system");
    }
    if (ambient_ == Ambient::projective && !system_.homogeneous) throw NotHomogeneous();
    if (degree) {
        if (*degree < 1) throw InvalidArgument("degree bound must be positive");
        degree_ = *degree;
    } else {
        std::uint64_t prod = 1;
        for (const auto& f : system_.polys) {
            prod *= static_cast<std::uint64_t>(std::max(1, f.total_degree()));
            if (prod > 0xFFFFFFFFULL) throw InvalidArgument("degree bound overflows");
        }
        degree_ = static_cast<std::uint32_t>(prod);
    }
    jacobian_ = pslice::jacobian(system_);
}

std::size_t Variety::codim() const noexcept {
    const std::size_t space_dim = ambient_ == Ambient::affine ? coords() : coords() - 1;
    return space_dim - dim_;
}

int default_check_level(const PadicContext& ctx) {
    return ctx.precision() / 2;
}

Valuation residual_valuation(const Variety& variety, const PadicVector& x) {
    Valuation out = kInfiniteValuation;
    for (const auto& f : variety.system().polys) {
        try {
            out = std::min(out, eval(f, x).valuation());
        } catch (const PrecisionExhausted& e) {
            out = std::min(out, static_cast<Valuation>(e.level()));
        }
    }
    return out;
}

bool on_variety(const Variety& variety, const PadicVector& x, std::optional<int> check_level) {
    if (x.size() != variety.coords()) return false;
    const int j = check_level.value_or(default_check_level(*x.front().context()));
    return residual_valuation(variety, x) >= j;
}

namespace {

// Sum of the first `count` elementary divisors, i.e. the minimal valuation of a
// count x count minor.
Valuation minor_valuation(const SmithDecomposition& snf, std::size_t count) {
    Valuation sum = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i >= snf.divisor_valuations.size()) return kInfiniteValuation;
        const Valuation v = snf.divisor_valuations[i];
        if (v == kInfiniteValuation) return kInfiniteValuation;
        sum += v;
    }
    return sum;
}

}  // namespace

bool is_smooth_point(const Variety& variety, const PadicVector& x) {
    if (x.size() != variety.coords()) return false;
    const auto snf = smith_normal_form(variety.jacobian_at(x));
    return minor_valuation(snf, variety.codim()) < default_check_level(*x.front().context());
}

PadicMatrix tangent_basis(const Variety& variety, const PadicVector& x) {
    if (x.size() != variety.coords()) throw InvalidArgument("point has the wrong number of coordinates");
    if (!on_variety(variety, x)) throw NotOnVariety();
    const ContextPtr& ctx = x.front().context();
    const std::size_t c = variety.codim();
    const auto snf = smith_normal_form(variety.jacobian_at(x));
    if (minor_valuation(snf, c) >= default_check_level(*ctx)) throw SingularPoint();
    PadicMatrix kernel = snf.V_inv.column_block(c, variety.coords() - c);
    if (!variety.is_projective()) return kernel;

    // Coordinates of x in the kernel basis, then move K x to the last basis vector.
    const PadicVector vx = snf.V * x;
    PadicVector y(vx.begin() + static_cast<std::ptrdiff_t>(c), vx.end());
    const PadicMatrix t_inv = inverse(unimodular_transport(y));
    const PadicMatrix moved = kernel * t_inv;
    return moved.column_block(0, variety.dim());
}

AbsValue nr_with(const PadicVector& x, const PadicMatrix& u, const PadicMatrix& w) {
    const std::size_t n_coords = x.size();
    const Valuation v = vec_val_norm(x).valuation;
    PadicMatrix uw = u * w;
    if (v != kInfiniteValuation && v < 0) {
        for (std::size_t j = 0; j < uw.cols(); ++j) uw(n_coords - 1, j) = uw(n_coords - 1, j).shifted(-v);
    }
    return absolute_det(uw);
}

AbsValue nr_at(const Variety& variety, const PadicVector& x) {
    if (variety.is_projective()) throw InvalidArgument("Nr is defined for affine varieties");
    const PadicMatrix w = tangent_basis(variety, x);
    const ContextPtr& ctx = x.front().context();
    const bool zero = vec_val_norm(x).valuation == kInfiniteValuation;
    const PadicMatrix u = zero ? PadicMatrix::identity(ctx, x.size()) : unimodular_transport(x);
    return nr_with(x, u, w);
}

mpq_class sphere_constant(std::uint32_t q, std::size_t n) {
    mpz_class qn;
    mpz_ui_pow_ui(qn.get_mpz_t(), q, static_cast<unsigned long>(n));
    mpq_class out(qn * q - 1, qn * (q - 1));
    out.canonicalize();
    return out;
}

Weight weight_at(const Variety& variety, const PadicVector& x) {
    const std::uint32_t p = x.front().prime();
    const AbsValue nr = nr_at(variety, x);
    if (nr.is_zero()) throw SingularPoint();
    const Valuation v = vec_val_norm(x).valuation;
    // max(1, ||x||^n) / Nr = p^{n * max(0, -v)} * p^{nr.val}
    long exponent = nr.val;
    if (v != kInfiniteValuation && v < 0) exponent += static_cast<long>(variety.dim()) * (-v);
    mpq_class w = sphere_constant(p, variety.dim());
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent >= 0) w *= pw;
    else w /= pw;
    w.canonicalize();
    return Weight{w, w.get_d()};
}

Variety rescale_variety(const Variety& variety, std::uint32_t p, std::uint32_t r) {
    if (variety.is_projective()) throw InvalidArgument("rescaling applies to affine varieties");
    if (r == 0) return variety;
    const mpz_class pz(p);
    std::vector<MultiPoly> polys;
    for (const auto& f : variety.system().polys) {
        const auto top = static_cast<std::uint32_t>(f.total_degree());
        MultiPoly g(f.variables());
        unsigned long content = ~0UL;
        for (const auto& [e, c] : f.terms()) {
            // c * p^{-r deg e} x^e, multiplied through by p^{r top}
            mpz_class scale;
            mpz_pow_ui(scale.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(r) * (top - total_degree(e)));
            const mpz_class coeff = c * scale;
            mpz_class rest = coeff;
            content = std::min(content, static_cast<unsigned long>(
                                            mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), pz.get_mpz_t())));
            g.add_term(e, coeff);
        }
        MultiPoly h(f.variables());
        mpz_class divisor;
        mpz_pow_ui(divisor.get_mpz_t(), pz.get_mpz_t(), content);
        for (const auto& [e, c] : g.terms()) h.add_term(e, c / divisor);
        polys.push_back(std::move(h));
    }
    return Variety(variety.name() + "_scaled_" + std::to_string(r), Ambient::affine,
                   PolySystem::make(variety.variables(), std::move(polys)), variety.dim(), variety.degree());
}

PadicVector canonical_projective(const PadicVector& x) {
    const Valuation v = vec_val_norm(x).valuation;
    if (v == kInfiniteValuation) throw ZeroVector();
    PadicVector y;
    y.reserve(x.size());
    for (const auto& xi : x) y.push_back(xi.shifted(-v));
    std::size_t k = 0;
    while (y[k].valuation() != 0) ++k;
    const PadicScalar inv = y[k].inverse();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i == k) continue;
        y[i] *= inv;
    }
    y[k] = PadicScalar::from_int(x.front().context(), 1);
    return y;
}

AbsValue fubini_study_distance(const PadicVector& x, const PadicVector& y) {
    if (x.size() != y.size()) throw InvalidArgument("points in different spaces");
    AbsValue out{x.front().prime(), kInfiniteValuation};
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const Valuation v = difference_valuation(x[i] * y[j], x[j] * y[i]);
            out.val = std::min(out.val, v);
        }
    }
    return out;
}

}  // namespace pslice
