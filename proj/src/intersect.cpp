#include "pslice/intersect.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

namespace pslice {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// Determinant modulo m by Laplace expansion along the first row (m <= 4 in practice).
std::uint64_t det_mod(const std::vector<std::vector<std::uint64_t>>& a, std::uint64_t m) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0] % m;
    if (n == 2) {
        const std::uint64_t x = mul_mod(a[0][0], a[1][1], m);
        const std::uint64_t y = mul_mod(a[0][1], a[1][0], m);
        return (x + m - y) % m;
    }
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (a[0][c] == 0) continue;
        std::vector<std::vector<std::uint64_t>> minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<std::uint64_t> row;
            row.reserve(n - 1);
            for (std::size_t k = 0; k < n; ++k) {
                if (k != c) row.push_back(a[r][k]);
            }
            minor.push_back(std::move(row));
        }
        const std::uint64_t term = mul_mod(a[0][c], det_mod(minor, m), m);
        acc = (c % 2 == 0) ? (acc + term) % m : (acc + m - term) % m;
    }
    return acc;
}

// Lexicographic size-k subsets of {0, ..., n-1}.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// Odometer step over [0, base)^m; false once every digit wrapped back to zero.
bool next_digits(std::vector<std::uint64_t>& digits, std::uint64_t base) {
    std::size_t i = digits.size();
    while (i-- > 0) {
        if (++digits[i] < base) return true;
        digits[i] = 0;
    }
    return false;
}

PadicScalar eval_or_zero(const PadicPoly& f, const PadicVector& x) {
    try {
        return f.eval(x);
    } catch (const PrecisionExhausted&) {
        return PadicScalar(f.context());
    }
}

Valuation eval_valuation(const PadicPoly& f, const PadicVector& x) {
    try {
        return f.eval(x).valuation();
    } catch (const PrecisionExhausted& e) {
        return e.level();
    }
}

// Jacobian entries reduced modulo p^j.
struct ModLevel {
    std::vector<std::vector<ModPoly>> jac;
};

// A residue class a + p^depth Z_p^m together with the primitive parts of
// f_i(a + p^depth s), whose zeros mod p select the children worth visiting.
struct Node {
    std::vector<std::uint64_t> a;
    int depth = 0;
    std::vector<PadicPoly> local;
};

class ResidueSolver {
public:
    ResidueSolver(const std::vector<PadicPoly>& system, const SolverLimits& limits) {
        if (system.empty()) throw InvalidArgument("empty polynomial system");
        ctx_ = system.front().context();
        m_ = system.front().arity();
        for (const auto& f : system) {
            if (f.arity() != m_) throw InvalidArgument("system polynomials disagree on arity");
            if (!f.is_zero()) polys_.push_back(f.primitive());
        }
        for (const auto& f : polys_) {
            std::vector<PadicPoly> row;
            for (std::size_t l = 0; l < m_; ++l) row.push_back(f.derivative(l));
            jac_.push_back(std::move(row));
        }
        const std::uint32_t p = ctx_->prime();
        int cap = 0;
        unsigned __int128 pw = 1;
        while (pw * p < (static_cast<unsigned __int128>(1) << 62)) {
            pw *= p;
            ++cap;
        }
        max_depth_ = limits.max_depth > 0 ? limits.max_depth : ctx_->precision() / 2;
        max_depth_ = std::max(1, std::min(max_depth_, cap - 1));
        max_nodes_ = limits.max_nodes;
        subsets_ = subsets(polys_.size(), m_);
    }

    ZeroDimSolution run() {
        ZeroDimSolution out;
        if (m_ == 0) throw InvalidArgument("system in zero variables");
        if (polys_.size() < m_) {
            out.degenerate = true;
            return out;
        }
        std::deque<Node> queue;
        queue.push_back(Node{std::vector<std::uint64_t>(m_, 0), 0, polys_});
        while (!queue.empty()) {
            Node node = std::move(queue.front());
            queue.pop_front();
            if (++out.candidates_tried > max_nodes_) {
                out.degenerate = true;
                break;
            }
            try {
                if (node.depth > 0) {
                    if (const auto subset = hensel_subset(node.a, node.depth)) {
                        auto root = lift_in_class(subsets_[*subset], node.a, node.depth);
                        if (root.status == LiftStatus::failed) out.degenerate = true;
                        if (root.status == LiftStatus::found) out.roots.push_back(std::move(root.x));
                        continue;
                    }
                    if (node.depth >= max_depth_) {
                        out.degenerate = true;
                        continue;
                    }
                }
                expand(node, queue, out);
            } catch (const PrecisionExhausted&) {
                out.degenerate = true;
            }
        }
        finalize(out);
        return out;
    }

    enum class LiftStatus { found, none, failed };
    struct LiftResult {
        LiftStatus status;
        PadicVector x;
    };

    // Newton iteration on the subsystem; digits past the known precision are
    // read as zero after every step so the iterate stays at full precision.
    std::optional<PadicVector> newton(const std::vector<std::size_t>& subset, PadicVector x) const {
        const int kappa = ctx_->precision();
        for (int iter = 0; iter < 64; ++iter) {
            PadicVector f(m_, PadicScalar(ctx_));
            bool all_zero = true;
            for (std::size_t k = 0; k < m_; ++k) {
                f[k] = eval_or_zero(polys_[subset[k]], x);
                all_zero = all_zero && f[k].is_zero();
            }
            if (all_zero) return x;
            PadicMatrix jm(ctx_, m_, m_);
            for (std::size_t k = 0; k < m_; ++k) {
                for (std::size_t l = 0; l < m_; ++l) jm(k, l) = eval_or_zero(jac_[subset[k]][l], x);
            }
            PadicVector step;
            try {
                step = solve_square(jm, f);
            } catch (const RankDeficient&) {
                return std::nullopt;
            }
            const Valuation dv = vec_val_norm(step).valuation;
            for (std::size_t i = 0; i < m_; ++i) {
                x[i] = add_or_zero(x[i], -step[i]).with_full_precision();
                if (!x[i].is_zero() && x[i].valuation() < 0) return std::nullopt;
            }
            if (dv >= kappa) return x;
        }
        return std::nullopt;
    }

    LiftResult lift_in_class(const std::vector<std::size_t>& subset, const std::vector<std::uint64_t>& res,
                             int j) const {
        PadicVector x0;
        x0.reserve(m_);
        for (auto r : res) x0.push_back(PadicScalar::from_integer(ctx_, mpz_class(static_cast<unsigned long>(r))));
        auto x = newton(subset, std::move(x0));
        if (!x) return {LiftStatus::failed, {}};
        try {
            for (std::size_t i = 0; i < m_; ++i) {
                if ((*x)[i].residue(j) != mpz_class(static_cast<unsigned long>(res[i]))) {
                    return {LiftStatus::none, {}};
                }
            }
        } catch (const PrecisionExhausted&) {
            return {LiftStatus::failed, {}};
        }
        const int level = ctx_->precision() / 2;
        for (const auto& g : polys_) {
            if (eval_valuation(g, *x) < level) return {LiftStatus::none, {}};
        }
        return {LiftStatus::found, std::move(*x)};
    }

private:
    const ModLevel& mod_level(int j) {
        auto it = levels_.find(j);
        if (it != levels_.end()) return it->second;
        ModLevel lvl;
        for (const auto& row : jac_) {
            std::vector<ModPoly> mrow;
            for (const auto& d : row) mrow.push_back(reduce_mod(d, j));
            lvl.jac.push_back(std::move(mrow));
        }
        return levels_.emplace(j, std::move(lvl)).first->second;
    }

    PadicVector to_padic(const std::vector<std::uint64_t>& a) const {
        PadicVector x;
        x.reserve(a.size());
        for (auto r : a) x.push_back(PadicScalar::from_integer(ctx_, mpz_class(static_cast<unsigned long>(r))));
        return x;
    }

    // First subset (lexicographic) whose Jacobian determinant at a has
    // valuation e < depth with v(f_i(a)) > 2e on the subset: then the subsystem
    // has exactly one root in the ball around a, and no other in the class.
    std::optional<std::size_t> hensel_subset(const std::vector<std::uint64_t>& a, int depth) {
        const ModLevel& level = mod_level(depth);
        const std::uint64_t mod = level.jac.front().front().modulus();
        const std::uint64_t p = ctx_->prime();
        std::vector<std::vector<std::uint64_t>> jv(level.jac.size(), std::vector<std::uint64_t>(m_));
        for (std::size_t i = 0; i < level.jac.size(); ++i) {
            for (std::size_t l = 0; l < m_; ++l) jv[i][l] = level.jac[i][l].eval(a);
        }
        const PadicVector x = to_padic(a);
        std::vector<Valuation> vals(polys_.size(), -1);
        for (std::size_t s = 0; s < subsets_.size(); ++s) {
            std::vector<std::vector<std::uint64_t>> sub;
            for (auto i : subsets_[s]) sub.push_back(jv[i]);
            std::uint64_t d = det_mod(sub, mod);
            if (d == 0) continue;
            long e = 0;
            while (d % p == 0) {
                d /= p;
                ++e;
            }
            bool small = true;
            for (auto i : subsets_[s]) {
                if (vals[i] < 0) vals[i] = eval_valuation(polys_[i], x);
                small = small && vals[i] > 2 * e;
            }
            if (small) return s;
        }
        return std::nullopt;
    }

    // Queues the children a + p^depth s for the zeros s mod p of every local polynomial.
    void expand(const Node& node, std::deque<Node>& queue, ZeroDimSolution& out) const {
        const std::uint64_t p = ctx_->prime();
        std::vector<ModPoly> reduced;
        for (const auto& h : node.local) reduced.push_back(reduce_mod(h, 1));
        const std::uint64_t pj = ctx_->power(node.depth).get_ui();
        PadicMatrix w(ctx_, m_, m_);
        for (std::size_t i = 0; i < m_; ++i) w(i, i) = PadicScalar::from_int(ctx_, static_cast<long>(p));
        std::vector<std::uint64_t> s(m_, 0);
        do {
            bool zero = true;
            for (const auto& h : reduced) zero = zero && h.eval(s) == 0;
            if (!zero) continue;
            Node child;
            child.depth = node.depth + 1;
            child.a = node.a;
            for (std::size_t i = 0; i < m_; ++i) child.a[i] += s[i] * pj;
            const PadicVector u = to_padic(s);
            bool vanishes_on_class = false;
            for (const auto& h : node.local) {
                PadicPoly g = substitute_affine(h, u, w);
                if (g.is_zero()) {
                    vanishes_on_class = true;
                    break;
                }
                child.local.push_back(g.primitive());
            }
            if (vanishes_on_class) {
                out.degenerate = true;
                continue;
            }
            queue.push_back(std::move(child));
        } while (next_digits(s, p));
    }

    void finalize(ZeroDimSolution& out) const {
        const int level = ctx_->precision() / 2;
        std::vector<std::pair<std::vector<mpz_class>, PadicVector>> keyed;
        for (auto& x : out.roots) {
            std::vector<mpz_class> key;
            try {
                for (const auto& xi : x) key.push_back(xi.residue(level));
            } catch (const PrecisionExhausted&) {
                out.degenerate = true;
                continue;
            }
            keyed.emplace_back(std::move(key), std::move(x));
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        out.roots.clear();
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
            out.roots.push_back(std::move(keyed[i].second));
        }
    }

    ContextPtr ctx_;
    std::size_t m_ = 0;
    std::vector<PadicPoly> polys_;
    std::vector<std::vector<PadicPoly>> jac_;
    std::vector<std::vector<std::size_t>> subsets_;
    std::map<int, ModLevel> levels_;
    int max_depth_ = 1;
    std::size_t max_nodes_ = 0;
};

std::vector<mpz_class> residue_key(const PadicVector& x, int level) {
    std::vector<mpz_class> key;
    key.reserve(x.size());
    for (const auto& xi : x) key.push_back(xi.residue(level));
    return key;
}

void sort_points(std::vector<VarietyPoint>& points, int level) {
    std::vector<std::pair<std::vector<mpz_class>, VarietyPoint>> keyed;
    for (auto& pt : points) keyed.emplace_back(residue_key(pt.coords, level), std::move(pt));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    points.clear();
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
        points.push_back(std::move(keyed[i].second));
    }
}

bool slice_residual_ok(const PadicMatrix& a, const PadicVector& x, const PadicVector* b, int level) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::vector<PadicScalar> terms;
        for (std::size_t k = 0; k < a.cols(); ++k) terms.push_back(a(i, k) * x[k]);
        if (b != nullptr) terms.push_back(-(*b)[i]);
        try {
            if (padic_sum(a.context(), terms).valuation() < level) return false;
        } catch (const PrecisionExhausted& e) {
            if (e.level() < level) return false;
        }
    }
    return true;
}

}  // namespace

PadicScalar lift_simple_root(const PadicPoly& g, const mpz_class& r0) {
    if (g.arity() != 1) throw InvalidArgument("lift_simple_root expects a univariate polynomial");
    const ContextPtr& ctx = g.context();
    const PadicVector x0{PadicScalar::from_integer(ctx, r0)};
    if (eval_valuation(g, x0) < 1) throw InvalidArgument("residue is not a root modulo p");
    if (eval_valuation(g.derivative(0), x0) != 0) throw InvalidArgument("residue is not a simple root modulo p");
    ResidueSolver solver({g}, SolverLimits{});
    auto x = solver.newton({0}, x0);
    if (!x) throw PrecisionExhausted(0);
    return x->front();
}

std::vector<PadicScalar> univariate_roots_in_O(const PadicPoly& g, const SolverLimits& limits) {
    if (g.arity() != 1) throw InvalidArgument("univariate_roots_in_O expects a univariate polynomial");
    if (g.is_zero()) throw InvalidArgument("the zero polynomial has every element as a root");
    auto sol = ResidueSolver({g}, limits).run();
    if (sol.degenerate) throw DegenerateRoot();
    std::vector<PadicScalar> out;
    for (auto& r : sol.roots) out.push_back(r.front());
    return out;
}

ZeroDimSolution solve_zero_dim_in_O(const std::vector<PadicPoly>& system, const SolverLimits& limits) {
    return ResidueSolver(system, limits).run();
}

SliceIntersection intersect_affine(const Variety& variety, const PadicMatrix& a, const PadicVector& b,
                                   const SolverLimits& limits) {
    if (variety.is_projective()) throw InvalidArgument("intersect_affine needs an affine variety");
    if (a.rows() != variety.dim() || a.cols() != variety.coords()) {
        throw InvalidArgument("slice matrix must be n x N");
    }
    SliceIntersection out;
    const auto param = solve_affine_in_O(a, b);
    if (!param) return out;
    const ContextPtr& ctx = a.context();
    const auto sys = substitute_affine(variety.system(), ctx, param->base, param->directions);
    auto sol = solve_zero_dim_in_O(sys, limits);
    out.degenerate = sol.degenerate;
    out.residue_candidates_tried = sol.candidates_tried;
    const int level = default_check_level(*ctx);
    for (const auto& t : sol.roots) {
        PadicVector x = param->directions * t;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = add_or_zero(x[i], param->base[i]);
        const bool ok = on_variety(variety, x) && slice_residual_ok(a, x, &b, level);
        if (!ok) {
            out.degenerate = true;
            continue;
        }
        out.points.push_back(VarietyPoint{std::move(x), true});
    }
    sort_points(out.points, level);
    return out;
}

SliceIntersection intersect_projective(const Variety& variety, const PadicMatrix& a,
                                       const SolverLimits& limits) {
    if (!variety.is_projective()) throw InvalidArgument("intersect_projective needs a projective variety");
    if (a.rows() != variety.dim() || a.cols() != variety.coords()) {
        throw InvalidArgument("slice matrix must be n x N");
    }
    const ContextPtr& ctx = a.context();
    const auto snf = smith_normal_form(a);
    if (snf.rank < a.rows() || snf.precision_flag) throw RankDeficient();
    const std::size_t n_coords = variety.coords();
    const std::size_t k = n_coords - a.rows();
    const PadicMatrix kernel = snf.V_inv.column_block(a.rows(), k);

    std::vector<PadicPoly> cone;
    {
        const PadicVector zero(n_coords, PadicScalar(ctx));
        cone = substitute_affine(variety.system(), ctx, zero, kernel);
    }

    SliceIntersection out;
    const int level = default_check_level(*ctx);
    const PadicScalar one = PadicScalar::from_int(ctx, 1);
    for (std::size_t chart = 0; chart < k; ++chart) {
        // s_chart = 1, s_j = p t_j before the chart, s_j free after it.
        PadicVector u(k, PadicScalar(ctx));
        u[chart] = one;
        PadicMatrix w(ctx, k, k - 1);
        for (std::size_t j = 0; j < k; ++j) {
            if (j < chart) w(j, j) = one.shifted(1);
            else if (j > chart) w(j, j - 1) = one;
        }
        std::vector<PadicPoly> local;
        for (const auto& f : cone) local.push_back(substitute_affine(f, u, w));
        auto sol = solve_zero_dim_in_O(local, limits);
        out.degenerate = out.degenerate || sol.degenerate;
        out.residue_candidates_tried += sol.candidates_tried;
        for (const auto& t : sol.roots) {
            PadicVector s = w * t;
            for (std::size_t i = 0; i < k; ++i) s[i] = add_or_zero(s[i], u[i]);
            PadicVector x = canonical_projective(kernel * s);
            const bool ok = on_variety(variety, x) && slice_residual_ok(a, x, nullptr, level);
            if (!ok) {
                out.degenerate = true;
                continue;
            }
            out.points.push_back(VarietyPoint{std::move(x), true});
        }
    }
    sort_points(out.points, level);
    return out;
}

}  // namespace pslice
