#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pslice/linalg.hpp"
#include "pslice/padic.hpp"
#include "pslice/poly.hpp"

namespace pslice {

enum class Ambient { affine, projective };

/// A smooth variety given by integer polynomials: X in A^N, or X in P^{N-1}
/// with N homogeneous coordinates.
class Variety {
public:
    /// Validates 1 <= n, codimension >= 1, r >= codimension and homogeneity
    /// for projective varieties. `degree` defaults to the product of the
    /// total degrees of the equations.
    Variety(std::string name, Ambient ambient, PolySystem system, std::size_t dim,
            std::optional<std::uint32_t> degree = std::nullopt);

    const std::string& name() const noexcept { return name_; }
    Ambient ambient() const noexcept { return ambient_; }
    bool is_projective() const noexcept { return ambient_ == Ambient::projective; }
    const PolySystem& system() const noexcept { return system_; }
    const std::vector<std::string>& variables() const noexcept { return system_.variables; }
    /// Number of coordinates N.
    std::size_t coords() const noexcept { return system_.arity(); }
    std::size_t dim() const noexcept { return dim_; }
    /// N - n in the affine case, N - 1 - n in the projective case.
    std::size_t codim() const noexcept;
    std::uint32_t degree() const noexcept { return degree_; }
    const std::vector<std::vector<MultiPoly>>& jacobian() const noexcept { return jacobian_; }

    PadicMatrix jacobian_at(const PadicVector& x) const { return eval_jacobian(jacobian_, x); }

private:
    std::string name_;
    Ambient ambient_;
    PolySystem system_;
    std::size_t dim_;
    std::uint32_t degree_;
    std::vector<std::vector<MultiPoly>> jacobian_;
};

struct VarietyPoint {
    PadicVector coords;
    bool residual_ok = false;
};

/// Default check level: half the working precision.
int default_check_level(const PadicContext& ctx);

/// Minimum valuation of p_i(x) over the equations; cancellation beyond the
/// known digits counts as its level.
Valuation residual_valuation(const Variety& variety, const PadicVector& x);

/// All |p_i(x)| <= p^{-j}; j defaults to kappa/2.
bool on_variety(const Variety& variety, const PadicVector& x, std::optional<int> check_level = std::nullopt);

/// Some codim x codim minor of the Jacobian has valuation < kappa/2.
bool is_smooth_point(const Variety& variety, const PadicVector& x);

/// N x n orthonormal basis of T_x X (affine), or of a complement of K x in
/// T_x of the cone (projective). Throws NotOnVariety or SingularPoint.
PadicMatrix tangent_basis(const Variety& variety, const PadicVector& x);

/// N(S_x U W) for affine X.
AbsValue nr_at(const Variety& variety, const PadicVector& x);
/// Same invariant with caller-supplied U (unimodular, U x = (0,...,p^{val x})) and W.
AbsValue nr_with(const PadicVector& x, const PadicMatrix& u, const PadicMatrix& w);

/// (1 - q^{-(n+1)}) / (1 - q^{-1}) = (q^{n+1} - 1) / (q^n (q - 1)).
mpq_class sphere_constant(std::uint32_t q, std::size_t n);

struct Weight {
    mpq_class exact;
    double value = 0.0;
};

/// C_n * max(1, ||x||^n) / Nr(X, x).
Weight weight_at(const Variety& variety, const PadicVector& x);

/// Equations of p^r X: x -> p^{-r} x substituted, then the p-power content removed.
Variety rescale_variety(const Variety& variety, std::uint32_t p, std::uint32_t r);

/// Representative with ||x|| = 1 whose first unit coordinate equals 1. Throws ZeroVector.
PadicVector canonical_projective(const PadicVector& x);

/// max_{i<j} |x_i y_j - x_j y_i| for unit representatives.
AbsValue fubini_study_distance(const PadicVector& x, const PadicVector& y);

}  // namespace pslice
