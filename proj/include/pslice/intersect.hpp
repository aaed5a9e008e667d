#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

#include "pslice/linalg.hpp"
#include "pslice/poly.hpp"
#include "pslice/variety.hpp"

namespace pslice {

struct SliceIntersection {
    std::vector<VarietyPoint> points;
    /// Some residue class could not be resolved within the search limits.
    bool degenerate = false;
    std::size_t residue_candidates_tried = 0;
};

/// Limits of the residue tree search. A class mod p^j is refined until the
/// Jacobian determinant e of some square subsystem satisfies 2e < j.
struct SolverLimits {
    /// Deepest modulus exponent; 0 means kappa/2 (capped so p^j < 2^62).
    int max_depth = 0;
    /// Total residue classes examined before giving up.
    std::size_t max_nodes = 20000;
};

struct ZeroDimSolution {
    /// Roots in Z_p^m, sorted by their residue vectors.
    std::vector<PadicVector> roots;
    bool degenerate = false;
    std::size_t candidates_tried = 0;
};

/// Newton iteration from a residue r0 with g(r0) = 0 and g'(r0) != 0 mod p.
/// Throws InvalidArgument when the residue is not a simple root mod p.
PadicScalar lift_simple_root(const PadicPoly& g, const mpz_class& r0);

/// All roots of a univariate g in Z_p. Throws DegenerateRoot when a root
/// cluster cannot be separated within the limits.
std::vector<PadicScalar> univariate_roots_in_O(const PadicPoly& g, const SolverLimits& limits = {});

/// All common zeros in Z_p^m of a system with at least m equations in m variables.
ZeroDimSolution solve_zero_dim_in_O(const std::vector<PadicPoly>& system, const SolverLimits& limits = {});

/// X ∩ {A x = b} ∩ Z_p^N. Throws RankDeficient when rank A < n.
SliceIntersection intersect_affine(const Variety& variety, const PadicMatrix& a, const PadicVector& b,
                                   const SolverLimits& limits = {});

/// X ∩ {A x = 0} in P^{N-1}, points in canonical form. Throws RankDeficient.
SliceIntersection intersect_projective(const Variety& variety, const PadicMatrix& a,
                                       const SolverLimits& limits = {});

}  // namespace pslice
