#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pslice/intersect.hpp"
#include "pslice/random.hpp"
#include "pslice/variety.hpp"

namespace pslice {

/// Bounded density on X. Either the indicator of the integral points or a
/// step function on residue classes of p^R x modulo p^j (R = support radius),
/// vanishing off p^{-R} Z_p^N. Densities need not be normalized.
class DensitySpec {
public:
    using Residue = std::vector<std::uint64_t>;

    static DensitySpec uniform(std::uint32_t support_radius = 0);
    static DensitySpec step(int modulus_exponent, std::map<Residue, double> weights,
                            std::uint32_t support_radius = 0);

    bool is_uniform() const noexcept { return uniform_; }
    int modulus_exponent() const noexcept { return j_; }
    std::uint32_t support_radius() const noexcept { return radius_; }
    const std::map<Residue, double>& weights() const noexcept { return weights_; }
    double f_max() const noexcept { return f_max_; }

    /// Value at a point given in the coordinates p^R x of the support lattice.
    double value_scaled(const PadicVector& y) const;
    /// Value at x itself.
    double value(const PadicVector& x) const;

private:
    bool uniform_ = true;
    int j_ = 0;
    std::uint32_t radius_ = 0;
    std::map<Residue, double> weights_;
    double f_max_ = 1.0;
};

/// f-bar on one slice together with its per-point terms w(x) f(x) (affine) or f(x) (projective).
struct SliceValue {
    double fbar = 0.0;
    std::vector<VarietyPoint> points;
    std::vector<double> terms;
    std::size_t candidates_tried = 0;
};

/// Sum of w_X(x) f(x) over X ∩ L_{A,b} ∩ Z_p^N. The density is evaluated on
/// the points as given (support radius 0). Throws DegenerateSlice.
SliceValue fbar_affine(const Variety& variety, const DensitySpec& f, const PadicMatrix& a, const PadicVector& b,
                       const SolverLimits& limits = {});
/// Sum of f(x) over X ∩ L_A. Throws DegenerateSlice.
SliceValue fbar_projective(const Variety& variety, const DensitySpec& f, const PadicMatrix& a,
                           const SolverLimits& limits = {});

struct RunConfig {
    ContextPtr ctx;
    std::uint32_t workers = 1;
    SolverLimits limits;
};

struct IntegralEstimate {
    double value = 0.0;
    std::size_t samples = 0;
    double std_error = 0.0;
    /// Half-width eps with P(|estimate - integral| >= eps) <= chebyshev_delta.
    double chebyshev_halfwidth = 0.0;
    double chebyshev_delta = 0.05;
    std::size_t resamples = 0;
    double max_fbar = 0.0;
};

/// Mean of f-bar over uniform (A, b) in Z_p^{n x N} x Z_p^n.
IntegralEstimate integrate_affine(const Variety& variety, const DensitySpec& f, std::size_t m, const RunConfig& cfg);
/// C_n times the mean of f-bar over uniform A in Z_p^{n x N}.
IntegralEstimate integrate_projective(const Variety& variety, const DensitySpec& f, std::size_t m,
                                      const RunConfig& cfg);

/// d q^{(n+1) r} C_n f_max.
double rejection_bound(std::uint32_t degree, std::size_t n, std::uint32_t q, std::uint32_t r, double f_max);
/// The bound used by the samplers: affine d C_n f_max (radius handled by
/// rescaling), projective d f_max.
double rejection_bound(const Variety& variety, const DensitySpec& f, std::uint32_t q);

struct SampledPoint {
    VarietyPoint point;
    /// w_X(x) f(x) (affine) or f(x) (projective) of the chosen point.
    double term = 0.0;
    std::uint32_t worker = 0;
    std::uint64_t slice = 0;
};

struct SampleBatch {
    std::vector<SampledPoint> points;
    std::size_t slices_tried = 0;
    std::size_t accepted = 0;
    std::size_t resamples = 0;
    double bound = 0.0;
    double max_fbar = 0.0;
    double fbar_sum = 0.0;
};

/// Rejection sampler: points with density proportional to f. Throws
/// BoundViolation when a slice has f-bar above the bound.
SampleBatch sample_affine(const Variety& variety, const DensitySpec& f, std::size_t count, const RunConfig& cfg,
                          std::optional<double> bound_override = std::nullopt);
SampleBatch sample_projective(const Variety& variety, const DensitySpec& f, std::size_t count,
                              const RunConfig& cfg, std::optional<double> bound_override = std::nullopt);

/// Smallest m with f_max^2 d^2 C_n^2 / (eps^2 m) <= delta.
std::uint64_t chebyshev_sample_size(double f_max, std::uint32_t d, std::size_t n, std::uint32_t q, double eps,
                                    double delta);

}  // namespace pslice
