#include "pslice/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace pslice {

// ---------------------------------------------------------------------------
// DensitySpec
// ---------------------------------------------------------------------------

DensitySpec DensitySpec::uniform(std::uint32_t support_radius) {
    DensitySpec d;
    d.radius_ = support_radius;
    return d;
}

DensitySpec DensitySpec::step(int modulus_exponent, std::map<Residue, double> weights,
                              std::uint32_t support_radius) {
    if (modulus_exponent < 1) throw InvalidArgument("modulus exponent must be at least 1");
    DensitySpec d;
    d.uniform_ = false;
    d.j_ = modulus_exponent;
    d.radius_ = support_radius;
    d.f_max_ = 0.0;
    for (const auto& [r, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("density weights must be finite and nonnegative");
        d.f_max_ = std::max(d.f_max_, w);
    }
    d.weights_ = std::move(weights);
    return d;
}

double DensitySpec::value_scaled(const PadicVector& y) const {
    for (const auto& yi : y) {
        if (!yi.is_zero() && yi.valuation() < 0) return 0.0;
    }
    if (uniform_) return 1.0;
    Residue key;
    key.reserve(y.size());
    for (const auto& yi : y) key.push_back(yi.residue(j_).get_ui());
    auto it = weights_.find(key);
    return it == weights_.end() ? 0.0 : it->second;
}

double DensitySpec::value(const PadicVector& x) const {
    if (radius_ == 0) return value_scaled(x);
    PadicVector y;
    y.reserve(x.size());
    for (const auto& xi : x) y.push_back(xi.shifted(static_cast<Valuation>(radius_)));
    return value_scaled(y);
}

// ---------------------------------------------------------------------------
// f-bar
// ---------------------------------------------------------------------------

SliceValue fbar_affine(const Variety& variety, const DensitySpec& f, const PadicMatrix& a, const PadicVector& b,
                       const SolverLimits& limits) {
    auto inter = intersect_affine(variety, a, b, limits);
    if (inter.degenerate) throw DegenerateSlice();
    SliceValue out;
    out.candidates_tried = inter.residue_candidates_tried;
    for (auto& pt : inter.points) {
        const double fx = f.value_scaled(pt.coords);
        const double term = fx == 0.0 ? 0.0 : fx * weight_at(variety, pt.coords).value;
        out.fbar += term;
        out.terms.push_back(term);
        out.points.push_back(std::move(pt));
    }
    return out;
}

SliceValue fbar_projective(const Variety& variety, const DensitySpec& f, const PadicMatrix& a,
                           const SolverLimits& limits) {
    auto inter = intersect_projective(variety, a, limits);
    if (inter.degenerate) throw DegenerateSlice();
    SliceValue out;
    out.candidates_tried = inter.residue_candidates_tried;
    for (auto& pt : inter.points) {
        const double term = f.value_scaled(pt.coords);
        out.fbar += term;
        out.terms.push_back(term);
        out.points.push_back(std::move(pt));
    }
    return out;
}

namespace {

// One uniform slice: A row-major, then b (affine only).
struct Slice {
    PadicMatrix a;
    PadicVector b;
};

Slice draw_slice(const ContextPtr& ctx, const Variety& variety, DigitStream& rng) {
    Slice s{PadicMatrix::uniform_O(ctx, variety.dim(), variety.coords(), rng), {}};
    if (!variety.is_projective()) s.b = sample_uniform_O_vector(ctx, variety.dim(), rng);
    return s;
}

SliceValue evaluate_slice(const Variety& variety, const DensitySpec& f, const Slice& s, const SolverLimits& limits) {
    if (variety.is_projective()) return fbar_projective(variety, f, s.a, limits);
    return fbar_affine(variety, f, s.a, s.b, limits);
}

// Draws slices until one can be resolved; degenerate, rank-deficient and
// precision-exhausted slices are resampled and counted.
SliceValue next_resolved_slice(const ContextPtr& ctx, const Variety& variety, const DensitySpec& f,
                               const SolverLimits& limits, DigitStream& rng, std::size_t& resamples,
                               std::size_t resample_cap) {
    for (;;) {
        const Slice s = draw_slice(ctx, variety, rng);
        try {
            return evaluate_slice(variety, f, s, limits);
        } catch (const DegenerateSlice&) {
        } catch (const RankDeficient&) {
        } catch (const PrecisionExhausted&) {
        }
        if (++resamples > resample_cap) {
            throw Error("too many degenerate slices (" + std::to_string(resamples) +
                        "); the variety may be contained in a slice or its equations are inconsistent");
        }
    }
}

std::size_t share(std::size_t total, std::uint32_t workers, std::uint32_t w) {
    return total / workers + (w < total % workers ? 1 : 0);
}

template <typename Fn>
void run_workers(std::uint32_t workers, Fn fn) {
    if (workers == 1) {
        fn(0U);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                fn(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void check_config(const RunConfig& cfg) {
    if (!cfg.ctx) throw InvalidArgument("run configuration has no p-adic context");
    if (cfg.workers < 1) throw InvalidArgument("need at least one worker");
}

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    double max = 0.0;
    std::size_t resamples = 0;
};

IntegralEstimate integrate_impl(const Variety& variety, const DensitySpec& f, std::size_t m, const RunConfig& cfg,
                                double scale, double per_sample_bound) {
    check_config(cfg);
    IntegralEstimate est;
    est.samples = m;
    if (m == 0) return est;
    est.chebyshev_halfwidth = scale * per_sample_bound / std::sqrt(est.chebyshev_delta * static_cast<double>(m));
    if (f.f_max() == 0.0) return est;

    std::vector<Moments> parts(cfg.workers);
    std::atomic<bool> stop{false};
    run_workers(cfg.workers, [&](std::uint32_t w) {
        DigitStream rng = split_stream(*cfg.ctx, w);
        Moments& mo = parts[w];
        const std::size_t todo = share(m, cfg.workers, w);
        const std::size_t cap = 1000 + 10 * todo;
        for (std::size_t i = 0; i < todo && !stop.load(std::memory_order_relaxed); ++i) {
            try {
                const SliceValue sv = next_resolved_slice(cfg.ctx, variety, f, cfg.limits, rng, mo.resamples, cap);
                mo.sum += sv.fbar;
                mo.sum_sq += sv.fbar * sv.fbar;
                mo.max = std::max(mo.max, sv.fbar);
            } catch (...) {
                stop = true;
                throw;
            }
        }
    });
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& mo : parts) {
        sum += mo.sum;
        sum_sq += mo.sum_sq;
        est.max_fbar = std::max(est.max_fbar, mo.max);
        est.resamples += mo.resamples;
    }
    const double md = static_cast<double>(m);
    const double mean = sum / md;
    est.value = scale * mean;
    if (m > 1) {
        const double var = std::max(0.0, (sum_sq - sum * mean) / (md - 1.0));
        est.std_error = scale * std::sqrt(var / md);
    }
    return est;
}

struct WorkerBatch {
    std::vector<SampledPoint> points;
    std::size_t slices_tried = 0;
    std::size_t accepted = 0;
    std::size_t resamples = 0;
    double max_fbar = 0.0;
    double fbar_sum = 0.0;
};

SampleBatch sample_impl(const Variety& variety, const DensitySpec& f, std::size_t count, const RunConfig& cfg,
                        double bound) {
    check_config(cfg);
    SampleBatch batch;
    batch.bound = bound;
    if (count == 0) return batch;
    if (f.f_max() == 0.0) throw InvalidArgument("density vanishes identically; nothing to sample");
    if (!(bound > 0.0)) throw InvalidArgument("rejection bound must be positive");

    std::vector<WorkerBatch> parts(cfg.workers);
    std::atomic<bool> stop{false};
    run_workers(cfg.workers, [&](std::uint32_t w) {
        DigitStream rng = split_stream(*cfg.ctx, w);
        WorkerBatch& out = parts[w];
        const std::size_t todo = share(count, cfg.workers, w);
        std::size_t cap = 1000;
        try {
            while (out.points.size() < todo && !stop.load(std::memory_order_relaxed)) {
                cap = 1000 + 10 * out.slices_tried;
                SliceValue sv = next_resolved_slice(cfg.ctx, variety, f, cfg.limits, rng, out.resamples, cap);
                const std::uint64_t slice_id = out.slices_tried++;
                out.fbar_sum += sv.fbar;
                out.max_fbar = std::max(out.max_fbar, sv.fbar);
                if (sv.fbar > bound * (1.0 + 1e-12)) throw BoundViolation(sv.fbar, bound);
                const double u = rng.next_unit_double();
                if (!(u * bound < sv.fbar)) continue;
                ++out.accepted;
                const double v = rng.next_unit_double() * sv.fbar;
                double acc = 0.0;
                std::size_t pick = sv.terms.size() - 1;
                for (std::size_t i = 0; i < sv.terms.size(); ++i) {
                    acc += sv.terms[i];
                    if (v < acc) {
                        pick = i;
                        break;
                    }
                }
                while (sv.terms[pick] == 0.0 && pick > 0) --pick;
                out.points.push_back(SampledPoint{std::move(sv.points[pick]), sv.terms[pick], w, slice_id});
            }
        } catch (...) {
            stop = true;
            throw;
        }
    });
    for (auto& part : parts) {
        batch.slices_tried += part.slices_tried;
        batch.accepted += part.accepted;
        batch.resamples += part.resamples;
        batch.max_fbar = std::max(batch.max_fbar, part.max_fbar);
        batch.fbar_sum += part.fbar_sum;
        for (auto& pt : part.points) batch.points.push_back(std::move(pt));
    }
    return batch;
}

}  // namespace

double rejection_bound(std::uint32_t degree, std::size_t n, std::uint32_t q, std::uint32_t r, double f_max) {
    const double c = sphere_constant(q, n).get_d();
    return static_cast<double>(degree) * std::pow(static_cast<double>(q), static_cast<double>((n + 1) * r)) * c *
           f_max;
}

double rejection_bound(const Variety& variety, const DensitySpec& f, std::uint32_t q) {
    if (variety.is_projective()) return static_cast<double>(variety.degree()) * f.f_max();
    return rejection_bound(variety.degree(), variety.dim(), q, 0, f.f_max());
}

IntegralEstimate integrate_affine(const Variety& variety, const DensitySpec& f, std::size_t m, const RunConfig& cfg) {
    if (variety.is_projective()) throw InvalidArgument("integrate_affine needs an affine variety");
    check_config(cfg);
    const std::uint32_t p = cfg.ctx->prime();
    const std::uint32_t radius = f.support_radius();
    const Variety scaled = rescale_variety(variety, p, radius);
    // Integral over X equals p^{R n} times the integral over p^R X.
    const double scale = std::pow(static_cast<double>(p), static_cast<double>(radius * variety.dim()));
    return integrate_impl(scaled, f, m, cfg, scale, rejection_bound(scaled, f, p));
}

IntegralEstimate integrate_projective(const Variety& variety, const DensitySpec& f, std::size_t m,
                                      const RunConfig& cfg) {
    if (!variety.is_projective()) throw InvalidArgument("integrate_projective needs a projective variety");
    check_config(cfg);
    if (f.support_radius() != 0) throw InvalidArgument("projective densities take no support radius");
    const double c = sphere_constant(cfg.ctx->prime(), variety.dim()).get_d();
    return integrate_impl(variety, f, m, cfg, c, rejection_bound(variety, f, cfg.ctx->prime()));
}

SampleBatch sample_affine(const Variety& variety, const DensitySpec& f, std::size_t count, const RunConfig& cfg,
                          std::optional<double> bound_override) {
    if (variety.is_projective()) throw InvalidArgument("sample_affine needs an affine variety");
    check_config(cfg);
    const std::uint32_t p = cfg.ctx->prime();
    const std::uint32_t radius = f.support_radius();
    const Variety scaled = rescale_variety(variety, p, radius);
    SampleBatch batch =
        sample_impl(scaled, f, count, cfg, bound_override.value_or(rejection_bound(scaled, f, p)));
    if (radius > 0) {
        for (auto& sp : batch.points) {
            for (auto& xi : sp.point.coords) xi = xi.shifted(-static_cast<Valuation>(radius));
        }
    }
    return batch;
}

SampleBatch sample_projective(const Variety& variety, const DensitySpec& f, std::size_t count,
                              const RunConfig& cfg, std::optional<double> bound_override) {
    if (!variety.is_projective()) throw InvalidArgument("sample_projective needs a projective variety");
    check_config(cfg);
    if (f.support_radius() != 0) throw InvalidArgument("projective densities take no support radius");
    return sample_impl(variety, f, count, cfg,
                       bound_override.value_or(rejection_bound(variety, f, cfg.ctx->prime())));
}

std::uint64_t chebyshev_sample_size(double f_max, std::uint32_t d, std::size_t n, std::uint32_t q, double eps,
                                    double delta) {
    if (!(f_max > 0.0) || d == 0 || !(eps > 0.0) || !(delta > 0.0)) {
        throw InvalidArgument("chebyshev_sample_size needs positive arguments");
    }
    const double c = sphere_constant(q, n).get_d();
    const double x = (f_max * f_max * d * d * c * c) / (eps * eps * delta);
    // Guard against x = k + tiny from rounding of an exact integer.
    return static_cast<std::uint64_t>(std::ceil(x * (1.0 - 1e-12)));
}

}  // namespace pslice
