// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <array>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pslice/commands.hpp"
#include "pslice/errors.hpp"
#include "pslice/intersect.hpp"
#include "pslice/io.hpp"
#include "pslice/sampler.hpp"
#include "pslice/stats.hpp"

using namespace pslice;
using pslice::testing::ctx;
using pslice::testing::mean_se;

namespace {

constexpr std::uint32_t kPrime = 5;
constexpr double kSigmas = 3.0;
constexpr double kAlpha = 1e-3;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

Variety example(const char* name) {
    return variety_from_json(example_variety_json(name));
}

Variety diagonal_line() {
    const std::vector<std::string> xy{"x", "y"};
    return Variety("line", Ambient::affine, PolySystem::make(xy, {parse_poly("y - x", xy)}), 1);
}

// |estimate - target| within kSigmas standard errors (a zero-variance estimate must be exact up to rounding).
bool within(double estimate, double target, double se) {
    return std::abs(estimate - target) <= std::max(kSigmas * se, 1e-12 * std::abs(target));
}

// Every rejection run in this binary reports here: f-bar must never exceed M,
// and accepted / tried must match E[f-bar] / M.
struct BoundLedger {
    std::size_t runs = 0;
    std::size_t violations = 0;
    Outcome rates;

    void record_max(const std::string& what, double max_fbar, double bound) {
        ++runs;
        if (max_fbar > bound) {
            ++violations;
            rates.require(false, what + fmt(": max f-bar %.4g > M %.4g", max_fbar, bound));
        }
    }

    void record_batch(const std::string& what, const SampleBatch& batch, double mean_fbar) {
        record_max(what, batch.max_fbar, batch.bound);
        const double q = mean_fbar / batch.bound;
        const double n = static_cast<double>(batch.slices_tried);
        const double rate = static_cast<double>(batch.accepted) / n;
        const double se = std::sqrt(q * (1.0 - q) / n);
        rates.require(within(rate, q, se), what + fmt(" rate %.4f vs %.4f (se %.4f)", rate, q, se));
    }
};

BoundLedger ledger;

using Criterion = std::function<Outcome()>;

bool run(int id, const char* title, const Criterion& criterion) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = criterion();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << out.detail
              << fmt(" (%.1f s)", secs) << std::endl;
    return out.pass;
}

Outcome determinant_integral() {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    auto c = ctx(kPrime, 32, 101);
    DigitStream rng(101, 0);
    for (std::size_t n : {1U, 2U}) {
        std::vector<double> xs;
        xs.reserve(100000);
        for (int i = 0; i < 100000; ++i) xs.push_back(absolute_det(PadicMatrix::uniform_O(c, n, n, rng)).to_double());
        const auto est = mean_se(xs);
        const double q = kPrime;
        const double target = (1.0 - 1.0 / q) / (1.0 - std::pow(q, -static_cast<double>(n + 1)));
        out.require(within(est.mean, target, est.se),
                    fmt("n=%.0f mean %.5f vs %.5f (se %.5f)", static_cast<double>(n), est.mean, target, est.se));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs < 30.0, fmt("runtime %.1f s < 30 s", secs));
    return out;
}

Outcome affine_volumes() {
    Outcome out;
    const std::pair<const char*, double> cases[] = {{"elliptic", 5.0 / 5.0}, {"sl2", 120.0 / 125.0}};
    std::uint64_t seed = 201;
    for (const auto& [name, target] : cases) {
        const auto start = std::chrono::steady_clock::now();
        const auto x = example(name);
        const RunConfig cfg{ctx(kPrime, 32, seed++), 4, {}};
        const auto f = DensitySpec::uniform();
        const auto est = integrate_affine(x, f, 100000, cfg);
        ledger.record_max(std::string("integrate ") + name, est.max_fbar, rejection_bound(x, f, kPrime));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.require(within(est.value, target, est.std_error) && secs < 300.0,
                    std::string(name) + fmt(" %.4f vs %.4f (se %.4f, %.0f s)", est.value, target, est.std_error, secs));
    }
    return out;
}

Outcome sampler_equidistribution() {
    Outcome out;
    const auto x = example("elliptic");
    const RunConfig cfg{ctx(kPrime, 32, 301), 4, {}};
    const auto batch = sample_affine(x, DensitySpec::uniform(), 10000, cfg);
    ledger.record_batch("elliptic sampler", batch, 1.0);
    std::vector<PadicVector> pts;
    for (const auto& sp : batch.points) pts.push_back(sp.point.coords);
    for (int j : {1, 2}) {
        const auto hist = residue_histogram(pts, j);
        const std::size_t classes = j == 1 ? 5 : 25;
        std::vector<std::uint64_t> counts;
        for (const auto& [r, cnt] : hist) counts.push_back(cnt);
        const std::uint64_t m = j == 1 ? 5 : 25;
        bool all_on_curve = hist.size() <= classes;
        for (const auto& [r, cnt] : hist) all_on_curve = all_on_curve && (r[1] * r[1] + m * m - r[0] * r[0] % m * r[0] - 1) % m == 0;
        counts.resize(classes, 0);
        const auto chi = chi_square_gof(counts, std::vector<double>(classes, 1.0 / static_cast<double>(classes)));
        out.require(all_on_curve && chi.p_value > kAlpha,
                    fmt("mod 5^%.0f: %.0f classes seen, chi2 %.2f, p %.3g", j, static_cast<double>(hist.size()),
                        chi.statistic, chi.p_value));
    }
    return out;
}

Outcome haar_invariance() {
    Outcome out;
    const auto x = example("sl2");
    // SL(2, F_5) in a fixed order
    std::map<ResidueVector, std::size_t> index;
    for (std::uint64_t a = 0; a < 5; ++a)
        for (std::uint64_t b = 0; b < 5; ++b)
            for (std::uint64_t c = 0; c < 5; ++c)
                for (std::uint64_t d = 0; d < 5; ++d)
                    if ((a * d + 25 - b * c % 5) % 5 == 1) index.emplace(ResidueVector{a, b, c, d}, index.size());
    if (index.size() != 120) {
        out.require(false, "SL(2, F_5) enumeration");
        return out;
    }
    const auto xi = sample_affine(x, DensitySpec::uniform(), 10000, RunConfig{ctx(kPrime, 32, 401), 4, {}});
    const auto eta = sample_affine(x, DensitySpec::uniform(), 10000, RunConfig{ctx(kPrime, 32, 402), 4, {}});
    ledger.record_batch("sl2 sampler A", xi, 0.96);
    ledger.record_batch("sl2 sampler B", eta, 0.96);
    // g = [[2, 1], [1, 1]] acting on the left of [[a, b], [c, d]]
    const std::uint64_t g[2][2] = {{2, 1}, {1, 1}};
    std::vector<std::uint64_t> plain(120, 0);
    std::vector<std::uint64_t> moved(120, 0);
    std::size_t outside = 0;
    for (const auto& sp : xi.points) {
        const auto it = index.find(residue_vector(sp.point.coords, 1));
        if (it == index.end()) ++outside;
        else plain[it->second]++;
    }
    for (const auto& sp : eta.points) {
        const auto r = residue_vector(sp.point.coords, 1);
        const ResidueVector h{(g[0][0] * r[0] + g[0][1] * r[2]) % 5, (g[0][0] * r[1] + g[0][1] * r[3]) % 5,
                              (g[1][0] * r[0] + g[1][1] * r[2]) % 5, (g[1][0] * r[1] + g[1][1] * r[3]) % 5};
        const auto it = index.find(h);
        if (it == index.end()) ++outside;
        else moved[it->second]++;
    }
    const auto chi = chi_square_two_sample(plain, moved);
    out.require(outside == 0 && chi.p_value > kAlpha,
                fmt("two-sample chi2 %.1f on %.0f dof, p %.3g, %.0f residues off SL2(F_5)", chi.statistic,
                    static_cast<double>(chi.dof), chi.p_value, static_cast<double>(outside)));
    return out;
}

Outcome weight_oracle() {
    Outcome out;
    auto c = ctx(kPrime, 32, 501);
    DigitStream rng(501, 0);
    const auto ell = example("elliptic");
    const auto line = diagonal_line();
    const auto sl2 = example("sl2");
    const auto scaled = rescale_variety(ell, kPrime, 1);

    std::vector<std::pair<const Variety*, PadicVector>> pts;
    const auto q = [&](long num, long den) { return PadicScalar::from_rational(c, num, den); };
    int integral = 0;
    int off = 0;
    for (long n = -40; n <= 40 && (integral < 3 || off < 3); ++n) {
        if (integral < 3) {
            if (auto pt = pslice::testing::elliptic_point(c, mpz_class(n), 0)) {
                pts.push_back({&ell, *pt});
                // the same point seen on the rescaled curve 5 X
                if (integral < 2) pts.push_back({&scaled, PadicVector{(*pt)[0].shifted(1), (*pt)[1].shifted(1)}});
                ++integral;
            }
        }
        if (off < 3 && n % 5 != 0) {
            if (auto pt = pslice::testing::elliptic_point(c, mpz_class(n), 2)) {
                pts.push_back({&ell, *pt});
                ++off;
            }
        }
    }
    for (const auto& [num, den] : std::vector<std::pair<long, long>>{{0, 1}, {1, 1}, {7, 1}, {1, 5}, {3, 25}}) {
        pts.push_back({&line, PadicVector{q(num, den), q(num, den)}});
    }
    for (const auto& m : std::vector<std::array<std::pair<long, long>, 4>>{
             {{{1, 1}, {0, 1}, {0, 1}, {1, 1}}},
             {{{2, 1}, {3, 1}, {1, 1}, {2, 1}}},
             {{{1, 1}, {5, 1}, {2, 1}, {11, 1}}},
             {{{1, 5}, {1, 1}, {-1, 1}, {0, 1}}},
             {{{5, 1}, {1, 5}, {0, 1}, {1, 5}}},
             {{{1, 25}, {0, 1}, {0, 1}, {25, 1}}}}) {
        PadicVector x;
        for (const auto& [num, den] : m) x.push_back(q(num, den));
        pts.push_back({&sl2, x});
    }

    std::map<std::string, int> per_variety;
    int failures = 0;
    int offlattice = 0;
    double worst = 0.0;
    for (const auto& [var, x] : pts) {
        if (!on_variety(*var, x)) throw Error("acceptance point not on " + var->name());
        const auto w = weight_at(*var, x);
        const auto est = pslice::testing::weight_integral_mc(*var, x, 100000, rng);
        const double z = std::abs(w.value * est.mean - 1.0) / (w.value * est.se);
        worst = std::max(worst, z);
        if (!within(w.value * est.mean, 1.0, w.value * est.se)) ++failures;
        per_variety[var->name() + (var == &scaled ? "(5X)" : "")]++;
        offlattice += vec_val_norm(x).valuation < 0 ? 1 : 0;
    }
    bool enough = true;
    for (const auto* v : {&ell, &line, &sl2}) enough = enough && per_variety[v->name()] >= 5;
    out.require(enough, fmt("%.0f points, %.0f off-lattice", static_cast<double>(pts.size()), offlattice));
    out.require(failures == 0, fmt("%.0f points outside 3 se, worst |z| %.2f", failures, worst));
    return out;
}

Outcome projective_normalization() {
    Outcome out;
    const auto line = example("pline");
    const auto f = DensitySpec::uniform();
    const auto est = integrate_projective(line, f, 100000, RunConfig{ctx(kPrime, 32, 601), 4, {}});
    ledger.record_max("integrate pline", est.max_fbar, rejection_bound(line, f, kPrime));
    out.require(within(est.value, 1.2, est.std_error), fmt("pline volume %.4f vs 1.2 (se %.4f)", est.value, est.std_error));
    std::uint64_t seed = 602;
    for (const char* name : {"pline", "conic"}) {
        const auto x = example(name);
        const auto batch = sample_projective(x, f, 10000, RunConfig{ctx(kPrime, 32, seed++), 4, {}});
        // every slice of a curve in P^2 meets it in E[f-bar] = vol / C_1 = 1 point on average
        ledger.record_batch(std::string(name) + " sampler", batch, 1.0);
        std::vector<PadicVector> pts;
        for (const auto& sp : batch.points) pts.push_back(canonical_projective(sp.point.coords));
        const auto hist = residue_histogram(pts, 1);
        std::vector<std::uint64_t> counts;
        for (const auto& [r, cnt] : hist) counts.push_back(cnt);
        const bool six = hist.size() == 6;
        counts.resize(6, 0);
        const auto chi = chi_square_gof(counts, std::vector<double>(6, 1.0 / 6.0));
        out.require(six && chi.p_value > kAlpha, std::string(name) + fmt(" %.0f classes, chi2 %.2f, p %.3g",
                                                                       static_cast<double>(hist.size()),
                                                                       chi.statistic, chi.p_value));
    }
    return out;
}

Outcome intersection_completeness() {
    Outcome out;
    auto c = ctx(kPrime, 32, 701);
    DigitStream rng(701, 0);
    for (const char* name : {"elliptic", "sl2", "pline", "conic"}) {
        const auto x = example(name);
        const pslice::testing::BruteSlicer oracle(x, kPrime);
        int compared = 0;
        int mismatched = 0;
        int over_degree = 0;
        int skipped = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto a = PadicMatrix::uniform_O(c, x.dim(), x.coords(), rng);
            const auto b = x.is_projective() ? PadicVector{} : sample_uniform_O_vector(c, x.dim(), rng);
            SliceIntersection got;
            try {
                got = x.is_projective() ? intersect_projective(x, a) : intersect_affine(x, a, b);
            } catch (const RankDeficient&) {
                ++skipped;
                continue;
            }
            if (got.degenerate) {
                ++skipped;
                continue;
            }
            if (got.points.size() > x.degree()) ++over_degree;
            const auto truth = oracle.solve(a, b);
            if (truth.unresolved) {
                ++skipped;
                continue;
            }
            ++compared;
            bool match = got.points.size() == truth.roots.size();
            for (const auto& root : truth.roots) {
                int hits = 0;
                for (const auto& pt : got.points) {
                    const auto r = residue_vector(pt.coords, root.level);
                    if (oracle.same_class(std::vector<std::int64_t>(r.begin(), r.end()), root.residue, root.level)) ++hits;
                }
                match = match && hits == 1;
            }
            if (!match) ++mismatched;
        }
        out.require(mismatched == 0 && over_degree == 0 && compared >= 950,
                    std::string(name) + fmt(" %.0f compared, %.0f mismatched, %.0f above degree, %.0f skipped", compared,
                                            mismatched, over_degree, skipped));
    }
    return out;
}

Outcome bound_soundness() {
    Outcome out = ledger.rates;
    out.require(ledger.violations == 0 && ledger.runs > 0,
                fmt("%.0f runs, %.0f with f-bar > M", static_cast<double>(ledger.runs),
                    static_cast<double>(ledger.violations)));
    return out;
}

int cli(const std::vector<std::string>& args, std::string* stdout_text = nullptr) {
    std::vector<const char*> argv{"pslice"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (stdout_text) *stdout_text = out.str();
    return code;
}

Outcome reproducibility() {
    Outcome out;
    const auto dir = std::filesystem::temp_directory_path() / "pslice_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::vector<std::string>> runs = {
        {"sample", "--example", "elliptic", "--prime", "5", "--count", "500", "--seed", "9", "--workers", "3"},
        {"sample", "--example", "conic", "--prime", "7", "--count", "300", "--seed", "10", "--workers", "1"},
        {"integrate", "--example", "sl2", "--prime", "5", "--samples", "2000", "--seed", "11", "--workers", "4"},
        {"volume", "--example", "pline", "--prime", "3", "--samples", "1000", "--seed", "12", "--workers", "2"},
    };
    int identical = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto first = (dir / ("run" + std::to_string(i) + ".out")).string();
        const auto second = (dir / ("run" + std::to_string(i) + ".replay")).string();
        auto args = runs[i];
        args.insert(args.end(), {"--out", first});
        if (cli(args) != 0) {
            out.require(false, runs[i][0] + " " + runs[i][2] + " did not run");
            continue;
        }
        const int code = cli({"replay", "--manifest", first + ".manifest.json", "--out", second});
        const bool same = code == 0 && read_text_file(first) == read_text_file(second);
        if (same) ++identical;
        else out.require(false, runs[i][0] + " " + runs[i][2] + " replay differs");
    }
    out.require(identical == static_cast<int>(runs.size()),
                fmt("%.0f of %.0f manifests replayed byte for byte", identical, static_cast<double>(runs.size())));
    return out;
}

}  // namespace

int main() {
    std::cout.setf(std::ios::unitbuf);
    bool all = true;
    all &= run(1, "determinant integral", determinant_integral);
    all &= run(2, "affine volume oracle", affine_volumes);
    all &= run(3, "sampler equidistribution", sampler_equidistribution);
    all &= run(4, "Haar invariance on SL(2, Z_5)", haar_invariance);
    all &= run(5, "weight oracle", weight_oracle);
    all &= run(6, "projective normalization", projective_normalization);
    all &= run(7, "intersection completeness", intersection_completeness);
    all &= run(8, "rejection bound soundness", bound_soundness);
    all &= run(9, "reproducibility", reproducibility);
    return all ? 0 : 1;
}
