#include <doctest.h>

#include "oracles.hpp"
#include "pslice/errors.hpp"
#include "pslice/intersect.hpp"
#include "pslice/io.hpp"
#include "pslice/stats.hpp"

using namespace pslice;
using pslice::testing::ctx;

namespace {

const std::vector<std::string> t1{"t"};
const std::vector<std::string> t2{"t", "s"};

PadicPoly upoly(const ContextPtr& c, const char* text, const std::vector<std::string>& vars = t1) {
    return PadicPoly::from_integer_poly(c, parse_poly(text, vars));
}

Variety example(const char* name) {
    return variety_from_json(example_variety_json(name));
}

bool close(const PadicScalar& a, const PadicScalar& b, int level) {
    return difference_valuation(a, b) >= level;
}

// Compares a slice intersection with the brute-force residue scan.
void check_against_oracle(const pslice::testing::BruteSlicer& oracle, const SliceIntersection& got,
                          const PadicMatrix& a, const PadicVector& b, const Variety& var, int& compared) {
    const auto truth = oracle.solve(a, b);
    if (truth.unresolved || got.degenerate) return;
    ++compared;
    CHECK(got.points.size() == truth.roots.size());
    CHECK(got.points.size() <= var.degree());
    for (const auto& root : truth.roots) {
        int matches = 0;
        for (const auto& pt : got.points) {
            const auto r = residue_vector(pt.coords, root.level);
            std::vector<std::int64_t> ri(r.begin(), r.end());
            if (oracle.same_class(ri, root.residue, root.level)) ++matches;
        }
        CHECK(matches == 1);
    }
}

}  // namespace

TEST_CASE("lift_simple_root") {
    auto c = ctx();
    const auto g = upoly(c, "t^2 - 6");
    CHECK(lift_simple_root(g, 1).residue(2) == 16);
    CHECK(lift_simple_root(g, 4).residue(2) == 9);
    const auto r = lift_simple_root(g, 1);
    CHECK(difference_valuation(r * r, PadicScalar::from_int(c, 6)) >= 30);
    CHECK(lift_simple_root(upoly(c, "t - 17"), 2) == PadicScalar::from_int(c, 17));
    CHECK_THROWS_AS(lift_simple_root(g, 2), InvalidArgument);
}

TEST_CASE("univariate roots") {
    auto c = ctx();
    const auto r = univariate_roots_in_O(upoly(c, "t^2 - 1"));
    REQUIRE(r.size() == 2);
    CHECK(r[0] == PadicScalar::from_int(c, 1));
    CHECK(r[1] == PadicScalar::from_int(c, -1));
    CHECK(univariate_roots_in_O(upoly(c, "t^2 - 2")).empty());
    CHECK_THROWS_AS(univariate_roots_in_O(upoly(c, "t^3")), DegenerateRoot);
    // roots that agree mod 5 but separate mod 25
    const auto close_roots = univariate_roots_in_O(upoly(c, "(t - 1)*(t - 6)"));
    CHECK(close_roots.size() == 2);
    // root with positive valuation and a root outside Z_5
    const auto mixed = univariate_roots_in_O(upoly(c, "(5*t - 1)*(t - 10)"));
    REQUIRE(mixed.size() == 1);
    CHECK(mixed[0] == PadicScalar::from_int(c, 10));
}

TEST_CASE("zero-dimensional systems") {
    auto c = ctx();
    auto sol = solve_zero_dim_in_O({upoly(c, "t - 1", t2), upoly(c, "s - 2", t2)});
    REQUIRE(sol.roots.size() == 1);
    CHECK(sol.roots[0][0] == PadicScalar::from_int(c, 1));
    CHECK(sol.roots[0][1] == PadicScalar::from_int(c, 2));
    sol = solve_zero_dim_in_O({upoly(c, "t^2 + t")});
    REQUIRE(sol.roots.size() == 2);
    CHECK(sol.roots[0].front().is_zero());
    CHECK(sol.roots[1].front() == PadicScalar::from_int(c, -1));
    sol = solve_zero_dim_in_O({upoly(c, "t^2 + 2*t")});
    REQUIRE(sol.roots.size() == 2);
    CHECK(sol.roots[0].front().is_zero());
    CHECK(sol.roots[1].front() == PadicScalar::from_int(c, -2));
    // overdetermined: t^2 = s, t = s has roots (0,0), (1,1)
    sol = solve_zero_dim_in_O({upoly(c, "t^2 - s", t2), upoly(c, "t - s", t2), upoly(c, "t^3 - s", t2)});
    CHECK(sol.roots.size() == 2);
    CHECK_FALSE(sol.degenerate);
}

TEST_CASE("affine slice examples") {
    auto c = ctx();
    const auto x = example("elliptic");
    auto res = intersect_affine(x, PadicMatrix::from_integers(c, 1, 2, {1, 0}), integer_vector(c, {0}));
    CHECK_FALSE(res.degenerate);
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[0].coords[1] == PadicScalar::from_int(c, 1));
    CHECK(res.points[1].coords[1] == PadicScalar::from_int(c, -1));
    for (const auto& pt : res.points) CHECK(pt.coords[0].is_zero());
    res = intersect_affine(x, PadicMatrix::from_integers(c, 1, 2, {0, 1}), integer_vector(c, {1}));
    CHECK(res.degenerate);
    CHECK_THROWS_AS(intersect_affine(x, PadicMatrix(c, 1, 2), integer_vector(c, {1})), RankDeficient);
}

TEST_CASE("projective slice examples") {
    auto c = ctx();
    const std::vector<std::string> v3{"x0", "x1", "x2"};
    const Variety line("l", Ambient::projective, PolySystem::make(v3, {parse_poly("x0", v3)}), 1);
    auto res = intersect_projective(line, PadicMatrix::from_integers(c, 1, 3, {0, 1, 0}));
    REQUIRE(res.points.size() == 1);
    CHECK(res.points[0].coords[0].is_zero());
    CHECK(res.points[0].coords[1].is_zero());
    CHECK(res.points[0].coords[2] == PadicScalar::from_int(c, 1));
    const auto conic = example("conic");
    res = intersect_projective(conic, PadicMatrix::from_integers(c, 1, 3, {1, 0, 0}));
    CHECK(res.degenerate);
    // x1 = 0 meets the conic in (1:0:0) and (0:0:1)
    res = intersect_projective(conic, PadicMatrix::from_integers(c, 1, 3, {0, 1, 0}));
    CHECK_FALSE(res.degenerate);
    CHECK(res.points.size() == 2);
}

TEST_CASE("property: random affine slices of the cubic") {
    auto c = ctx(5, 32, 41);
    DigitStream rng(41, 0);
    const auto x = example("elliptic");
    const pslice::testing::BruteSlicer oracle(x, 5);
    int compared = 0;
    int degenerate = 0;
    for (int t = 0; t < 300; ++t) {
        const auto a = PadicMatrix::uniform_O(c, 1, 2, rng);
        const auto b = sample_uniform_O_vector(c, 1, rng);
        SliceIntersection res;
        try {
            res = intersect_affine(x, a, b);
        } catch (const RankDeficient&) {
            continue;
        }
        if (res.degenerate) {
            ++degenerate;
            continue;
        }
        CHECK(res.points.size() <= 3);
        for (const auto& pt : res.points) {
            CHECK(on_variety(x, pt.coords));
            const auto ax = a * pt.coords;
            CHECK(close(ax[0], b[0], 16));
        }
        check_against_oracle(oracle, res, a, b, x, compared);
    }
    CHECK(compared > 250);
    CHECK(degenerate < 30);
}

TEST_CASE("property: random projective slices of the conic and the line") {
    auto c = ctx(5, 32, 42);
    DigitStream rng(42, 0);
    for (const char* name : {"conic", "pline"}) {
        const auto x = example(name);
        const pslice::testing::BruteSlicer oracle(x, 5);
        int compared = 0;
        for (int t = 0; t < 200; ++t) {
            const auto a = PadicMatrix::uniform_O(c, 1, 3, rng);
            SliceIntersection res;
            try {
                res = intersect_projective(x, a);
            } catch (const RankDeficient&) {
                continue;
            }
            if (res.degenerate) continue;
            CHECK(res.points.size() <= x.degree());
            for (const auto& pt : res.points) {
                CHECK(on_variety(x, pt.coords));
                CHECK(vec_val_norm(pt.coords).valuation == 0);
                const auto ax = a * pt.coords;
                CHECK(difference_valuation(ax[0], PadicScalar(c)) >= 16);
            }
            check_against_oracle(oracle, res, a, {}, x, compared);
        }
        CHECK(compared > 150);
    }
}

TEST_CASE("property: slices of SL(2)") {
    auto c = ctx(5, 32, 43);
    DigitStream rng(43, 0);
    const auto x = example("sl2");
    const pslice::testing::BruteSlicer oracle(x, 5);
    CHECK(oracle.base_points() == 120 * 125);  // #SL2(Z/25) = #SL2(F_5) * 5^3
    int compared = 0;
    for (int t = 0; t < 100; ++t) {
        const auto a = PadicMatrix::uniform_O(c, 3, 4, rng);
        const auto b = sample_uniform_O_vector(c, 3, rng);
        SliceIntersection res;
        try {
            res = intersect_affine(x, a, b);
        } catch (const RankDeficient&) {
            continue;
        }
        check_against_oracle(oracle, res, a, b, x, compared);
    }
    CHECK(compared > 80);
}

TEST_CASE("determinism: same slice, same ordered output") {
    auto c = ctx(5, 32, 44);
    DigitStream rng(44, 0);
    const auto x = example("elliptic");
    for (int t = 0; t < 50; ++t) {
        const auto a = PadicMatrix::uniform_O(c, 1, 2, rng);
        const auto b = sample_uniform_O_vector(c, 1, rng);
        const auto r1 = intersect_affine(x, a, b);
        const auto r2 = intersect_affine(x, a, b);
        REQUIRE(r1.points.size() == r2.points.size());
        for (std::size_t i = 0; i < r1.points.size(); ++i) {
            CHECK(r1.points[i].coords[0] == r2.points[i].coords[0]);
            CHECK(r1.points[i].coords[1] == r2.points[i].coords[1]);
        }
    }
}
