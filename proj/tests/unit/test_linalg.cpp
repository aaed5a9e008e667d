#include <doctest.h>

#include "pslice/errors.hpp"
#include "pslice/linalg.hpp"
#include "pslice/random.hpp"
#include "test_util.hpp"

using namespace pslice;
using pslice::testing::cofactor_det;
using pslice::testing::ctx;
using pslice::testing::int_valuation;
using pslice::testing::rep;

namespace {

std::vector<std::vector<mpz_class>> integer_entries(const PadicMatrix& m) {
    std::vector<std::vector<mpz_class>> out(m.rows(), std::vector<mpz_class>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).is_zero() ? mpz_class(0) : rep(m(i, j));
    }
    return out;
}

// Valuation of det from integer representatives; exact when below precision.
long det_valuation(const PadicMatrix& m) {
    return int_valuation(cofactor_det(integer_entries(m)), m.context()->prime());
}

bool vanishes(const PadicScalar& x, int level) {
    return x.is_zero() || x.valuation() >= level;
}

// |a - b| <= p^-level, reading exhausted cancellation as agreement to its level.
bool close(const PadicScalar& a, const PadicScalar& b, int level) {
    return difference_valuation(a, b) >= level;
}

bool unimodular(const PadicMatrix& m) {
    return absolute_det(m).val == 0;
}

}  // namespace

TEST_CASE("smith: divisors of [[5,3],[10,1]] are (0, 2)") {
    auto c = ctx();
    const auto m = PadicMatrix::from_integers(c, 2, 2, {5, 3, 10, 1});
    const auto snf = smith_normal_form(m);
    REQUIRE(snf.divisor_valuations.size() == 2);
    CHECK(snf.divisor_valuations[0] == 0);
    CHECK(snf.divisor_valuations[1] == 2);
    CHECK(snf.rank == 2);
    CHECK(absolute_det(m).val == int_valuation(mpz_class(-25), 5));
    // M = U D V
    const auto rebuilt = snf.U * snf.diagonal(2, 2) * snf.V;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) CHECK(close(rebuilt(i, j), m(i, j), 30));
    }
}

TEST_CASE("smith: zero and rank-deficient matrices") {
    auto c = ctx();
    const auto z = PadicMatrix(c, 2, 3);
    CHECK(smith_normal_form(z).rank == 0);
    CHECK(absolute_det(z).is_zero());
    const auto r1 = PadicMatrix::from_integers(c, 2, 2, {1, 2, 2, 4});
    const auto snf = smith_normal_form(r1);
    CHECK(snf.rank == 1);
    CHECK(snf.divisor_valuations[1] == kInfiniteValuation);
    CHECK(absolute_det(r1).is_zero());
    CHECK(absolute_det(PadicMatrix(c, 0, 0)).val == 0);
}

TEST_CASE("smith: wide matrix divisors are nondecreasing") {
    auto c = ctx();
    const auto m = PadicMatrix::from_integers(c, 2, 3, {25, 50, 5, 125, 0, 10});
    const auto snf = smith_normal_form(m);
    CHECK(snf.divisor_valuations[0] == 1);
    CHECK(snf.divisor_valuations[1] == 2);
    const auto rebuilt = snf.U * snf.diagonal(2, 3) * snf.V;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(close(rebuilt(i, j), m(i, j), 30));
    }
}

TEST_CASE("property: absolute_det matches cofactor determinant on random 4x4 over Z_5") {
    auto c = ctx(5, 32, 7);
    DigitStream rng(7, 0);
    int compared = 0;
    for (int t = 0; t < 1000; ++t) {
        auto m = PadicMatrix::uniform_O(c, 4, 4, rng);
        // push some valuation into the rows so nontrivial divisors occur
        for (std::size_t j = 0; j < 4; ++j) {
            m(1, j) = m(1, j).shifted(t % 3);
            m(3, j) = m(3, j).shifted(t % 2);
        }
        const long oracle = det_valuation(m);
        const auto got = absolute_det(m);
        if (oracle < 32) {
            CHECK(got.val == oracle);
            ++compared;
        }
    }
    CHECK(compared > 990);
}

TEST_CASE("property: U, V unimodular and U D V = M on random 3x5 over Z_3") {
    auto c = ctx(3, 32, 8);
    DigitStream rng(8, 0);
    for (int t = 0; t < 200; ++t) {
        auto m = PadicMatrix::uniform_O(c, 3, 5, rng);
        for (std::size_t j = 0; j < 5; ++j) m(2, j) = m(0, j) * PadicScalar::from_int(c, 3) + m(2, j).shifted(2);
        const auto snf = smith_normal_form(m);
        CHECK(unimodular(snf.U));
        CHECK(unimodular(snf.V));
        for (std::size_t i = 1; i < snf.rank; ++i) CHECK(snf.divisor_valuations[i - 1] <= snf.divisor_valuations[i]);
        const auto rebuilt = snf.U * snf.diagonal(3, 5) * snf.V;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 5; ++j) CHECK(close(rebuilt(i, j), m(i, j), 28));
        }
        const auto ui = snf.U * snf.U_inv;
        const auto vi = snf.V * snf.V_inv;
        for (std::size_t i = 0; i < 3; ++i) CHECK(close(ui(i, i), PadicScalar::from_int(c, 1), 28));
        for (std::size_t i = 0; i < 5; ++i) CHECK(close(vi(i, i), PadicScalar::from_int(c, 1), 28));
    }
}

TEST_CASE("kernel of (5 1) is spanned by (1, -5)") {
    auto c = ctx();
    const auto m = PadicMatrix::from_integers(c, 1, 2, {5, 1});
    const auto k = orthonormal_kernel_basis(m);
    REQUIRE(k.rows() == 2);
    REQUIRE(k.cols() == 1);
    const auto x = k.column(0);
    CHECK(x[0].valuation() == 0);
    CHECK(close(x[1], -(PadicScalar::from_int(c, 5) * x[0]), 30));
    CHECK(vec_val_norm(x).valuation == 0);  // a primitive vector: divisor (0)
    CHECK(absolute_det(k).val == 0);
}

TEST_CASE("property: kernel basis is orthonormal and annihilated") {
    auto c = ctx(5, 32, 12);
    DigitStream rng(12, 0);
    for (int t = 0; t < 300; ++t) {
        const auto a = PadicMatrix::uniform_O(c, 2, 4, rng);
        const auto k = orthonormal_kernel_basis(a);
        REQUIRE(k.cols() == 2);
        const auto ak = a * k;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) CHECK(vanishes(ak(i, j), 24));
        }
        CHECK(absolute_det(k).val == 0);
    }
}

TEST_CASE("property: unimodular transport") {
    auto c = ctx(5, 32, 13);
    DigitStream rng(13, 0);
    for (int t = 0; t < 500; ++t) {
        auto x = sample_uniform_O_vector(c, 4, rng);
        const long shift = t % 4 - 2;
        for (auto& xi : x) xi = xi.shifted(shift);
        const long v = vec_val_norm(x).valuation;
        const auto u = unimodular_transport(x);
        CHECK(unimodular(u));
        const auto y = u * x;
        for (std::size_t i = 0; i + 1 < 4; ++i) CHECK(vanishes(y[i], v + 28));
        CHECK(y[3].valuation() == v);
        CHECK(close(y[3], PadicScalar::from_int(c, 1).shifted(v), v + 28));
    }
    CHECK_THROWS_AS(unimodular_transport(PadicVector{PadicScalar(c), PadicScalar(c)}), ZeroVector);
}

TEST_CASE("inverse and solve_square") {
    auto c = ctx();
    const auto m = PadicMatrix::from_integers(c, 2, 2, {5, 3, 10, 1});
    const auto inv = inverse(m);
    const auto id = m * inv;
    CHECK(close(id(0, 0), PadicScalar::from_int(c, 1), 28));
    CHECK(vanishes(id(0, 1), 28));
    CHECK(vanishes(id(1, 0), 28));
    CHECK(close(id(1, 1), PadicScalar::from_int(c, 1), 28));
    // 5y0 + 3y1 = 8, 10y0 + y1 = 11 -> y = (1, 1)
    const auto y = solve_square(m, integer_vector(c, {8, 11}));
    CHECK(close(y[0], PadicScalar::from_int(c, 1), 28));
    CHECK(close(y[1], PadicScalar::from_int(c, 1), 28));
    CHECK_THROWS_AS(solve_square(PadicMatrix::from_integers(c, 2, 2, {1, 2, 2, 4}), integer_vector(c, {1, 1})),
                    RankDeficient);
}

TEST_CASE("property: affine solve over Z_5, 1x2 systems") {
    auto c = ctx(5, 32, 14);
    DigitStream rng(14, 0);
    int solvable = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto a = PadicMatrix::uniform_O(c, 1, 2, rng);
        const auto b = sample_uniform_O_vector(c, 1, rng);
        const auto param = solve_affine_in_O(a, b);
        // oracle: solvable in Z_p^2 iff val(b) >= min val(A)
        const long va = vec_val_norm(a.row(0)).valuation;
        const bool expect = b[0].is_zero() || b[0].valuation() >= va;
        CHECK(param.has_value() == expect);
        if (!param) continue;
        ++solvable;
        CHECK(vec_val_norm(param->base).valuation >= 0);
        const auto r = a * param->base;
        CHECK(close(r[0], b[0], 28));
        const auto ad = a * param->directions;
        CHECK(vanishes(ad(0, 0), 28));
        CHECK(vec_val_norm(param->directions.column(0)).valuation == 0);
    }
    CHECK(solvable > 750);
}

TEST_CASE("affine solve: empty lattice and rank deficiency") {
    auto c = ctx();
    // 5x + 25y = 1 has no solution in Z_5^2
    CHECK_FALSE(solve_affine_in_O(PadicMatrix::from_integers(c, 1, 2, {5, 25}), integer_vector(c, {1})).has_value());
    CHECK_THROWS_AS(solve_affine_in_O(PadicMatrix(c, 1, 2), integer_vector(c, {1})), RankDeficient);
}

TEST_CASE("determinant integral closed form for n = 1, 2 (small sample)") {
    auto c = ctx(5, 32, 15);
    DigitStream rng(15, 0);
    for (std::size_t n = 1; n <= 2; ++n) {
        const int m = 20000;
        std::vector<double> xs;
        for (int i = 0; i < m; ++i) xs.push_back(absolute_det(PadicMatrix::uniform_O(c, n, n, rng)).to_double());
        const auto s = pslice::testing::mean_se(xs);
        const double expected = (1.0 - 0.2) / (1.0 - std::pow(5.0, -static_cast<double>(n + 1)));
        CHECK(std::abs(s.mean - expected) < 4 * s.se);
    }
}
