#pragma once

#include <cmath>
#include <vector>

#include <gmpxx.h>

#include "pslice/padic.hpp"

namespace pslice::testing {

inline ContextPtr ctx(std::uint32_t p = 5, int precision = 32, std::uint64_t seed = 1) {
    return PadicContext::create(p, precision, seed);
}

/// Exact p-adic valuation of a nonzero integer.
inline long int_valuation(mpz_class n, unsigned long p) {
    if (n == 0) return kInfiniteValuation;
    long v = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++v;
    }
    return v;
}

/// Integer representative of an integral scalar modulo p^precision.
inline mpz_class rep(const PadicScalar& x) {
    return x.residue(x.context()->precision());
}

/// Determinant of an integer matrix by cofactor expansion along the first row.
inline mpz_class cofactor_det(const std::vector<std::vector<mpz_class>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    mpz_class det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<mpz_class>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<mpz_class> row;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != c) row.push_back(m[r][k]);
            }
            minor.push_back(row);
        }
        const mpz_class term = m[0][c] * cofactor_det(minor);
        det += (c % 2 == 0) ? term : mpz_class(-term);
    }
    return det;
}

/// Sample mean and its standard error.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace pslice::testing
