#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pslice/padic.hpp"

namespace pslice {

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double statistic, std::size_t dof);

/// Goodness of fit of observed counts against expected probabilities (same length).
ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities);

/// Homogeneity of two count vectors over the same classes; classes empty in
/// both samples are dropped.
ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

using ResidueVector = std::vector<std::uint64_t>;

/// Residue vector of an integral point modulo p^j (p^j < 2^64).
ResidueVector residue_vector(const PadicVector& x, int j);

/// Counts of residue vectors modulo p^j.
std::map<ResidueVector, std::uint64_t> residue_histogram(const std::vector<PadicVector>& points, int j);

}  // namespace pslice
