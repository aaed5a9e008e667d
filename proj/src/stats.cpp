#include "pslice/stats.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace pslice {

double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities) {
    if (observed.size() != probabilities.size()) throw InvalidArgument("observed and expected differ in length");
    double total = 0.0;
    for (auto c : observed) total += static_cast<double>(c);
    ChiSquare out;
    std::size_t classes = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = total * probabilities[i];
        if (expected <= 0.0) {
            if (observed[i] != 0) {
                out.statistic = INFINITY;
                out.p_value = 0.0;
            }
            continue;
        }
        ++classes;
        const double diff = static_cast<double>(observed[i]) - expected;
        out.statistic += diff * diff / expected;
    }
    out.dof = classes > 0 ? classes - 1 : 0;
    if (std::isfinite(out.statistic)) out.p_value = chi_square_sf(out.statistic, out.dof);
    return out;
}

ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size()) throw InvalidArgument("samples have different numbers of classes");
    double na = 0.0;
    double nb = 0.0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);
    ChiSquare out;
    if (na == 0.0 || nb == 0.0) return out;
    std::size_t classes = 0;
    const double n = na + nb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double row = static_cast<double>(a[i] + b[i]);
        if (row == 0.0) continue;
        ++classes;
        const double ea = row * na / n;
        const double eb = row * nb / n;
        const double da = static_cast<double>(a[i]) - ea;
        const double db = static_cast<double>(b[i]) - eb;
        out.statistic += da * da / ea + db * db / eb;
    }
    out.dof = classes > 0 ? classes - 1 : 0;
    out.p_value = chi_square_sf(out.statistic, out.dof);
    return out;
}

ResidueVector residue_vector(const PadicVector& x, int j) {
    ResidueVector out;
    out.reserve(x.size());
    for (const auto& xi : x) {
        const mpz_class r = xi.residue(j);
        if (!mpz_fits_ulong_p(r.get_mpz_t())) throw InvalidArgument("modulus too large");
        out.push_back(r.get_ui());
    }
    return out;
}

std::map<ResidueVector, std::uint64_t> residue_histogram(const std::vector<PadicVector>& points, int j) {
    std::map<ResidueVector, std::uint64_t> out;
    for (const auto& x : points) ++out[residue_vector(x, j)];
    return out;
}

}  // namespace pslice
