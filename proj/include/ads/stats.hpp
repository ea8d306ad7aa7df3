#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ads/bitstring.hpp"

namespace ads {

// Shannon entropy of a probability vector, bits.
double entropy_bits(std::span<const double> probs);

// Total variation distance between empirical counts and a reference
// distribution.
double tv_distance(std::span<const std::uint64_t> counts, std::span<const double> probs);

struct ChiSquareResult {
    double statistic = 0.0;
    std::uint32_t dof = 0;
    double p_value = 1.0;
};

// Goodness of fit of counts against probs. Zero-probability bins with zero
// counts are dropped; a count in a zero-probability bin yields p = 0.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const double> probs);

// Two-sample homogeneity test over matched histograms.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b);

// Survival function P[X >= x] for chi-square with dof degrees of freedom.
double chi_square_sf(double x, std::uint32_t dof);

// Regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// NIST-style frequency (monobit) and runs test p-values.
double monobit_p_value(const BitString& bits);
double runs_p_value(const BitString& bits);

}  // namespace ads
