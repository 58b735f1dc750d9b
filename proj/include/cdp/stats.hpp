#pragma once

#include <cstdint>
#include <span>

namespace cdp::stats {

/// One-sided Clopper-Pearson lower bound on a binomial proportion.
double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence);
double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence);

/// P(Binomial(m, p) >= j).
double binomial_upper_tail(int m, double p, int j);

double chi_square_quantile(double degrees_of_freedom, double probability);
/// Pearson statistic sum (O-E)^2/E.
double chi_square_statistic(std::span<const std::uint64_t> observed, std::span<const double> expected_probabilities);

double normal_quantile(double probability);

}  // namespace cdp::stats
