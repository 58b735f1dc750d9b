#include "cdp/stats.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <stdexcept>

namespace cdp::stats {

double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("confidence bound needs at least one trial");
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  if (successes == 0) return 0.0;
  const boost::math::beta_distribution<double> beta(static_cast<double>(successes),
                                                    static_cast<double>(trials - successes + 1));
  return boost::math::quantile(beta, 1.0 - confidence);
}

double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("confidence bound needs at least one trial");
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  if (successes == trials) return 1.0;
  const boost::math::beta_distribution<double> beta(static_cast<double>(successes + 1),
                                                    static_cast<double>(trials - successes));
  return boost::math::quantile(beta, confidence);
}

double binomial_upper_tail(int m, double p, int j) {
  if (j <= 0) return 1.0;
  if (j > m) return 0.0;
  const boost::math::binomial_distribution<double> bin(m, p);
  return boost::math::cdf(boost::math::complement(bin, j - 1));
}

double chi_square_quantile(double degrees_of_freedom, double probability) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(degrees_of_freedom), probability);
}

double chi_square_statistic(std::span<const std::uint64_t> observed, std::span<const double> expected_probabilities) {
  if (observed.size() != expected_probabilities.size()) throw std::invalid_argument("chi-square: size mismatch");
  double n = 0;
  for (auto o : observed) n += static_cast<double>(o);
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * expected_probabilities[i];
    if (e <= 0) throw std::invalid_argument("chi-square: empty expected cell");
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

double normal_quantile(double probability) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), probability);
}

}  // namespace cdp::stats
