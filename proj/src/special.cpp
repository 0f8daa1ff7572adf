#include "telesched/special.hpp"

#include <cmath>

#include "telesched/error.hpp"

namespace telesched::special {
namespace {

constexpr double kSeriesCap = 700.0;
constexpr double kTermCutoff = 1e-16;

// sum_k (z/2)^{2k+1} / (k! (k+1)!), every term carried with the factor
// exp(-z) so the peak term stays O(1/sqrt(z)).
double scaled_series(double z) {
  const double half = 0.5 * z;
  const double quarter_sq = half * half;
  double term = half * std::exp(-z);
  double sum = term;
  for (int k = 0;; ++k) {
    term *= quarter_sq / ((k + 1.0) * (k + 2.0));
    sum += term;
    if (k > half && term < kTermCutoff * sum) break;
    if (term == 0.0) break;
  }
  return sum;
}

// exp(-z) I_1(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k / z^k,
// a_k = prod_{i=1}^{k} (4 - (2i - 1)^2) / (k! 8^k).
double scaled_asymptotic(double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (4.0 - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < kTermCutoff * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * M_PI * z);
}

}  // namespace

double bessel_i1_scaled(double z) {
  detail::require(z >= 0.0 && !std::isnan(z), "Bessel argument must be >= 0");
  if (z == 0.0) return 0.0;
  if (z <= kSeriesCap) return scaled_series(z);
  return scaled_asymptotic(z);
}

double bessel_i1(double z) { return bessel_i1_scaled(z) * std::exp(z); }

}  // namespace telesched::special
