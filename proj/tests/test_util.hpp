#pragma once

// Shared statistical helpers for the test binaries. Every Monte Carlo test
// runs with a fixed seed, so outcomes are deterministic; the significance
// level only calibrates how surprising a frozen draw would have to be
// before it counts as a bug.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace testutil {

// Upper critical value of chi^2_df at significance 1e-3. Table for the
// small dfs in use, Wilson-Hilferty approximation for the rest (relative
// error < 1% at df >= 5).
inline double chisq_crit(int df) {
  switch (df) {
    case 1: return 10.828;
    case 2: return 13.816;
    case 3: return 16.266;
    case 4: return 18.467;
    case 5: return 20.515;
    case 7: return 24.322;
    case 10: return 29.588;
    case 15: return 37.697;
  }
  const double z = 3.0902;  // Phi^-1(1 - 1e-3)
  const double d = static_cast<double>(df);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

// Pearson statistic; expected counts must all be positive.
inline double pearson(const std::vector<double>& observed,
                      const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("pearson: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

// |sample mean - mu| measured in standard errors.
inline double z_score(double sample_mean, double mu, double sd, std::size_t n) {
  return std::fabs(sample_mean - mu) / (sd / std::sqrt(static_cast<double>(n)));
}

}  // namespace testutil
