// Small-sample summary statistics: mean and 95% confidence half-width
// from the Student-t distribution.

#ifndef RPLSIM_STATS_HPP
#define RPLSIM_STATS_HPP

#include <cmath>
#include <optional>
#include <vector>

namespace rplsim {

// Two-sided 97.5% Student-t quantile by degrees of freedom.
inline double student_t975(int df) {
  static const double table[30] = {
      12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624,
      2.306004,  2.262157, 2.228139, 2.200985, 2.178813, 2.160369, 2.144787,
      2.131450,  2.119905, 2.109816, 2.100922, 2.093024, 2.085963, 2.079614,
      2.073873,  2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407,
      2.045230,  2.042272};
  if (df < 1) return 0.0;
  if (df <= 30) return table[df - 1];
  if (df <= 40) return 2.021075;
  if (df <= 60) return 2.000298;
  if (df <= 120) return 1.979930;
  return 1.959964;
}

struct SampleStats {
  int n = 0;
  std::optional<double> mean;
  std::optional<double> ci95_half;  // absent for fewer than two samples
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats out;
  out.n = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  out.mean = mean;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  out.ci95_half = student_t975(out.n - 1) * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace rplsim

#endif  // RPLSIM_STATS_HPP
