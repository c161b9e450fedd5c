#pragma once

#include <optional>
#include <vector>

namespace pseg {

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;                   // two-sided
  std::optional<double> cohens_d;   // absent when the pooled SD is zero
};

/// Welch's unequal-variance t-test of mean(a) - mean(b) with the
/// Welch-Satterthwaite degrees of freedom. Cohen's d is |mean(a) - mean(b)|
/// over the pooled standard deviation. Throws ContractError when a list has
/// fewer than 2 values or both sample variances are zero.
WelchResult welch_test(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);
/// Sample variance (n - 1 denominator).
double variance(const std::vector<double>& v);

/// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> v, double q);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Central percentile interval of a sample of replicates, e.g. level 0.95 -> [2.5%, 97.5%].
Interval percentile_interval(const std::vector<double>& replicates, double level = 0.95);

}  // namespace pseg
