#include "pseg/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "pseg/errors.hpp"

namespace pseg {

double mean(const std::vector<double>& v) {
  detail::require(!v.empty(), "mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance(const std::vector<double>& v) {
  detail::require(v.size() >= 2, "variance needs at least 2 values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / (v.size() - 1);
}

WelchResult welch_test(const std::vector<double>& a, const std::vector<double>& b) {
  detail::require(a.size() >= 2 && b.size() >= 2, "welch_test needs at least 2 values per group");
  const double na = a.size(), nb = b.size();
  const double ma = mean(a), mb = mean(b);
  const double va = variance(a), vb = variance(b);
  const double se2 = va / na + vb / nb;
  detail::require(se2 > 0.0, "welch_test: both groups have zero variance");

  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.dof = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
  const boost::math::students_t dist(r.dof);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  const double pooled = std::sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2));
  if (pooled > 0.0) r.cohens_d = std::abs(ma - mb) / pooled;
  return r;
}

double quantile(std::vector<double> v, double q) {
  detail::require(!v.empty(), "quantile of an empty sample");
  detail::require(q >= 0.0 && q <= 1.0, "quantile level must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - i) * (v[i + 1] - v[i]);
}

Interval percentile_interval(const std::vector<double>& replicates, double level) {
  detail::require(level > 0.0 && level < 1.0, "interval level must be in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return {quantile(replicates, tail), quantile(replicates, 1.0 - tail)};
}

}  // namespace pseg
