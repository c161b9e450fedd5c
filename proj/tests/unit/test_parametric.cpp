// Parametric maps: logistic and variance models, objective gradients and
// the L-BFGS minimizer.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "pseg/errors.hpp"
#include "pseg/lbfgs.hpp"
#include "pseg/pairs.hpp"
#include "pseg/parametric.hpp"
#include "pseg/rng.hpp"

using namespace pseg;
using doctest::Approx;

namespace {

FeatureMaps smooth_features(int n) {
  FeatureMaps x(n, 2);
  for (int c = 0; c < n * n; ++c) {
    const double u = (c % n) / double(n - 1), v = (c / n) / double(n - 1);
    x(c, 0) = std::cos(3.0 * u) + 0.3 * v;
    x(c, 1) = std::sin(2.5 * v) - 0.2 * u;
  }
  return x;
}

double fd_error(const ParametricObjective& obj, const std::vector<double>& theta) {
  std::vector<double> g(theta.size()), dummy(theta.size());
  obj.evaluate(theta, g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto a = theta, b = theta;
    a[i] += 1e-6;
    b[i] -= 1e-6;
    const double fd = (obj.evaluate(a, dummy) - obj.evaluate(b, dummy)) / 2e-6;
    num += (g[i] - fd) * (g[i] - fd);
    den += fd * fd;
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("zero weights give uniform maps") {
  const ProbMaps p = logistic_probmaps(LogisticParams(4, 2), smooth_features(5));
  for (double v : p.tensor().values()) CHECK(v == Approx(0.25));
}

TEST_CASE("softmax values and shift invariance") {
  FeatureMaps x(3, 1, 1.0);
  LogisticParams th(2, 1);
  th.w(0, 0) = 1.0;
  const ProbMaps p = logistic_probmaps(th, x);
  CHECK(p(0, 4) == Approx(0.7311).epsilon(1e-4));
  CHECK(p(1, 4) == Approx(0.2689).epsilon(1e-4));

  const FeatureMaps f = smooth_features(6);
  LogisticParams a(3, 2);
  Rng rng(2);
  for (double& w : a.omega) w = rng.uniform(-2, 2);
  for (double& b : a.beta) b = rng.uniform(-1, 1);
  LogisticParams shifted = a;
  for (double& b : shifted.beta) b += 4.5;
  const auto pa = logistic_probmaps(a, f).tensor().values(), pb = logistic_probmaps(shifted, f).tensor().values();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pb[i] == Approx(pa[i]).epsilon(1e-12));
}

TEST_CASE("constant features give identical cells") {
  LogisticParams th(3, 2);
  th.omega = {1.0, -2.0, 0.5, 0.0, -1.0, 3.0};
  th.beta = {0.1, 0.0, -0.3};
  const ProbMaps p = logistic_probmaps(th, FeatureMaps(5, 2, 0.7));
  for (int c = 1; c < p.cells(); ++c)
    for (int k = 0; k < 3; ++k) CHECK(p(k, c) == Approx(p(k, 0)));
}

TEST_CASE("variance reparametrization") {
  VarianceParams v(2, 1);
  v.s(0, 0) = 1.0;
  v.s(1, 0) = 2.0;
  const LogisticParams th = variance_reparam(v);
  CHECK(th.w(0, 0) == Approx(-1.0));
  CHECK(th.w(1, 0) == Approx(-0.25));
  CHECK(th.beta[0] == 0.0);
  CHECK(th.beta[1] == 0.0);

  VarianceParams dv(2, 1);
  dv.s(0, 0) = std::sqrt(2.0);
  dv.s(1, 0) = 1.0;
  CHECK(differential_variance(dv)[0] == Approx(0.5));
  std::swap(dv.s(0, 0), dv.s(1, 0));
  CHECK(differential_variance(dv)[0] == Approx(-0.5));
  CHECK_THROWS_AS(differential_variance(VarianceParams(3, 1)), ContractError);
}

TEST_CASE("parametric objective gradients match central differences") {
  const int n = 5;
  Rng rng(31);
  std::vector<PairCount> entries;
  for (int i = 0; i < n * n; ++i)
    for (int j = i + 1; j < n * n; j += 4) entries.push_back({CellPair{i, j}, rng.index(4), 3});
  const AggregatedCounts counts(entries);
  const FeatureMaps f = smooth_features(n);
  for (LossKind loss : {LossKind::BCE, LossKind::SE})
    for (ParamModel model : {ParamModel::Logistic, ParamModel::Variance}) {
      const ParametricObjective obj(Objective(counts, n, loss, 3.0, 1), f, 3, model);
      CHECK(fd_error(obj, obj.initial(9)) < 1e-5);
    }
}

TEST_CASE("logistic fit recovers logistic maps") {
  const int n = 10;
  const FeatureMaps f = smooth_features(n);
  LogisticParams truth(2, 2);
  truth.omega = {4.0, 1.0, -4.0, -1.0};
  truth.beta = {0.0, 0.0};
  const ProbMaps gt = logistic_probmaps(truth, f);
  const ResponseDataset d = simulate_responses(gt, sample_pairset(GridSpec(n), 2, Coverage::KPerPixel, 1), 20, 2);
  FitConfig cfg;
  cfg.seed = 3;
  const ParametricFit fit = fit_parametric(d, f, 2, cfg);
  CHECK(mae_aligned(fit.result.maps, gt) < 0.05);
  CHECK(fit.restart_losses.size() == 5);
}

TEST_CASE("L-BFGS minimizes the Rosenbrock function") {
  const SmoothFunction rosen = [](const std::vector<double>& x, std::vector<double>& g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  const LbfgsResult r = minimize_lbfgs(rosen, {-1.2, 1.0});
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == Approx(1.0).epsilon(1e-5));
  CHECK(r.f < 1e-10);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}
