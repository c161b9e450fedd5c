#include "pseg/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "pseg/errors.hpp"

namespace pseg {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

LbfgsResult minimize_lbfgs(const SmoothFunction& fn, std::vector<double> x0, const LbfgsOptions& opt) {
  detail::require(opt.memory >= 1 && opt.max_iter >= 0, "minimize_lbfgs: bad options");
  const std::size_t dim = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(dim);
  res.f = fn(res.x, g);
  if (!std::isfinite(res.f)) throw FitError("objective is not finite at the starting point");
  res.trace.push_back(res.f);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> hist;
  std::vector<double> dir(dim), alpha(static_cast<std::size_t>(opt.memory)), xn(dim), gn(dim);

  res.stop_reason = "max_iter";
  for (int it = 0; it < opt.max_iter; ++it) {
    res.grad_norm = max_abs(g);
    if (res.grad_norm <= opt.grad_tol) {
      res.converged = true;
      res.stop_reason = "gradient";
      break;
    }

    // Two-loop recursion.
    for (std::size_t i = 0; i < dim; ++i) dir[i] = -g[i];
    for (int m = static_cast<int>(hist.size()) - 1; m >= 0; --m) {
      alpha[m] = hist[m].rho * dot(hist[m].s, dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha[m] * hist[m].y[i];
    }
    if (!hist.empty()) {
      const Pair& last = hist.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : dir) d *= gamma;
    } else {
      const double scale = 1.0 / std::max(1.0, std::sqrt(dot(g, g)));
      for (double& d : dir) d *= scale;
    }
    for (std::size_t m = 0; m < hist.size(); ++m) {
      const double beta = hist[m].rho * dot(hist[m].y, dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] += hist[m].s[i] * (alpha[m] - beta);
    }

    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      hist.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -g[i];
      slope = -dot(g, g);
    }

    double step = 1.0;
    double fn_val = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) xn[i] = res.x[i] + step * dir[i];
      fn_val = fn(xn, gn);
      if (std::isfinite(fn_val) && fn_val <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.stop_reason = "line_search";
      res.converged = res.grad_norm <= std::sqrt(opt.grad_tol);
      break;
    }

    Pair p{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    for (std::size_t i = 0; i < dim; ++i) {
      p.s[i] = xn[i] - res.x[i];
      p.y[i] = gn[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      hist.push_back(std::move(p));
      if (static_cast<int>(hist.size()) > opt.memory) hist.pop_front();
    }

    const double decrease = res.f - fn_val;
    res.x.swap(xn);
    g.swap(gn);
    res.f = fn_val;
    res.iterations = it + 1;
    res.trace.push_back(res.f);
    if (decrease <= opt.f_tol * std::max(1.0, std::abs(res.f))) {
      res.converged = true;
      res.stop_reason = "function";
      break;
    }
  }
  res.grad_norm = max_abs(g);
  return res;
}

}  // namespace pseg
