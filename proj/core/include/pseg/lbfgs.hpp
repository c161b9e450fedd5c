#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pseg {

/// Objective for minimize_lbfgs: returns f(x) and writes the gradient.
using SmoothFunction = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 500;
  double grad_tol = 1e-8;  // stop when max |g_i| <= grad_tol
  double f_tol = 1e-12;    // stop when the relative decrease falls below f_tol
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_norm = 0.0;  // max-norm at x
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // f at the start and after each iteration
  std::string stop_reason;
};

/// Limited-memory BFGS with a backtracking Armijo line search.
/// Throws FitError if the objective is non-finite at the starting point.
LbfgsResult minimize_lbfgs(const SmoothFunction& fn, std::vector<double> x0, const LbfgsOptions& opt = {});

}  // namespace pseg
