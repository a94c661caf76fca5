#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mucond {

// f and gradient in one evaluation; returns f(x), writes grad.
using ObjectiveFn = std::function<double(std::span<const double>, std::span<double>)>;

// Optional custom convergence measure evaluated once per iteration from
// (x, grad, projected grad); iteration stops when it drops to tol or below.
// Defaults to the projected-gradient infinity norm.
using ConvergenceFn =
    std::function<double(std::span<const double>, std::span<const double>, std::span<const double>)>;

struct BoxLbfgsOptions {
  int memory = 3;
  int max_iterations = 20000;
  double tol = 1e-8;
  int max_line_search = 50;
  ConvergenceFn measure;  // empty: ||pg||_inf
};

struct BoxLbfgsReport {
  double f = 0.0;
  double pg_inf = 0.0;        // final projected-gradient infinity norm
  double measure = 0.0;       // final value of the convergence measure
  int iterations = 0;
  long long evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Limited-memory quasi-Newton descent on a box, gradient-projection flavor:
// variables pinned at a bound with an outward gradient are frozen per
// iteration, the remaining coordinates take the two-loop L-BFGS direction,
// and steps follow the projected path x(a) = clip(x + a*d) under an Armijo
// test. x is updated in place (clipped into the box on entry). Bounds may be
// +-infinity.
BoxLbfgsReport minimize_box_lbfgs(const ObjectiveFn& fg, std::vector<double>& x,
                                  std::span<const double> lower, std::span<const double> upper,
                                  const BoxLbfgsOptions& opts = {});

}  // namespace mucond
