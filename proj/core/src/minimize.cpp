#include "splitlaw/minimize.hpp"

#include <cmath>
#include <cstddef>
#include <deque>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

struct Correction {
  std::vector<double> s;  // x_{k+1} - x_k
  std::vector<double> y;  // g_{k+1} - g_k
  double rho;             // 1 / (y . s)
};

// Two-loop recursion; falls back to steepest descent scaling with no history.
std::vector<double> lbfgs_direction(const std::vector<double>& grad,
                                    const std::deque<Correction>& memory) {
  std::vector<double> q = grad;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * dot(memory[i].s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * memory[i].y[j];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * dot(memory[i].y, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * memory[i].s[j];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

MinimizeResult minimize_lbfgs(const ObjectiveFn& fn, std::vector<double> x0,
                              const MinimizeOptions& options) {
  const std::size_t dim = x0.size();
  std::vector<double> grad(dim), x = std::move(x0);
  double f = fn(x, grad);
  if (!std::isfinite(f)) throw ConvergenceError("objective is non-finite at the initial point");

  MinimizeResult best;
  best.x = x;
  best.objective = f;

  std::deque<Correction> memory;
  std::vector<double> x_new(dim), grad_new(dim);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (inf_norm(grad) <= options.grad_tolerance * (1.0 + std::fabs(f))) {
      best.converged = true;
      break;
    }

    std::vector<double> dir = lbfgs_direction(grad, memory);
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {  // not a descent direction, reset memory
      memory.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
      if (!(slope < 0.0)) {
        best.converged = true;  // gradient numerically zero
        break;
      }
    }

    // Backtracking Armijo search.
    constexpr double kArmijo = 1e-4;
    constexpr double kShrink = 0.5;
    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = fn(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= kShrink;
    }
    if (!accepted) {
      if (!std::isfinite(f_new))
        throw ConvergenceError("line search left the finite domain of the objective");
      break;  // no further progress representable at this scale
    }

    Correction corr;
    corr.s.resize(dim);
    corr.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      corr.s[i] = x_new[i] - x[i];
      corr.y[i] = grad_new[i] - grad[i];
    }
    const double ys = dot(corr.y, corr.s);
    if (ys > 1e-12) {
      corr.rho = 1.0 / ys;
      memory.push_back(std::move(corr));
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }

    x.swap(x_new);
    grad.swap(grad_new);
    f = f_new;
    best.iterations = iter + 1;
    if (f < best.objective) {
      best.objective = f;
      best.x = x;
    }
  }

  if (!best.converged)
    best.converged = inf_norm(grad) <= options.grad_tolerance * (1.0 + std::fabs(f));
  return best;
}

}  // namespace splitlaw
