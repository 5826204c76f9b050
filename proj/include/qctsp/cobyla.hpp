// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_COBYLA_HPP
#define QCTSP_COBYLA_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qctsp {

struct CobylaResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

namespace detail {

// Solve A g = b by Gaussian elimination with partial pivoting.
// Returns false when the system is numerically singular.
inline bool solve_linear(std::vector<std::vector<double>> a,
                         std::vector<double> b, std::vector<double>& out) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  const double tiny = 1e-12 * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < tiny) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double v = b[r];
    for (std::size_t c = r + 1; c < n; ++c) v -= a[r][c] * out[c];
    out[r] = v / a[r][r];
  }
  return true;
}

inline std::string point_to_string(const std::vector<double>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace detail

// Derivative-free minimization in the COBYLA mould: a simplex of dim+1
// points carries a linear interpolation model, steps move the best vertex
// to the trust-region boundary along the model's descent direction, and the
// radius shrinks from rho_begin toward rho_end as progress stalls. The
// returned point is the best one evaluated, never worse than f(x0).
// max_iter is the objective-evaluation budget.
inline CobylaResult cobyla_minimize(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    double rho_begin, double rho_end,
                                    int max_iter) {
  const std::size_t n = x0.size();
  if (n < 1) throw std::invalid_argument("cobyla_minimize: dimension must be >= 1");
  if (!(rho_begin > rho_end && rho_end > 0.0))
    throw std::invalid_argument("cobyla_minimize: need 0 < rho_end < rho_begin");
  if (max_iter < 1) throw std::invalid_argument("cobyla_minimize: max_iter must be >= 1");

  CobylaResult result;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++evals;
    if (!std::isfinite(v))
      throw std::runtime_error("cobyla_minimize: non-finite objective at " +
                               detail::point_to_string(x));
    if (v < result.f) {
      result.f = v;
      result.x = x;
    }
    return v;
  };

  std::vector<std::vector<double>> simplex{x0};
  std::vector<double> vals{eval(x0)};
  for (std::size_t i = 0; i < n && evals < max_iter; ++i) {
    auto p = x0;
    p[i] += rho_begin;
    simplex.push_back(p);
    vals.push_back(eval(p));
  }
  if (simplex.size() < n + 1) {  // budget exhausted during bootstrap
    result.evaluations = evals;
    return result;
  }

  double rho = rho_begin;
  int stalls = 0;
  int small_steps = 0;
  std::size_t respan_axis = 0;

  auto vertex_dist = [&](std::size_t i, std::size_t b) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double d = simplex[i][c] - simplex[b][c];
      s += d * d;
    }
    return std::sqrt(s);
  };

  while (evals < max_iter) {
    std::size_t best = 0, worst = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (vals[i] < vals[best]) best = i;
      if (vals[i] > vals[worst]) worst = i;
    }
    if (worst == best) worst = best == 0 ? 1 : 0;

    // Pull stragglers onto the current trust shell before trusting the model.
    std::size_t far = best == 0 ? 1 : 0;
    for (std::size_t i = 0; i <= n; ++i)
      if (i != best && vertex_dist(i, best) > vertex_dist(far, best)) far = i;
    const double far_d = vertex_dist(far, best);
    if (far_d > 3.0 * rho) {
      auto p = simplex[best];
      for (std::size_t c = 0; c < n; ++c)
        p[c] += rho * (simplex[far][c] - simplex[best][c]) / far_d;
      simplex[far] = p;
      vals[far] = eval(p);
      continue;
    }

    // Linear model gradient from the simplex edges.
    std::vector<std::vector<double>> edges;
    std::vector<double> deltas;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      std::vector<double> e(n);
      for (std::size_t c = 0; c < n; ++c) e[c] = simplex[i][c] - simplex[best][c];
      edges.push_back(std::move(e));
      deltas.push_back(vals[i] - vals[best]);
    }
    std::vector<double> grad;
    double gnorm = 0.0;
    const bool solved = detail::solve_linear(edges, deltas, grad);
    if (solved)
      for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);

    if (!solved || gnorm < 1e-14) {
      // Degenerate simplex: re-span one axis direction deterministically.
      auto p = simplex[best];
      p[respan_axis % n] += rho;
      respan_axis++;
      simplex[far] = p;
      vals[far] = eval(p);
      continue;
    }

    auto candidate = simplex[best];
    for (std::size_t c = 0; c < n; ++c) candidate[c] -= rho * grad[c] / gnorm;
    double fc = eval(candidate);
    double step_len = rho;

    const double f_best = vals[best];
    const double accept_margin = 1e-13 * (1.0 + std::abs(f_best));

    // One secant refinement along the step direction: fit a quadratic
    // through f(0), f'(0) = -|g|, f(rho) and try its minimizer.
    if (evals < max_iter) {
      const double curvature = (fc - f_best + gnorm * rho) / (rho * rho);
      if (curvature > 0.0) {
        const double t = std::min(rho, std::max(0.02 * rho, gnorm / (2.0 * curvature)));
        if (t < 0.9 * rho) {
          auto refined = simplex[best];
          for (std::size_t c = 0; c < n; ++c) refined[c] -= t * grad[c] / gnorm;
          const double ft = eval(refined);
          if (ft < fc) {
            candidate = std::move(refined);
            fc = ft;
            step_len = t;
          }
        }
      }
    }

    const bool improved = fc < f_best - accept_margin;
    if (improved) {
      // Drop the vertex farthest from the incumbent: keeps the cloud tight
      // so the interpolated gradient stays well conditioned.
      std::size_t drop = best == 0 ? 1 : 0;
      double drop_d = -1.0;
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        const double d = vertex_dist(i, best);
        if (d > drop_d) {
          drop_d = d;
          drop = i;
        }
      }
      simplex[drop] = candidate;
      vals[drop] = fc;
      stalls = 0;
      // Repeated short accepted steps mean the model needs a finer scale.
      small_steps = step_len < 0.4 * rho ? small_steps + 1 : 0;
      if (small_steps >= 2) {
        small_steps = 0;
        rho = std::max(rho * 0.5, rho_end);
      }
    } else if (fc < vals[worst]) {
      // not a descent step, but the point still refreshes the model
      simplex[worst] = candidate;
      vals[worst] = fc;
      if (++stalls >= 3) {
        stalls = 0;
        rho *= 0.5;
        if (rho < rho_end) break;
      }
    } else {
      // candidate adds nothing; this radius is exhausted
      stalls = 0;
      rho *= 0.5;
      if (rho < rho_end) break;
    }
  }

  result.evaluations = evals;
  return result;
}

}  // namespace qctsp

#endif  // QCTSP_COBYLA_HPP
