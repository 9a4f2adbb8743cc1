#ifndef HAMCERT_QUADRATURE_HPP
#define HAMCERT_QUADRATURE_HPP

/*
 * Composite Gauss-Legendre quadrature on an interval and kernel integral
 * profiles t -> integral of k(t,s) w(s) ds. Profiles of kinked kernels are
 * integrated by splitting the s-interval at s = t so panel boundaries align
 * with the kink.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hamcert/expr.hpp"
#include "hamcert/kernels.hpp"

namespace hamcert {

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (lo, hi)
  std::vector<double> weights;  // positive, sum = hi - lo
  int panels = 0;
  int local_order = 0;
  double lo = 0.0, hi = 1.0;
};

namespace detail {

// Nodes and weights of the p-point Gauss-Legendre rule on [-1,1], by Newton
// iteration on the Legendre polynomial from Chebyshev initial guesses.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre_base(int p) {
  static const auto tables = [] {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> t(11);
    for (int n = 1; n <= 10; ++n) {
      std::vector<double> x(n), w(n);
      for (int i = 0; i < n; ++i) {
        double xi = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
          // P_n(xi) and P_n'(xi) via the three-term recurrence
          double p0 = 1.0, p1 = xi;
          for (int k = 2; k <= n; ++k) {
            const double pk = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
            p0 = p1; p1 = pk;
          }
          const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
          const double dx = p1 / dp;
          xi -= dx;
          if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
          p0 = p1; p1 = pk;
        }
        const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
      }
      t[n] = {std::move(x), std::move(w)};
    }
    return t;
  }();
  return tables[p];
}

}  // namespace detail

inline QuadratureRule make_rule(int panels, int local_order, double lo, double hi) {
  if (panels < 1) throw std::invalid_argument("make_rule: panels must be >= 1");
  if (local_order < 2 || local_order > 10)
    throw std::invalid_argument("make_rule: local_order must be in [2,10]");
  if (!(lo < hi)) throw std::invalid_argument("make_rule: invalid interval");

  const auto& [bx, bw] = detail::gauss_legendre_base(local_order);
  QuadratureRule rule;
  rule.panels = panels;
  rule.local_order = local_order;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.reserve(panels * local_order);
  rule.weights.reserve(panels * local_order);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int j = 0; j < local_order; ++j) {
      rule.nodes.push_back(mid + 0.5 * h * bx[j]);
      rule.weights.push_back(0.5 * h * bw[j]);
    }
  }
  return rule;
}

inline double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

struct Profile {
  std::vector<double> ts;      // uniform over [t_lo, t_hi]
  std::vector<double> values;  // P(t_i)
};

struct ProfileExtrema {
  double min = 0.0, argmin = 0.0;
  double max = 0.0, argmax = 0.0;
};

namespace detail {

// One integral for a fixed t; the rule argument is a template whose
// (panels, local_order) are re-laid onto the (possibly split) s-interval.
template <typename Weight>
double kernel_integral_at(const Kernel& k, const Weight& w, double t,
                          double s_lo, double s_hi, const QuadratureRule& rule,
                          bool split) {
  auto piece = [&](double a, double b) {
    if (!(a < b)) return 0.0;
    const QuadratureRule r = make_rule(rule.panels, rule.local_order, a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      acc += r.weights[i] * k(t, r.nodes[i]) * w(r.nodes[i]);
    return acc;
  };
  if (split && k.has_kink() && s_lo < t && t < s_hi)
    return piece(s_lo, t) + piece(t, s_hi);
  return piece(s_lo, s_hi);
}

}  // namespace detail

// Weight given as an expression in the integration variable (the bound
// functions of the hypotheses are functions of one variable, written in t).
inline Profile kernel_profile(const Kernel& k, const Expression& w,
                              Interval s_iv, Interval t_iv, int n_t,
                              const QuadratureRule& rule, bool split = true) {
  if (n_t < 2) throw std::invalid_argument("kernel_profile: need n_t >= 2");
  if (!(s_iv.lo < s_iv.hi)) throw std::invalid_argument("kernel_profile: invalid s-interval");
  Profile prof;
  prof.ts.resize(n_t);
  prof.values.resize(n_t);
  auto weight = [&](double s) {
    try {
      return w(s);
    } catch (const EvalError& err) {
      throw EvalError(std::string(err.what()) + " at s=" + std::to_string(s));
    }
  };
  for (int i = 0; i < n_t; ++i) {
    const double t = t_iv.lo + (t_iv.hi - t_iv.lo) * static_cast<double>(i) / (n_t - 1);
    prof.ts[i] = t;
    prof.values[i] = detail::kernel_integral_at(k, weight, t, s_iv.lo, s_iv.hi, rule, split);
  }
  return prof;
}

// Weight given as sampled values on a uniform grid of [0,1] (solver iterates);
// values are interpolated linearly onto the quadrature nodes.
inline Profile kernel_profile(const Kernel& k, const std::vector<double>& w_grid,
                              Interval s_iv, Interval t_iv, int n_t,
                              const QuadratureRule& rule, bool split = true) {
  if (w_grid.size() < 2) throw std::invalid_argument("kernel_profile: grid weight too short");
  const int n = static_cast<int>(w_grid.size());
  auto weight = [&](double s) {
    const double pos = s * (n - 1);
    int c = std::min(static_cast<int>(pos), n - 2);
    if (c < 0) c = 0;
    const double th = pos - c;
    return w_grid[c] * (1.0 - th) + w_grid[c + 1] * th;
  };
  Profile prof;
  prof.ts.resize(n_t);
  prof.values.resize(n_t);
  for (int i = 0; i < n_t; ++i) {
    const double t = t_iv.lo + (t_iv.hi - t_iv.lo) * static_cast<double>(i) / (n_t - 1);
    prof.ts[i] = t;
    prof.values[i] = detail::kernel_integral_at(k, weight, t, s_iv.lo, s_iv.hi, rule, split);
  }
  return prof;
}

// Extrema over grid points in the window, then one parabolic refinement
// through each interior extremal point and its neighbours. Refinement never
// replaces a grid value with a worse one.
inline ProfileExtrema profile_extrema(const Profile& p, Interval window) {
  if (p.ts.empty()) throw std::invalid_argument("profile_extrema: empty profile");
  int imin = -1, imax = -1;
  for (std::size_t i = 0; i < p.ts.size(); ++i) {
    if (p.ts[i] < window.lo - 1e-15 || p.ts[i] > window.hi + 1e-15) continue;
    if (imin < 0 || p.values[i] < p.values[imin]) imin = static_cast<int>(i);
    if (imax < 0 || p.values[i] > p.values[imax]) imax = static_cast<int>(i);
  }
  if (imin < 0) throw std::invalid_argument("profile_extrema: window contains no grid point");

  auto refine = [&](int i, bool is_min) -> std::pair<double, double> {
    double val = p.values[i], arg = p.ts[i];
    if (i > 0 && i + 1 < static_cast<int>(p.ts.size()) &&
        p.ts[i - 1] >= window.lo - 1e-15 && p.ts[i + 1] <= window.hi + 1e-15) {
      const double y0 = p.values[i - 1], y1 = p.values[i], y2 = p.values[i + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom != 0.0) {
        const double h = p.ts[i] - p.ts[i - 1];
        const double delta = 0.5 * (y0 - y2) / denom;  // vertex offset in cells
        if (std::fabs(delta) <= 1.0) {
          const double vv = y1 - 0.25 * (y0 - y2) * delta;
          const bool better = is_min ? (vv < val) : (vv > val);
          if (better) { val = vv; arg = p.ts[i] + delta * h; }
        }
      }
    }
    return {val, arg};
  };

  ProfileExtrema ex;
  std::tie(ex.min, ex.argmin) = refine(imin, true);
  std::tie(ex.max, ex.argmax) = refine(imax, false);
  return ex;
}

}  // namespace hamcert

#endif  // HAMCERT_QUADRATURE_HPP
