#ifndef HAMCERT_KERNELS_HPP
#define HAMCERT_KERNELS_HPP

/*
 * Green's-function kernels on [0,1]^2, their upper envelopes Phi and the
 * cone constants c with c*Phi(s) <= k(t,s) <= Phi(s) on a t-window.
 *
 * Builtins:
 *   k1 (Dirichlet):       k1(t,s) = (1-t)s for s <= t,  t(1-s) for s > t
 *   k2 (Sturm-Liouville): k2(t,s) = 2-t    for s <= t,  2-s    for s > t
 *
 * User kernels are given as two expressions in (t,s), one per branch;
 * continuity across s = t is checked, not assumed.
 */

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamcert/expr.hpp"

namespace hamcert {

struct Window {
  double a = 0.0, b = 1.0;
  bool valid() const { return 0.0 <= a && a < b && b <= 1.0; }
  bool degenerate_ok() const { return 0.0 <= a && a <= b && b <= 1.0; }
};

class Kernel {
public:
  enum class Tag { builtin_k1, builtin_k2, user };

  static Kernel dirichlet_k1() { return Kernel(Tag::builtin_k1); }
  static Kernel sturm_liouville_k2() { return Kernel(Tag::builtin_k2); }

  // lower = branch for s <= t, upper = branch for s > t, both in variables (t,s).
  static Kernel from_expressions(Expression lower, Expression upper) {
    Kernel k(Tag::user);
    k.lower_ = std::move(lower);
    k.upper_ = std::move(upper);
    return k;
  }

  double operator()(double t, double s) const {
    if (t < -kDomainSlack || t > 1.0 + kDomainSlack ||
        s < -kDomainSlack || s > 1.0 + kDomainSlack)
      throw EvalError("kernel evaluated outside [0,1]^2");
    switch (tag_) {
      case Tag::builtin_k1: return s <= t ? (1.0 - t) * s : t * (1.0 - s);
      case Tag::builtin_k2: return s <= t ? 2.0 - t : 2.0 - s;
      case Tag::user:       return s <= t ? lower_(t, s) : upper_(t, s);
    }
    return 0.0;
  }

  bool has_kink() const { return true; }
  Tag tag() const { return tag_; }

  std::string name() const {
    switch (tag_) {
      case Tag::builtin_k1: return "k1_dirichlet";
      case Tag::builtin_k2: return "k2_sturm_liouville";
      case Tag::user:       return "user";
    }
    return {};
  }

  /// Worst jump |k(t,t-) - k(t,t+)| over sampled t; builtins are continuous.
  double kink_defect(int samples = 1025) const {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / (samples - 1);
      double lo, hi;
      switch (tag_) {
        case Tag::builtin_k1: lo = (1.0 - t) * t; hi = t * (1.0 - t); break;
        case Tag::builtin_k2: lo = 2.0 - t; hi = 2.0 - t; break;
        case Tag::user:       lo = lower_(t, t); hi = upper_(t, t); break;
      }
      worst = std::max(worst, std::fabs(lo - hi));
    }
    return worst;
  }

private:
  static constexpr double kDomainSlack = 1e-12;
  explicit Kernel(Tag tag) : tag_(tag) {}
  Tag tag_;
  Expression lower_, upper_;
};

inline double eval_k1(double t, double s) { return Kernel::dirichlet_k1()(t, s); }
inline double eval_k2(double t, double s) { return Kernel::sturm_liouville_k2()(t, s); }

/// Envelope Phi (expression in s, written in variable t), cone constant c and
/// the window of the lower bound; the (H2)/(H3) data of a kernel.
struct ConeData {
  Expression phi;
  double c = 0.0;
  Window window;
};

struct GridSpec {
  int points_per_axis = 1025;
  int refine_passes = 4;   // local densification around the arg-extremum
  int refine_points = 101;
};

struct EnvelopeReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over grid of Phi(s) - k(t,s)
  double witness_t = 0.0, witness_s = 0.0;
};

inline EnvelopeReport verify_upper_envelope(const Kernel& k, const Expression& phi,
                                            const GridSpec& grid = {}) {
  const int n = grid.points_per_axis;
  if (n < 2) throw std::invalid_argument("verify_upper_envelope: bad grid");
  EnvelopeReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double s = static_cast<double>(j) / (n - 1);
      const double m = phi(s) - k(t, s);
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        rep.witness_t = t;
        rep.witness_s = s;
      }
    }
  }
  rep.holds = rep.worst_margin >= -1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Cone constant: c = min { k(t,s) / Phi(s) : t in [a,b], s in (0,1) }, skipping
// s-points where Phi(s) < eps (the ratio extends continuously there and the
// skipped neighbourhood shrinks with the grid). The scan is followed by local
// densification passes around the arg-min until the estimate stabilises; the
// result is an upper estimate of the true constant converging under refinement.
// ---------------------------------------------------------------------------

inline double compute_cone_constant(const Kernel& k, const Expression& phi,
                                    Window window, const GridSpec& grid = {}) {
  if (!window.degenerate_ok())
    throw std::invalid_argument("compute_cone_constant: invalid window");
  constexpr double eps_phi = 1e-10;
  const int n = grid.points_per_axis;

  double best = std::numeric_limits<double>::infinity();
  double arg_t = window.a, arg_s = 0.5;
  long kept = 0;

  auto scan = [&](double t_lo, double t_hi, double s_lo, double s_hi, int pts) {
    std::vector<double> ts, ss;
    detail::linspace(t_lo, t_hi, pts, ts);
    detail::linspace(std::max(0.0, s_lo), std::min(1.0, s_hi), pts, ss);
    for (double t : ts)
      for (double s : ss) {
        const double ph = phi(s);
        if (ph < eps_phi) continue;
        ++kept;
        const double r = k(t, s) / ph;
        if (r < best) { best = r; arg_t = t; arg_s = s; }
      }
  };

  scan(window.a, window.b, 0.0, 1.0, n);
  if (kept == 0)
    throw std::runtime_error("compute_cone_constant: envelope vanishes on the whole grid");

  double dt = (window.b - window.a) / (n - 1.0);
  double ds = 1.0 / (n - 1.0);
  for (int pass = 0; pass < grid.refine_passes; ++pass) {
    const double prev = best;
    scan(std::max(window.a, arg_t - dt), std::min(window.b, arg_t + dt),
         arg_s - ds, arg_s + ds, grid.refine_points);
    dt = 2.0 * dt / (grid.refine_points - 1);
    ds = 2.0 * ds / (grid.refine_points - 1);
    if (prev - best < 1e-12) break;
  }
  return best;
}

}  // namespace hamcert

#endif  // HAMCERT_KERNELS_HPP
