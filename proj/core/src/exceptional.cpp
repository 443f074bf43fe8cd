#include "kerrcat/exceptional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrcat/errors.hpp"
#include "kerrcat/linalg.hpp"

namespace kerrcat::exceptional {

namespace {

constexpr double kOrderTol = 1e-10;

void require_model(double alpha, double kappa) {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("alpha must be positive");
  if (!std::isfinite(kappa) || kappa < 0.0) throw DomainError("kappa must be non-negative");
}

// midpoint bisection of f on [lo, hi] with f(lo), f(hi) of opposite sign;
// runs until the interval cannot shrink further
template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
  double fhi_abs = std::abs(f(hi));
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi_abs = std::abs(fm);
    }
  }
  return std::abs(flo) <= fhi_abs ? lo : hi;
}

// real roots of a v^2 + b v + c
std::vector<double> quadratic_roots(double a, double b, double c) {
  std::vector<double> r;
  if (a == 0.0) {
    if (b != 0.0) r.push_back(-c / b);
    return r;
  }
  const double d = b * b - 4.0 * a * c;
  if (d < 0.0) return r;
  const double s = std::sqrt(d);
  const double t = -0.5 * (b + std::copysign(s, b));
  if (t != 0.0) {
    r.push_back(t / a);
    r.push_back(c / t);
  } else {
    r.push_back(0.0);
  }
  return r;
}

struct Slice {
  double eps = 0.0;
  std::vector<double> roots;
};

struct OpenCurve {
  Lep2Curve curve;
  double last = 0.0;
};

}  // namespace

double discriminant(const model::ReducedModel& m) {
  return catspace::cubic_invariants(m).discriminant();
}

ResidualScales residual_scales(double alpha, double kappa) {
  const double s = kappa * alpha * alpha;
  return {s * s * s, s * s, s * s * s * s * s * s};
}

CoalescenceMetric coalescence_metric(const catspace::ReducedLiouvillian& l) {
  if (!l.allFinite()) throw NumericError("coalescence_metric: non-finite matrix");
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(l, true);
  if (es.info() != Eigen::Success) throw NumericError("coalescence_metric: eigensolver failed");
  int null_idx = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(null_idx))) null_idx = i;
  }
  std::vector<Eigen::Vector4cd> v;
  for (int i = 0; i < 4; ++i) {
    if (i != null_idx) v.push_back(es.eigenvectors().col(i).normalized());
  }
  std::array<double, 3> ov = {std::abs(v[0].dot(v[1])), std::abs(v[0].dot(v[2])),
                              std::abs(v[1].dot(v[2]))};
  std::sort(ov.begin(), ov.end(), std::greater<>());
  return {std::min(ov[0], 1.0), std::min(ov[1], 1.0)};
}

EpPoint classify_point(const model::ReducedModel& base, double eps, double delta) {
  const auto md = base.at(eps, delta);
  const auto inv = catspace::cubic_invariants(md);
  const auto sc = residual_scales(md.alpha, md.kappa);
  EpPoint p;
  p.eps = eps;
  p.delta = delta;
  p.q = inv.q;
  p.m = inv.m;
  p.disc_residual = std::abs(inv.discriminant());
  const bool triple = std::abs(inv.q) <= kOrderTol * sc.q && std::abs(inv.m) <= kOrderTol * sc.m;
  if (triple) {
    p.order = 3;
  } else if (inv.degenerate() || p.disc_residual <= kOrderTol * sc.disc) {
    p.order = 2;
  }
  const auto cm = coalescence_metric(catspace::reduced_liouvillian(md));
  p.coalescence = cm.largest;
  p.coalescence_second = cm.second;
  return p;
}

std::vector<double> discriminant_roots(const model::ReducedModel& base, double eps) {
  if (base.kappa == 0.0) return {};
  const auto md = base.at(eps, 0.0);
  const auto c = catspace::invariant_lines(md).discriminant_coefficients();

  int degree = 3;
  while (degree > 0 && c[degree] == 0.0) --degree;
  if (degree == 0) return {};
  double bound = 0.0;
  for (int i = 0; i < degree; ++i) bound = std::max(bound, std::abs(c[i] / c[degree]));
  std::vector<double> breaks = {0.0, 1.0 + bound};
  for (double v : quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1])) {
    if (v > 0.0 && v < breaks[1]) breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());

  auto f = [&](double delta) { return discriminant(md.at(eps, delta)); };
  std::vector<double> roots;
  double d_lo = 0.0;
  double f_lo = f(0.0);
  if (f_lo == 0.0) roots.push_back(0.0);
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double d_hi = std::sqrt(breaks[i]);
    const double f_hi = f(d_hi);
    if (f_hi == 0.0) {
      roots.push_back(d_hi);
    } else if (f_lo != 0.0 && (f_lo < 0.0) != (f_hi < 0.0)) {
      roots.push_back(bisect(f, d_lo, d_hi, f_lo));
    }
    d_lo = d_hi;
    f_lo = f_hi;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

Lep2Trace lep2_trace(double alpha, double kappa, const Lep2Options& opts) {
  require_model(alpha, kappa);
  if (!std::isfinite(opts.eps_lo) || !std::isfinite(opts.eps_hi) || opts.eps_hi <= opts.eps_lo ||
      opts.n_eps < 2) {
    throw DomainError("lep2_trace: need a finite eps range with eps_hi > eps_lo and n_eps >= 2");
  }
  Lep2Trace out;
  if (kappa == 0.0) return out;
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};

  // slices, with step-doubling refinement toward every change in root count
  const auto grid = linspace(opts.eps_lo, opts.eps_hi, opts.n_eps);
  std::vector<Slice> slices;
  auto roots_at = [&](double e) { return discriminant_roots(base, e); };
  std::vector<double> current = roots_at(grid[0]);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    slices.push_back({grid[k], current});
    if (k + 1 == grid.size()) break;
    std::vector<double> next = roots_at(grid[k + 1]);
    if (next.size() != current.size()) {
      double a = grid[k], b = grid[k + 1];
      for (int it = 0; it < opts.refine_steps; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (roots_at(mid).size() == current.size() ? a : b) = mid;
      }
      std::vector<double> left, right;
      for (int j = 1; j <= 16; ++j) {
        const double f = 1.0 - std::ldexp(1.0, -j);
        left.push_back(grid[k] + (a - grid[k]) * f);
        right.push_back(grid[k + 1] - (grid[k + 1] - b) * f);
      }
      left.push_back(a);
      right.push_back(b);
      std::reverse(right.begin(), right.end());
      for (double e : left) {
        if (e > slices.back().eps) slices.push_back({e, roots_at(e)});
      }
      for (double e : right) {
        if (e > slices.back().eps && e < grid[k + 1]) slices.push_back({e, roots_at(e)});
      }
    }
    current = std::move(next);
  }

  double delta_scale = 0.0;
  for (const auto& sl : slices) {
    for (double r : sl.roots) delta_scale = std::max(delta_scale, r);
  }

  // A root can only appear or vanish through Delta = 0 or by merging with a
  // neighbour (a fold of the cubic in Delta^2). Merges that are LEP3s are
  // confirmed by an independent Newton solve from the merge point.
  struct Terminal {
    CurveEnd kind = CurveEnd::Fold;
    bool has_point = false;
    EpPoint point;
  };
  auto resolve = [&](double e, double d) {
    Terminal t;
    if (d <= 1e-3 * delta_scale) {
      t.kind = CurveEnd::Axis;
      const EpPoint p = classify_point(base, e, 0.0);
      if (p.order == 2) {
        t.has_point = true;
        t.point = p;
      }
      return t;
    }
    try {
      const EpPoint v = lep3_numeric(alpha, kappa, e, d);
      if (std::abs(v.eps - e) <= 1e-3 * std::abs(v.eps) &&
          std::abs(v.delta - d) <= 1e-3 * std::abs(v.delta)) {
        t.kind = CurveEnd::Lep3;
        t.has_point = true;
        t.point = v;
        bool seen = false;
        for (const auto& w : out.vertices) {
          seen = seen || (std::abs(w.eps - v.eps) <= 1e-9 * std::abs(v.eps) &&
                          std::abs(w.delta - v.delta) <= 1e-9 * std::abs(v.delta));
        }
        if (!seen) out.vertices.push_back(v);
      }
    } catch (const NumericError&) {
    }
    return t;
  };

  std::vector<OpenCurve> open;
  std::vector<Lep2Curve> done;
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const auto& sl = slices[s];
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < open.size(); ++i) {
      for (std::size_t j = 0; j < sl.roots.size(); ++j) {
        pairs.emplace_back(std::abs(open[i].last - sl.roots[j]), i, j);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> open_to_root(open.size(), -1), root_taken(sl.roots.size(), 0);
    for (const auto& [d, i, j] : pairs) {
      if (open_to_root[i] >= 0 || root_taken[j]) continue;
      open_to_root[i] = static_cast<int>(j);
      root_taken[j] = 1;
    }
    std::vector<OpenCurve> still_open;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open_to_root[i] >= 0) {
        const double r = sl.roots[open_to_root[i]];
        open[i].curve.points.push_back(classify_point(base, sl.eps, r));
        open[i].last = r;
        still_open.push_back(std::move(open[i]));
        continue;
      }
      // vanished between the previous slice and this one
      auto& c = open[i].curve;
      const Terminal t = resolve(c.points.back().eps, open[i].last);
      c.end = t.kind;
      if (t.has_point) c.points.push_back(t.point);
      done.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < sl.roots.size(); ++j) {
      if (root_taken[j]) continue;
      OpenCurve c;
      c.last = sl.roots[j];
      if (s > 0) {
        const Terminal t = resolve(sl.eps, sl.roots[j]);
        c.curve.start = t.kind;
        if (t.has_point) c.curve.points.push_back(t.point);
      }
      c.curve.points.push_back(classify_point(base, sl.eps, sl.roots[j]));
      still_open.push_back(std::move(c));
    }
    open = std::move(still_open);
  }
  for (auto& c : open) done.push_back(std::move(c.curve));

  // mirror to Delta < 0, joining through the axis where a curve touches it
  auto mirrored = [](std::vector<EpPoint> pts) {
    for (auto& p : pts) p.delta = -p.delta;
    return pts;
  };
  for (auto& c : done) {
    if (c.end == CurveEnd::Axis) {
      Lep2Curve joined = c;
      auto back = mirrored(c.points);
      joined.points.insert(joined.points.end(), back.rbegin() + 1, back.rend());
      joined.end = c.start;
      out.curves.push_back(std::move(joined));
    } else if (c.start == CurveEnd::Axis) {
      Lep2Curve joined;
      auto front = mirrored(c.points);
      joined.points.assign(front.rbegin(), front.rend());
      joined.points.insert(joined.points.end(), c.points.begin() + 1, c.points.end());
      joined.start = c.end;
      joined.end = c.end;
      out.curves.push_back(std::move(joined));
    } else {
      Lep2Curve neg = c;
      neg.points = mirrored(c.points);
      out.curves.push_back(c);
      out.curves.push_back(std::move(neg));
    }
  }
  const std::size_t n_vertices = out.vertices.size();
  for (std::size_t i = 0; i < n_vertices; ++i) {
    EpPoint v = out.vertices[i];
    v.delta = -v.delta;
    out.vertices.push_back(v);
  }
  std::sort(out.vertices.begin(), out.vertices.end(), [](const EpPoint& a, const EpPoint& b) {
    return std::tie(a.eps, a.delta) < std::tie(b.eps, b.delta);
  });
  return out;
}

std::array<EpPoint, 4> lep3_closed_form(double alpha, double kappa) {
  require_model(alpha, kappa);
  if (kappa == 0.0) throw DomainError("lep3_closed_form: kappa must be positive");
  const auto c = model::subspace_constants(alpha);
  const double p = c.p, p2 = c.p_squared, p4 = p2 * p2;
  // 1 - p^2 = p (p^-1 - p), free of cancellation
  const double one_minus_p2 = p * c.pj_minus[1];
  if (c.saturated || !(one_minus_p2 > 0.0)) {
    throw NumericError("lep3_closed_form: 1 - p^2 underflows at alpha = " + std::to_string(alpha) +
                       "; the LEP3 detuning diverges");
  }
  const double eps = std::sqrt(6.0) * kappa / 18.0 * alpha * std::pow(p4 + 1.0, 1.5) /
                     (p * (p2 + 1.0) * (p2 + 1.0));
  const double delta = std::sqrt(3.0) * kappa / 18.0 * std::pow(p4 + 6.0 * p2 + 1.0, 1.5) /
                       (one_minus_p2 * (p2 + 1.0) * (p2 + 1.0));
  if (!std::isfinite(eps) || !std::isfinite(delta)) {
    throw NumericError("lep3_closed_form: overflow");
  }
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};
  return {classify_point(base, eps, delta), classify_point(base, eps, -delta),
          classify_point(base, -eps, delta), classify_point(base, -eps, -delta)};
}

EpPoint lep3_numeric(double alpha, double kappa, double eps_seed, double delta_seed,
                     NewtonTrace* trace) {
  require_model(alpha, kappa);
  if (kappa == 0.0) throw DomainError("lep3_numeric: kappa must be positive");
  if (!std::isfinite(eps_seed) || !std::isfinite(delta_seed)) {
    throw DomainError("lep3_numeric: seed must be finite");
  }
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};
  const auto sc = residual_scales(alpha, kappa);
  auto residual = [&](double e, double d) {
    const auto inv = catspace::cubic_invariants(base.at(e, d));
    return Eigen::Vector2d(inv.q / sc.q, inv.m / sc.m);
  };
  const double ref = kappa * alpha * alpha;

  Eigen::Vector2d x(eps_seed, delta_seed);
  Eigen::Vector2d f = residual(x(0), x(1));
  std::ostringstream log;
  for (int it = 0; it < 100; ++it) {
    if (trace) trace->history.push_back({x(0), x(1), f.norm()});
    log << "  it " << it << ": eps=" << x(0) << " delta=" << x(1) << " |F|=" << f.norm() << "\n";
    Eigen::Matrix2d j;
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6 * std::max(std::abs(x(k)), 1e-3 * ref);
      Eigen::Vector2d xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      j.col(k) = (residual(xp(0), xp(1)) - residual(xm(0), xm(1))) / (2.0 * h);
    }
    const double jn = j.cwiseAbs().maxCoeff();
    if (!(std::abs(j.determinant()) > 1e-12 * jn * jn)) {
      throw NumericError("lep3_numeric: singular Jacobian at eps=" + std::to_string(x(0)) +
                         ", delta=" + std::to_string(x(1)) + "\n" + log.str());
    }
    const Eigen::Vector2d step = j.partialPivLu().solve(-f);
    x += step;
    f = residual(x(0), x(1));
    if (trace) trace->iterations = it + 1;
    const bool small_step = std::abs(step(0)) <= 1e-13 * std::abs(x(0)) &&
                            std::abs(step(1)) <= 1e-13 * std::abs(x(1));
    if (!f.allFinite()) break;
    if (f.norm() == 0.0 || (f.norm() < 1e-12 && small_step)) {
      if (trace) trace->history.push_back({x(0), x(1), f.norm()});
      return classify_point(base, x(0), x(1));
    }
  }
  throw NumericError("lep3_numeric: no convergence in 100 iterations\n" + log.str());
}

std::string to_string(CurveEnd e) {
  switch (e) {
    case CurveEnd::Range: return "range";
    case CurveEnd::Axis: return "axis";
    case CurveEnd::Lep3: return "lep3";
    case CurveEnd::Fold: return "fold";
  }
  return "unknown";
}

}  // namespace kerrcat::exceptional
