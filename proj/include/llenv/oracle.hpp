#pragma once

// Brute-force 1-D numerical oracles: grid Moreau envelopes, nested
// Lasry-Lions envelopes, discrete Legendre-Fenchel transforms and central
// finite differences.  These are deliberately independent of the closed
// forms in functions.hpp; they exist to validate them.
//
// Full-grid envelopes are computed with the linear-time lower-envelope
// (distance transform) recursion and the conjugate with the convex-hull
// sweep; both return exactly the same grid minima/maxima as the quadratic
// scan, which is kept as the point-query reference.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace llenv {

// Indicators are sampled with a large finite sentinel instead of +inf so
// that min/max arithmetic on grids stays finite.
inline constexpr double kInfSentinel = 1e12;

struct Grid1D {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return lo + static_cast<double>(i) * step; }

  static std::size_t point_count(double lo, double hi, double step) {
    if (!(hi > lo) || !(step > 0.0))
      throw std::invalid_argument("Grid1D: need hi > lo and step > 0");
    return static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
  }

  // Axis with all values zero.
  static Grid1D axis(double lo, double hi, double step) {
    Grid1D g;
    g.lo = lo;
    g.hi = hi;
    g.step = step;
    g.values.assign(point_count(lo, hi, step), 0.0);
    return g;
  }

  // Sample fn on the axis, replacing non-finite values by the sentinel.
  static Grid1D sample(double lo, double hi, double step,
                       const std::function<double(double)>& fn) {
    Grid1D g = axis(lo, hi, step);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = fn(g.x(i));
      g.values[i] = std::isfinite(v) && v < kInfSentinel ? v : kInfSentinel;
    }
    return g;
  }

  // Linear interpolation; x must lie within [lo, x(n-1)].
  double value_at(double x) const {
    if (values.empty()) throw std::invalid_argument("Grid1D: empty grid");
    const double last = this->x(size() - 1);
    if (x < lo - 1e-12 || x > last + 1e-12)
      throw std::invalid_argument("Grid1D::value_at: x outside grid");
    if (x <= lo) return values.front();
    if (x >= last) return values.back();
    const double t = (x - lo) / step;
    const std::size_t i = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(i);
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
  }
};

namespace detail {

inline void require_nonempty(const Grid1D& g, const char* op) {
  if (g.values.empty())
    throw std::invalid_argument(std::string(op) + ": empty grid");
}

// out[i] = min_j (vals[j] + Q (i-j)^2) for Q > 0, the lower envelope of
// congruent parabolas, in one pass over the stack of active parabolas.
inline std::vector<double> parabola_min_envelope(const std::vector<double>& vals,
                                                 double Q) {
  const std::size_t n = vals.size();
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = vals[0];
    return out;
  }
  std::vector<std::size_t> root(n);
  std::vector<double> cut(n + 1);
  std::size_t k = 0;
  root[0] = 0;
  cut[0] = -std::numeric_limits<double>::infinity();
  cut[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const std::size_t p = root[k];
      const double fq = static_cast<double>(q), fp = static_cast<double>(p);
      s = ((vals[q] + Q * fq * fq) - (vals[p] + Q * fp * fp)) /
          (2.0 * Q * (fq - fp));
      if (s <= cut[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    root[k] = q;
    cut[k] = s;
    cut[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = static_cast<double>(i);
    while (cut[k + 1] < fi) ++k;
    const double d = fi - static_cast<double>(root[k]);
    out[i] = vals[root[k]] + Q * d * d;
  }
  return out;
}

}  // namespace detail

// Moreau envelope of the sampled function at a single point:
//   min_j  g[j] + (w_j - x)^2 / (2 lambda).
// Quadratic-scan reference; the full-grid version below returns the same
// minima via the envelope recursion.
inline double grid_moreau_at(const Grid1D& g, double lambda, double x) {
  detail::require_nonempty(g, "grid_moreau_at");
  if (!(lambda > 0.0))
    throw std::invalid_argument("grid_moreau_at: lambda must be positive");
  double best = std::numeric_limits<double>::infinity();
  const double inv = 1.0 / (2.0 * lambda);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double d = g.x(j) - x;
    const double v = g.values[j] + d * d * inv;
    if (v < best) best = v;
  }
  return best;
}

inline Grid1D grid_moreau(const Grid1D& g, double lambda) {
  detail::require_nonempty(g, "grid_moreau");
  if (!(lambda > 0.0))
    throw std::invalid_argument("grid_moreau: lambda must be positive");
  Grid1D out = g;
  out.values = detail::parabola_min_envelope(
      g.values, g.step * g.step / (2.0 * lambda));
  return out;
}

// Upper counterpart: out[i] = max_j (m[j] - (w_j - x_i)^2 / (2 mu)), the
// sup pass of the double envelope applied to a Moreau grid.
inline Grid1D grid_sup_envelope(const Grid1D& m, double mu) {
  detail::require_nonempty(m, "grid_sup_envelope");
  if (!(mu > 0.0))
    throw std::invalid_argument("grid_sup_envelope: mu must be positive");
  std::vector<double> neg(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) neg[i] = -m.values[i];
  Grid1D out = m;
  out.values =
      detail::parabola_min_envelope(neg, m.step * m.step / (2.0 * mu));
  for (auto& v : out.values) v = -v;
  return out;
}

// Point-query counterpart of grid_sup_envelope.
inline double grid_ll_at(const Grid1D& moreau, double mu, double x) {
  detail::require_nonempty(moreau, "grid_ll_at");
  if (!(mu > 0.0)) throw std::invalid_argument("grid_ll_at: mu must be positive");
  double best = -std::numeric_limits<double>::infinity();
  const double inv = 1.0 / (2.0 * mu);
  for (std::size_t j = 0; j < moreau.size(); ++j) {
    const double d = moreau.x(j) - x;
    const double v = moreau.values[j] - d * d * inv;
    if (v > best) best = v;
  }
  return best;
}

// Nested envelope: Moreau pass at lambda followed by the sup pass at mu.
inline Grid1D grid_ll(const Grid1D& g, double lambda, double mu) {
  detail::require_nonempty(g, "grid_ll");
  if (!(mu > 0.0 && mu < lambda))
    throw std::invalid_argument("grid_ll: need 0 < mu < lambda");
  return grid_sup_envelope(grid_moreau(g, lambda), mu);
}

// Discrete Legendre-Fenchel transform: out[k] = max_j (s_k w_j - g[j]),
// computed as the upper envelope of lines swept over the slope axis.
inline Grid1D grid_conjugate(const Grid1D& g, const Grid1D& slopes) {
  detail::require_nonempty(g, "grid_conjugate");
  detail::require_nonempty(slopes, "grid_conjugate(slopes)");
  const std::size_t n = g.size();
  // Line j: s -> s * w_j - g_j, slopes w_j strictly increasing.  A line is
  // dropped when it falls below the envelope of its neighbours everywhere.
  std::vector<std::size_t> hull;
  hull.reserve(n);
  auto meet = [&](std::size_t a, std::size_t b) {
    // Slope where line b catches line a (w_a < w_b).
    return (g.values[b] - g.values[a]) / (g.x(b) - g.x(a));
  };
  for (std::size_t j = 0; j < n; ++j) {
    while (hull.size() >= 2 &&
           meet(hull[hull.size() - 2], j) <= meet(hull[hull.size() - 2], hull.back()))
      hull.pop_back();
    hull.push_back(j);
  }
  Grid1D out = Grid1D::axis(slopes.lo, slopes.hi, slopes.step);
  std::size_t k = 0;
  auto line_val = [&](std::size_t j, double s) { return s * g.x(j) - g.values[j]; };
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = out.x(i);
    while (k + 1 < hull.size() && line_val(hull[k + 1], s) >= line_val(hull[k], s))
      ++k;
    out.values[i] = line_val(hull[k], s);
  }
  return out;
}

// Central finite difference (fn(x+h) - fn(x-h)) / (2h).
inline double finite_diff_grad(const std::function<double(double)>& fn,
                               double x, double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("finite_diff_grad: step must be positive");
  const double fp = fn(x + step);
  const double fm = fn(x - step);
  if (!std::isfinite(fp) || !std::isfinite(fm))
    throw std::runtime_error("finite_diff_grad: non-finite function value");
  return (fp - fm) / (2.0 * step);
}

// Default validation grid.  The dyadic step keeps every grid point exactly
// representable, so sampled indicators hit their support points {0,1}
// exactly; the fine resolution keeps the first-order error of kink
// maximizers well below the 1e-4 comparison tolerances.
inline constexpr double kOracleLo = -5.0;
inline constexpr double kOracleHi = 6.0;
inline constexpr double kOracleStep = 0.0000152587890625;  // 2^-16

}  // namespace llenv
