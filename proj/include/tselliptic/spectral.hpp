#pragma once

// Eigenpairs of the 1D Dirichlet operator by two independent routes:
//  * the matrix route: similarity to a symmetric tridiagonal matrix and an
//    implicit QL eigensolver;
//  * the shooting route: exact propagation of y(a) = 0, y^nabla = 1 across
//    the time scale and root finding in lambda (no mesh at all).
// Plus tensor-product spectra, eigenfunction expansion, and lower bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tselliptic/dirichlet_operator.hpp"
#include "tselliptic/error.hpp"
#include "tselliptic/product_grid.hpp"
#include "tselliptic/timescale.hpp"

namespace tselliptic {

struct SymmetricTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[k] = S(k, k+1)

  std::size_t size() const noexcept { return diag.size(); }

  /// Max absolute row sum.
  double norm_inf() const {
    double m = 0.0;
    for (std::size_t k = 0; k < diag.size(); ++k) {
      double r = std::abs(diag[k]);
      if (k > 0) r += std::abs(off[k - 1]);
      if (k + 1 < diag.size()) r += std::abs(off[k]);
      m = std::max(m, r);
    }
    return m;
  }
};

/// S = W^{1/2} A W^{-1/2} with W = diag(w); same eigenvalues as A.
inline SymmetricTridiagonal symmetrize(const DirichletOperator1D& op) {
  const std::size_t n = op.size();
  SymmetricTridiagonal s{op.diag, std::vector<double>(n > 0 ? n - 1 : 0)};
  for (std::size_t k = 0; k + 1 < n; ++k)
    s.off[k] = op.sup[k] * std::sqrt(op.weight[k] / op.weight[k + 1]);
  return s;
}

struct EigenDecomposition {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]; empty if not requested
};

/// Implicit QL with Wilkinson-type shifts (the classical tql2 scheme).
inline EigenDecomposition eigen_symmetric_tridiagonal(const SymmetricTridiagonal& s, bool want_vectors = true) {
  const std::size_t n = s.size();
  std::vector<double> d = s.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) e[k] = s.off[k];

  std::vector<std::vector<double>> z;
  if (want_vectors) {
    z.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) z[k][k] = 1.0;  // z[col][row]
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 60;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_iter) throw NumericError("tridiagonal QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double sn = 1.0, c = 1.0, p = 0.0;
        bool deflated = false;
        for (std::size_t i = m; i-- > l;) {
          double f = sn * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            deflated = true;
            break;
          }
          sn = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * sn + 2.0 * c * b;
          p = sn * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (want_vectors) {
            double* zi = z[i].data();
            double* zi1 = z[i + 1].data();
            for (std::size_t k = 0; k < n; ++k) {
              f = zi1[k];
              zi1[k] = sn * zi[k] + c * f;
              zi[k] = c * zi[k] - sn * f;
            }
          }
        }
        if (deflated) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  EigenDecomposition out;
  out.values.reserve(n);
  for (auto k : order) out.values.push_back(d[k]);
  if (want_vectors) {
    out.vectors.reserve(n);
    for (auto k : order) out.vectors.push_back(std::move(z[k]));
  }
  return out;
}

namespace detail {

/// Solves a general tridiagonal system by Gaussian elimination with partial
/// pivoting. dl[k] = M(k+1,k), d[k] = M(k,k), du[k] = M(k,k+1).
inline std::vector<double> tridiagonal_solve_pivoting(std::vector<double> dl, std::vector<double> d,
                                                      std::vector<double> du, std::vector<double> b,
                                                      double tiny) {
  const std::size_t n = d.size();
  dl.resize(n, 0.0);
  du.resize(n, 0.0);
  // Row swaps create a second superdiagonal.
  std::vector<double> du2(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(dl[k]) > std::abs(d[k])) {
      std::swap(d[k], dl[k]);
      std::swap(du[k], d[k + 1]);
      du2[k] = du[k + 1];
      du[k + 1] = 0.0;
      std::swap(b[k], b[k + 1]);
    }
    if (d[k] == 0.0) d[k] = tiny;
    const double m = dl[k] / d[k];
    d[k + 1] -= m * du[k];
    du[k + 1] -= m * du2[k];
    b[k + 1] -= m * b[k];
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double v = b[k];
    if (k + 1 < n) v -= du[k] * x[k + 1];
    if (k + 2 < n) v -= du2[k] * x[k + 2];
    x[k] = v / d[k];
  }
  return x;
}

/// Solves (S - shift I) x = b.
inline std::vector<double> shifted_tridiagonal_solve(const SymmetricTridiagonal& s, double shift,
                                                     std::vector<double> b) {
  std::vector<double> d(s.diag);
  for (double& x : d) x -= shift;
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, s.norm_inf());
  return tridiagonal_solve_pivoting(s.off, std::move(d), s.off, std::move(b), tiny);
}

inline void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

/// Eigenvectors for the listed (simple) eigenvalues by inverse iteration,
/// orthogonalized against each other.
inline std::vector<std::vector<double>> inverse_iteration(const SymmetricTridiagonal& s,
                                                          const std::vector<double>& values) {
  const std::size_t n = s.size();
  const double scale = std::max(1.0, s.norm_inf());
  std::vector<std::vector<double>> out;
  out.reserve(values.size());
  for (double lambda : values) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = 1.0 + 0.1 * std::sin(1.0 + 3.7 * static_cast<double>(k));
    const double shift = lambda + 1e3 * std::numeric_limits<double>::epsilon() * scale;
    for (int it = 0; it < 4; ++it) {
      x = shifted_tridiagonal_solve(s, shift, std::move(x));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : out) {
          const double c = std::inner_product(q.begin(), q.end(), x.begin(), 0.0);
          for (std::size_t k = 0; k < n; ++k) x[k] -= c * q[k];
        }
      }
      normalize(x);
    }
    out.push_back(std::move(x));
  }
  return out;
}

/// First component above noise level made positive.
inline void fix_sign(std::vector<double>& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  for (double x : v) {
    if (std::abs(x) > 1e-10 * mx) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

}  // namespace detail

/// Eigenvalues and weight-orthonormal eigenfunctions of the 1D operator.
struct Spectrum1D {
  GridPtr grid;
  std::vector<double> eigenvalues;
  std::vector<GridFunction> eigenfunctions;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  /// True when every interior mode is present.
  bool complete() const { return grid && eigenvalues.size() == grid->interior_size(); }
};

/// First `count` eigenpairs (all when absent). Small or complete requests
/// use the full QL decomposition; partial requests on large grids use QL
/// eigenvalues plus inverse iteration.
inline Spectrum1D spectrum_1d(GridPtr grid, std::optional<std::size_t> count = std::nullopt) {
  const DirichletOperator1D op = assemble(grid);
  const SymmetricTridiagonal s = symmetrize(op);
  const std::size_t n = s.size();
  const std::size_t k = std::min(count.value_or(n), n);
  if (k == 0) throw PreconditionError("requested zero eigenpairs");

  EigenDecomposition ed;
  if (k == n || n <= 400) {
    ed = eigen_symmetric_tridiagonal(s, true);
  } else {
    ed = eigen_symmetric_tridiagonal(s, false);
    ed.values.resize(k);
    ed.vectors = detail::inverse_iteration(s, ed.values);
  }

  Spectrum1D out{grid, {}, {}};
  out.eigenvalues.assign(ed.values.begin(), ed.values.begin() + static_cast<std::ptrdiff_t>(k));
  out.eigenfunctions.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& v = ed.vectors[j];
    detail::fix_sign(v);
    GridFunction phi = GridFunction::zeros(grid);
    for (std::size_t i = 0; i < n; ++i) phi[i + 1] = v[i] / std::sqrt(op.weight[i]);
    const double nrm = weighted_norm(phi);
    for (double& x : phi.values) x /= nrm;
    out.eigenfunctions.push_back(std::move(phi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shooting

namespace detail {

/// cos(sqrt(lambda) tau) and sin(sqrt(lambda) tau)/sqrt(lambda), with the
/// hyperbolic continuation for lambda < 0 and a series near lambda = 0.
inline void interval_propagator(double lambda, double tau, double& c, double& s_over) {
  if (std::abs(lambda) < 1e-8) {
    const double z = lambda * tau * tau;
    c = 1.0 - z / 2.0 + z * z / 24.0;
    s_over = tau * (1.0 - z / 6.0 + z * z / 120.0);
  } else if (lambda > 0.0) {
    const double w = std::sqrt(lambda);
    c = std::cos(w * tau);
    s_over = std::sin(w * tau) / w;
  } else {
    const double w = std::sqrt(-lambda);
    c = std::cosh(w * tau);
    s_over = std::sinh(w * tau) / w;
  }
}

}  // namespace detail

/// y(b; lambda) for the initial value problem y(a) = 0, y^nabla = 1 of
/// -y^{nabla Delta} = lambda y. Its zeros are exactly the eigenvalues.
inline double shoot(const TimeScale& ts, double lambda) {
  double y = 0.0, v = 1.0;  // v = y^nabla at the current point
  std::optional<double> current;
  for (const auto& seg : ts.segments()) {
    const double start = segment_lo(seg);
    if (current) {
      // scattered step from `current` to `start`
      const double mu = start - *current;
      v -= mu * lambda * y;
      y += mu * v;
    }
    if (const auto* iv = std::get_if<Interval>(&seg)) {
      double c, s_over;
      detail::interval_propagator(lambda, iv->hi - iv->lo, c, s_over);
      const double y_end = y * c + v * s_over;
      const double v_end = -lambda * y * s_over + v * c;
      y = y_end;
      v = v_end;
    }
    current = segment_hi(seg);
  }
  return y;
}

class InsufficientRootsError : public NumericError {
 public:
  InsufficientRootsError(std::size_t found, std::size_t wanted)
      : NumericError("insufficient roots: found " + std::to_string(found) + " of " + std::to_string(wanted)),
        found_(found) {}
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t found_;
};

/// First `count` eigenvalues as roots of shoot(ts, .), bracketed by a scan
/// in sqrt(lambda) and refined by bisection to relative width 1e-15.
inline std::vector<double> eigen_shooting(const TimeScale& ts, std::size_t count) {
  if (count == 0) throw PreconditionError("count must be >= 1");
  const double len = ts.length();
  const double lower = 0.5 * 4.0 / (len * len);

  // Smallest gap controls how fast the discrete recurrences can turn over.
  double min_gap = len;
  const auto& segs = ts.segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i)
    min_gap = std::min(min_gap, segment_lo(segs[i + 1]) - segment_hi(segs[i]));
  const double step = std::min(std::numbers::pi / (16.0 * len), 0.25 / min_gap);

  // Discrete scales have finitely many eigenvalues, all below a Gershgorin bound.
  std::optional<double> s_cap;
  std::size_t available = std::numeric_limits<std::size_t>::max();
  if (ts.is_discrete()) {
    std::vector<double> pts;
    for (const auto& seg : segs) pts.push_back(segment_lo(seg));
    const auto g = Grid::from_points(pts);
    available = g->interior_size();
    s_cap = std::sqrt(1.01 * symmetrize(assemble(g)).norm_inf()) + step;
  }
  constexpr std::size_t max_steps = 4'000'000;

  std::vector<double> roots;
  double s_lo = std::sqrt(lower);
  double f_lo = shoot(ts, s_lo * s_lo);
  for (std::size_t it = 0; roots.size() < count && it < max_steps; ++it) {
    if (s_cap && s_lo > *s_cap) break;
    const double s_hi = s_lo + step;
    const double f_hi = shoot(ts, s_hi * s_hi);
    if (f_lo == 0.0) {
      roots.push_back(s_lo * s_lo);
    } else if ((f_lo < 0.0) != (f_hi < 0.0) && f_hi != 0.0) {
      double lo = s_lo * s_lo, hi = s_hi * s_hi, flo = f_lo;
      for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot(ts, mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; }
        else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    s_lo = s_hi;
    f_lo = f_hi;
  }
  if (roots.size() < count) throw InsufficientRootsError(roots.size(), std::min(count, available));
  return roots;
}

// ---------------------------------------------------------------------------
// Tensor-product spectra

struct TensorEntry {
  std::vector<std::size_t> index;  // 1-based per-axis mode numbers
  double eigenvalue;
};

struct TensorSpectrum {
  std::vector<Spectrum1D> axes;
  std::vector<TensorEntry> entries;  // ascending eigenvalue, ties lexicographic
  bool short_of_request = false;     // fewer modes exist than were asked for
};

inline double tensor_eigenvalue(const std::vector<Spectrum1D>& axes, const std::vector<std::size_t>& index) {
  double s = 0.0;
  for (std::size_t d = 0; d < axes.size(); ++d) s += axes[d].eigenvalues[index[d] - 1];
  return s;
}

/// The `count` smallest sums of per-axis eigenvalues (multiplicity kept),
/// enumerated best-first over the multi-index lattice.
inline TensorSpectrum tensor_spectrum(std::vector<Spectrum1D> axes, std::size_t count) {
  if (axes.empty()) throw PreconditionError("need at least one axis");
  if (count == 0) throw PreconditionError("count must be >= 1");
  for (const auto& a : axes)
    if (a.size() == 0) throw PreconditionError("axis spectrum is empty");

  using Item = std::pair<double, std::vector<std::size_t>>;
  auto greater = [](const Item& x, const Item& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second > y.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(greater)> heap(greater);
  std::set<std::vector<std::size_t>> seen;

  std::vector<std::size_t> first(axes.size(), 1);
  heap.emplace(tensor_eigenvalue(axes, first), first);
  seen.insert(first);

  TensorSpectrum out;
  while (!heap.empty() && out.entries.size() < count) {
    auto [lambda, idx] = heap.top();
    heap.pop();
    out.entries.push_back({idx, lambda});
    for (std::size_t d = 0; d < axes.size(); ++d) {
      if (idx[d] >= axes[d].size()) continue;
      auto next = idx;
      ++next[d];
      if (seen.insert(next).second) heap.emplace(tensor_eigenvalue(axes, next), next);
    }
  }
  out.short_of_request = out.entries.size() < count;
  out.axes = std::move(axes);
  return out;
}

inline ProductGridPtr product_of(const std::vector<Spectrum1D>& axes) {
  std::vector<GridPtr> grids;
  for (const auto& a : axes) grids.push_back(a.grid);
  return make_product(std::move(grids));
}

/// u_p(x) = prod_d phi_{p_d}(x_d) on the product grid.
inline Field tensor_eigenfunction(const TensorSpectrum& spec, const TensorEntry& entry, ProductGridPtr grid = nullptr) {
  if (!grid) grid = product_of(spec.axes);
  Field out = Field::zeros(grid);
  for_each_point(*grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    double v = 1.0;
    for (std::size_t d = 0; d < grid->dim(); ++d) v *= spec.axes[d].eigenfunctions[entry.index[d] - 1][idx[d]];
    out[flat] = v;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Expansion

/// c_k = <f, phi_k>.
inline std::vector<double> expand(const Spectrum1D& spec, const GridFunction& f) {
  require_same_grid(spec.grid, f.grid);
  std::vector<double> c;
  c.reserve(spec.size());
  for (const auto& phi : spec.eigenfunctions) c.push_back(weighted_inner(f, phi));
  return c;
}

inline GridFunction reconstruct(const Spectrum1D& spec, const std::vector<double>& c) {
  if (c.size() > spec.size()) throw PreconditionError("more coefficients than eigenfunctions");
  GridFunction out = GridFunction::zeros(spec.grid);
  for (std::size_t k = 0; k < c.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[k] * spec.eigenfunctions[k][i];
  return out;
}

inline std::vector<double> expand(const TensorSpectrum& spec, const Field& f) {
  std::vector<double> c;
  c.reserve(spec.entries.size());
  for (const auto& e : spec.entries) c.push_back(inner(f, tensor_eigenfunction(spec, e, f.grid)));
  return c;
}

inline Field reconstruct(const TensorSpectrum& spec, const std::vector<double>& c, ProductGridPtr grid = nullptr) {
  if (c.size() > spec.entries.size()) throw PreconditionError("more coefficients than eigenfunctions");
  if (!grid) grid = product_of(spec.axes);
  Field out = Field::zeros(grid);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Field u = tensor_eigenfunction(spec, spec.entries[k], grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out[i] += c[k] * u[i];
  }
  return out;
}

/// sum_d 4 / (b_d - a_d)^2.
inline double lambda1_lower_bound(const std::vector<TimeScale>& axes) {
  double s = 0.0;
  for (const auto& ts : axes) s += 4.0 / (ts.length() * ts.length());
  return s;
}

}  // namespace tselliptic
