#pragma once

// Nonlinear Dirichlet problems A u + F(u) = 0 on product time scales:
// spectral A^{-1}, Picard iteration (contraction regime), continuation in
// tau for A u + tau F(u) = 0 (one-sided growth regime), and a multi-start
// enumerator for systems with at most three unknowns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tselliptic/error.hpp"
#include "tselliptic/expression.hpp"
#include "tselliptic/nonlinearity.hpp"
#include "tselliptic/product_grid.hpp"
#include "tselliptic/spectral.hpp"
#include "tselliptic/timescale.hpp"

namespace tselliptic {

// ---------------------------------------------------------------------------
// Interior vectors

/// Interior values in row-major order over the interior index box.
inline std::vector<double> interior_values(const Field& u) {
  std::vector<double> v;
  v.reserve(u.grid->interior_size());
  for_each_interior(*u.grid, [&](std::size_t flat, std::span<const std::size_t>) { v.push_back(u[flat]); });
  return v;
}

inline Field from_interior(const ProductGridPtr& grid, std::span<const double> v) {
  if (v.size() != grid->interior_size()) throw PreconditionError("interior vector length does not match grid");
  Field out = Field::zeros(grid);
  std::size_t k = 0;
  for_each_interior(*grid, [&](std::size_t flat, std::span<const std::size_t>) { out[flat] = v[k++]; });
  return out;
}

/// Norm over interior points only (boundary values ignored).
inline double interior_norm(const Field& u) {
  double s = 0.0;
  for_each_interior(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    s += u[flat] * u[flat] * u.grid->weight(idx);
  });
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Spectral inverse

/// Full per-axis eigenbases; transforms interior data axis by axis.
class TensorBasis {
 public:
  explicit TensorBasis(ProductGridPtr grid) : grid_(std::move(grid)) {
    for (std::size_t d = 0; d < grid_->dim(); ++d) {
      spectra_.push_back(spectrum_1d(grid_->axis_ptr(d)));
      shape_.push_back(grid_->extent(d) - 2);
    }
  }

  const ProductGridPtr& grid() const noexcept { return grid_; }
  const std::vector<Spectrum1D>& spectra() const noexcept { return spectra_; }
  double lambda1() const {
    double s = 0.0;
    for (const auto& sp : spectra_) s += sp.eigenvalues.front();
    return s;
  }

  /// Coefficients c_p = <f, u_p> in row-major multi-index order.
  std::vector<double> forward(const Field& f) const {
    std::vector<double> data = interior_values(f);
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      const auto& sp = spectra_[d];
      const auto& g = *sp.grid;
      apply_along(data, d, [&](std::size_t p, std::size_t i) { return sp.eigenfunctions[p][i + 1] * g.weight(i + 1); });
    }
    return data;
  }

  Field backward(const std::vector<double>& c) const {
    std::vector<double> data = c;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      const auto& sp = spectra_[d];
      apply_along(data, d, [&](std::size_t i, std::size_t p) { return sp.eigenfunctions[p][i + 1]; });
    }
    return from_interior(grid_, data);
  }

  /// lambda_p for each coefficient slot.
  std::vector<double> eigenvalues() const {
    std::vector<double> lam(1, 0.0);
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      std::vector<double> next;
      next.reserve(lam.size() * shape_[d]);
      for (double l : lam)
        for (double e : spectra_[d].eigenvalues) next.push_back(l + e);
      lam = std::move(next);
    }
    return lam;
  }

 private:
  /// out[.., r, ..] = sum_s M(r, s) data[.., s, ..] along axis d.
  template <class M>
  void apply_along(std::vector<double>& data, std::size_t d, M&& m) const {
    const std::size_t n = shape_[d];
    std::size_t inner = 1;
    for (std::size_t k = d + 1; k < shape_.size(); ++k) inner *= shape_[k];
    const std::size_t outer = data.size() / (n * inner);
    std::vector<double> mat(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s) mat[r * n + s] = m(r, s);
    std::vector<double> out(data.size(), 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * inner;
      for (std::size_t r = 0; r < n; ++r) {
        double* dst = out.data() + base + r * inner;
        for (std::size_t s = 0; s < n; ++s) {
          const double a = mat[r * n + s];
          const double* src = data.data() + base + s * inner;
          for (std::size_t q = 0; q < inner; ++q) dst[q] += a * src[q];
        }
      }
    }
    data = std::move(out);
  }

  ProductGridPtr grid_;
  std::vector<Spectrum1D> spectra_;
  std::vector<std::size_t> shape_;
};

/// A^{-1} f by diagonalization in the tensor eigenbasis.
inline Field spectral_inverse(const TensorBasis& basis, const Field& f) {
  require_same_grid(Field::zeros(basis.grid()), f);
  auto c = basis.forward(f);
  const auto lam = basis.eigenvalues();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] /= lam[k];
  return basis.backward(c);
}

// ---------------------------------------------------------------------------
// Problem and solution

struct SolverConfig {
  double step_tol = 1e-10;
  double residual_tol = 1e-8;
  std::size_t max_iter = 10000;
  std::size_t homotopy_steps = 20;
  double initial_guess = 0.0;
  bool force = false;               // iterate even when L / lambda1 >= 1
  bool accept_estimated_L = false;  // use a sampled Lipschitz estimate when L is absent
};

struct Problem {
  std::vector<TimeScale> axes;
  std::vector<MeshParams> mesh;  // one per axis, or a single entry shared by all axes
  Expression f;
  GrowthHypotheses hypotheses;
  SolverConfig config;
};

enum class SolveStatus { converged, non_contraction, max_iterations, diverged, no_real_solution_suspected };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::non_contraction: return "non_contraction";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::no_real_solution_suspected: return "no_real_solution_suspected";
  }
  return "unknown";
}

struct Solution {
  Field u;
  double residual = 0.0;
  SolveStatus status = SolveStatus::max_iterations;
  std::size_t iterations = 0;
  double contraction_ratio = 0.0;  // observed sup of successive step ratios
  double lambda1 = 0.0;
  double lambda1_lower_bound = 0.0;
  std::optional<double> lipschitz;
  bool lipschitz_is_estimate = false;
  std::optional<double> apriori_radius;
  bool non_uniqueness_risk = false;
  std::optional<double> last_good_tau;
  std::optional<bool> one_sided_sampled_ok;
  std::string message;

  bool converged() const noexcept { return status == SolveStatus::converged; }
};

/// Grid, operator and eigenbasis of a problem, built once.
class Discretization {
 public:
  explicit Discretization(const Problem& p) : Discretization(p.axes, p.mesh) {}

  Discretization(const std::vector<TimeScale>& axes, const std::vector<MeshParams>& mesh) : axes_(axes) {
    if (axes.empty() || axes.size() > 4) throw PreconditionError("problems need 1 to 4 axes");
    if (!(mesh.empty() || mesh.size() == 1 || mesh.size() == axes.size()))
      throw PreconditionError("mesh list must have one entry or one per axis");
    std::vector<GridPtr> grids;
    for (std::size_t d = 0; d < axes.size(); ++d) {
      const MeshParams m = mesh.empty() ? MeshParams{} : mesh[mesh.size() == 1 ? 0 : d];
      grids.push_back(discretize(axes[d], m));
    }
    grid_ = make_product(std::move(grids));
    op_.emplace(grid_);
  }

  const ProductGridPtr& grid() const noexcept { return grid_; }
  const LaplacianND& op() const { return *op_; }
  const std::vector<TimeScale>& axes() const noexcept { return axes_; }

  const TensorBasis& basis() const {
    if (!basis_) basis_.emplace(grid_);
    return *basis_;
  }

  /// Smallest eigenvalue of the grid operator.
  double lambda1() const {
    if (!lambda1_) {
      double s = 0.0;
      for (std::size_t d = 0; d < grid_->dim(); ++d) s += spectrum_1d(grid_->axis_ptr(d), 1).eigenvalues.front();
      lambda1_ = s;
    }
    return *lambda1_;
  }

  double lower_bound() const { return lambda1_lower_bound(axes_); }

  /// A^{-1} f: direct elimination in 1D, tensor eigenbasis otherwise.
  Field inverse(const Field& f) const {
    if (grid_->dim() == 1) {
      const auto u = tridiag_solve(op_->axis_operator(0), to_grid_function(f));
      return Field(grid_, u.values);
    }
    return spectral_inverse(basis(), f);
  }

  /// |Omega| used in the a priori bound.
  double measure() const { return std::max(grid_->volume(), grid_->interior_measure()); }

 private:
  std::vector<TimeScale> axes_;
  ProductGridPtr grid_;
  std::optional<LaplacianND> op_;
  mutable std::optional<TensorBasis> basis_;
  mutable std::optional<double> lambda1_;
};

namespace detail {
inline Field zero_boundary(Field u) {
  for_each_point(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    if (!u.grid->is_interior(idx)) u[flat] = 0.0;
  });
  return u;
}

inline Field constant_interior(const ProductGridPtr& g, double c) {
  Field u = Field::zeros(g);
  for_each_interior(*g, [&](std::size_t flat, std::span<const std::size_t>) { u[flat] = c; });
  return u;
}

/// A u + tau F(u) on interior points, zero on the boundary.
inline Field residual_field(const Discretization& disc, const Expression& f, const Field& u, double tau = 1.0) {
  Field r = disc.op().apply(u);
  const Field fu = nemytskii(f, u);
  for_each_interior(*u.grid, [&](std::size_t flat, std::span<const std::size_t>) { r[flat] += tau * fu[flat]; });
  return r;
}

/// u -> A^{-1}(-tau F(u)).
inline Field fixed_point_map(const Discretization& disc, const Expression& f, const Field& u, double tau = 1.0) {
  Field rhs = zero_boundary(nemytskii(f, u));
  for (double& v : rhs.values) v *= -tau;
  return disc.inverse(rhs);
}
}  // namespace detail

/// || A u + F(u) || over interior points, with A applied directly.
inline double residual(const Discretization& disc, const Expression& f, const Field& u) {
  return interior_norm(detail::residual_field(disc, f, u));
}

/// sqrt(C |Omega| / (lambda1 - alpha)).
inline double apriori_radius(double lambda1, double alpha, double C, double volume) {
  if (!(alpha < lambda1)) throw HypothesisError("a priori bound needs alpha < lambda1");
  if (C < 0.0) throw HypothesisError("C must be >= 0");
  return std::sqrt(C * volume / (lambda1 - alpha));
}

namespace detail {
inline Solution blank_solution(const Discretization& disc, const Problem& p) {
  Solution s;
  s.u = constant_interior(disc.grid(), p.config.initial_guess);
  s.lambda1 = disc.lambda1();
  s.lambda1_lower_bound = disc.lower_bound();
  return s;
}

inline void resolve_lipschitz(const Discretization& disc, const Problem& p, Solution& s, bool required) {
  if (p.hypotheses.L) {
    s.lipschitz = *p.hypotheses.L;
    return;
  }
  if (required && !p.config.accept_estimated_L)
    throw HypothesisError("Lipschitz constant L is required (or accept the sampled estimate explicitly)");
  const double span = std::max(10.0, 2.0 * std::abs(p.config.initial_guess));
  s.lipschitz = estimate_lipschitz(p.f, *disc.grid(), -span, span, 201).value;
  s.lipschitz_is_estimate = true;
}
}  // namespace detail

/// Fixed-point iteration u <- A^{-1}(-F(u)).
inline Solution picard_solve(const Discretization& disc, const Problem& p) {
  p.hypotheses.validate();
  Solution s = detail::blank_solution(disc, p);
  detail::resolve_lipschitz(disc, p, s, true);
  const double q = *s.lipschitz / s.lambda1;
  // lambda1 carries eigensolver round-off; L = lambda1 must still count as resonant.
  const bool resonant = q >= 1.0 - 1e-12;
  s.non_uniqueness_risk = resonant;
  if (resonant && !p.config.force) {
    s.status = SolveStatus::non_contraction;
    s.residual = residual(disc, p.f, s.u);
    s.message = "L / lambda1 = " + detail::format_number(q) + " >= 1; no contraction guarantee";
    return s;
  }

  const auto& cfg = p.config;
  double prev_step = -1.0, first_step = -1.0;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    Field next = detail::fixed_point_map(disc, p.f, s.u);
    const double step = interior_norm(next - s.u);
    const double unorm = interior_norm(next);
    if (prev_step > 1e-13 * (1.0 + unorm)) s.contraction_ratio = std::max(s.contraction_ratio, step / prev_step);
    if (first_step < 0.0) first_step = step;
    s.u = std::move(next);
    s.iterations = it;
    if (!std::isfinite(step) || (first_step > 0.0 && step > 1e6 * first_step)) {
      s.status = SolveStatus::diverged;
      s.residual = std::numeric_limits<double>::infinity();
      s.message = "step norm grew by more than 1e6";
      return s;
    }
    const Field r = detail::residual_field(disc, p.f, s.u);
    s.residual = interior_norm(r);
    const double scale = 1.0 + interior_norm(nemytskii(p.f, s.u));
    const bool small_step = step <= cfg.step_tol * (1.0 + unorm);
    const bool roundoff = s.residual <= 1e-13 * scale;
    if (s.residual <= cfg.residual_tol && (small_step || roundoff)) {
      s.status = SolveStatus::converged;
      return s;
    }
    prev_step = step;
  }
  s.status = SolveStatus::max_iterations;
  return s;
}

// ---------------------------------------------------------------------------
// Continuation

namespace detail {

inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (a[piv * n + k] == 0.0) throw NumericError("singular Jacobian");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] / a[k * n + k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double v = b[k];
    for (std::size_t j = k + 1; j < n; ++j) v -= a[k * n + j] * x[j];
    x[k] = v / a[k * n + k];
  }
  return x;
}

inline constexpr std::size_t dense_newton_limit = 1200;

/// Row-major matrix of A on the interior unknowns.
inline std::vector<double> dense_operator(const Discretization& disc) {
  const auto& grid = *disc.grid();
  const std::size_t n = grid.interior_size();
  std::vector<double> a(n * n, 0.0);
  std::vector<std::size_t> shape(grid.dim()), stride(grid.dim());
  for (std::size_t d = 0; d < grid.dim(); ++d) shape[d] = grid.extent(d) - 2;
  std::size_t s = 1;
  for (std::size_t d = grid.dim(); d-- > 0;) {
    stride[d] = s;
    s *= shape[d];
  }
  std::vector<std::size_t> idx(grid.dim());
  for (std::size_t row = 0; row < n; ++row) {
    std::size_t r = row;
    for (std::size_t d = 0; d < grid.dim(); ++d) {
      idx[d] = r / stride[d];
      r %= stride[d];
    }
    for (std::size_t d = 0; d < grid.dim(); ++d) {
      const auto& op = disc.op().axis_operator(d);
      a[row * n + row] += op.diag[idx[d]];
      if (idx[d] > 0) a[row * n + row - stride[d]] = op.sub[idx[d]];
      if (idx[d] + 1 < shape[d]) a[row * n + row + stride[d]] = op.sup[idx[d]];
    }
  }
  return a;
}

/// df/du at every interior point, central differences.
inline std::vector<double> derivative_u(const Expression& f, const Field& u) {
  std::vector<double> out;
  out.reserve(u.grid->interior_size());
  for_each_interior(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    const auto x = u.grid->coordinates(idx);
    const double h = 1e-6 * std::max(1.0, std::abs(u[flat]));
    out.push_back((f.eval(x, u[flat] + h) - f.eval(x, u[flat] - h)) / (2.0 * h));
  });
  return out;
}

/// Solves (A + diag(jd)) delta = rhs on interior vectors; nullopt when too large.
inline std::optional<std::vector<double>> newton_step(const Discretization& disc, const std::vector<double>& jd,
                                                      const std::vector<double>& rhs) {
  const auto& grid = *disc.grid();
  const std::size_t n = rhs.size();
  if (grid.dim() == 1) {
    const auto& op = disc.op().axis_operator(0);
    std::vector<double> dl(n, 0.0), d(n), du(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = op.diag[k] + jd[k];
      if (k + 1 < n) {
        du[k] = op.sup[k];
        dl[k] = op.sub[k + 1];
      }
    }
    return tridiagonal_solve_pivoting(std::move(dl), std::move(d), std::move(du), rhs, 1e-300);
  }
  if (n > dense_newton_limit) return std::nullopt;
  std::vector<double> a = dense_operator(disc);
  for (std::size_t k = 0; k < n; ++k) a[k * n + k] += jd[k];
  return dense_solve(std::move(a), rhs);
}

}  // namespace detail

/// Continuation in tau = j/J for A u + tau F(u) = 0 with a damped
/// fixed-point corrector and a Newton fallback.
inline Solution homotopy_solve(const Discretization& disc, const Problem& p) {
  p.hypotheses.validate();
  if (!p.hypotheses.alpha || !p.hypotheses.C) throw HypothesisError("homotopy needs the one-sided pair alpha, C");
  Solution s = detail::blank_solution(disc, p);
  const double alpha = *p.hypotheses.alpha, C = *p.hypotheses.C;
  const double R = apriori_radius(s.lambda1, alpha, C, disc.measure());
  s.apriori_radius = R;
  detail::resolve_lipschitz(disc, p, s, false);
  s.non_uniqueness_risk = !s.lipschitz || *s.lipschitz >= s.lambda1 * (1.0 - 1e-12);
  {
    const double span = std::max(10.0, 2.0 * R);
    s.one_sided_sampled_ok = check_one_sided(p.f, *disc.grid(), alpha, C, -span, span, 201).pass;
  }
  const auto& cfg = p.config;
  const std::size_t J = std::max<std::size_t>(1, cfg.homotopy_steps);
  const std::size_t budget = std::max<std::size_t>(50, cfg.max_iter / J);
  const double bound2 = 1.1 * R * R + 1e-14;

  Field u = s.u;
  for (std::size_t j = 1; j <= J; ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(J);
    bool ok = false;
    double res = interior_norm(detail::residual_field(disc, p.f, u, tau));
    // damped fixed point
    double theta = 1.0;
    for (std::size_t it = 0; it < budget && !ok; ++it) {
      if (res <= cfg.residual_tol) {
        ok = true;
        break;
      }
      const Field g = detail::fixed_point_map(disc, p.f, u, tau);
      Field trial = u + theta * (g - u);
      const double tr = interior_norm(detail::residual_field(disc, p.f, trial, tau));
      ++s.iterations;
      if (!std::isfinite(tr)) break;
      if (tr < res) {
        u = std::move(trial);
        res = tr;
        theta = std::min(1.0, 2.0 * theta);
      } else {
        theta *= 0.5;
        if (theta < 1e-4) break;
      }
    }
    // Newton fallback
    for (std::size_t it = 0; it < 100 && !ok; ++it) {
      if (res <= cfg.residual_tol) {
        ok = true;
        break;
      }
      auto jd = detail::derivative_u(p.f, u);
      for (double& v : jd) v *= tau;
      auto rvec = interior_values(detail::residual_field(disc, p.f, u, tau));
      for (double& v : rvec) v = -v;
      std::optional<std::vector<double>> delta;
      try {
        delta = detail::newton_step(disc, jd, rvec);
      } catch (const NumericError&) {
        break;
      }
      if (!delta) break;
      const Field du = from_interior(disc.grid(), *delta);
      double step = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
        Field trial = u + step * du;
        const double tr = interior_norm(detail::residual_field(disc, p.f, trial, tau));
        if (std::isfinite(tr) && tr < res) {
          u = std::move(trial);
          res = tr;
          improved = true;
          break;
        }
      }
      ++s.iterations;
      if (!improved) break;
    }
    if (ok) {
      const double n = interior_norm(u);
      if (n * n > bound2) {
        s.message = "corrector result at tau = " + detail::format_number(tau) + " violates the a priori bound";
        ok = false;
      }
    }
    if (!ok) {
      s.status = SolveStatus::max_iterations;
      s.u = u;
      s.residual = residual(disc, p.f, s.u);
      if (s.message.empty()) s.message = "corrector failed at tau = " + detail::format_number(tau);
      return s;
    }
    s.last_good_tau = tau;
  }
  s.u = u;
  s.residual = residual(disc, p.f, s.u);
  s.status = s.residual <= cfg.residual_tol ? SolveStatus::converged : SolveStatus::max_iterations;
  if (s.non_uniqueness_risk) s.message = "existence only; L >= lambda1 or unknown, so the solution may not be unique";
  return s;
}

// ---------------------------------------------------------------------------
// Enumeration for tiny systems

struct Enumeration {
  std::vector<Solution> solutions;
  std::vector<std::vector<double>> candidates;  // distinct Newton end points (interior vectors)
  SolveStatus status = SolveStatus::no_real_solution_suspected;
  std::size_t starts = 0;
};

/// Multi-start Newton over [-box, box]^d for d <= 3 interior unknowns.
inline Enumeration enumerate_small(const Discretization& disc, const Problem& p, double box, std::size_t density) {
  const auto& grid = disc.grid();
  const std::size_t d = grid->interior_size();
  if (d > 3) throw PreconditionError("enumeration supports at most 3 interior unknowns");
  if (density < 1) throw PreconditionError("density must be >= 1");
  if (!(box > 0.0)) throw PreconditionError("box must be positive");

  // The algebraic system G(v) = A v + f(x, v) on interior unknowns.
  const std::vector<double> a = detail::dense_operator(disc);
  std::vector<std::vector<double>> coords;
  for_each_interior(*grid, [&](std::size_t, std::span<const std::size_t> idx) { coords.push_back(grid->coordinates(idx)); });
  const auto system = [&](const double* v, double* g) {
    for (std::size_t r = 0; r < d; ++r) {
      double s = p.f.eval(coords[r], v[r]);
      for (std::size_t c = 0; c < d; ++c) s += a[r * d + c] * v[c];
      g[r] = s;
    }
  };
  const auto inf_norm = [&](const double* v) {
    double m = 0.0;
    for (std::size_t k = 0; k < d; ++k) m = std::max(m, std::abs(v[k]));
    return m;
  };

  Enumeration out;
  std::vector<std::vector<double>> roots;
  std::set<std::vector<double>> seen;  // candidates rounded to 1e-6
  constexpr std::size_t candidate_cap = 20000;

  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= density;
  double x[3], g[3], gp[3], gm[3], jac[9], rhs[3];
  for (std::size_t start = 0; start < total; ++start) {
    std::size_t r = start;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t i = r % density;
      r /= density;
      x[k] = density == 1 ? 0.0 : -box + 2.0 * box * static_cast<double>(i) / static_cast<double>(density - 1);
    }
    ++out.starts;
    bool converged = false;
    try {
      system(x, g);
      for (int it = 0; it < 60; ++it) {
        if (inf_norm(g) <= 1e-12 * (1.0 + inf_norm(x))) {
          converged = true;
          break;
        }
        for (std::size_t c = 0; c < d; ++c) {
          const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
          const double keep = x[c];
          x[c] = keep + h;
          system(x, gp);
          x[c] = keep - h;
          system(x, gm);
          x[c] = keep;
          for (std::size_t rr = 0; rr < d; ++rr) jac[rr * d + c] = (gp[rr] - gm[rr]) / (2.0 * h);
        }
        for (std::size_t k = 0; k < d; ++k) rhs[k] = -g[k];
        std::vector<double> delta;
        try {
          delta = detail::dense_solve(std::vector<double>(jac, jac + d * d), std::vector<double>(rhs, rhs + d));
        } catch (const NumericError&) {
          break;
        }
        for (std::size_t k = 0; k < d; ++k) x[k] += delta[k];
        if (!std::isfinite(inf_norm(x)) || inf_norm(x) > 1e3 * box) break;
        system(x, g);
      }
    } catch (const EvaluationError&) {
      continue;
    }
    if (!std::isfinite(inf_norm(x))) continue;
    if (seen.size() < candidate_cap) {
      std::vector<double> key(d);
      for (std::size_t k = 0; k < d; ++k) key[k] = std::round(x[k] * 1e6) / 1e6;
      if (seen.insert(key).second) out.candidates.emplace_back(x, x + d);
    }
    if (converged && inf_norm(x) <= box) {
      bool fresh = true;
      for (const auto& w : roots) {
        double diff = 0.0;
        for (std::size_t k = 0; k < d; ++k) diff = std::max(diff, std::abs(x[k] - w[k]));
        if (diff <= 1e-6) fresh = false;
      }
      if (fresh) roots.emplace_back(x, x + d);
    }
  }

  std::sort(roots.begin(), roots.end());
  for (const auto& rt : roots) {
    Solution s;
    s.u = from_interior(grid, rt);
    s.residual = residual(disc, p.f, s.u);
    s.status = SolveStatus::converged;
    s.lambda1 = disc.lambda1();
    s.lambda1_lower_bound = disc.lower_bound();
    out.solutions.push_back(std::move(s));
  }
  out.status = out.solutions.empty() ? SolveStatus::no_real_solution_suspected : SolveStatus::converged;
  return out;
}

}  // namespace tselliptic
