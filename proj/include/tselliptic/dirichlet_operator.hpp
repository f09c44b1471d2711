#pragma once

// The one-dimensional Dirichlet operator A y = -y^{nabla Delta} on a grid,
// the weighted inner product it is self-adjoint in, and two exact inverses
// (Green's-function quadrature and direct tridiagonal elimination).

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tselliptic/error.hpp"
#include "tselliptic/timescale.hpp"

namespace tselliptic {

/// Tridiagonal action of A on interior points. Entry k refers to grid
/// point i = k + 1; sub[0] and sup[n-1] couple to the (zero) endpoints.
///
/// Row i: (Au)_i = -[(u_{i+1}-u_i)/mu_i - (u_i-u_{i-1})/nu_i] / w_i, so
/// diag(w) A is the symmetric stiffness matrix with entries 1/mu_i + 1/nu_i
/// and -1/mu_i.
struct DirichletOperator1D {
  GridPtr grid;
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> sup;
  std::vector<double> weight;

  std::size_t size() const noexcept { return diag.size(); }
};

inline DirichletOperator1D assemble(GridPtr grid) {
  if (!grid || grid->size() < 3) throw DomainError("empty interior");
  const auto& g = *grid;
  const std::size_t n = g.interior_size();
  DirichletOperator1D op{grid, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                         std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k + 1;
    const double mu = g.mu(i), nu = g.nu(i), w = g.weight(i);
    op.weight[k] = w;
    op.diag[k] = (1.0 / mu + 1.0 / nu) / w;
    op.sup[k] = -1.0 / (mu * w);
    op.sub[k] = -1.0 / (nu * w);
  }
  return op;
}

inline void require_dirichlet(const GridFunction& u, double tol = 1e-12) {
  if (std::abs(u.values.front()) > tol || std::abs(u.values.back()) > tol)
    throw PreconditionError("grid function must vanish at both endpoints");
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!same_grid(a, b)) throw PreconditionError("grid mismatch");
}

/// A u at interior points; zeros at the endpoints.
inline GridFunction apply(const DirichletOperator1D& op, const GridFunction& u) {
  require_same_grid(op.grid, u.grid);
  require_dirichlet(u);
  const auto& g = *op.grid;
  GridFunction out = GridFunction::zeros(op.grid);
  for (std::size_t i = 1; i < g.last(); ++i) {
    const double fwd = (u[i + 1] - u[i]) / g.mu(i);
    const double bwd = (u[i] - u[i - 1]) / g.nu(i);
    out[i] = -(fwd - bwd) / g.weight(i);
  }
  return out;
}

/// <u, v> = sum_{i=0}^{m-1} u_i v_i w_i.
inline double weighted_inner(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u.grid, v.grid);
  const auto& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.last(); ++i) s += u[i] * v[i] * g.weight(i);
  return s;
}

inline double weighted_norm(const GridFunction& u) { return std::sqrt(weighted_inner(u, u)); }

/// G(t,s) = ((t-a)(b-s) for t <= s, (s-a)(b-t) otherwise) / (b-a).
struct GreenKernel {
  double a;
  double b;

  double operator()(double t, double s) const {
    return t <= s ? (t - a) * (b - s) / (b - a) : (s - a) * (b - t) / (b - a);
  }
  double max_value() const { return (b - a) / 4.0; }
};

/// y_i = sum_j G(t_i, t_j) f_j w_j, the quadrature form of the inverse.
inline GridFunction green_inverse(const DirichletOperator1D& op, const GridFunction& f) {
  require_same_grid(op.grid, f.grid);
  const auto& g = *op.grid;
  const GreenKernel G{g.a(), g.b()};
  GridFunction y = GridFunction::zeros(op.grid);
  for (std::size_t i = 1; i < g.last(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.last(); ++j) s += G(g.point(i), g.point(j)) * f[j] * g.weight(j);
    y[i] = s;
  }
  return y;
}

/// Solves A u = f (interior values of f) with u(a) = u(b) = 0 by
/// elimination on the symmetric form diag(w) A u = w f.
inline GridFunction tridiag_solve(const DirichletOperator1D& op, const GridFunction& f) {
  require_same_grid(op.grid, f.grid);
  const std::size_t n = op.size();
  std::vector<double> d(n), rhs(n), c(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = op.diag[k] * op.weight[k];
    c[k] = op.sup[k] * op.weight[k];
    rhs[k] = f[k + 1] * op.weight[k];
  }
  // Forward sweep; lower entry of row k+1 equals c[k] by symmetry.
  for (std::size_t k = 1; k < n; ++k) {
    assert(d[k - 1] > 0.0 && "non-positive pivot: operator assembly is broken");
    const double m = c[k - 1] / d[k - 1];
    d[k] -= m * c[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  if (!(d[n - 1] > 0.0)) throw NumericError("non-positive pivot in tridiagonal solve");
  GridFunction u = GridFunction::zeros(op.grid);
  u[n] = rhs[n - 1] / d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) u[k + 1] = (rhs[k] - c[k] * u[k + 2]) / d[k];
  return u;
}

}  // namespace tselliptic
