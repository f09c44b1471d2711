#pragma once

// Rectangular products of 1D grids and real fields on them. Values are
// stored for every point of the closed product grid in row-major order
// (last axis fastest). The Dirichlet boundary is every point with some
// coordinate index equal to 0 or m_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tselliptic/dirichlet_operator.hpp"
#include "tselliptic/error.hpp"
#include "tselliptic/timescale.hpp"

namespace tselliptic {

class ProductGrid {
 public:
  explicit ProductGrid(std::vector<GridPtr> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw PreconditionError("product grid needs at least one axis");
    extent_.resize(axes_.size());
    stride_.resize(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      if (!axes_[d]) throw PreconditionError("null axis grid");
      extent_[d] = axes_[d]->size();
    }
    total_ = 1;
    for (std::size_t d = axes_.size(); d-- > 0;) {
      stride_[d] = total_;
      total_ *= extent_[d];
    }
  }

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return total_; }
  const Grid& axis(std::size_t d) const { return *axes_[d]; }
  const GridPtr& axis_ptr(std::size_t d) const { return axes_[d]; }
  const std::vector<GridPtr>& axes() const noexcept { return axes_; }
  std::size_t extent(std::size_t d) const { return extent_[d]; }
  std::size_t stride(std::size_t d) const { return stride_[d]; }

  void unflatten(std::size_t flat, std::span<std::size_t> idx) const {
    for (std::size_t d = 0; d < dim(); ++d) {
      idx[d] = flat / stride_[d];
      flat %= stride_[d];
    }
  }

  std::size_t flatten(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t d = 0; d < dim(); ++d) f += idx[d] * stride_[d];
    return f;
  }

  bool is_interior(std::span<const std::size_t> idx) const {
    for (std::size_t d = 0; d < dim(); ++d)
      if (idx[d] == 0 || idx[d] + 1 == extent_[d]) return false;
    return true;
  }

  std::vector<double> coordinates(std::span<const std::size_t> idx) const {
    std::vector<double> x(dim());
    for (std::size_t d = 0; d < dim(); ++d) x[d] = axes_[d]->point(idx[d]);
    return x;
  }

  /// Product Delta-measure weight; zero on the far faces x_d = b_d.
  double weight(std::span<const std::size_t> idx) const {
    double w = 1.0;
    for (std::size_t d = 0; d < dim(); ++d) w *= axes_[d]->weight(idx[d]);
    return w;
  }

  std::size_t interior_size() const {
    std::size_t n = 1;
    for (auto e : extent_) n *= e - 2;
    return n;
  }

  /// |Omega| = prod (b_d - a_d).
  double volume() const {
    double v = 1.0;
    for (const auto& g : axes_) v *= g->b() - g->a();
    return v;
  }

  /// Sum of product weights over interior points (the discrete |Omega|).
  double interior_measure() const {
    double v = 1.0;
    for (const auto& g : axes_) {
      double s = 0.0;
      for (std::size_t i = 1; i < g->last(); ++i) s += g->weight(i);
      v *= s;
    }
    return v;
  }

  bool operator==(const ProductGrid& o) const {
    if (dim() != o.dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d)
      if (!same_grid(axes_[d], o.axes_[d])) return false;
    return true;
  }

 private:
  std::vector<GridPtr> axes_;
  std::vector<std::size_t> extent_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 0;
};

using ProductGridPtr = std::shared_ptr<const ProductGrid>;

inline ProductGridPtr make_product(std::vector<GridPtr> axes) {
  return std::make_shared<const ProductGrid>(std::move(axes));
}

/// Visits every point with its multi-index; f(flat, idx).
template <class F>
void for_each_point(const ProductGrid& g, F&& f) {
  std::vector<std::size_t> idx(g.dim(), 0);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    f(flat, std::span<const std::size_t>(idx));
    for (std::size_t d = g.dim(); d-- > 0;) {
      if (++idx[d] < g.extent(d)) break;
      idx[d] = 0;
    }
  }
}

template <class F>
void for_each_interior(const ProductGrid& g, F&& f) {
  for_each_point(g, [&](std::size_t flat, std::span<const std::size_t> idx) {
    if (g.is_interior(idx)) f(flat, idx);
  });
}

struct Field {
  ProductGridPtr grid;
  std::vector<double> values;

  Field() = default;
  Field(ProductGridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw PreconditionError("field needs a grid");
    if (values.size() != grid->size()) throw PreconditionError("field length does not match grid");
  }
  static Field zeros(ProductGridPtr g) {
    const auto n = g->size();
    return Field(std::move(g), std::vector<double>(n, 0.0));
  }
  /// Interior values from f(x); boundary zero.
  template <class F>
  static Field sample_interior(ProductGridPtr g, F&& f) {
    Field out = zeros(g);
    for_each_interior(*g, [&](std::size_t flat, std::span<const std::size_t> idx) {
      out.values[flat] = f(g->coordinates(idx));
    });
    return out;
  }

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

inline void require_same_grid(const Field& u, const Field& v) {
  if (!u.grid || !v.grid || !(u.grid == v.grid || *u.grid == *v.grid)) throw PreconditionError("grid mismatch");
}

inline Field from_grid_function(const GridFunction& u) {
  return Field(make_product({u.grid}), u.values);
}

inline GridFunction to_grid_function(const Field& u) {
  if (u.grid->dim() != 1) throw PreconditionError("field is not one-dimensional");
  return GridFunction(u.grid->axis_ptr(0), u.values);
}

/// Product-measure inner product.
inline double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  double s = 0.0;
  for_each_point(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    const double w = u.grid->weight(idx);
    if (w != 0.0) s += u[flat] * v[flat] * w;
  });
  return s;
}

inline double norm(const Field& u) { return std::sqrt(inner(u, u)); }

inline Field operator-(const Field& u, const Field& v) {
  require_same_grid(u, v);
  Field out = u;
  for (std::size_t i = 0; i < out.values.size(); ++i) out[i] -= v[i];
  return out;
}

inline Field operator+(const Field& u, const Field& v) {
  require_same_grid(u, v);
  Field out = u;
  for (std::size_t i = 0; i < out.values.size(); ++i) out[i] += v[i];
  return out;
}

inline Field operator*(double s, const Field& u) {
  Field out = u;
  for (auto& x : out.values) x *= s;
  return out;
}

inline double max_boundary_abs(const Field& u) {
  double m = 0.0;
  for_each_point(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    if (!u.grid->is_interior(idx)) m = std::max(m, std::abs(u[flat]));
  });
  return m;
}

/// The n-D operator A = -sum_d (.)^{nabla_d Delta_d} assembled per axis.
class LaplacianND {
 public:
  explicit LaplacianND(ProductGridPtr grid) : grid_(std::move(grid)) {
    ops_.reserve(grid_->dim());
    for (std::size_t d = 0; d < grid_->dim(); ++d) ops_.push_back(assemble(grid_->axis_ptr(d)));
  }

  const ProductGridPtr& grid() const noexcept { return grid_; }
  const DirichletOperator1D& axis_operator(std::size_t d) const { return ops_[d]; }

  /// A u at interior points, zero on the boundary; u must vanish on the boundary.
  Field apply(const Field& u) const {
    if (!(u.grid == grid_ || *u.grid == *grid_)) throw PreconditionError("grid mismatch");
    if (max_boundary_abs(u) > 1e-12) throw PreconditionError("field must vanish on the boundary");
    Field out = Field::zeros(grid_);
    for_each_interior(*grid_, [&](std::size_t flat, std::span<const std::size_t> idx) {
      double s = 0.0;
      for (std::size_t d = 0; d < grid_->dim(); ++d) {
        const auto& op = ops_[d];
        const std::size_t k = idx[d] - 1;
        const std::size_t st = grid_->stride(d);
        s += op.sub[k] * u[flat - st] + op.diag[k] * u[flat] + op.sup[k] * u[flat + st];
      }
      out[flat] = s;
    });
    return out;
  }

  /// Sum of the axis diagonal coefficients at an interior point.
  double diagonal(std::span<const std::size_t> idx) const {
    double s = 0.0;
    for (std::size_t d = 0; d < grid_->dim(); ++d) s += ops_[d].diag[idx[d] - 1];
    return s;
  }

 private:
  ProductGridPtr grid_;
  std::vector<DirichletOperator1D> ops_;
};

}  // namespace tselliptic
