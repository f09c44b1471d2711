#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tselliptic/tselliptic.hpp"

namespace tstest {

using namespace tselliptic;

/// Random union of 1 to 4 segments (intervals or points) with a nonempty interior.
inline TimeScale random_timescale(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> start(-2.0, 2.0), len(0.3, 2.0), gap(0.2, 1.5), coin(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 4);
  for (;;) {
    std::vector<Segment> segs;
    double t = start(rng);
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      if (k) t += gap(rng);
      if (coin(rng) < 0.5) {
        const double hi = t + len(rng);
        segs.emplace_back(Interval{t, hi});
        t = hi;
      } else {
        segs.emplace_back(Point{t});
      }
    }
    try {
      return TimeScale(std::move(segs));
    } catch (const DomainError&) {
    }
  }
}

inline GridPtr random_grid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> h(0.05, 0.4);
  MeshParams m;
  m.h = h(rng);
  return discretize(random_timescale(rng), m);
}

/// Random values at interior points, zero on the boundary.
inline GridFunction random_dirichlet(std::mt19937_64& rng, const GridPtr& g) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  GridFunction u = GridFunction::zeros(g);
  for (std::size_t i = 1; i < g->last(); ++i) u[i] = v(rng);
  return u;
}

inline GridFunction random_function(std::mt19937_64& rng, const GridPtr& g) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  GridFunction u = GridFunction::zeros(g);
  for (double& x : u.values) x = v(rng);
  return u;
}

inline ProductGridPtr random_product(std::mt19937_64& rng, std::size_t max_dim = 3) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_real_distribution<double> h(0.15, 0.5);
  const std::size_t n = dim(rng);
  std::vector<GridPtr> axes;
  for (std::size_t d = 0; d < n; ++d) {
    MeshParams m;
    m.h = h(rng);
    axes.push_back(discretize(random_timescale(rng), m));
  }
  return make_product(std::move(axes));
}

inline Field random_field(std::mt19937_64& rng, const ProductGridPtr& g) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  return Field::sample_interior(g, [&](std::span<const double>) { return v(rng); });
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace tstest
