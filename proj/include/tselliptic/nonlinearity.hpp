#pragma once

// The Nemytskii operator (Fu)(x) = f(x, u(x)) and sampled checks of the
// growth hypotheses (global Lipschitz bound, one-sided bound).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tselliptic/error.hpp"
#include "tselliptic/expression.hpp"
#include "tselliptic/product_grid.hpp"

namespace tselliptic {

struct GrowthHypotheses {
  std::optional<double> L;
  std::optional<double> alpha;
  std::optional<double> C;

  void validate() const {
    if (L && !(*L >= 0.0)) throw HypothesisError("Lipschitz constant L must be >= 0");
    if (C && !(*C >= 0.0)) throw HypothesisError("one-sided bound C must be >= 0");
    if (alpha.has_value() != C.has_value()) throw HypothesisError("alpha and C must be given together");
  }
};

namespace detail {
inline std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (d) s += ", ";
    s += format_number(x[d]);
  }
  return s + ")";
}

inline void require_dimension(const Expression& e, std::size_t dim) {
  if (static_cast<std::size_t>(e.max_variable_index()) > dim)
    throw PreconditionError("expression uses x" + std::to_string(e.max_variable_index()) + " but the domain has " +
                            std::to_string(dim) + " axes");
}
}  // namespace detail

/// f(x, u(x)) at every point of the closed product grid.
inline Field nemytskii(const Expression& e, const Field& u) {
  detail::require_dimension(e, u.grid->dim());
  Field out = Field::zeros(u.grid);
  for_each_point(*u.grid, [&](std::size_t flat, std::span<const std::size_t> idx) {
    const auto x = u.grid->coordinates(idx);
    try {
      out[flat] = e.eval(x, u[flat]);
    } catch (const EvaluationError& err) {
      throw EvaluationError(std::string(err.what()) + " at x = " + detail::point_text(x) +
                            ", u = " + detail::format_number(u[flat]));
    }
  });
  return out;
}

/// Sampled u values: `samples` points evenly spaced over [lo, hi].
inline std::vector<double> sample_range(double lo, double hi, std::size_t samples) {
  if (samples < 2) throw PreconditionError("need at least 2 samples");
  if (!(lo < hi)) throw PreconditionError("empty u range");
  std::vector<double> v(samples);
  for (std::size_t k = 0; k < samples; ++k)
    v[k] = k + 1 == samples ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
  return v;
}

struct LipschitzEstimate {
  double value = 0.0;
  bool is_estimate = true;  // a sampled lower estimate, never a certificate
  std::vector<double> x;    // where the max was observed
  double u = 0.0;
};

/// max |df/du| over grid points x and sampled u in [u_lo, u_hi], by central differences.
inline LipschitzEstimate estimate_lipschitz(const Expression& e, const ProductGrid& domain, double u_lo, double u_hi,
                                            std::size_t samples) {
  detail::require_dimension(e, domain.dim());
  const auto us = sample_range(u_lo, u_hi, samples);
  LipschitzEstimate best;
  for_each_point(domain, [&](std::size_t, std::span<const std::size_t> idx) {
    const auto x = domain.coordinates(idx);
    for (double u : us) {
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      const double slope = std::abs(e.eval(x, u + h) - e.eval(x, u - h)) / (2.0 * h);
      if (slope > best.value || best.x.empty()) {
        best.value = std::max(best.value, slope);
        best.x = x;
        best.u = u;
      }
    }
  });
  return best;
}

struct OneSidedCheck {
  bool pass = true;
  std::vector<double> x;  // witness, when failed
  double eta = 0.0;
  double lhs = 0.0;  // f(x, eta) eta
  double rhs = 0.0;  // alpha eta^2 + C
};

/// Samples f(x, eta) eta <= alpha eta^2 + C; reports the first violation.
inline OneSidedCheck check_one_sided(const Expression& e, const ProductGrid& domain, double alpha, double C,
                                     double u_lo, double u_hi, std::size_t samples) {
  detail::require_dimension(e, domain.dim());
  const auto us = sample_range(u_lo, u_hi, samples);
  OneSidedCheck out;
  for_each_point(domain, [&](std::size_t, std::span<const std::size_t> idx) {
    if (!out.pass) return;
    const auto x = domain.coordinates(idx);
    for (double eta : us) {
      const double lhs = e.eval(x, eta) * eta;
      const double rhs = alpha * eta * eta + C;
      if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) {
        out = {false, x, eta, lhs, rhs};
        return;
      }
    }
  });
  return out;
}

}  // namespace tselliptic
