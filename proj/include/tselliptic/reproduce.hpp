#pragma once

// Canned reference scenarios with stored expected values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tselliptic/error.hpp"
#include "tselliptic/expression.hpp"
#include "tselliptic/solver.hpp"
#include "tselliptic/spectral.hpp"

namespace tselliptic {

enum class Compare { near, at_most, at_least };

struct ReproItem {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tol = 0.0;  // |value - expected| <= tol for near; ignored otherwise
  Compare cmp = Compare::near;

  bool pass() const {
    if (!std::isfinite(value)) return false;
    switch (cmp) {
      case Compare::near: return std::abs(value - expected) <= tol;
      case Compare::at_most: return value <= expected;
      case Compare::at_least: return value >= expected;
    }
    return false;
  }
};

struct ReproReport {
  std::string id;
  std::vector<ReproItem> items;

  bool pass() const {
    return std::all_of(items.begin(), items.end(), [](const ReproItem& i) { return i.pass(); });
  }
};

inline const std::vector<std::string>& reproduce_ids() {
  static const std::vector<std::string> ids{"ex-7.1", "ex-7.2", "ex-7.3", "ex-7.4", "ex-7.5",
                                            "ex-7.6", "ex-7.7", "ex-7.8", "ex-7.9", "table-1"};
  return ids;
}

namespace detail {

inline Problem make_problem(std::vector<std::string> axes, const std::string& f, Bindings b = {},
                            std::vector<MeshParams> mesh = {}) {
  Problem p;
  for (const auto& a : axes) p.axes.push_back(TimeScale::parse(a));
  p.mesh = std::move(mesh);
  p.f = Expression::parse(f, b);
  return p;
}

inline double max_abs_diff(const std::vector<double>& v, const std::vector<double>& w) {
  double m = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v[k] - w[k]));
  return m;
}

inline MeshParams step(double h) {
  MeshParams m;
  m.h = h;
  return m;
}

inline double flag(bool b) { return b ? 1.0 : 0.0; }

constexpr const char* discrete4 = "0,1,2,3";
constexpr const char* hybrid = "[0,1],2,3";

inline void ex71(ReproReport& r) {
  Discretization disc({TimeScale::parse(discrete4), TimeScale::parse(discrete4)}, {});
  std::vector<Spectrum1D> axes{spectrum_1d(disc.grid()->axis_ptr(0)), spectrum_1d(disc.grid()->axis_ptr(1))};
  const auto spec = tensor_spectrum(axes, 4);
  const double expected[] = {2, 4, 4, 6};
  for (std::size_t k = 0; k < 4; ++k)
    r.items.push_back({"lambda_" + std::to_string(k + 1), spec.entries[k].eigenvalue, expected[k], 1e-10});

  auto p = make_problem({discrete4, discrete4}, "C", {{"C", 1.0}});
  p.hypotheses.L = 0.0;
  Discretization d2(p);
  const auto s = picard_solve(d2, p);
  const auto v = interior_values(s.u);
  r.items.push_back({"picard converged", flag(s.converged()), 1.0, 0.0});
  r.items.push_back({"max |u + C/2|", max_abs_diff(v, std::vector<double>(v.size(), -0.5)), 0.0, 1e-10});
  r.items.push_back({"residual", s.residual, 1e-10, 0.0, Compare::at_most});
}

inline void ex72(ReproReport& r) {
  const auto ts = TimeScale::parse(hybrid);
  const auto roots = eigen_shooting(ts, 3);
  r.items.push_back({"shooting lambda_1", roots[0], 0.840, 1e-3});
  r.items.push_back({"shooting lambda_2", roots[1], 2.600, 1e-3});
  r.items.push_back({"shooting lambda_3", roots[2], 11.907, 1e-3});

  auto p = make_problem({hybrid}, "C", {{"C", 1.0}}, {step(1e-3)});
  p.hypotheses.L = 0.0;
  Discretization disc(p);
  const auto s = picard_solve(disc, p);
  const auto& g = disc.grid()->axis(0);
  double dev = 0.0, u2 = 0.0;
  for (std::size_t i = 1; i < g.last(); ++i) {
    const double t = g.point(i);
    if (t <= 1.0) dev = std::max(dev, std::abs(s.u[i] - (3 * t * t - 11 * t) / 6.0));
    if (t == 2.0) u2 = s.u[i];
  }
  r.items.push_back({"f = C: max deviation on [0,1]", dev, 0.0, 5e-5});
  r.items.push_back({"f = C: u(2)", u2, -7.0 / 6.0, 5e-5});

  // Resonance family A sin(sqrt(lambda1) t): u(2)/A from the grid eigenfunction.
  const auto spec = spectrum_1d(disc.grid()->axis_ptr(0), 1);
  const auto& phi = spec.eigenfunctions[0];
  double at1 = 0.0, at2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.point(i) == 1.0) at1 = phi[i];
    if (g.point(i) == 2.0) at2 = phi[i];
  }
  const double A = at1 / std::sin(std::sqrt(spec.eigenvalues[0]));
  r.items.push_back({"resonance u(2)/A", at2 / A, 0.684, 1e-3});
}

inline void discrete_exact(ReproReport& r, const std::string& f, Bindings b, std::optional<double> L,
                           std::vector<double> expected, const std::string& method) {
  auto p = make_problem({discrete4}, f, std::move(b));
  p.hypotheses.L = L;
  if (method == "homotopy") {
    p.hypotheses.alpha = 0.5;
    p.hypotheses.C = 0.0;
  }
  Discretization disc(p);
  std::vector<double> v;
  double res = 0.0;
  if (method == "enumerate") {
    const auto e = enumerate_small(disc, p, 100.0, 400);
    r.items.push_back({"solution count", static_cast<double>(e.solutions.size()), 1.0, 0.0});
    if (e.solutions.empty()) return;
    v = interior_values(e.solutions[0].u);
    res = e.solutions[0].residual;
  } else {
    const auto s = method == "picard" ? picard_solve(disc, p) : homotopy_solve(disc, p);
    r.items.push_back({method + " converged", flag(s.converged()), 1.0, 0.0});
    v = interior_values(s.u);
    res = s.residual;
  }
  r.items.push_back({"u1", v[0], expected[0], 1e-12});
  r.items.push_back({"u2", v[1], expected[1], 1e-12});
  r.items.push_back({"residual", res, 1e-12, 0.0, Compare::at_most});
}

inline void ex77(ReproReport& r) {
  Discretization disc({TimeScale::parse(discrete4)}, {});
  Bindings b{{"lambda1", disc.lambda1()}};
  auto p = make_problem({discrete4}, "-lambda1*u", b);
  p.hypotheses.L = disc.lambda1();
  r.items.push_back({"lambda1", disc.lambda1(), 1.0, 1e-12});
  const auto pic = picard_solve(disc, p);
  r.items.push_back({"picard non_contraction", flag(pic.status == SolveStatus::non_contraction), 1.0, 0.0});
  p.hypotheses.alpha = 0.5;
  p.hypotheses.C = 0.0;
  const auto hom = homotopy_solve(disc, p);
  r.items.push_back({"homotopy converged", flag(hom.converged()), 1.0, 0.0});
  r.items.push_back({"homotopy residual", hom.residual, 1e-8, 0.0, Compare::at_most});
  r.items.push_back({"non-uniqueness flagged", flag(hom.non_uniqueness_risk), 1.0, 0.0});
  // Every u1 = u2 = t solves the system.
  for (double t : {1.0, -2.5}) {
    const auto u = from_interior(disc.grid(), std::vector<double>{t, t});
    r.items.push_back({"family member t = " + format_number(t) + " residual", residual(disc, p.f, u), 1e-12, 0.0,
                       Compare::at_most});
  }
}

inline void ex78(ReproReport& r) {
  auto p = make_problem({discrete4}, "1 + u^2");
  Discretization disc(p);
  const auto e = enumerate_small(disc, p, 100.0, 400);
  r.items.push_back({"solutions in [-100,100]^2", static_cast<double>(e.solutions.size()), 0.0, 0.0});
  // Eliminating u2 = u1^2 + 2 u1 + 1 leaves this quartic in u1.
  double qmin = INFINITY;
  for (const auto& c : e.candidates) {
    const double x = c[0];
    qmin = std::min(qmin, x * x * x * x + 4 * x * x * x + 8 * x * x + 7 * x + 4);
  }
  r.items.push_back({"min quartic over candidates", qmin, 0.0, 0.0, Compare::at_least});
  r.items.push_back({"candidates inspected", static_cast<double>(e.candidates.size()), 1.0, 0.0, Compare::at_least});
}

inline void ex79(ReproReport& r) {
  const std::vector<std::string> axes{discrete4, "5,7,10", "4,6,7"};
  auto p = make_problem(axes, "u^2");
  Discretization disc(p);
  const std::size_t idx[] = {1, 1, 1};
  r.items.push_back({"diagonal coefficient at (1,7,6)", disc.op().diagonal(idx), 34.0 / 9.0, 1e-12});
  r.items.push_back({"lambda1", disc.lambda1(), 25.0 / 9.0, 1e-12});
  const auto e = enumerate_small(disc, p, 100.0, 400);
  r.items.push_back({"f = u^2 solutions", static_cast<double>(e.solutions.size()), 4.0, 0.0});
  double zero = INFINITY;
  for (const auto& s : e.solutions) {
    double m = 0.0;
    for (double v : interior_values(s.u)) m = std::max(m, std::abs(v));
    zero = std::min(zero, m);
  }
  r.items.push_back({"f = u^2 includes u = 0", zero, 0.0, 1e-10});
  auto q = make_problem(axes, "1 + 2*u^2");
  const auto e2 = enumerate_small(disc, q, 100.0, 400);
  r.items.push_back({"f = 1 + 2u^2 solutions", static_cast<double>(e2.solutions.size()), 0.0, 0.0});
}

inline double grid_lambda1(const std::string& literal, double h) {
  return Discretization({TimeScale::parse(literal)}, {step(h)}).lambda1();
}

inline void table1(ReproReport& r) {
  const double pi2_9 = std::numbers::pi * std::numbers::pi / 9.0;
  r.items.push_back({"[0,3] shooting", eigen_shooting(TimeScale::parse("[0,3]"), 1)[0], pi2_9, 1e-9});
  r.items.push_back({"[0,3] matrix h = 1e-3", grid_lambda1("[0,3]", 1e-3), pi2_9, 1e-4});
  r.items.push_back({"{0,1,2,3} matrix", grid_lambda1(discrete4, 1.0), 1.0, 1e-12});
  r.items.push_back({"{0,1,2,3} shooting", eigen_shooting(TimeScale::parse(discrete4), 1)[0], 1.0, 1e-10});
  const double shot = eigen_shooting(TimeScale::parse(hybrid), 1)[0];
  r.items.push_back({"[0,1]u{2,3} shooting", shot, 0.840, 1e-3});
  const double e1 = std::abs(grid_lambda1(hybrid, 0.02) - shot);
  const double e2 = std::abs(grid_lambda1(hybrid, 0.01) - shot);
  r.items.push_back({"[0,1]u{2,3} matrix order", std::log2(e1 / e2), 1.9, 0.0, Compare::at_least});
}

}  // namespace detail

/// Runs one scenario; unknown ids raise ConfigError.
inline ReproReport reproduce(const std::string& id) {
  ReproReport r{id, {}};
  if (id == "ex-7.1") detail::ex71(r);
  else if (id == "ex-7.2") detail::ex72(r);
  else if (id == "ex-7.3") detail::discrete_exact(r, "C", {{"C", 1.5}}, 0.0, {-1.5, -1.5}, "picard");
  else if (id == "ex-7.4")  // g(x) = 1 + x^2: g1 = 2, g2 = 5
    detail::discrete_exact(r, "1 + x^2", {}, 0.0, {-3.0, -4.0}, "picard");
  else if (id == "ex-7.5") detail::discrete_exact(r, "-2*u", {}, 2.0, {0.0, 0.0}, "homotopy");
  else if (id == "ex-7.6") detail::discrete_exact(r, "2*u", {}, 2.0, {0.0, 0.0}, "enumerate");
  else if (id == "ex-7.7") detail::ex77(r);
  else if (id == "ex-7.8") detail::ex78(r);
  else if (id == "ex-7.9") detail::ex79(r);
  else if (id == "table-1") detail::table1(r);
  else throw ConfigError("unknown reproduce id '" + id + "'");
  return r;
}

inline void print_report(std::ostream& os, const ReproReport& r) {
  char line[256];
  for (const auto& i : r.items) {
    const char* op = i.cmp == Compare::near ? "~" : i.cmp == Compare::at_most ? "<=" : ">=";
    std::snprintf(line, sizeof line, "%-8s %-38s %-22.15g %-2s %-14.10g tol %-8.2g %s\n", r.id.c_str(), i.name.c_str(),
                  i.value, op, i.expected, i.tol, i.pass() ? "PASS" : "FAIL");
    os << line;
  }
}

inline nlohmann::json report_json(const ReproReport& r) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& i : r.items) {
    const char* op = i.cmp == Compare::near ? "near" : i.cmp == Compare::at_most ? "at_most" : "at_least";
    items.push_back({{"name", i.name},
                     {"value", std::isfinite(i.value) ? nlohmann::json(i.value) : nlohmann::json(nullptr)},
                     {"expected", i.expected},
                     {"tolerance", i.tol},
                     {"compare", op},
                     {"pass", i.pass()}});
  }
  return {{"id", r.id}, {"pass", r.pass()}, {"items", items}};
}

}  // namespace tselliptic
