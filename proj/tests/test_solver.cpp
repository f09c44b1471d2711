#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace tselliptic;

namespace {

Problem problem(std::vector<std::string> axes, const std::string& f, Bindings b = {}, std::optional<double> h = {}) {
  Problem p;
  for (const auto& s : axes) p.axes.push_back(TimeScale::parse(s));
  if (h) {
    MeshParams m;
    m.h = *h;
    p.mesh = {m};
  }
  p.f = Expression::parse(f, b);
  return p;
}

}  // namespace

TEST(SpectralInverse, Examples) {
  auto p = problem({"0,1,2,3"}, "0");
  Discretization d(p);
  const Field f = from_interior(d.grid(), std::vector<double>{1.0, 0.0});
  const Field s = spectral_inverse(d.basis(), f);
  EXPECT_NEAR(s[1], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(s[2], 1.0 / 3.0, 1e-14);
  const auto g = green_inverse(d.op().axis_operator(0), to_grid_function(f));
  EXPECT_NEAR(s[1], g[1], 1e-14);

  Discretization d2({TimeScale::parse("0,1,2,3"), TimeScale::parse("0,1,2,3")}, {});
  const Field minus_c = detail::constant_interior(d2.grid(), -1.3);
  const Field u = spectral_inverse(d2.basis(), minus_c);
  for (double v : interior_values(u)) EXPECT_NEAR(v, -0.65, 1e-14);
}

TEST(SpectralInverse, EigenfunctionIsScaled) {
  MeshParams m;
  m.h = 0.25;
  Discretization d({TimeScale::parse("[0,1],2"), TimeScale::parse("0,0.5,[1,2]")}, {m});
  const auto& basis = d.basis();
  const auto ev = basis.eigenvalues();
  std::vector<double> c(ev.size(), 0.0);
  c[3] = 1.0;
  const Field phi = basis.backward(c);
  const Field y = spectral_inverse(basis, phi);
  for (std::size_t i = 0; i < phi.values.size(); ++i) EXPECT_NEAR(y[i], phi[i] / ev[3], 1e-12);
}

TEST(Residual, Examples) {
  auto p = problem({"0,1,2,3"}, "C", {{"C", 0.7}});
  Discretization d(p);
  EXPECT_LE(residual(d, p.f, from_interior(d.grid(), std::vector<double>{-0.7, -0.7})), 1e-12);
  auto z = problem({"0,1,2,3"}, "0");
  EXPECT_EQ(residual(d, z.f, Field::zeros(d.grid())), 0.0);

  auto h = problem({"[0,1],2,3"}, "0", {}, 0.01);
  Discretization dh(h);
  const auto spec = spectrum_1d(dh.grid()->axis_ptr(0), 1);
  const auto res = problem({"[0,1],2,3"}, "-lambda1*u", {{"lambda1", spec.eigenvalues[0]}});
  EXPECT_LE(residual(dh, res.f, from_grid_function(spec.eigenfunctions[0])), 1e-9);
}

TEST(AprioriRadius, Examples) {
  EXPECT_EQ(apriori_radius(1.0, 0.5, 0.0, 3.0), 0.0);
  EXPECT_NEAR(apriori_radius(1.0, 0.5, 1.0, 3.0), std::sqrt(6.0), 1e-15);
  EXPECT_THROW(apriori_radius(1.0, 1.0, 1.0, 3.0), HypothesisError);

  auto p = problem({"[0,1],2,3"}, "-u", {}, 0.05);
  p.hypotheses.alpha = 0.5;
  p.hypotheses.C = 0.0;
  Discretization d(p);
  const auto s = homotopy_solve(d, p);
  ASSERT_TRUE(s.apriori_radius.has_value());
  EXPECT_EQ(*s.apriori_radius, 0.0);
  EXPECT_TRUE(s.converged());
  EXPECT_LE(tstest::max_abs(interior_values(s.u)), 1e-12);
}

TEST(Picard, TwoDimensionalConstant) {
  auto p = problem({"0,1,2,3", "0,1,2,3"}, "C", {{"C", 1.0}});
  p.hypotheses.L = 0.0;
  Discretization d(p);
  const auto s = picard_solve(d, p);
  ASSERT_TRUE(s.converged());
  EXPECT_EQ(s.iterations, 1u);
  EXPECT_LE(s.residual, 1e-10);
  for (double v : interior_values(s.u)) EXPECT_NEAR(v, -0.5, 1e-12);
  EXPECT_NEAR(s.lambda1, 2.0, 1e-12);
  EXPECT_NEAR(s.lambda1_lower_bound, 8.0 / 9.0, 1e-15);
}

TEST(Picard, DiscreteForcing) {
  auto p = problem({"0,1,2,3"}, "x^2 - 3");
  p.hypotheses.L = 0.0;
  Discretization d(p);
  const auto s = picard_solve(d, p);
  const double g1 = -2.0, g2 = 1.0;
  const auto v = interior_values(s.u);
  EXPECT_NEAR(v[0], (-2 * g1 - g2) / 3, 1e-12);
  EXPECT_NEAR(v[1], (-g1 - 2 * g2) / 3, 1e-12);
}

TEST(Picard, HybridConstantMatchesClosedForm) {
  for (double h : {0.02, 0.01}) {
    auto p = problem({"[0,1],2,3"}, "C", {{"C", 2.0}}, h);
    p.hypotheses.L = 0.0;
    Discretization d(p);
    const auto s = picard_solve(d, p);
    ASSERT_TRUE(s.converged());
    const auto& g = d.grid()->axis(0);
    double err = 0.0;
    for (std::size_t i = 1; i < g.last(); ++i) {
      const double t = g.point(i);
      const double exact = t <= 1.0 ? 2.0 / 6.0 * (3 * t * t - 11 * t) : -7.0 * 2.0 / 6.0;
      err = std::max(err, std::abs(s.u[i] - exact));
    }
    EXPECT_LE(err, 1e-8);
  }
}

TEST(Picard, NonlinearContraction) {
  auto p = problem({"[0,1]", "[0,1],1.5"}, "0.5*sin(u) + x1*x2", {}, 0.1);
  p.hypotheses.L = 0.5;
  Discretization d(p);
  const auto s = picard_solve(d, p);
  ASSERT_TRUE(s.converged());
  EXPECT_LE(s.residual, 1e-8);
  EXPECT_LE(s.contraction_ratio, 0.5 / s.lambda1 + 1e-6);
  EXPECT_LE(residual(d, p.f, s.u), p.config.residual_tol);
}

TEST(Picard, RefusesWithoutContraction) {
  auto p = problem({"0,1,2,3"}, "-lambda1*u", {{"lambda1", 1.0}});
  p.hypotheses.L = 1.0;
  Discretization d(p);
  const auto s = picard_solve(d, p);
  EXPECT_EQ(s.status, SolveStatus::non_contraction);
  EXPECT_EQ(s.iterations, 0u);
}

TEST(Picard, LipschitzRequiredUnlessEstimateAccepted) {
  auto p = problem({"0,1,2,3"}, "0.3*u");
  Discretization d(p);
  EXPECT_THROW(picard_solve(d, p), HypothesisError);
  p.config.accept_estimated_L = true;
  const auto s = picard_solve(d, p);
  EXPECT_TRUE(s.converged());
  EXPECT_TRUE(s.lipschitz_is_estimate);
  EXPECT_NEAR(*s.lipschitz, 0.3, 1e-6);
}

TEST(Picard, ForcedDivergenceIsReported) {
  auto p = problem({"0,1,2,3"}, "-3*u + 1");
  p.hypotheses.L = 3.0;
  p.config.force = true;
  Discretization d(p);
  const auto s = picard_solve(d, p);
  EXPECT_FALSE(s.converged());
  EXPECT_TRUE(s.status == SolveStatus::diverged || s.status == SolveStatus::max_iterations);
}

TEST(Homotopy, ResonanceOnHybridScale) {
  auto base = problem({"[0,1],2,3"}, "0", {}, 0.01);
  Discretization d(base);
  const double l1 = d.lambda1();
  auto p = problem({"[0,1],2,3"}, "-lambda1*u", {{"lambda1", l1}}, 0.01);
  p.hypotheses.L = l1;
  p.hypotheses.alpha = 0.5;
  p.hypotheses.C = 0.0;
  const auto s = homotopy_solve(d, p);
  EXPECT_TRUE(s.converged());
  EXPECT_LE(s.residual, 1e-8);
  EXPECT_TRUE(s.non_uniqueness_risk);
  EXPECT_NE(s.message.find("unique"), std::string::npos);
}

TEST(Homotopy, NegativeLinear) {
  auto p = problem({"0,1,2,3"}, "-2*u");
  p.hypotheses.alpha = 0.5;
  p.hypotheses.C = 0.0;
  Discretization d(p);
  const auto s = homotopy_solve(d, p);
  ASSERT_TRUE(s.converged());
  for (double v : interior_values(s.u)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.one_sided_sampled_ok, std::optional<bool>(true));
}

TEST(Homotopy, AgreesWithPicardOnLinearProblem) {
  auto p = problem({"[0,1],2,[2.5,3]"}, "C + x", {{"C", 0.8}}, 0.05);
  p.hypotheses.L = 0.0;
  p.hypotheses.alpha = 0.0;
  p.hypotheses.C = 10.0;
  Discretization d(p);
  const auto a = picard_solve(d, p);
  const auto b = homotopy_solve(d, p);
  ASSERT_TRUE(a.converged());
  ASSERT_TRUE(b.converged());
  for (std::size_t i = 0; i < a.u.values.size(); ++i) EXPECT_NEAR(a.u[i], b.u[i], 1e-9);
}

TEST(Homotopy, NonlinearOneSidedProblem) {
  auto p = problem({"[0,2]", "0,1,2"}, "u^3 + x1", {}, 0.2);
  p.hypotheses.alpha = 0.5;
  p.hypotheses.C = 10.0;
  Discretization d(p);
  const auto s = homotopy_solve(d, p);
  EXPECT_LE(residual(d, p.f, s.u), 1e-8);
  EXPECT_TRUE(s.converged());
}

TEST(Homotopy, RequiresHypotheses) {
  auto p = problem({"0,1,2,3"}, "-u");
  Discretization d(p);
  EXPECT_THROW(homotopy_solve(d, p), HypothesisError);
  p.hypotheses.alpha = 2.0;  // alpha >= lambda1
  p.hypotheses.C = 0.0;
  EXPECT_THROW(homotopy_solve(d, p), HypothesisError);
}

TEST(Enumerate, Examples) {
  auto none = problem({"0,1,2,3"}, "1 + u^2");
  Discretization d(none);
  const auto e = enumerate_small(d, none, 100.0, 400);
  EXPECT_TRUE(e.solutions.empty());
  EXPECT_EQ(e.status, SolveStatus::no_real_solution_suspected);
  EXPECT_EQ(e.starts, 160000u);
  for (const auto& c : e.candidates) {
    const double x = c[0];
    EXPECT_GT(x * x * x * x + 4 * x * x * x + 8 * x * x + 7 * x + 4, 0.0);
  }

  auto lin = problem({"0,1,2,3"}, "2*u");
  const auto one = enumerate_small(d, lin, 100.0, 50);
  ASSERT_EQ(one.solutions.size(), 1u);
  EXPECT_LE(tstest::max_abs(interior_values(one.solutions[0].u)), 1e-12);
}

TEST(Enumerate, ThreeDimensionalQuadratic) {
  auto p = problem({"0,1,2,3", "5,7,10", "4,6,7"}, "u^2");
  Discretization d(p);
  const std::size_t idx[] = {1, 1, 1};
  EXPECT_NEAR(d.op().diagonal(idx), 34.0 / 9.0, 1e-12);
  const auto e = enumerate_small(d, p, 20.0, 60);
  ASSERT_EQ(e.solutions.size(), 4u);
  // The two unknowns solve 34/9 u1 - u2 + u1^2 = 0 and the mirror equation.
  const double r = std::sqrt(301.0);
  std::vector<double> firsts;
  for (const auto& s : e.solutions) {
    const auto v = interior_values(s.u);
    EXPECT_NEAR(34.0 / 9.0 * v[0] - v[1] + v[0] * v[0], 0.0, 1e-10);
    EXPECT_NEAR(34.0 / 9.0 * v[1] - v[0] + v[1] * v[1], 0.0, 1e-10);
    firsts.push_back(v[0]);
  }
  std::sort(firsts.begin(), firsts.end());
  EXPECT_NEAR(firsts[0], (-43 - r) / 18, 1e-9);
  EXPECT_NEAR(firsts[1], -25.0 / 9.0, 1e-9);
  EXPECT_NEAR(firsts[2], (-43 + r) / 18, 1e-9);
  EXPECT_NEAR(firsts[3], 0.0, 1e-9);

  auto q = problem({"0,1,2,3", "5,7,10", "4,6,7"}, "1 + 2*u^2");
  EXPECT_TRUE(enumerate_small(d, q, 20.0, 60).solutions.empty());
}

TEST(Enumerate, RejectsLargeSystems) {
  auto p = problem({"0,1,2,3,4,5"}, "u");
  Discretization d(p);
  EXPECT_THROW(enumerate_small(d, p, 10.0, 5), PreconditionError);
}

TEST(Discretization, MeshValidation) {
  EXPECT_THROW(Discretization({}, {}), PreconditionError);
  EXPECT_THROW(Discretization({TimeScale::parse("[0,1]")}, {MeshParams{}, MeshParams{}, MeshParams{}}), PreconditionError);
}
