#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace tselliptic;

TEST(TimeScaleParse, DiscreteAndHybridLiterals) {
  const auto d = TimeScale::parse("0,1,2,3");
  EXPECT_TRUE(d.is_discrete());
  EXPECT_EQ(d.segments().size(), 4u);
  EXPECT_DOUBLE_EQ(d.a(), 0.0);
  EXPECT_DOUBLE_EQ(d.b(), 3.0);

  const auto h = TimeScale::parse(" [0, 1] , 2 ,3 ");
  EXPECT_FALSE(h.is_discrete());
  ASSERT_EQ(h.segments().size(), 3u);
  EXPECT_TRUE(is_interval(h.segments()[0]));
  EXPECT_EQ(h.to_string(), "[0,1],2,3");
  EXPECT_EQ(TimeScale::parse(h.to_string()).segments(), h.segments());
}

TEST(TimeScaleParse, RejectsMalformedLiterals) {
  EXPECT_THROW(TimeScale::parse(""), ParseError);
  EXPECT_THROW(TimeScale::parse("[0,1"), ParseError);
  EXPECT_THROW(TimeScale::parse("0,,1"), ParseError);
  EXPECT_THROW(TimeScale::parse("a,b"), ParseError);
  try {
    TimeScale::parse("[0,1],x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
}

TEST(TimeScaleParse, RejectsInvalidSegments) {
  EXPECT_THROW(TimeScale::parse("[1,0]"), DomainError);
  EXPECT_THROW(TimeScale::parse("2,1"), DomainError);
  EXPECT_THROW(TimeScale::parse("[0,1],1"), DomainError);  // touching segments
  EXPECT_THROW(TimeScale::parse("0,1"), DomainError);      // empty interior
  EXPECT_THROW(TimeScale::parse("5"), DomainError);
  EXPECT_NO_THROW(TimeScale::parse("[0,1]"));
}

TEST(TimeScaleJumps, DiscreteUnitGaps) {
  const auto ts = TimeScale::parse("0,1,2,3");
  EXPECT_DOUBLE_EQ(ts.sigma(1), 2.0);
  EXPECT_DOUBLE_EQ(ts.mu(1), 1.0);
  EXPECT_DOUBLE_EQ(ts.rho(1), 0.0);
  EXPECT_DOUBLE_EQ(ts.sigma(3), 3.0);  // sigma(max) = max
  EXPECT_DOUBLE_EQ(ts.rho(0), 0.0);
}

TEST(TimeScaleJumps, HybridJunction) {
  const auto ts = TimeScale::parse("[0,1],2,3");
  EXPECT_DOUBLE_EQ(ts.sigma(1), 2.0);
  EXPECT_DOUBLE_EQ(ts.mu(1), 1.0);
  EXPECT_DOUBLE_EQ(ts.nu(1), 0.0);  // left-dense
  EXPECT_DOUBLE_EQ(ts.sigma(0.5), 0.5);
  EXPECT_DOUBLE_EQ(ts.mu(0.5), 0.0);
  EXPECT_DOUBLE_EQ(ts.rho(2), 1.0);
}

TEST(TimeScaleJumps, NonUniformDiscrete) {
  const auto ts = TimeScale::parse("5,7,10");
  EXPECT_DOUBLE_EQ(ts.mu(7), 3.0);
  EXPECT_DOUBLE_EQ(ts.nu(7), 2.0);
}

TEST(TimeScaleJumps, OutsideTheScaleIsADomainError) {
  const auto ts = TimeScale::parse("[0,1],2,3");
  EXPECT_THROW(ts.sigma(1.5), DomainError);
  EXPECT_THROW(ts.mu(-1), DomainError);
  EXPECT_FALSE(ts.contains(2.5));
  EXPECT_TRUE(ts.contains(0.25));
}

TEST(Discretize, DiscreteScaleIgnoresMesh) {
  MeshParams m;
  m.h = 0.01;
  const auto g = discretize(TimeScale::parse("0,1,2,3"), m);
  ASSERT_EQ(g->size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g->point(i), static_cast<double>(i));
}

TEST(Discretize, HybridQuarterStep) {
  MeshParams m;
  m.h = 0.25;
  const auto g = discretize(TimeScale::parse("[0,1],2,3"), m);
  const std::vector<double> expected{0, 0.25, 0.5, 0.75, 1, 2, 3};
  ASSERT_EQ(g->size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_DOUBLE_EQ(g->point(i), expected[i]);
}

TEST(Discretize, PointCountForFineStep) {
  MeshParams m;
  m.h = 1e-3;
  const auto g = discretize(TimeScale::parse("[0,3]"), m);
  EXPECT_EQ(g->size(), 3001u);
  EXPECT_EQ(g->point(g->last()), 3.0);
}

TEST(Discretize, CountsAndDefaults) {
  MeshParams m;
  m.counts = {5, 3};
  const auto g = discretize(TimeScale::parse("[0,1],2,[3,4]"), m);
  EXPECT_EQ(g->size(), 5u + 1u + 3u);
  const auto d = discretize(TimeScale::parse("[0,1]"));
  EXPECT_EQ(d->size(), 9u);  // 8 subintervals by default
  m.counts = {5};
  EXPECT_THROW(discretize(TimeScale::parse("[0,1],2,[3,4]"), m), PreconditionError);
  MeshParams bad;
  bad.h = -1.0;
  EXPECT_THROW(discretize(TimeScale::parse("[0,1]"), bad), PreconditionError);
}

TEST(Discretize, JunctionWeights) {
  MeshParams m;
  m.h = 0.25;
  const auto g = discretize(TimeScale::parse("[0,1],2,[3,4]"), m);
  // 1 is left-dense and right-scattered, 3 is left-scattered and right-dense.
  std::size_t i1 = 4, i3 = 6;
  ASSERT_DOUBLE_EQ(g->point(i1), 1.0);
  ASSERT_DOUBLE_EQ(g->point(i3), 3.0);
  EXPECT_DOUBLE_EQ(g->weight(i1), 1.0 + 0.125);
  EXPECT_DOUBLE_EQ(g->weight(i3), 0.125);
  EXPECT_DOUBLE_EQ(g->weight(1), 0.25);
  m.junction_weights = false;
  const auto raw = discretize(TimeScale::parse("[0,1],2,[3,4]"), m);
  EXPECT_DOUBLE_EQ(raw->weight(i1), 1.0);
  EXPECT_DOUBLE_EQ(raw->weight(i3), 0.25);
}

TEST(Discretize, Deterministic) {
  MeshParams m;
  m.h = 0.07;
  const auto ts = TimeScale::parse("[0,1.3],2,[2.5,3.1]");
  EXPECT_TRUE(*discretize(ts, m) == *discretize(ts, m));
}

TEST(GridCalculus, DeltaIntegralExamples) {
  MeshParams m;
  m.h = 0.01;
  const auto g = discretize(TimeScale::parse("[0,3]"), m);
  EXPECT_NEAR(delta_integral(GridFunction::sample(g, [](double) { return 1.0; })), 3.0, 1e-12);

  const auto d = discretize(TimeScale::parse("0,1,2,3"));
  EXPECT_DOUBLE_EQ(delta_integral(GridFunction(d, {0, 5, 7, 100})), 12.0);
  EXPECT_DOUBLE_EQ(delta_integral(GridFunction::sample(d, [](double t) { return t; })), 3.0);
  EXPECT_DOUBLE_EQ(nabla_integral(GridFunction::sample(d, [](double t) { return t; })), 6.0);
}

TEST(GridCalculus, Derivatives) {
  const auto d = discretize(TimeScale::parse("0,1,2,3"));
  const auto sq = delta_derivative(GridFunction::sample(d, [](double t) { return t * t; }));
  EXPECT_DOUBLE_EQ(*sq.values[0], 1.0);
  EXPECT_DOUBLE_EQ(*sq.values[1], 3.0);
  EXPECT_DOUBLE_EQ(*sq.values[2], 5.0);
  EXPECT_FALSE(sq.values[3].has_value());

  MeshParams m;
  m.h = 0.1;
  const auto g = discretize(TimeScale::parse("[0,1],2,[2.5,3]"), m);
  const auto id = GridFunction::sample(g, [](double t) { return t; });
  const auto dd = delta_derivative(id);
  const auto nd = nabla_derivative(id);
  for (std::size_t i = 0; i < g->last(); ++i) EXPECT_NEAR(*dd.values[i], 1.0, 1e-12);
  EXPECT_FALSE(nd.values[0].has_value());
  for (std::size_t i = 1; i <= g->last(); ++i) EXPECT_NEAR(*nd.values[i], 1.0, 1e-12);
}

TEST(GridCalculus, NablaIsDeltaAtRho) {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 20; ++c) {
    const auto g = tstest::random_grid(rng);
    const auto u = tstest::random_function(rng, g);
    const auto dd = delta_derivative(u);
    const auto nd = nabla_derivative(u);
    for (std::size_t i = 1; i <= g->last(); ++i) EXPECT_EQ(*nd.values[i], *dd.values[grid_rho(*g, i)]);
    for (std::size_t i = 0; i < g->last(); ++i) EXPECT_EQ(grid_rho(*g, grid_sigma(*g, i)), i);
  }
}

TEST(GridCalculus, UndefinedDerivativeIsNotIntegrated) {
  const auto d = discretize(TimeScale::parse("0,1,2,3"));
  const auto u = GridFunction::sample(d, [](double t) { return t; });
  GridDerivative broken = delta_derivative(u);
  broken.values[1].reset();
  EXPECT_THROW(delta_integral(broken, u), PreconditionError);
}
