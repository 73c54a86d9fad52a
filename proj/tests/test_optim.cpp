#include <gtest/gtest.h>

#include <cmath>

#include "selectnet/optim.hpp"

using namespace selectnet;

namespace {

ParameterSet scalar_params(double value) {
  auto p = ParameterSet::zeros({1, 1, 1});
  p.at(0) = value;
  return p;
}

ParameterSet gradient_at(const ParameterSet& like, std::size_t index, double g) {
  auto out = ParameterSet::zeros_like(like);
  out.at(index) = g;
  return out;
}

ScheduleSpec spec_for(std::int64_t n) {
  ScheduleSpec s;
  s.total_iterations = n;
  return s;
}

}  // namespace

TEST(Schedule, FirstIterationIsExactlyBaseRate) {
  // k = 1 lies in segment 0 once n >= segments
  for (std::int64_t n : {1000, 2000, 3000, 20000}) EXPECT_EQ(lr_schedule(1, spec_for(n)), 1e-3) << n;
}

TEST(Schedule, LastIterationIsLastSegment) {
  for (std::int64_t n : {1000, 2000, 3000, 20000}) {
    const double v = lr_schedule(n, spec_for(n));
    EXPECT_NEAR(v, std::pow(10.0, -5.997), 1e-12 * std::pow(10.0, -5.997)) << n;
    EXPECT_NEAR(v, 1.006931668e-6, 1e-15);
  }
}

TEST(Schedule, ShortRunsStartInALaterSegment) {
  // n < segments: n^(j) = j n / 1000 < 1 <= n^(j+1) puts k = 1 in segment ceil(1000/n) - 1
  EXPECT_NEAR(lr_schedule(1, spec_for(1)), std::pow(10.0, -5.997), 1e-18);
  EXPECT_NEAR(lr_schedule(1, spec_for(500)), std::pow(10.0, -3.003), 1e-16);
}

TEST(Schedule, SegmentBoundaries) {
  const auto s = spec_for(20000);
  // segment j covers 20 j < k <= 20 (j+1)
  EXPECT_EQ(lr_schedule(20, s), 1e-3);
  EXPECT_DOUBLE_EQ(lr_schedule(21, s), std::pow(10.0, -3.003));
  EXPECT_DOUBLE_EQ(lr_schedule(40, s), std::pow(10.0, -3.003));
  EXPECT_DOUBLE_EQ(lr_schedule(41, s), std::pow(10.0, -3.006));
}

TEST(Schedule, MonotoneAndWithinBounds) {
  for (std::int64_t n : {7, 1000, 2000, 2999}) {
    const auto s = spec_for(n);
    double prev = INFINITY;
    for (std::int64_t k = 1; k <= n; ++k) {
      const double v = lr_schedule(k, s);
      EXPECT_LE(v, prev);
      EXPECT_LE(v, 1e-3);
      EXPECT_GE(v, std::pow(10.0, -5.997) * (1 - 1e-12));
      prev = v;
    }
  }
}

TEST(Schedule, RejectsOutOfRange) {
  const auto s = spec_for(100);
  EXPECT_THROW(lr_schedule(0, s), std::out_of_range);
  EXPECT_THROW(lr_schedule(101, s), std::out_of_range);
  EXPECT_THROW(lr_schedule(1, spec_for(0)), std::out_of_range);
}

TEST(Schedule, FloorAfterVariant) {
  auto s = spec_for(20000);
  s.floor_after = 10000;
  EXPECT_EQ(lr_schedule(1, s), 1e-3);
  EXPECT_NEAR(lr_schedule(10000, s), std::pow(10.0, -5.997), 1e-18);
  EXPECT_EQ(lr_schedule(10001, s), 1e-6);
  EXPECT_EQ(lr_schedule(20000, s), 1e-6);
}

TEST(AdaGrad, ZeroGradientChangesNothing) {
  auto p = scalar_params(0.7);
  auto state = AdaGradState::for_params(p);
  adagrad_step(p, ParameterSet::zeros_like(p), state, 1e-3, Direction::descend);
  EXPECT_EQ(p.at(0), 0.7);
  EXPECT_EQ(state.accumulator.max_abs(), 0.0);
}

TEST(AdaGrad, FirstStepMovesByTheRate) {
  auto p = scalar_params(0.0);
  auto state = AdaGradState::for_params(p);
  const double g = 0.37;
  adagrad_step(p, gradient_at(p, 0, g), state, 1e-3, Direction::descend);
  EXPECT_DOUBLE_EQ(p.at(0), -1e-3 * g / (g + 1e-8));
}

TEST(AdaGrad, SecondIdenticalStepShrinksBySqrtTwo) {
  auto p = scalar_params(0.0);
  auto state = AdaGradState::for_params(p);
  const auto grad = gradient_at(p, 0, 2.0);
  adagrad_step(p, grad, state, 1e-3, Direction::descend);
  const double after_one = p.at(0);
  adagrad_step(p, grad, state, 1e-3, Direction::descend);
  EXPECT_NEAR(after_one - p.at(0), 1e-3 / std::sqrt(2.0), 1e-11);
  EXPECT_DOUBLE_EQ(state.accumulator.at(0), 8.0);
}

TEST(AdaGrad, AccumulatorIsNondecreasing) {
  auto net = init_network({3, 4, 2}, Activation::relu, 1);
  auto& p = net.parameters();
  auto state = AdaGradState::for_params(p);
  RngStream rng(2, 2);
  for (int step = 0; step < 10; ++step) {
    auto grad = ParameterSet::zeros_like(p);
    for (std::size_t i = 0; i < grad.size(); ++i) grad.at(i) = rng.normal();
    const auto before = state.accumulator.flatten();
    adagrad_step(p, grad, state, 1e-2, Direction::ascend);
    EXPECT_TRUE(((state.accumulator.flatten() - before).array() >= 0.0).all());
  }
}

TEST(AdaGrad, AscendEqualsDescendWithNegatedGradient) {
  auto a = init_network({3, 4, 2}, Activation::relu, 1).parameters();
  auto b = a;
  auto sa = AdaGradState::for_params(a), sb = AdaGradState::for_params(b);
  RngStream rng(3, 3);
  auto grad = ParameterSet::zeros_like(a);
  for (std::size_t i = 0; i < grad.size(); ++i) grad.at(i) = rng.normal();
  auto neg = grad;
  neg *= -1.0;
  adagrad_step(a, grad, sa, 1e-3, Direction::ascend);
  adagrad_step(b, neg, sb, 1e-3, Direction::descend);
  EXPECT_EQ(a.flatten(), b.flatten());
}

TEST(AdaGrad, DescendsAQuadratic) {
  // L(p) = 1/2 sum c_i (p_i - t_i)^2
  auto p = init_network({2, 3, 1}, Activation::relu, 4).parameters();
  RngStream rng(4, 4);
  Eigen::VectorXd c(static_cast<Eigen::Index>(p.size())), t(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c(i) = rng.uniform(0.5, 2.0);
    t(i) = rng.normal();
  }
  auto loss = [&] { return 0.5 * (c.array() * (p.flatten() - t).array().square()).sum(); };
  auto state = AdaGradState::for_params(p);
  double prev = loss();
  for (int step = 0; step < 100; ++step) {
    auto grad = ParameterSet::zeros_like(p);
    const Eigen::VectorXd flat = p.flatten();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      grad.at(i) = c(k) * (flat(k) - t(k));
    }
    adagrad_step(p, grad, state, 1e-3, Direction::descend);
    const double now = loss();
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(AdaGrad, RejectsShapeMismatch) {
  auto p = ParameterSet::zeros({2, 3, 1});
  auto state = AdaGradState::for_params(p);
  EXPECT_THROW(adagrad_step(p, ParameterSet::zeros({2, 4, 1}), state, 1e-3, Direction::descend),
               std::invalid_argument);
}

TEST(Adam, FirstStepMovesByTheRate) {
  auto p = scalar_params(1.0);
  auto state = AdamState::for_params(p);
  adam_step(p, gradient_at(p, 0, 5.0), state, 1e-3, Direction::descend);
  EXPECT_NEAR(p.at(0), 1.0 - 1e-3, 1e-11);
  EXPECT_EQ(state.steps, 1);
}

TEST(Adam, AscendEqualsDescendWithNegatedGradient) {
  auto a = init_network({3, 4, 2}, Activation::relu, 1).parameters();
  auto b = a;
  Optimizer oa(OptimizerKind::adam, a), ob(OptimizerKind::adam, b);
  RngStream rng(3, 3);
  for (int step = 0; step < 3; ++step) {
    auto grad = ParameterSet::zeros_like(a);
    for (std::size_t i = 0; i < grad.size(); ++i) grad.at(i) = rng.normal();
    auto neg = grad;
    neg *= -1.0;
    oa.step(a, grad, 1e-3, Direction::ascend);
    ob.step(b, neg, 1e-3, Direction::descend);
  }
  EXPECT_EQ(a.flatten(), b.flatten());
}

TEST(Optimizer, NamesRoundTrip) {
  for (auto k : {OptimizerKind::adagrad, OptimizerKind::adam}) EXPECT_EQ(parse_optimizer(to_string(k)), k);
  EXPECT_THROW(parse_optimizer("sgd"), std::invalid_argument);
}

TEST(Optimizer, DispatchMatchesDirectAdaGrad) {
  auto a = init_network({2, 3, 2}, Activation::tanh, 6).parameters();
  auto b = a;
  Optimizer opt(OptimizerKind::adagrad, a);
  auto state = AdaGradState::for_params(b);
  auto grad = ParameterSet::zeros_like(a);
  for (std::size_t i = 0; i < grad.size(); ++i) grad.at(i) = 0.1 * static_cast<double>(i % 7) - 0.3;
  opt.step(a, grad, 1e-3, Direction::descend);
  adagrad_step(b, grad, state, 1e-3, Direction::descend);
  EXPECT_EQ(a.flatten(), b.flatten());
}
