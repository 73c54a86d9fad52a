#include <gtest/gtest.h>

#include <cmath>

#include "selectnet/loss.hpp"
#include "selectnet/trainer.hpp"
#include "support/oracles.hpp"

using namespace selectnet;

namespace {

SampleBatch draw(const ProblemSpec& p, Eigen::Index n1, Eigen::Index n2, std::uint64_t seed, bool with_boundary = true) {
  SamplerConfig cfg;
  cfg.interior_count = n1;
  cfg.boundary_count = n2;
  cfg.annuli = 1;
  RngStream ri(seed, StreamTag::interior), rb(seed, StreamTag::boundary);
  return sample_batch(p, cfg, ri, rb, with_boundary);
}

/// phi == 1 exactly: midpoint of (0, 2) with a zero core.
SelectionNetwork unit_selection(std::size_t dim) {
  return SelectionNetwork(MlpNetwork::zeros({dim, 3, 2}, Activation::relu), 0.0, 2.0);
}

SelectionNetwork constant_selection(std::size_t dim, double value) {
  auto core = MlpNetwork::zeros({dim, 3, 2}, Activation::relu);
  // 2 sigmoid(b) = value
  core.parameters().biases.back()(0) = std::log(value / (2.0 - value));
  return SelectionNetwork(core, 0.0, 2.0);
}

/// Hand-built evaluation with interior residuals only.
ResidualEvaluation interior_only(const Eigen::VectorXd& residual) {
  ResidualEvaluation res;
  res.interior.residual = residual;
  res.interior_sq = residual.cwiseAbs2();
  res.boundary_points = Points(2, 0);
  return res;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const OperatorConfig kCoarse{1e-2};

}  // namespace

TEST(LossWeights, Validation) {
  EXPECT_THROW((LossWeights{0.0, 1e-3}.validate()), std::invalid_argument);
  EXPECT_THROW((LossWeights{1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(LossWeights{}.validate());
}

TEST(BinaryWeights, FromRatioNormalizes) {
  const auto bw = BinaryWeightConfig::from_ratio(0.2, 4.0);
  EXPECT_NEAR(bw.large * 0.2 + bw.small * 0.8, 1.0, 1e-15);
  EXPECT_NEAR(bw.large / bw.small, 4.0, 1e-12);
  EXPECT_GT(bw.large, 1.0);
  EXPECT_LT(bw.small, 1.0);
}

TEST(BinaryWeights, RejectsBadConfigs) {
  EXPECT_THROW((BinaryWeightConfig{0.0, 1.5, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((BinaryWeightConfig{1.0, 1.5, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((BinaryWeightConfig{0.5, 0.5, 1.5}.validate()), std::invalid_argument);
  EXPECT_THROW((BinaryWeightConfig{0.5, 1.6, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((BinaryWeightConfig{0.5, 2.0, -0.0001}.validate()), std::invalid_argument);
}

TEST(BasicLoss, ZeroNetworkOnPoisson) {
  const auto p = make_problem("poisson2d");
  const SolutionAnsatz u(MlpNetwork::zeros({2, 4, 2}, Activation::sine), Mask::none);
  const auto r = basic_loss(u, p, draw(p, 100, 80, 1), LossWeights{}, OperatorConfig{});
  EXPECT_EQ(r.components.interior_term, 1.0);
  EXPECT_EQ(r.components.boundary_term, 0.0);
  EXPECT_EQ(r.components.total, 1.0);
  EXPECT_EQ(r.components.penalty_term, 0.0);
}

TEST(BasicLoss, ExactStandInOnEllipticIsNearZero) {
  const auto p = make_problem("elliptic_nl", 10);
  const auto res = evaluate_residuals(exact_field(p), p, draw(p, 1000, 1000, 2), OperatorConfig{});
  EXPECT_LT(basic_loss(res, LossWeights{}).components.total, 1e-5);
}

TEST(BasicLoss, DoublingLambdaDoublesTheBoundaryContribution) {
  const auto p = make_problem("wave", 3);
  const SolutionAnsatz u(init_network({4, 6, 2}, Activation::tanh, 3), Mask::none);
  const auto res = evaluate_residuals(u, p, draw(p, 50, 40, 3), OperatorConfig{});
  const auto a = basic_loss(res, LossWeights{1.0, 1e-3}).components;
  const auto b = basic_loss(res, LossWeights{2.0, 1e-3}).components;
  EXPECT_EQ(a.interior_term, b.interior_term);
  EXPECT_EQ(a.boundary_term, b.boundary_term);
  EXPECT_GT(a.boundary_term, 0.0);
  EXPECT_NEAR(b.total - b.interior_term, 2.0 * (a.total - a.interior_term), 1e-12 * b.total);
}

TEST(BasicLoss, WaveBottomAveragesValueAndVelocityRows) {
  const auto p = make_problem("wave", 2);
  const SolutionAnsatz u(init_network({3, 6, 2}, Activation::tanh, 4), Mask::none);
  const auto batch = draw(p, 20, 20, 4);
  const auto res = evaluate_residuals(u, p, batch, OperatorConfig{});
  ASSERT_EQ(res.boundary.size(), 3u);
  for (Eigen::Index j = 0; j < res.boundary_count(); ++j) {
    const bool bottom = batch.boundary_tags[static_cast<std::size_t>(j)] == BoundaryComponent::initial;
    EXPECT_EQ(res.boundary_rows(j), bottom ? 2.0 : 1.0);
  }
}

TEST(BasicLoss, RejectsEmptyInterior) {
  const auto p = make_problem("elliptic_nl", 3);
  SampleBatch batch;
  batch.interior = Points(3, 0);
  batch.boundary = Points(3, 0);
  const SolutionAnsatz u(MlpNetwork::zeros({3, 2, 1}, Activation::relu), Mask::ball);
  EXPECT_THROW(basic_loss(u, p, batch, LossWeights{}, OperatorConfig{}), std::invalid_argument);
}

// Exact-solution stand-ins through the interior residual of the loss.
class ResidualZero : public ::testing::TestWithParam<std::string> {};

TEST_P(ResidualZero, ExactSolutionHasNegligibleInteriorLoss) {
  const auto p = make_problem(GetParam(), GetParam() == "poisson2d" ? 2 : 5);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto batch = draw(p, 1000, 0, seed, false);
    // u_t of the parabolic solution blows up at t = 1; keep its points off that slice
    if (p.name == "parabolic") batch.interior.row(p.space_dim()) *= 0.99;
    const auto res = evaluate_residuals(exact_field(p), p, batch, OperatorConfig{});
    EXPECT_LT(basic_loss(res, LossWeights{}).components.interior_term, 1e-5) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllProblems, ResidualZero,
                         ::testing::Values("poisson2d", "elliptic_nl", "parabolic", "allen_cahn", "wave"),
                         [](const auto& info) { return info.param; });

TEST(ResidualZero, ParabolicExcessSitsAtTheTerminalSlice) {
  const auto p = make_problem("parabolic", 5);
  const Eigen::Index d = p.space_dim();
  double near_sum = 0.0, far_max = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto batch = draw(p, 1000, 0, seed, false);
    const auto res = evaluate_residuals(exact_field(p), p, batch, OperatorConfig{});
    for (Eigen::Index i = 0; i < res.interior_count(); ++i) {
      if (1.0 - batch.interior(d, i) < 1e-2)
        near_sum += res.interior_sq(i);
      else
        far_max = std::max(far_max, res.interior_sq(i));
    }
  }
  EXPECT_LT(far_max, 1e-6);
  EXPECT_GT(near_sum, 1e-3);
}

TEST(SelectNetLoss, UnitSelectionReducesToBasicBitwise) {
  const std::vector<std::string> names = problem_names();
  RngStream rng(17, 17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& name = names[rng.below(names.size())];
    const auto d = static_cast<Eigen::Index>(2 + rng.below(4));
    const auto p = make_problem(name, d);
    const auto dim = static_cast<std::size_t>(p.input_dim());
    const Mask mask = rng.below(2) == 0 ? Mask::none : p.conforming_mask;
    const bool with_boundary = mask == Mask::none || p.time_dependent();
    const SolutionAnsatz u(init_network({dim, 3 + rng.below(6), 1 + rng.below(3)}, Activation::cubic_relu, rng()),
                           mask);
    const auto batch = draw(p, 5 + static_cast<Eigen::Index>(rng.below(30)),
                            with_boundary ? 2 + static_cast<Eigen::Index>(rng.below(20)) : 0, rng(), with_boundary);
    const LossWeights w{rng.uniform(0.1, 10.0), rng.uniform(1e-4, 1.0)};
    const auto res = evaluate_residuals(u, p, batch, OperatorConfig{});
    const auto sel = unit_selection(dim);
    const auto basic = basic_loss(res, w);
    const auto snet = selectnet_loss(res, sel, &sel, batch.interior, w);
    EXPECT_EQ(snet.components.interior_term, basic.components.interior_term) << name;
    EXPECT_EQ(snet.components.boundary_term, basic.components.boundary_term) << name;
    EXPECT_EQ(snet.components.penalty_term, 0.0) << name;
    EXPECT_EQ(snet.components.total, basic.components.total) << name;
    ASSERT_EQ(snet.row_gradients.size(), basic.row_gradients.size());
    for (std::size_t b = 0; b < basic.row_gradients.size(); ++b)
      EXPECT_EQ(snet.row_gradients[b], basic.row_gradients[b]) << name;
    EXPECT_EQ(solution_gradient(u.core(), res, snet).flatten(), solution_gradient(u.core(), res, basic).flatten());
  }
}

TEST(SelectNetLoss, ConstantSelectionPenalty) {
  const auto p = make_problem("elliptic_nl", 3);
  const SolutionAnsatz u(init_network({3, 5, 2}, Activation::sine, 1), Mask::ball);
  const auto batch = draw(p, 40, 0, 5, false);
  const auto res = evaluate_residuals(u, p, batch, OperatorConfig{});
  const double delta = 0.03;
  const auto sel = constant_selection(3, 1.0 + delta);
  const auto r = selectnet_loss(res, sel, nullptr, batch.interior, LossWeights{});
  EXPECT_NEAR(r.components.penalty_term, 1000.0 * delta * delta, 1e-9);
  const double basic = basic_loss(res, LossWeights{}).components.interior_term;
  EXPECT_NEAR(r.components.interior_term, (1.0 + delta) * basic, 1e-12 * basic);
}

TEST(SelectNetLoss, PenaltyVanishesOnlyAtUnitMean) {
  const auto res = interior_only(vec({1.0, 2.0}));
  const Points pts = Points::Zero(2, 2);
  EXPECT_EQ(selectnet_loss(res, unit_selection(2), nullptr, pts, LossWeights{}).components.penalty_term, 0.0);
  EXPECT_GT(selectnet_loss(res, constant_selection(2, 1.001), nullptr, pts, LossWeights{}).components.penalty_term,
            0.0);
}

TEST(SelectNetLoss, TwoPointWeightedMeanAndAscentDirection) {
  const auto res = interior_only(vec({2.0, 1.0}));
  const Points pts = Points::Zero(2, 2);
  const auto sel = unit_selection(2);
  const auto r = selectnet_loss(res, sel, nullptr, pts, LossWeights{});
  EXPECT_EQ(r.components.interior_term, (4.0 * 1.0 + 1.0 * 1.0) / 2.0);
  // dJ/dphi = {2, 0.5}; dphi/dcore = 2 sigmoid'(0) = 0.5
  ASSERT_TRUE(r.interior_selection.has_value());
  EXPECT_DOUBLE_EQ(r.interior_selection->upstream(0), 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(r.interior_selection->upstream(1), 0.5 * 0.5);
}

TEST(SelectNetLoss, RequiresBoundarySelectionWhenBoundaryPresent) {
  const auto p = make_problem("elliptic_nl", 3);
  const SolutionAnsatz u(init_network({3, 5, 2}, Activation::sine, 1), Mask::none);
  const auto batch = draw(p, 10, 10, 5);
  const auto res = evaluate_residuals(u, p, batch, OperatorConfig{});
  EXPECT_THROW(selectnet_loss(res, unit_selection(3), nullptr, batch.interior, LossWeights{}), std::invalid_argument);
  EXPECT_THROW(selectnet_loss(res, unit_selection(3), nullptr, Points::Zero(3, 3), LossWeights{}),
               std::invalid_argument);
}

TEST(BinaryLoss, DirectArithmeticExample) {
  const auto res = interior_only(vec({3.0, 2.0, 1.0, 0.0}));
  const auto r = binary_weighted_loss(res, BinaryWeightConfig{0.5, 1.5, 0.5}, LossWeights{});
  EXPECT_DOUBLE_EQ(r.components.interior_term, 5.0);
}

TEST(BinaryLoss, UniformWeightsEqualBasic) {
  const auto p = make_problem("allen_cahn", 3);
  const SolutionAnsatz u(init_network({4, 6, 2}, Activation::tanh, 8), Mask::none);
  const auto res = evaluate_residuals(u, p, draw(p, 30, 30, 8), OperatorConfig{});
  const auto a = basic_loss(res, LossWeights{});
  const auto b = binary_weighted_loss(res, BinaryWeightConfig{0.3, 1.0, 1.0}, LossWeights{});
  EXPECT_EQ(a.components.total, b.components.total);
  EXPECT_EQ(a.components.interior_term, b.components.interior_term);
  EXPECT_EQ(a.components.boundary_term, b.components.boundary_term);
}

TEST(BinaryLoss, PartitionSeparatesLargeFromSmall) {
  RngStream rng(3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<Eigen::Index>(10 + rng.below(50));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::floor(rng.uniform(0.0, 5.0));  // ties on purpose
    const double frac = rng.uniform(0.05, 0.95);
    const auto top = top_fraction(v, frac);
    EXPECT_EQ(static_cast<Eigen::Index>(top.size()), std::llround(frac * static_cast<double>(n)));
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (auto i : top) in[static_cast<std::size_t>(i)] = true;
    double min_large = INFINITY, max_small = -INFINITY;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in[static_cast<std::size_t>(i)])
        min_large = std::min(min_large, v(i));
      else
        max_small = std::max(max_small, v(i));
    }
    EXPECT_GE(min_large, max_small);
  }
}

TEST(BinaryLoss, TiesBrokenByIndex) {
  const auto top = top_fraction(vec({1.0, 2.0, 2.0, 2.0}), 0.5);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0], 1);
  EXPECT_EQ(top[1], 2);
}

namespace {

struct GradCase {
  std::string problem;
  Mask mask;
};

class LossGradient : public ::testing::TestWithParam<GradCase> {};

void expect_matches_fd(const ParameterGradient& g, ParameterSet& params, const std::function<double()>& total,
                       const std::string& what) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double fd = oracle::param_derivative(params, i, 1e-5, total);
    const double scale = std::max(std::abs(fd), 1e-2 * g.max_abs());
    EXPECT_LT(std::abs(g.at(i) - fd), 1e-4 * scale) << what << " coordinate " << i;
  }
}

}  // namespace

TEST_P(LossGradient, SolutionGradientMatchesFiniteDifferences) {
  const auto& c = GetParam();
  const auto p = make_problem(c.problem, 2);
  const auto dim = static_cast<std::size_t>(p.input_dim());
  SolutionAnsatz u(init_network({dim, 5, 2}, Activation::tanh, 21), c.mask);
  const bool with_boundary = c.mask == Mask::none || p.time_dependent();
  const auto batch = draw(p, 12, with_boundary ? 10 : 0, 22, with_boundary);
  const LossWeights w{1.7, 1e-2};
  auto sel_in = init_network({dim, 4, 2}, Activation::relu, 23);
  auto sel_bd = init_network({dim, 4, 2}, Activation::relu, 24);
  const SelectionNetwork si(sel_in, 0.8, 5.0), sb(sel_bd, 0.8, 5.0);
  const auto bw = BinaryWeightConfig::from_ratio(0.25, 3.0);

  for (Method m : {Method::basic, Method::selectnet, Method::binary}) {
    auto loss_at = [&](const ResidualEvaluation& res) {
      switch (m) {
        case Method::basic:
          return basic_loss(res, w);
        case Method::selectnet:
          return selectnet_loss(res, si, with_boundary ? &sb : nullptr, batch.interior, w);
        default:
          return binary_weighted_loss(res, bw, w);
      }
    };
    const auto res = evaluate_residuals(u, p, batch, kCoarse);
    const auto g = solution_gradient(u.core(), res, loss_at(res));
    expect_matches_fd(g, u.core().parameters(),
                      [&] { return loss_at(evaluate_residuals(u, p, batch, kCoarse)).components.total; },
                      c.problem + " method " + std::to_string(static_cast<int>(m)));
  }
}

TEST_P(LossGradient, SelectionGradientsMatchFiniteDifferences) {
  const auto& c = GetParam();
  const auto p = make_problem(c.problem, 2);
  const auto dim = static_cast<std::size_t>(p.input_dim());
  const SolutionAnsatz u(init_network({dim, 5, 2}, Activation::tanh, 31), c.mask);
  const bool with_boundary = c.mask == Mask::none || p.time_dependent();
  const auto batch = draw(p, 12, with_boundary ? 10 : 0, 32, with_boundary);
  const LossWeights w{1.3, 1e-1};
  SelectionNetwork si(init_network({dim, 4, 2}, Activation::tanh, 33), 0.8, 5.0);
  SelectionNetwork sb(init_network({dim, 4, 2}, Activation::tanh, 34), 0.8, 5.0);
  const auto res = evaluate_residuals(u, p, batch, kCoarse);
  auto total = [&] { return selectnet_loss(res, si, with_boundary ? &sb : nullptr, batch.interior, w).components.total; };
  const auto r = selectnet_loss(res, si, with_boundary ? &sb : nullptr, batch.interior, w);
  expect_matches_fd(selection_gradient(si.core(), *r.interior_selection), si.core().parameters(), total,
                    c.problem + " interior selection");
  if (with_boundary)
    expect_matches_fd(selection_gradient(sb.core(), *r.boundary_selection), sb.core().parameters(), total,
                      c.problem + " boundary selection");
}

TEST_P(LossGradient, SmallAscentStepDoesNotDecreaseObjective) {
  const auto& c = GetParam();
  const auto p = make_problem(c.problem, 2);
  const auto dim = static_cast<std::size_t>(p.input_dim());
  const SolutionAnsatz u(init_network({dim, 5, 2}, Activation::tanh, 41), c.mask);
  const bool with_boundary = c.mask == Mask::none || p.time_dependent();
  const auto batch = draw(p, 20, with_boundary ? 10 : 0, 42, with_boundary);
  SelectionNetwork si(init_network({dim, 4, 2}, Activation::relu, 43), 0.8, 5.0);
  SelectionNetwork sb(init_network({dim, 4, 2}, Activation::relu, 44), 0.8, 5.0);
  const auto res = evaluate_residuals(u, p, batch, OperatorConfig{});
  const auto before = selectnet_loss(res, si, with_boundary ? &sb : nullptr, batch.interior, LossWeights{});
  si.core().parameters().axpy(1e-6, selection_gradient(si.core(), *before.interior_selection));
  if (with_boundary) sb.core().parameters().axpy(1e-6, selection_gradient(sb.core(), *before.boundary_selection));
  const auto after = selectnet_loss(res, si, with_boundary ? &sb : nullptr, batch.interior, LossWeights{});
  EXPECT_GE(after.components.total, before.components.total);
}

INSTANTIATE_TEST_SUITE_P(Problems, LossGradient,
                         ::testing::Values(GradCase{"poisson2d", Mask::none}, GradCase{"poisson2d", Mask::cube},
                                           GradCase{"elliptic_nl", Mask::none}, GradCase{"elliptic_nl", Mask::ball},
                                           GradCase{"parabolic", Mask::none}, GradCase{"allen_cahn", Mask::none},
                                           GradCase{"wave", Mask::none}),
                         [](const auto& info) {
                           return info.param.problem + "_" + std::string(to_string(info.param.mask));
                         });

TEST(Loss, FiniteForFiniteParameters) {
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name, 4);
    const auto dim = static_cast<std::size_t>(p.input_dim());
    const SolutionAnsatz u(init_network({dim, 8, 3}, Activation::cubic_relu, 2), Mask::none);
    const auto batch = draw(p, 100, 100, 3);
    const auto sel = unit_selection(dim);
    const auto r = selectnet_loss(u, sel, sel, p, batch, LossWeights{}, OperatorConfig{});
    EXPECT_TRUE(std::isfinite(r.components.total)) << name;
    EXPECT_GE(r.components.interior_sq.minCoeff(), 0.0);
    EXPECT_GE(r.components.boundary_sq.minCoeff(), 0.0);
  }
}
