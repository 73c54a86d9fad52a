#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "selectnet/grad.hpp"
#include "selectnet/net.hpp"
#include "selectnet/operators.hpp"
#include "selectnet/problems.hpp"
#include "selectnet/sampling.hpp"

namespace selectnet {

struct LossWeights {
  double lambda = 1.0;    // boundary weight
  double epsilon = 1e-3;  // selection normalization penalty strength

  void validate() const;
};

/// Top fraction p of residuals weighted w_L, the rest w_S, w_L p + w_S (1-p) = 1.
struct BinaryWeightConfig {
  double fraction = 0.5;
  double large = 1.5;
  double small = 0.5;

  /// Weights with w_L / w_S = ratio that satisfy the normalization.
  static BinaryWeightConfig from_ratio(double fraction, double ratio);
  void validate() const;
};

struct LossComponents {
  double interior_term = 0.0;
  double boundary_term = 0.0;
  double penalty_term = 0.0;
  double total = 0.0;
  /// Squared residual per interior point and per boundary point, before weighting.
  Eigen::VectorXd interior_sq;
  Eigen::VectorXd boundary_sq;
};

/// One finite-difference operator applied to the solution ansatz.
struct ResidualBlock {
  StencilResult result;
  ForwardCache cache;     // core network at result.stencil.points
  Eigen::VectorXd mask;   // h(x) at result.stencil.points
  Eigen::VectorXd residual;
  /// Boundary point each row belongs to (interior block: row index itself).
  std::vector<Eigen::Index> owner;
};

/// Residuals of the solution ansatz on one batch. Independent of the selection
/// networks, so one evaluation serves every ascent step of an iteration.
struct ResidualEvaluation {
  ResidualBlock interior;
  std::vector<ResidualBlock> boundary;
  Points boundary_points;
  Eigen::VectorXd interior_sq;
  Eigen::VectorXd boundary_sq;
  /// Operator rows contributing to each boundary point (2 for wave bottom points).
  Eigen::VectorXd boundary_rows;

  Eigen::Index interior_count() const { return interior_sq.size(); }
  Eigen::Index boundary_count() const { return boundary_sq.size(); }
};

ResidualEvaluation evaluate_residuals(const SolutionAnsatz& ansatz, const ProblemSpec& problem,
                                      const SampleBatch& batch, const OperatorConfig& cfg);
/// Residuals of an arbitrary field (no caches, so no parameter gradients).
ResidualEvaluation evaluate_residuals(const FieldFn& u, const ProblemSpec& problem, const SampleBatch& batch,
                                      const OperatorConfig& cfg);

struct SelectionUpstream {
  CachedForward core;
  Eigen::VectorXd values;    // selection values
  Eigen::VectorXd upstream;  // dJ / d(core output)
};

struct LossResult {
  LossComponents components;
  /// dJ/d(residual row), one vector per block: interior first, then boundary blocks.
  std::vector<Eigen::VectorXd> row_gradients;
  std::optional<SelectionUpstream> interior_selection;
  std::optional<SelectionUpstream> boundary_selection;
};

LossResult basic_loss(const ResidualEvaluation& residuals, const LossWeights& weights);
LossResult selectnet_loss(const ResidualEvaluation& residuals, const SelectionNetwork& interior_selection,
                          const SelectionNetwork* boundary_selection, const Points& interior_points,
                          const LossWeights& weights);
LossResult binary_weighted_loss(const ResidualEvaluation& residuals, const BinaryWeightConfig& bw,
                                const LossWeights& weights);

LossResult basic_loss(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const SampleBatch& batch,
                      const LossWeights& weights, const OperatorConfig& cfg);
LossResult selectnet_loss(const SolutionAnsatz& ansatz, const SelectionNetwork& interior_selection,
                          const SelectionNetwork& boundary_selection, const ProblemSpec& problem,
                          const SampleBatch& batch, const LossWeights& weights, const OperatorConfig& cfg);
LossResult binary_weighted_loss(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const SampleBatch& batch,
                                const BinaryWeightConfig& bw, const LossWeights& weights, const OperatorConfig& cfg);

/// dJ/dtheta of the solution core network (descent direction is its negative).
ParameterGradient solution_gradient(const MlpNetwork& core, const ResidualEvaluation& residuals,
                                    const LossResult& loss);
/// dJ/dtheta_s of a selection core network (ascent direction).
ParameterGradient selection_gradient(const MlpNetwork& core, const SelectionUpstream& upstream);

/// Indices of the round(p*N) largest values, ties broken by lower index.
std::vector<Eigen::Index> top_fraction(const Eigen::VectorXd& values, double fraction);

}  // namespace selectnet
