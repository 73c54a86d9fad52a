#include "selectnet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace selectnet {

namespace {

/// Field values at a stencil's points; fills the block's cache and mask when
/// the field is a network ansatz.
using FieldEval = std::function<Eigen::VectorXd(const Points&, ResidualBlock&)>;

ResidualBlock evaluate_block(const FieldEval& field, Stencil stencil,
                             const std::function<StencilResult(Stencil, Eigen::VectorXd)>& reduce) {
  ResidualBlock block;
  Eigen::VectorXd u = field(stencil.points, block);
  block.result = reduce(std::move(stencil), std::move(u));
  return block;
}

/// sum_i w_i v_i / n in index order; basic loss passes w == 1.
double weighted_mean(const Eigen::VectorXd& values, const Eigen::VectorXd& w) {
  if (values.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) acc += w(i) * values(i);
  return acc / static_cast<double>(values.size());
}

double plain_mean(const Eigen::VectorXd& values) {
  if (values.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) acc += values(i);
  return acc / static_cast<double>(values.size());
}

/// Shared assembly of the weighted residual terms and dJ/d(residual row).
LossResult weighted_loss(const ResidualEvaluation& res, const Eigen::VectorXd& interior_w,
                         const Eigen::VectorXd& boundary_w, const LossWeights& weights) {
  LossResult out;
  auto& c = out.components;
  c.interior_sq = res.interior_sq;
  c.boundary_sq = res.boundary_sq;
  c.interior_term = weighted_mean(res.interior_sq, interior_w);
  c.boundary_term = weighted_mean(res.boundary_sq, boundary_w);
  c.penalty_term = 0.0;
  c.total = c.interior_term + weights.lambda * c.boundary_term;

  const double n1 = static_cast<double>(res.interior_count());
  out.row_gradients.push_back((2.0 / n1) * interior_w.cwiseProduct(res.interior.residual));
  const double n2 = static_cast<double>(std::max<Eigen::Index>(res.boundary_count(), 1));
  for (const auto& block : res.boundary) {
    Eigen::VectorXd g(block.residual.size());
    for (Eigen::Index r = 0; r < g.size(); ++r) {
      const Eigen::Index j = block.owner[static_cast<std::size_t>(r)];
      g(r) = weights.lambda * 2.0 * boundary_w(j) * block.residual(r) / (res.boundary_rows(j) * n2);
    }
    out.row_gradients.push_back(std::move(g));
  }
  return out;
}

SelectionUpstream evaluate_selection(const SelectionNetwork& sel, const Points& points) {
  SelectionUpstream s;
  s.core = forward_with_cache(sel.core(), points);
  s.values = sel.from_core(s.core.values);
  return s;
}

}  // namespace

void LossWeights::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("LossWeights: lambda must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("LossWeights: epsilon must be positive");
}

BinaryWeightConfig BinaryWeightConfig::from_ratio(double fraction, double ratio) {
  BinaryWeightConfig bw;
  bw.fraction = fraction;
  bw.small = 1.0 / (fraction * ratio + (1.0 - fraction));
  bw.large = ratio * bw.small;
  bw.validate();
  return bw;
}

void BinaryWeightConfig::validate() const {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("BinaryWeightConfig: p must lie in (0,1)");
  if (!(large >= 1.0 && 1.0 >= small && small >= 0.0))
    throw std::invalid_argument("BinaryWeightConfig: weights must satisfy w_L >= 1 >= w_S >= 0");
  if (std::abs(large * fraction + small * (1.0 - fraction) - 1.0) > 1e-12)
    throw std::invalid_argument("BinaryWeightConfig: w_L p + w_S (1-p) must equal 1");
}

namespace {

ResidualEvaluation residuals_of(const FieldEval& field, const ProblemSpec& problem, const SampleBatch& batch,
                                const OperatorConfig& cfg) {
  if (batch.interior.cols() == 0) throw std::invalid_argument("loss: empty interior batch");
  ResidualEvaluation res;

  res.interior = evaluate_block(field, make_operator_stencil(problem, batch.interior, cfg),
                                [&](Stencil st, Eigen::VectorXd u) {
                                  return reduce_operator(problem, std::move(st), std::move(u), cfg);
                                });
  res.interior.residual = res.interior.result.values - evaluate_f(problem, batch.interior);
  res.interior.owner.resize(static_cast<std::size_t>(batch.interior.cols()));
  std::iota(res.interior.owner.begin(), res.interior.owner.end(), Eigen::Index{0});
  res.interior_sq = res.interior.residual.cwiseAbs2();

  const Eigen::Index nb = batch.boundary.cols();
  res.boundary_points = batch.boundary;
  res.boundary_sq = Eigen::VectorXd::Zero(nb);
  res.boundary_rows = Eigen::VectorXd::Zero(nb);
  for (auto component : {BoundaryComponent::spatial, BoundaryComponent::initial}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = 0; j < nb; ++j)
      if (batch.boundary_tags[static_cast<std::size_t>(j)] == component) members.push_back(j);
    if (members.empty()) continue;
    Points pts(batch.boundary.rows(), static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = batch.boundary.col(members[k]);

    for (auto kind : problem.ops_for(component)) {
      auto block = evaluate_block(field, make_boundary_stencil(kind, pts, cfg), [](Stencil st, Eigen::VectorXd u) {
        return reduce_boundary(std::move(st), std::move(u));
      });
      block.residual = block.result.values - evaluate_boundary_data(problem, kind, pts);
      block.owner = members;
      for (std::size_t k = 0; k < members.size(); ++k) {
        const double r = block.residual(static_cast<Eigen::Index>(k));
        res.boundary_sq(members[k]) += r * r;
        res.boundary_rows(members[k]) += 1.0;
      }
      res.boundary.push_back(std::move(block));
    }
  }
  for (Eigen::Index j = 0; j < nb; ++j) {
    if (res.boundary_rows(j) == 0.0)
      throw std::invalid_argument("loss: boundary point without a boundary operator for its component");
    if (res.boundary_rows(j) > 1.0) res.boundary_sq(j) /= res.boundary_rows(j);
  }
  return res;
}

}  // namespace

ResidualEvaluation evaluate_residuals(const SolutionAnsatz& ansatz, const ProblemSpec& problem,
                                      const SampleBatch& batch, const OperatorConfig& cfg) {
  const FieldEval field = [&ansatz](const Points& points, ResidualBlock& block) {
    auto cf = forward_with_cache(ansatz.core(), points);
    block.mask = ansatz.mask_values(points);
    Eigen::VectorXd u = ansatz.mask() == Mask::none ? cf.values : cf.values.cwiseProduct(block.mask);
    block.cache = std::move(cf.cache);
    return u;
  };
  return residuals_of(field, problem, batch, cfg);
}

ResidualEvaluation evaluate_residuals(const FieldFn& u, const ProblemSpec& problem, const SampleBatch& batch,
                                      const OperatorConfig& cfg) {
  const FieldEval field = [&u](const Points& points, ResidualBlock&) { return u(points); };
  return residuals_of(field, problem, batch, cfg);
}

LossResult basic_loss(const ResidualEvaluation& res, const LossWeights& weights) {
  weights.validate();
  return weighted_loss(res, Eigen::VectorXd::Ones(res.interior_count()), Eigen::VectorXd::Ones(res.boundary_count()),
                       weights);
}

LossResult selectnet_loss(const ResidualEvaluation& res, const SelectionNetwork& interior_selection,
                          const SelectionNetwork* boundary_selection, const Points& interior_points,
                          const LossWeights& weights) {
  weights.validate();
  if (interior_points.cols() != res.interior_count())
    throw std::invalid_argument("selectnet_loss: interior points do not match the residual evaluation");
  auto sel_in = evaluate_selection(interior_selection, interior_points);
  std::optional<SelectionUpstream> sel_bd;
  Eigen::VectorXd boundary_w = Eigen::VectorXd::Ones(res.boundary_count());
  if (res.boundary_count() > 0) {
    if (!boundary_selection) throw std::invalid_argument("selectnet_loss: boundary selection network required");
    sel_bd = evaluate_selection(*boundary_selection, res.boundary_points);
    boundary_w = sel_bd->values;
  }

  LossResult out = weighted_loss(res, sel_in.values, boundary_w, weights);
  auto& c = out.components;

  // penalty = eps^-1 [ (mean phi' - 1)^2 + (mean phi'' - 1)^2 ], entering J with a minus sign
  const double inv_eps = 1.0 / weights.epsilon;
  const double n1 = static_cast<double>(res.interior_count());
  const double dev_in = plain_mean(sel_in.values) - 1.0;
  double penalty = dev_in * dev_in;
  {
    Eigen::VectorXd dj = res.interior_sq / n1;
    dj.array() -= 2.0 * inv_eps * dev_in / n1;
    sel_in.upstream = dj.cwiseProduct(interior_selection.core_sensitivity(sel_in.core.values));
  }
  if (sel_bd) {
    const double n2 = static_cast<double>(res.boundary_count());
    const double dev_bd = plain_mean(sel_bd->values) - 1.0;
    penalty += dev_bd * dev_bd;
    Eigen::VectorXd dj = (weights.lambda / n2) * res.boundary_sq;
    dj.array() -= 2.0 * inv_eps * dev_bd / n2;
    sel_bd->upstream = dj.cwiseProduct(boundary_selection->core_sensitivity(sel_bd->core.values));
  }
  c.penalty_term = inv_eps * penalty;
  c.total = c.interior_term + weights.lambda * c.boundary_term - c.penalty_term;
  out.interior_selection = std::move(sel_in);
  out.boundary_selection = std::move(sel_bd);
  return out;
}

std::vector<Eigen::Index> top_fraction(const Eigen::VectorXd& values, double fraction) {
  const auto n = values.size();
  const auto keep = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  order.resize(static_cast<std::size_t>(std::clamp<Eigen::Index>(keep, 0, n)));
  return order;
}

LossResult binary_weighted_loss(const ResidualEvaluation& res, const BinaryWeightConfig& bw,
                                const LossWeights& weights) {
  weights.validate();
  bw.validate();
  auto partition = [&](const Eigen::VectorXd& sq) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(sq.size(), bw.small);
    for (auto i : top_fraction(sq, bw.fraction)) w(i) = bw.large;
    return w;
  };
  return weighted_loss(res, partition(res.interior_sq), partition(res.boundary_sq), weights);
}

LossResult basic_loss(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const SampleBatch& batch,
                      const LossWeights& weights, const OperatorConfig& cfg) {
  return basic_loss(evaluate_residuals(ansatz, problem, batch, cfg), weights);
}

LossResult selectnet_loss(const SolutionAnsatz& ansatz, const SelectionNetwork& interior_selection,
                          const SelectionNetwork& boundary_selection, const ProblemSpec& problem,
                          const SampleBatch& batch, const LossWeights& weights, const OperatorConfig& cfg) {
  return selectnet_loss(evaluate_residuals(ansatz, problem, batch, cfg), interior_selection, &boundary_selection,
                        batch.interior, weights);
}

LossResult binary_weighted_loss(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const SampleBatch& batch,
                                const BinaryWeightConfig& bw, const LossWeights& weights, const OperatorConfig& cfg) {
  return binary_weighted_loss(evaluate_residuals(ansatz, problem, batch, cfg), bw, weights);
}

ParameterGradient solution_gradient(const MlpNetwork& core, const ResidualEvaluation& res, const LossResult& loss) {
  if (loss.row_gradients.size() != 1 + res.boundary.size())
    throw std::invalid_argument("solution_gradient: loss does not belong to this residual evaluation");
  auto total = ParameterSet::zeros(core.shape());
  auto add_block = [&](const ResidualBlock& block, const Eigen::VectorXd& row_grad) {
    const Eigen::Index w = block.result.stencil.width;
    Eigen::VectorXd upstream(block.result.field_values.size());
    for (Eigen::Index i = 0; i < row_grad.size(); ++i)
      for (Eigen::Index s = 0; s < w; ++s) upstream(i * w + s) = row_grad(i) * block.result.sensitivity(s, i);
    upstream = upstream.cwiseProduct(block.mask);
    total += backprop_params(core, block.cache, upstream);
  };
  add_block(res.interior, loss.row_gradients[0]);
  for (std::size_t b = 0; b < res.boundary.size(); ++b) add_block(res.boundary[b], loss.row_gradients[b + 1]);
  return total;
}

ParameterGradient selection_gradient(const MlpNetwork& core, const SelectionUpstream& upstream) {
  return backprop_params(core, upstream.core.cache, upstream.upstream);
}

}  // namespace selectnet
