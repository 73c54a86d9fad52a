#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string_view>

#include "selectnet/net.hpp"

namespace selectnet {

struct ProblemSpec;

/// Batched scalar field; networks, ansatz objects and exact-solution probes
/// all enter the operators through this.
using FieldFn = std::function<Eigen::VectorXd(const Points&)>;
/// Pointwise scalar function of one point (spatial part only for coefficients).
using PointFn = std::function<double(std::span<const double>)>;

FieldFn as_field(const SolutionAnsatz& ansatz);
FieldFn as_field(const MlpNetwork& net);

struct OperatorConfig {
  double h = 1e-4;
  void validate() const;
};

/// Interior operator D. Every kind carries the spatial part -div(a grad u);
/// the tag adds the time derivative and nonlinear terms:
///   divergence_form_elliptic: -div(a grad u) [+ |grad u|^2]
///   heat:        u_t  - div(a grad u)
///   allen_cahn:  u_t  - lap u - u + u^3
///   wave:        u_tt - lap u
struct OperatorKind {
  enum class Tag { divergence_form_elliptic, heat, allen_cahn, wave };
  Tag tag = Tag::divergence_form_elliptic;
  PointFn a;  // empty means a == 1
  bool gradient_square = false;

  bool time_dependent() const { return tag != Tag::divergence_form_elliptic; }
};

enum class BoundaryOperatorKind { dirichlet_trace, initial_value, initial_velocity };
std::string_view to_string(BoundaryOperatorKind kind);

/// Network evaluation points of a finite-difference operator.
///
/// Points are stored center-major: columns [i*width, (i+1)*width) belong to
/// center i, slot 0 is the center itself. A reduction reads
///   value_i = c(0,i) u_0 + sum_{s>=1} c(s,i) (u_s - u_0) + nonlinear_i
/// which keeps the O(1/h^2) coefficients off the raw values.
struct Stencil {
  Points points;
  Eigen::Index width = 1;
  Eigen::MatrixXd coefficients;  // width x centers

  Eigen::Index centers() const { return coefficients.cols(); }
};

struct StencilResult {
  Eigen::VectorXd values;
  Stencil stencil;
  Eigen::VectorXd field_values;  // u at every stencil point
  Eigen::VectorXd nonlinear;     // pointwise nonlinear addition (zero for linear operators)
  /// d(value_i)/d(u at stencil point (s,i)), width x centers.
  Eigen::MatrixXd sensitivity;
};

/// Linear part of the reduction, in the fixed order documented on Stencil.
Eigen::VectorXd reduce_linear(const Stencil& stencil, const Eigen::VectorXd& field_values);

/// +div(a grad u) by the central flux-difference formula on the first
/// `space_dim` coordinates (all coordinates when space_dim is 0).
StencilResult apply_elliptic_fd(const FieldFn& u, const PointFn& a, const Points& points, const OperatorConfig& cfg,
                                Eigen::Index space_dim = 0);

/// Central first differences, one row per spatial coordinate.
Eigen::MatrixXd apply_gradient_fd(const FieldFn& u, const Points& points, const OperatorConfig& cfg,
                                  Eigen::Index space_dim = 0);

/// Stencil of the problem's interior operator, before any field evaluation.
Stencil make_operator_stencil(const ProblemSpec& problem, const Points& points, const OperatorConfig& cfg);
StencilResult reduce_operator(const ProblemSpec& problem, Stencil stencil, Eigen::VectorXd field_values,
                              const OperatorConfig& cfg);
StencilResult apply_operator(const ProblemSpec& problem, const FieldFn& u, const Points& points,
                             const OperatorConfig& cfg);

Stencil make_boundary_stencil(BoundaryOperatorKind kind, const Points& points, const OperatorConfig& cfg);
StencilResult reduce_boundary(Stencil stencil, Eigen::VectorXd field_values);
/// B u at boundary points. Rejects operator kinds the problem does not use
/// and points that are off the component the kind belongs to.
StencilResult apply_boundary_operator(const ProblemSpec& problem, BoundaryOperatorKind kind, const FieldFn& u,
                                      const Points& points, const OperatorConfig& cfg);

}  // namespace selectnet
