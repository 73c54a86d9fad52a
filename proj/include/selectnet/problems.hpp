#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selectnet/net.hpp"
#include "selectnet/operators.hpp"

namespace selectnet {

enum class BoundaryComponent { spatial, initial };

struct Domain {
  enum class Kind { unit_ball, cube, ball_time_cylinder };
  Kind kind = Kind::unit_ball;
  Eigen::Index space_dim = 2;
  double final_time = 1.0;  // ball_time_cylinder only

  bool time_dependent() const { return kind == Kind::ball_time_cylinder; }
  Eigen::Index input_dim() const { return space_dim + (time_dependent() ? 1 : 0); }

  /// Strict interior: |x|<1, max|x_i|<1, or |x|<1 and 0<t<T.
  bool contains(std::span<const double> p) const;
  /// Closed domain, with slack `tol` on every constraint.
  bool in_closure(std::span<const double> p, double tol = 0.0) const;
  bool on_component(std::span<const double> p, BoundaryComponent component, double tol) const;
};

struct ProblemSpec {
  std::string name;
  Domain domain;
  OperatorKind op;
  /// Operators applied on the spatial boundary, then on the t = 0 slice.
  std::vector<BoundaryOperatorKind> spatial_ops;
  std::vector<BoundaryOperatorKind> initial_ops;
  PointFn f;
  PointFn g;   // spatial boundary data
  PointFn h0;  // u(x, 0)
  PointFn h1;  // u_t(x, 0)
  PointFn exact_u;
  std::string low_regularity_locus;
  /// Boundary-conforming mask that enforces this problem's homogeneous
  /// Dirichlet data, or Mask::none when no such mask applies.
  Mask conforming_mask = Mask::none;

  Eigen::Index space_dim() const { return domain.space_dim; }
  Eigen::Index input_dim() const { return domain.input_dim(); }
  bool time_dependent() const { return domain.time_dependent(); }
  const std::vector<BoundaryOperatorKind>& ops_for(BoundaryComponent component) const {
    return component == BoundaryComponent::spatial ? spatial_ops : initial_ops;
  }
  bool uses(BoundaryOperatorKind kind) const;
};

/// Partial sum of the double cosine series over odd n, m <= terms_limit.
double poisson2d_exact(double x1, double x2, int terms_limit = 99);

/// The same solution as (1 - x1^2)/2 minus a single cosh-weighted cosine
/// series in x2, summed over odd n <= terms_limit. Each term is harmonic, so
/// -lap of any partial sum is exactly 1.
double poisson2d_exact_cosh(double x1, double x2, int terms_limit = 399);

/// One of poisson2d, elliptic_nl, parabolic, allen_cahn, wave. `d` is the
/// spatial dimension (ignored by poisson2d, which is always 2-D).
ProblemSpec make_problem(std::string_view name, Eigen::Index d = 2);
std::vector<std::string> problem_names();

/// f at interior (or closed-domain) points; throws outside the domain.
Eigen::VectorXd evaluate_f(const ProblemSpec& problem, const Points& points);
Eigen::VectorXd evaluate_pointwise(const PointFn& fn, const Points& points);
/// Boundary data for kind at each point (g, h0 or h1).
Eigen::VectorXd evaluate_boundary_data(const ProblemSpec& problem, BoundaryOperatorKind kind, const Points& points);
FieldFn exact_field(const ProblemSpec& problem);

}  // namespace selectnet
