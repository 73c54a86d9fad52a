#include "selectnet/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "selectnet/problems.hpp"

namespace selectnet {

namespace {

enum class TimeTerm { none, first, second };

constexpr double kComponentTol = 1e-12;

/// Center plus +/- h along each of the first `space_dim` coordinates, then
/// +/- h along t when a time term is requested.
Stencil build_stencil(const Points& points, Eigen::Index space_dim, const PointFn& a, double sign, TimeTerm time,
                      double h) {
  const Eigen::Index dim = points.rows();
  const Eigen::Index n = points.cols();
  const Eigen::Index time_slots = time == TimeTerm::none ? 0 : 2;
  if (space_dim > dim || (time != TimeTerm::none && space_dim + 1 > dim))
    throw std::invalid_argument("build_stencil: point dimension too small for the requested operator");

  Stencil st;
  st.width = 1 + 2 * space_dim + time_slots;
  st.points.resize(dim, n * st.width);
  st.coefficients = Eigen::MatrixXd::Zero(st.width, n);

  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> shifted(static_cast<std::size_t>(space_dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index base = i * st.width;
    for (Eigen::Index s = 0; s < st.width; ++s) st.points.col(base + s) = points.col(i);
    for (Eigen::Index k = 0; k < space_dim; ++k) {
      st.points(k, base + 2 * k + 1) += h;
      st.points(k, base + 2 * k + 2) -= h;
      double a_plus = 1.0;
      double a_minus = 1.0;
      if (a) {
        for (Eigen::Index j = 0; j < space_dim; ++j) shifted[j] = points(j, i);
        shifted[k] = points(k, i) + 0.5 * h;
        a_plus = a(shifted);
        shifted[k] = points(k, i) - 0.5 * h;
        a_minus = a(shifted);
      }
      st.coefficients(2 * k + 1, i) = sign * a_plus * inv_h2;
      st.coefficients(2 * k + 2, i) = sign * a_minus * inv_h2;
    }
    if (time != TimeTerm::none) {
      const Eigen::Index t = space_dim;
      const Eigen::Index plus = 1 + 2 * space_dim;
      st.points(t, base + plus) += h;
      st.points(t, base + plus + 1) -= h;
      if (time == TimeTerm::first) {
        st.coefficients(plus, i) = 0.5 / h;
        st.coefficients(plus + 1, i) = -0.5 / h;
      } else {
        st.coefficients(plus, i) = inv_h2;
        st.coefficients(plus + 1, i) = inv_h2;
      }
    }
  }
  return st;
}

/// Sensitivity of the linear reduction: c_s for s >= 1, c_0 - sum c_s at the center.
Eigen::MatrixXd linear_sensitivity(const Stencil& st) {
  Eigen::MatrixXd sens = st.coefficients;
  if (st.width > 1) sens.row(0) -= st.coefficients.bottomRows(st.width - 1).colwise().sum();
  return sens;
}

Eigen::Index resolve_space_dim(Eigen::Index space_dim, const Points& points) {
  return space_dim > 0 ? space_dim : points.rows();
}

}  // namespace

FieldFn as_field(const SolutionAnsatz& ansatz) {
  return [&ansatz](const Points& p) { return ansatz.forward(p); };
}

FieldFn as_field(const MlpNetwork& net) {
  return [&net](const Points& p) { return net.forward(p); };
}

void OperatorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("OperatorConfig: fd step h must be positive");
}

std::string_view to_string(BoundaryOperatorKind kind) {
  switch (kind) {
    case BoundaryOperatorKind::dirichlet_trace:
      return "dirichlet_trace";
    case BoundaryOperatorKind::initial_value:
      return "initial_value";
    case BoundaryOperatorKind::initial_velocity:
      return "initial_velocity";
  }
  return "?";
}

Eigen::VectorXd reduce_linear(const Stencil& st, const Eigen::VectorXd& u) {
  if (u.size() != st.points.cols()) throw std::invalid_argument("reduce_linear: field value count mismatch");
  const Eigen::Index n = st.centers();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index base = i * st.width;
    const double u0 = u(base);
    double acc = st.coefficients(0, i) * u0;
    for (Eigen::Index s = 1; s < st.width; ++s) acc += st.coefficients(s, i) * (u(base + s) - u0);
    out(i) = acc;
  }
  return out;
}

StencilResult apply_elliptic_fd(const FieldFn& u, const PointFn& a, const Points& points, const OperatorConfig& cfg,
                                Eigen::Index space_dim) {
  cfg.validate();
  StencilResult r;
  r.stencil = build_stencil(points, resolve_space_dim(space_dim, points), a, 1.0, TimeTerm::none, cfg.h);
  r.field_values = u(r.stencil.points);
  r.values = reduce_linear(r.stencil, r.field_values);
  r.nonlinear = Eigen::VectorXd::Zero(points.cols());
  r.sensitivity = linear_sensitivity(r.stencil);
  return r;
}

Eigen::MatrixXd apply_gradient_fd(const FieldFn& u, const Points& points, const OperatorConfig& cfg,
                                  Eigen::Index space_dim) {
  cfg.validate();
  const Eigen::Index d = resolve_space_dim(space_dim, points);
  const Stencil st = build_stencil(points, d, {}, 1.0, TimeTerm::none, cfg.h);
  const Eigen::VectorXd values = u(st.points);
  Eigen::MatrixXd grad(d, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Eigen::Index base = i * st.width;
    for (Eigen::Index k = 0; k < d; ++k)
      grad(k, i) = (values(base + 2 * k + 1) - values(base + 2 * k + 2)) / (2.0 * cfg.h);
  }
  return grad;
}

Stencil make_operator_stencil(const ProblemSpec& problem, const Points& points, const OperatorConfig& cfg) {
  cfg.validate();
  if (points.rows() != problem.input_dim())
    throw std::invalid_argument("apply_operator: point dimension does not match the problem");
  const auto d = problem.space_dim();
  const auto& op = problem.op;
  using Tag = OperatorKind::Tag;
  switch (op.tag) {
    case Tag::divergence_form_elliptic:
      return build_stencil(points, d, op.a, -1.0, TimeTerm::none, cfg.h);
    case Tag::heat:
      return build_stencil(points, d, op.a, -1.0, TimeTerm::first, cfg.h);
    case Tag::allen_cahn: {
      Stencil st = build_stencil(points, d, {}, -1.0, TimeTerm::first, cfg.h);
      st.coefficients.row(0).array() = -1.0;
      return st;
    }
    case Tag::wave:
      return build_stencil(points, d, {}, -1.0, TimeTerm::second, cfg.h);
  }
  throw std::logic_error("make_operator_stencil: unhandled operator kind");
}

StencilResult reduce_operator(const ProblemSpec& problem, Stencil stencil, Eigen::VectorXd field_values,
                              const OperatorConfig& cfg) {
  StencilResult r;
  r.stencil = std::move(stencil);
  r.field_values = std::move(field_values);
  const Eigen::Index n = r.stencil.centers();
  const Eigen::Index w = r.stencil.width;
  r.values = reduce_linear(r.stencil, r.field_values);
  r.sensitivity = linear_sensitivity(r.stencil);
  r.nonlinear = Eigen::VectorXd::Zero(n);

  const auto& u = r.field_values;
  if (problem.op.gradient_square) {
    const double inv_2h = 0.5 / cfg.h;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index base = i * w;
      double acc = 0.0;
      for (Eigen::Index k = 0; k < problem.space_dim(); ++k) {
        const double g = (u(base + 2 * k + 1) - u(base + 2 * k + 2)) * inv_2h;
        acc += g * g;
        r.sensitivity(2 * k + 1, i) += 2.0 * g * inv_2h;
        r.sensitivity(2 * k + 2, i) -= 2.0 * g * inv_2h;
      }
      r.nonlinear(i) = acc;
    }
  }
  if (problem.op.tag == OperatorKind::Tag::allen_cahn) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u0 = u(i * w);
      r.nonlinear(i) = u0 * u0 * u0;
      r.sensitivity(0, i) += 3.0 * u0 * u0;
    }
  }
  r.values += r.nonlinear;
  return r;
}

StencilResult apply_operator(const ProblemSpec& problem, const FieldFn& u, const Points& points,
                             const OperatorConfig& cfg) {
  Stencil st = make_operator_stencil(problem, points, cfg);
  Eigen::VectorXd values = u(st.points);
  return reduce_operator(problem, std::move(st), std::move(values), cfg);
}

Stencil make_boundary_stencil(BoundaryOperatorKind kind, const Points& points, const OperatorConfig& cfg) {
  cfg.validate();
  Stencil st;
  const Eigen::Index n = points.cols();
  if (kind != BoundaryOperatorKind::initial_velocity) {
    st.width = 1;
    st.points = points;
    st.coefficients = Eigen::MatrixXd::Ones(1, n);
    return st;
  }
  const Eigen::Index t = points.rows() - 1;
  st.width = 3;
  st.points.resize(points.rows(), 3 * n);
  st.coefficients = Eigen::MatrixXd::Zero(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < 3; ++s) st.points.col(3 * i + s) = points.col(i);
    st.points(t, 3 * i + 1) += cfg.h;
    st.points(t, 3 * i + 2) -= cfg.h;
    st.coefficients(1, i) = 0.5 / cfg.h;
    st.coefficients(2, i) = -0.5 / cfg.h;
  }
  return st;
}

StencilResult reduce_boundary(Stencil stencil, Eigen::VectorXd field_values) {
  StencilResult r;
  r.stencil = std::move(stencil);
  r.field_values = std::move(field_values);
  r.values = reduce_linear(r.stencil, r.field_values);
  r.sensitivity = linear_sensitivity(r.stencil);
  r.nonlinear = Eigen::VectorXd::Zero(r.stencil.centers());
  return r;
}

StencilResult apply_boundary_operator(const ProblemSpec& problem, BoundaryOperatorKind kind, const FieldFn& u,
                                      const Points& points, const OperatorConfig& cfg) {
  if (!problem.uses(kind))
    throw std::invalid_argument("apply_boundary_operator: " + std::string(to_string(kind)) +
                                " is not a boundary operator of problem " + problem.name);
  if (points.rows() != problem.input_dim())
    throw std::invalid_argument("apply_boundary_operator: point dimension does not match the problem");
  const auto component =
      kind == BoundaryOperatorKind::dirichlet_trace ? BoundaryComponent::spatial : BoundaryComponent::initial;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const std::span<const double> p(points.col(i).data(), static_cast<std::size_t>(points.rows()));
    if (!problem.domain.on_component(p, component, kComponentTol))
      throw std::invalid_argument("apply_boundary_operator: point " + std::to_string(i) + " is not on the " +
                                  (component == BoundaryComponent::spatial ? "spatial boundary" : "t = 0 slice"));
  }
  Stencil st = make_boundary_stencil(kind, points, cfg);
  Eigen::VectorXd values = u(st.points);
  return reduce_boundary(std::move(st), std::move(values));
}

}  // namespace selectnet
