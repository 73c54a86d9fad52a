#include "selectnet/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace selectnet {

namespace {

using std::numbers::pi;

constexpr double kOriginGuard = 1e-8;
constexpr double kClosureTol = 1e-12;

/// cos(pi v) with exact zeros at half-integers.
double cospi(double v) {
  v = std::fmod(std::abs(v), 2.0);
  if (v == 0.5 || v == 1.5) return 0.0;
  return std::cos(pi * v);
}

double spatial_norm(std::span<const double> p, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

/// phi(r) = sin(pi/2 * (1-r)^2.5) with first and second radial derivatives.
/// (1-r)^2.5 is continued as sign(s)|s|^2.5 past r = 1 so that stencil
/// points just outside the ball stay finite and C^2.
struct Radial {
  double value;
  double d1;
  double d2;
};

Radial sine_profile(double r) {
  const double c = 0.5 * pi;
  const double s = 1.0 - r;
  const double as = std::abs(s);
  const double sg = s < 0.0 ? -1.0 : 1.0;
  const double psi = c * sg * std::pow(as, 2.5);
  const double psi_r = -2.5 * c * std::pow(as, 1.5);
  const double psi_rr = 3.75 * c * sg * std::sqrt(as);
  const double sn = std::sin(psi);
  const double cs = std::cos(psi);
  return {sn, cs * psi_r, -sn * psi_r * psi_r + cs * psi_rr};
}

/// Laplacian of a radial function in d dimensions; below the origin guard the
/// (d-1) phi'/r term takes its r -> 0 limit (d-1) phi''(0).
double radial_laplacian(const Radial& at_r, double r, Eigen::Index d, double d2_at_origin) {
  const double dm1 = static_cast<double>(d - 1);
  if (r < kOriginGuard) return at_r.d2 + dm1 * d2_at_origin;
  return at_r.d2 + dm1 * at_r.d1 / r;
}

PointFn pointwise_error(std::string what) {
  return [what = std::move(what)](std::span<const double>) -> double {
    throw std::logic_error(what);
  };
}

ProblemSpec poisson2d() {
  ProblemSpec p;
  p.name = "poisson2d";
  p.domain = {Domain::Kind::cube, 2, 1.0};
  p.op = {OperatorKind::Tag::divergence_form_elliptic, {}, false};
  p.spatial_ops = {BoundaryOperatorKind::dirichlet_trace};
  p.exact_u = [](std::span<const double> x) { return poisson2d_exact_cosh(x[0], x[1]); };
  p.f = [](std::span<const double>) { return 1.0; };
  p.g = [](std::span<const double>) { return 0.0; };
  p.h0 = pointwise_error("poisson2d has no initial data");
  p.h1 = p.h0;
  p.low_regularity_locus = "the four corners of the square";
  p.conforming_mask = Mask::cube;
  return p;
}

ProblemSpec elliptic_nl(Eigen::Index d) {
  ProblemSpec p;
  p.name = "elliptic_nl";
  p.domain = {Domain::Kind::unit_ball, d, 1.0};
  p.op.tag = OperatorKind::Tag::divergence_form_elliptic;
  p.op.a = [d](std::span<const double> x) {
    const double r = spatial_norm(x, d);
    return 1.0 + 0.5 * r * r;
  };
  p.op.gradient_square = true;
  p.spatial_ops = {BoundaryOperatorKind::dirichlet_trace};
  p.exact_u = [d](std::span<const double> x) { return sine_profile(spatial_norm(x, d)).value; };
  const double d2_origin = sine_profile(0.0).d2;
  // -div(a grad u) + |grad u|^2 with a = 1 + r^2/2, a'(r) = r.
  p.f = [d, d2_origin](std::span<const double> x) {
    const double r = spatial_norm(x, d);
    const Radial phi = sine_profile(r);
    const double a = 1.0 + 0.5 * r * r;
    const double lap = radial_laplacian(phi, r, d, d2_origin);
    return -(a * lap + r * phi.d1) + phi.d1 * phi.d1;
  };
  p.g = p.exact_u;
  p.h0 = pointwise_error("elliptic_nl has no initial data");
  p.h1 = p.h0;
  p.low_regularity_locus = "the origin (and third derivative on |x|=1)";
  p.conforming_mask = Mask::ball;
  return p;
}

ProblemSpec parabolic(Eigen::Index d) {
  ProblemSpec p;
  p.name = "parabolic";
  p.domain = {Domain::Kind::ball_time_cylinder, d, 1.0};
  p.op.tag = OperatorKind::Tag::heat;
  p.op.a = [d](std::span<const double> x) { return 1.0 + 0.5 * spatial_norm(x, d); };
  p.spatial_ops = {BoundaryOperatorKind::dirichlet_trace};
  p.initial_ops = {BoundaryOperatorKind::initial_value};
  p.exact_u = [d](std::span<const double> x) {
    const double q = std::sqrt(std::max(1.0 - x[d], 0.0));
    return std::exp(spatial_norm(x, d) * q);
  };
  // u = exp(r q), q = sqrt(1-t): u_r = q u, u_rr = q^2 u, u_t = -r u / (2q);
  // a = 1 + r/2 so div(a grad u) = a lap u + u_r / 2.
  p.f = [d](std::span<const double> x) {
    const double r = spatial_norm(x, d);
    const double q = std::sqrt(std::max(1.0 - x[d], 0.0));
    const double u = std::exp(r * q);
    const Radial phi{u, q * u, q * q * u};
    const double lap = radial_laplacian(phi, r, d, q * q);
    const double u_t = -r * u / (2.0 * q);
    return u_t - ((1.0 + 0.5 * r) * lap + 0.5 * phi.d1);
  };
  p.g = p.exact_u;
  p.h0 = [d](std::span<const double> x) { return std::exp(spatial_norm(x, d)); };
  p.h1 = pointwise_error("parabolic has no initial velocity");
  p.low_regularity_locus = "x = 0 and the terminal slice t = 1";
  return p;
}

ProblemSpec allen_cahn(Eigen::Index d) {
  ProblemSpec p;
  p.name = "allen_cahn";
  p.domain = {Domain::Kind::ball_time_cylinder, d, 1.0};
  p.op.tag = OperatorKind::Tag::allen_cahn;
  p.spatial_ops = {BoundaryOperatorKind::dirichlet_trace};
  p.initial_ops = {BoundaryOperatorKind::initial_value};
  p.exact_u = [d](std::span<const double> x) { return std::exp(-x[d]) * sine_profile(spatial_norm(x, d)).value; };
  const double d2_origin = sine_profile(0.0).d2;
  p.f = [d, d2_origin](std::span<const double> x) {
    const double r = spatial_norm(x, d);
    const double e = std::exp(-x[d]);
    const Radial phi = sine_profile(r);
    const double u = e * phi.value;
    const double lap = e * radial_laplacian(phi, r, d, d2_origin);
    return -u - lap - u + u * u * u;
  };
  p.g = p.exact_u;
  p.h0 = [d](std::span<const double> x) { return sine_profile(spatial_norm(x, d)).value; };
  p.h1 = pointwise_error("allen_cahn has no initial velocity");
  p.low_regularity_locus = "x = 0, largest residual near the initial slice t = 0";
  return p;
}

ProblemSpec wave(Eigen::Index d) {
  ProblemSpec p;
  p.name = "wave";
  p.domain = {Domain::Kind::ball_time_cylinder, d, 1.0};
  p.op.tag = OperatorKind::Tag::wave;
  p.spatial_ops = {BoundaryOperatorKind::dirichlet_trace};
  p.initial_ops = {BoundaryOperatorKind::initial_value, BoundaryOperatorKind::initial_velocity};
  p.exact_u = [d](std::span<const double> x) {
    const double t = x[d];
    return std::expm1(t * t) * sine_profile(spatial_norm(x, d)).value;
  };
  const double d2_origin = sine_profile(0.0).d2;
  p.f = [d, d2_origin](std::span<const double> x) {
    const double r = spatial_norm(x, d);
    const double t = x[d];
    const Radial phi = sine_profile(r);
    const double u_tt = (2.0 + 4.0 * t * t) * std::exp(t * t) * phi.value;
    return u_tt - std::expm1(t * t) * radial_laplacian(phi, r, d, d2_origin);
  };
  p.g = p.exact_u;
  p.h0 = [](std::span<const double>) { return 0.0; };
  p.h1 = [d](std::span<const double> x) {
    const double t = x[d];
    return 2.0 * t * std::exp(t * t) * sine_profile(spatial_norm(x, d)).value;
  };
  p.low_regularity_locus = "x = 0";
  return p;
}

}  // namespace

bool Domain::contains(std::span<const double> p) const {
  switch (kind) {
    case Kind::unit_ball:
      return spatial_norm(p, space_dim) < 1.0;
    case Kind::cube:
      for (Eigen::Index i = 0; i < space_dim; ++i)
        if (!(std::abs(p[i]) < 1.0)) return false;
      return true;
    case Kind::ball_time_cylinder: {
      const double t = p[space_dim];
      return spatial_norm(p, space_dim) < 1.0 && t > 0.0 && t < final_time;
    }
  }
  return false;
}

bool Domain::in_closure(std::span<const double> p, double tol) const {
  switch (kind) {
    case Kind::unit_ball:
      return spatial_norm(p, space_dim) <= 1.0 + tol;
    case Kind::cube:
      for (Eigen::Index i = 0; i < space_dim; ++i)
        if (!(std::abs(p[i]) <= 1.0 + tol)) return false;
      return true;
    case Kind::ball_time_cylinder: {
      const double t = p[space_dim];
      return spatial_norm(p, space_dim) <= 1.0 + tol && t >= -tol && t <= final_time + tol;
    }
  }
  return false;
}

bool Domain::on_component(std::span<const double> p, BoundaryComponent component, double tol) const {
  if (!in_closure(p, tol)) return false;
  if (component == BoundaryComponent::initial) return time_dependent() && std::abs(p[space_dim]) <= tol;
  if (kind == Kind::cube) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < space_dim; ++i) m = std::max(m, std::abs(p[i]));
    return std::abs(m - 1.0) <= tol;
  }
  return std::abs(spatial_norm(p, space_dim) - 1.0) <= tol;
}

bool ProblemSpec::uses(BoundaryOperatorKind kind) const {
  return std::find(spatial_ops.begin(), spatial_ops.end(), kind) != spatial_ops.end() ||
         std::find(initial_ops.begin(), initial_ops.end(), kind) != initial_ops.end();
}

double poisson2d_exact(double x1, double x2, int terms_limit) {
  if (terms_limit < 1 || terms_limit % 2 == 0)
    throw std::invalid_argument("poisson2d_exact: truncation must be a positive odd count");
  const int count = (terms_limit + 1) / 2;
  std::vector<double> c1(count), c2(count);
  for (int k = 0; k < count; ++k) {
    const int n = 2 * k + 1;
    c1[k] = cospi(n * x1 / 2.0);
    c2[k] = cospi(n * x2 / 2.0);
  }
  double sum = 0.0;
  for (int a = 0; a < count; ++a) {
    const double n = 2.0 * a + 1.0;
    for (int b = 0; b < count; ++b) {
      const double m = 2.0 * b + 1.0;
      // (n+m)/2 = a+b+1
      const double sign = ((a + b + 1) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * c1[a] * c2[b] / (n * m * (n * n + m * m));
    }
  }
  return -64.0 / (pi * pi * pi * pi) * sum;
}

double poisson2d_exact_cosh(double x1, double x2, int terms_limit) {
  if (terms_limit < 1 || terms_limit % 2 == 0)
    throw std::invalid_argument("poisson2d_exact_cosh: truncation must be a positive odd count");
  // On the sides x2 = +-1 the other orientation has every term exactly zero.
  if (std::abs(x2) == 1.0 && std::abs(x1) != 1.0) return poisson2d_exact_cosh(x2, x1, terms_limit);
  const double ay = std::abs(x2);
  // Term n carries cos(k x1) cosh(k y)/cosh(k) with k = n pi/2; the cosines
  // follow the Chebyshev recurrence and the exponentials a geometric one.
  const double c_step = 2.0 * cospi(x1);
  double c_prev = cospi(x1 / 2.0);
  double c = c_prev;
  const double decay_step = std::exp(pi * (ay - 1.0));
  const double mirror_step = std::exp(-2.0 * pi * ay);
  const double tail_step = std::exp(-2.0 * pi);
  double decay = std::exp(pi / 2.0 * (ay - 1.0));
  double mirror = std::exp(-pi * ay);
  double tail = std::exp(-pi);
  double sum = 0.0;
  for (int n = 1; n <= terms_limit; n += 2) {
    const double sign = ((n - 1) / 2 % 2 == 0) ? 1.0 : -1.0;
    const double b = 16.0 / (pi * pi * pi * n * n * n);
    if (b * 2.0 * decay < 1e-18) break;
    sum += sign * b * c * decay * (1.0 + mirror) / (1.0 + tail);
    const double c_next = c_step * c - c_prev;
    c_prev = c;
    c = c_next;
    decay *= decay_step;
    mirror *= mirror_step;
    tail *= tail_step;
  }
  return 0.5 * (1.0 - x1 * x1) - sum;
}

ProblemSpec make_problem(std::string_view name, Eigen::Index d) {
  if (name == "poisson2d") return poisson2d();
  if (name != "elliptic_nl" && name != "parabolic" && name != "allen_cahn" && name != "wave")
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
  if (d < 2) throw std::invalid_argument("make_problem: dimension must be at least 2");
  if (name == "elliptic_nl") return elliptic_nl(d);
  if (name == "parabolic") return parabolic(d);
  if (name == "allen_cahn") return allen_cahn(d);
  return wave(d);
}

std::vector<std::string> problem_names() { return {"poisson2d", "elliptic_nl", "parabolic", "allen_cahn", "wave"}; }

Eigen::VectorXd evaluate_pointwise(const PointFn& fn, const Points& points) {
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    out(i) = fn(std::span<const double>(points.col(i).data(), static_cast<std::size_t>(points.rows())));
  return out;
}

Eigen::VectorXd evaluate_f(const ProblemSpec& problem, const Points& points) {
  if (points.rows() != problem.input_dim())
    throw std::invalid_argument("evaluate_f: point dimension does not match the problem");
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const std::span<const double> p(points.col(i).data(), static_cast<std::size_t>(points.rows()));
    if (!problem.domain.in_closure(p, kClosureTol))
      throw std::invalid_argument("evaluate_f: point " + std::to_string(i) + " lies outside the domain of " +
                                  problem.name);
  }
  return evaluate_pointwise(problem.f, points);
}

Eigen::VectorXd evaluate_boundary_data(const ProblemSpec& problem, BoundaryOperatorKind kind, const Points& points) {
  switch (kind) {
    case BoundaryOperatorKind::dirichlet_trace:
      return evaluate_pointwise(problem.g, points);
    case BoundaryOperatorKind::initial_value:
      return evaluate_pointwise(problem.h0, points);
    case BoundaryOperatorKind::initial_velocity:
      return evaluate_pointwise(problem.h1, points);
  }
  throw std::logic_error("evaluate_boundary_data: unhandled kind");
}

FieldFn exact_field(const ProblemSpec& problem) {
  return [fn = problem.exact_u](const Points& p) { return evaluate_pointwise(fn, p); };
}

}  // namespace selectnet
