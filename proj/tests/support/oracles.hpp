#pragma once

// Reference computations written without the library's batched code paths.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "selectnet/net.hpp"
#include "selectnet/problems.hpp"

namespace oracle {

using Vec = Eigen::VectorXd;

/// Straight-line recursion, one point, one neuron at a time.
inline double mlp_value(const selectnet::MlpNetwork& net, const Vec& x) {
  const auto& p = net.parameters();
  std::vector<double> cur(x.data(), x.data() + x.size());
  const std::size_t depth = net.shape().depth;
  for (std::size_t l = 0; l <= depth; ++l) {
    const auto& W = p.weights[l];
    std::vector<double> next(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc = p.biases[l](i);
      for (Eigen::Index j = 0; j < W.cols(); ++j) acc += W(i, j) * cur[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = l < depth ? selectnet::activate(net.activation(), acc) : acc;
    }
    cur = std::move(next);
  }
  return cur[0];
}

/// Central difference of `fn` in one flat parameter coordinate.
inline double param_derivative(selectnet::ParameterSet& params, std::size_t index, double step,
                               const std::function<double()>& fn) {
  const double saved = params.at(index);
  params.at(index) = saved + step;
  const double up = fn();
  params.at(index) = saved - step;
  const double down = fn();
  params.at(index) = saved;
  return (up - down) / (2.0 * step);
}

/// Fourth-order central derivatives of a pointwise function along axis k.
inline double d1(const selectnet::PointFn& u, Vec x, Eigen::Index k, double h) {
  auto at = [&](double s) {
    Vec y = x;
    y(k) += s;
    return u({y.data(), static_cast<std::size_t>(y.size())});
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double d2(const selectnet::PointFn& u, Vec x, Eigen::Index k, double h) {
  auto at = [&](double s) {
    Vec y = x;
    y(k) += s;
    return u({y.data(), static_cast<std::size_t>(y.size())});
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
}

/// div(a grad u) = sum_k d_k(a d_k u) expanded as a u_kk + a_k u_k.
inline double div_a_grad(const selectnet::PointFn& u, const selectnet::PointFn& a, const Vec& x, Eigen::Index d,
                         double h) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double av = a ? a({x.data(), static_cast<std::size_t>(x.size())}) : 1.0;
    const double ak = a ? d1(a, x, k, h) : 0.0;
    acc += av * d2(u, x, k, h) + ak * d1(u, x, k, h);
  }
  return acc;
}

/// The problem's interior operator applied to its exact solution with
/// fourth-order differences at step h (time step capped by the distance to
/// t = 1 for problems whose solution loses smoothness there).
inline double operator_on_exact(const selectnet::ProblemSpec& p, const Vec& x, double h) {
  using Tag = selectnet::OperatorKind::Tag;
  const Eigen::Index d = p.space_dim();
  const double div = div_a_grad(p.exact_u, p.op.a, x, d, h);
  if (p.op.tag == Tag::divergence_form_elliptic) {
    double grad_sq = 0.0;
    if (p.op.gradient_square)
      for (Eigen::Index k = 0; k < d; ++k) grad_sq += std::pow(d1(p.exact_u, x, k, h), 2);
    return -div + grad_sq;
  }
  const double ht = std::min(h, (1.0 - x(d)) / 10.0);
  const double u = p.exact_u({x.data(), static_cast<std::size_t>(x.size())});
  switch (p.op.tag) {
    case Tag::heat:
      return d1(p.exact_u, x, d, ht) - div;
    case Tag::allen_cahn:
      return d1(p.exact_u, x, d, ht) - div - u + u * u * u;
    case Tag::wave:
      return d2(p.exact_u, x, d, ht) - div;
    default:
      return 0.0;
  }
}

}  // namespace oracle
