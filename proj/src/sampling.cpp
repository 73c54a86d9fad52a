#include "selectnet/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selectnet {

namespace {

void require_positive(Eigen::Index n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": sample count must be >= 1");
}

Eigen::VectorXd random_direction(Eigen::Index d, RngStream& rng) {
  for (;;) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.normal();
    const double norm = v.norm();
    if (norm > 0.0) return v / norm;
  }
}

/// Point with |x| drawn so that |x|^d is uniform on (inner^d, outer^d).
Eigen::VectorXd shell_point(Eigen::Index d, double inner, double outer, RngStream& rng) {
  const double dd = static_cast<double>(d);
  const double lo = std::pow(inner, dd);
  const double hi = std::pow(outer, dd);
  for (;;) {
    const double r = std::pow(lo + rng.uniform_open() * (hi - lo), 1.0 / dd);
    Eigen::VectorXd x = r * random_direction(d, rng);
    const double norm = x.norm();
    if (norm > inner && norm < outer) return x;
  }
}

}  // namespace

std::string_view to_string(SamplingStrategy s) { return s == SamplingStrategy::uniform ? "uniform" : "annular"; }

SamplingStrategy parse_sampling_strategy(std::string_view name) {
  if (name == "uniform") return SamplingStrategy::uniform;
  if (name == "annular") return SamplingStrategy::annular;
  throw std::invalid_argument("unknown sampling strategy '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  if (annuli < 1) throw std::invalid_argument("SamplerConfig: N_a must be >= 1");
  if (interior_count < 1) throw std::invalid_argument("SamplerConfig: N1 must be >= 1");
  if (boundary_count < 0) throw std::invalid_argument("SamplerConfig: N2 must be >= 0");
  if (strategy == SamplingStrategy::annular && interior_count % annuli != 0)
    throw std::invalid_argument("SamplerConfig: N1 must be divisible by N_a for annular sampling");
}

Points SampleBatch::boundary_on(BoundaryComponent component) const {
  Eigen::Index count = 0;
  for (auto tag : boundary_tags) count += tag == component ? 1 : 0;
  Points out(boundary.rows(), count);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < boundary_tags.size(); ++i)
    if (boundary_tags[i] == component) out.col(k++) = boundary.col(static_cast<Eigen::Index>(i));
  return out;
}

Points sample_ball_annular(Eigen::Index d, Eigen::Index n, Eigen::Index annuli, RngStream& rng) {
  require_positive(n, "sample_ball_annular");
  if (annuli < 1 || n % annuli != 0)
    throw std::invalid_argument("sample_ball_annular: N=" + std::to_string(n) +
                                " is not divisible by N_a=" + std::to_string(annuli));
  const Eigen::Index per = n / annuli;
  Points out(d, n);
  for (Eigen::Index k = 0; k < annuli; ++k) {
    const double inner = static_cast<double>(k) / static_cast<double>(annuli);
    const double outer = static_cast<double>(k + 1) / static_cast<double>(annuli);
    for (Eigen::Index j = 0; j < per; ++j) out.col(k * per + j) = shell_point(d, inner, outer, rng);
  }
  return out;
}

Points sample_ball_uniform(Eigen::Index d, Eigen::Index n, RngStream& rng) {
  require_positive(n, "sample_ball_uniform");
  Points out(d, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = shell_point(d, 0.0, 1.0, rng);
  return out;
}

Points sample_sphere(Eigen::Index d, Eigen::Index n, RngStream& rng) {
  require_positive(n, "sample_sphere");
  Points out(d, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = random_direction(d, rng);
  return out;
}

Points sample_cube(Eigen::Index d, Eigen::Index n, RngStream& rng) {
  require_positive(n, "sample_cube");
  Points out(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      double v;
      do {
        v = rng.uniform(-1.0, 1.0);
      } while (!(std::abs(v) < 1.0));
      out(i, j) = v;
    }
  return out;
}

Points sample_cube_boundary(Eigen::Index d, Eigen::Index n, RngStream& rng) {
  require_positive(n, "sample_cube_boundary");
  Points out(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto face = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(2 * d)));
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = rng.uniform(-1.0, 1.0);
    out(face / 2, j) = (face % 2 == 0) ? 1.0 : -1.0;
  }
  return out;
}

namespace {

Points sample_space(const ProblemSpec& problem, const SamplerConfig& cfg, Eigen::Index n, RngStream& rng) {
  const Eigen::Index d = problem.space_dim();
  if (problem.domain.kind == Domain::Kind::cube) return sample_cube(d, n, rng);
  if (cfg.strategy == SamplingStrategy::annular) return sample_ball_annular(d, n, cfg.annuli, rng);
  return sample_ball_uniform(d, n, rng);
}

}  // namespace

Points sample_interior(const ProblemSpec& problem, const SamplerConfig& cfg, Eigen::Index n, RngStream& rng) {
  Points space = sample_space(problem, cfg, n, rng);
  if (!problem.time_dependent()) return space;
  Points out(problem.input_dim(), n);
  out.topRows(problem.space_dim()) = space;
  for (Eigen::Index j = 0; j < n; ++j) out(problem.space_dim(), j) = rng.uniform(0.0, problem.domain.final_time);
  return out;
}

SampleBatch sample_cylinder(const ProblemSpec& problem, const SamplerConfig& cfg, RngStream& interior_rng,
                            RngStream& boundary_rng) {
  if (!problem.time_dependent()) throw std::invalid_argument("sample_cylinder: " + problem.name + " is stationary");
  cfg.validate();
  const Eigen::Index d = problem.space_dim();
  SampleBatch batch;
  batch.interior = sample_interior(problem, cfg, cfg.interior_count, interior_rng);

  const Eigen::Index side = (cfg.boundary_count + 1) / 2;
  const Eigen::Index bottom = cfg.boundary_count / 2;
  batch.boundary.resize(d + 1, side + bottom);
  if (side > 0) {
    batch.boundary.block(0, 0, d, side) = sample_sphere(d, side, boundary_rng);
    for (Eigen::Index j = 0; j < side; ++j) batch.boundary(d, j) = boundary_rng.uniform(0.0, problem.domain.final_time);
  }
  if (bottom > 0) {
    batch.boundary.block(0, side, d, bottom) = sample_space(problem, cfg, bottom, boundary_rng);
    batch.boundary.block(d, side, 1, bottom).setZero();
  }
  batch.boundary_tags.assign(static_cast<std::size_t>(side), BoundaryComponent::spatial);
  batch.boundary_tags.insert(batch.boundary_tags.end(), static_cast<std::size_t>(bottom), BoundaryComponent::initial);
  return batch;
}

SampleBatch sample_batch(const ProblemSpec& problem, const SamplerConfig& sampler, RngStream& interior_rng,
                         RngStream& boundary_rng, bool with_boundary) {
  // The square is always sampled uniformly; annuli only make sense in the ball.
  SamplerConfig cfg = sampler;
  if (problem.domain.kind == Domain::Kind::cube) cfg.strategy = SamplingStrategy::uniform;
  cfg.validate();
  if (problem.time_dependent() && with_boundary) return sample_cylinder(problem, cfg, interior_rng, boundary_rng);

  SampleBatch batch;
  batch.interior = sample_interior(problem, cfg, cfg.interior_count, interior_rng);
  batch.boundary.resize(problem.input_dim(), 0);
  if (!with_boundary || cfg.boundary_count == 0) return batch;
  if (problem.time_dependent())
    throw std::logic_error("sample_batch: time-dependent problems always sample their boundary");
  const Eigen::Index d = problem.space_dim();
  batch.boundary = problem.domain.kind == Domain::Kind::cube ? sample_cube_boundary(d, cfg.boundary_count, boundary_rng)
                                                             : sample_sphere(d, cfg.boundary_count, boundary_rng);
  batch.boundary_tags.assign(static_cast<std::size_t>(cfg.boundary_count), BoundaryComponent::spatial);
  return batch;
}

}  // namespace selectnet
