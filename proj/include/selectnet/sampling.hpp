#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

#include "selectnet/net.hpp"
#include "selectnet/problems.hpp"
#include "selectnet/rng.hpp"

namespace selectnet {

enum class SamplingStrategy { uniform, annular };
std::string_view to_string(SamplingStrategy s);
SamplingStrategy parse_sampling_strategy(std::string_view name);

struct SamplerConfig {
  Eigen::Index annuli = 10;
  Eigen::Index interior_count = 10000;
  Eigen::Index boundary_count = 10000;
  SamplingStrategy strategy = SamplingStrategy::annular;

  void validate() const;
};

struct SampleBatch {
  Points interior;
  Points boundary;
  std::vector<BoundaryComponent> boundary_tags;

  /// Boundary points carrying `component`, in batch order.
  Points boundary_on(BoundaryComponent component) const;
};

/// N/N_a points in each annulus k/N_a < |x| < (k+1)/N_a, annulus-major order.
Points sample_ball_annular(Eigen::Index d, Eigen::Index n, Eigen::Index annuli, RngStream& rng);
/// Uniform in the open unit ball.
Points sample_ball_uniform(Eigen::Index d, Eigen::Index n, RngStream& rng);
/// Uniform on the unit sphere.
Points sample_sphere(Eigen::Index d, Eigen::Index n, RngStream& rng);
/// Uniform in (-1, 1)^d.
Points sample_cube(Eigen::Index d, Eigen::Index n, RngStream& rng);
/// Uniform face choice, then uniform on the face.
Points sample_cube_boundary(Eigen::Index d, Eigen::Index n, RngStream& rng);

/// Interior points of Omega x (0,T); boundary split ceil(N2/2) side points
/// and floor(N2/2) points on t = 0.
SampleBatch sample_cylinder(const ProblemSpec& problem, const SamplerConfig& cfg, RngStream& interior_rng,
                            RngStream& boundary_rng);

/// Interior points in Q for any problem (training or testing draw).
Points sample_interior(const ProblemSpec& problem, const SamplerConfig& cfg, Eigen::Index n, RngStream& rng);

/// Fresh training batch. Boundary points are skipped when `with_boundary`
/// is false (boundary-conforming ansatz).
SampleBatch sample_batch(const ProblemSpec& problem, const SamplerConfig& cfg, RngStream& interior_rng,
                         RngStream& boundary_rng, bool with_boundary = true);

}  // namespace selectnet
