#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace selectnet {

/// Purpose tags for the independent random streams of one run.
enum class StreamTag : std::uint64_t {
  init_solution = 1,
  init_selection_interior = 2,
  init_selection_boundary = 3,
  interior = 4,
  boundary = 5,
  test = 6,
};

/// SplitMix64 stream keyed by (seed, tag).
///
/// Output i of a stream is mix(key + (i+1)*gamma), so every stream is a pure
/// function of its key and position. Distinct tags give distinct keys through
/// the same finalizer, which keeps the interior/boundary/test/init draws of a
/// run independent of each other and of how many values any other stream
/// consumed.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, StreamTag tag);
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);
  double normal();
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return position_; }

  static constexpr std::string_view algorithm() { return "splitmix64-keyed"; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t position_ = 0;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace selectnet
