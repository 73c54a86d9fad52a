#include "selectnet/rng.hpp"

#include <stdexcept>

namespace selectnet {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamTag tag)
    : RngStream(seed, static_cast<std::uint64_t>(tag)) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(mix64(seed) ^ mix64(stream_id * kGamma + 1))) {}

RngStream::result_type RngStream::operator()() {
  ++position_;
  return mix64(key_ + position_ * kGamma);
}

double RngStream::uniform_open() {
  // 53 random bits, shifted half a unit so neither endpoint is reachable.
  const auto bits = (*this)() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

double RngStream::normal() { return gauss_(*this); }

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RngStream::below: bound must be positive");
  // Lemire-style rejection to avoid modulo bias.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const auto r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace selectnet
