#pragma once

#include <cstdint>
#include <random>

namespace lart {

// Seeded random stream. Distinct (seed, stream_id) pairs give independent
// streams; draws are reproducible across platforms because normals go through
// the explicit quantile function rather than std::normal_distribution.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  // Uniform draw in the open interval (0, 1).
  double uniform();
  // Standard normal draw.
  double normal();
  std::uint64_t next_u64();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
};

}  // namespace lart
