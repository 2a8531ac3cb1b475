#pragma once

#include <cstdint>
#include <random>

namespace bwlab {

//! Deterministic random stream.
//!
//! Wraps std::mt19937_64, whose output sequence is fixed by the standard,
//! and converts bits to uniforms and normals by hand so draws are identical
//! across standard libraries. Independent streams for simulation
//! replications come from `derive(master_seed, index)`.
class Stream
{
public:
  explicit Stream(std::uint64_t seed);

  //! Stream for replication `index` of a run seeded with `master_seed`.
  static Stream derive(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  //! Uniform on the open interval (0, 1).
  double uniform();

  //! Standard normal by inverse CDF of one uniform.
  double normal();

  //! Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

//! SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

} // namespace bwlab
