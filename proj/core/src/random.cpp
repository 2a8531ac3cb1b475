#include "bwlab/random.hpp"

#include "bwlab/numeric.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>

namespace bwlab {

std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed)
  : engine_(mix64(seed))
{}

Stream Stream::derive(std::uint64_t master_seed, std::uint64_t index)
{
  return Stream(mix64(mix64(master_seed) ^ mix64(~index)));
}

double Stream::uniform()
{
  // 53 random bits, shifted to the cell midpoint: never exactly 0 or 1
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Stream::normal()
{
  const double u = uniform();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

std::uint64_t Stream::below(std::uint64_t bound)
{
  if (bound == 0)
    throw InvalidArgument("Stream::below: bound must be positive");
  // rejection sampling keeps the draw exactly uniform
  const std::uint64_t limit = ~std::uint64_t{ 0 } - (~std::uint64_t{ 0 } % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

} // namespace bwlab
