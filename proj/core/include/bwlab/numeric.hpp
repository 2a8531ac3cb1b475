#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bwlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kInvSqrt2Pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;

//! Bad input: invalid bandwidth, sample size, order, malformed data.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical procedure failed (quadrature, root finding, optimization).
class ComputationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Sample size n, with an explicit n = infinity limit.
//!
//! Most formulas only need 1/n, which is zero in the limit.
class SampleSize
{
public:
  SampleSize(std::size_t n) // NOLINT(google-explicit-constructor)
    : n_(static_cast<double>(n))
  {}

  static SampleSize infinite() { return SampleSize(); }

  bool is_infinite() const { return std::isinf(n_); }
  double value() const { return n_; }
  double inverse() const { return is_infinite() ? 0.0 : 1.0 / n_; }

  //! Throws InvalidArgument when a finite n is below `minimum`.
  void require_at_least(std::size_t minimum, const char* what) const;

private:
  SampleSize()
    : n_(std::numeric_limits<double>::infinity())
  {}
  double n_;
};

//! Neumaier-compensated running sum; order-dependent only through
//! the order of `add` calls.
class CompensatedSum
{
public:
  void add(double x)
  {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double normal_pdf(double x)
{
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

//! Density of N(mean, variance) at x.
inline double normal_pdf(double x, double mean, double variance)
{
  const double z = x - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * kPi * variance);
}

// ---------------------------------------------------------------------------
// quadrature

struct QuadratureResult
{
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
  bool converged = true;
};

inline constexpr std::size_t kMaxQuadratureIntervals = std::size_t{ 1 } << 14;

//! Adaptive Simpson rule with Richardson correction on [a, b].
//!
//! The range is first cut into 16 equal panels; each panel is bisected
//! until the local error estimate is below its share of `abs_tol`.
//! `converged` is false if the interval cap was hit.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a,
                                  double b,
                                  double abs_tol,
                                  std::size_t max_intervals = kMaxQuadratureIntervals);

//! Integral over [a, b]; throws ComputationError when not converged.
double integrate(const std::function<double(double)>& f,
                 double a,
                 double b,
                 double abs_tol = 1e-10);

//! Integral over the real line through x = scale * t / (1 - t^2).
//! `scale` should be of the order of the integrand's spread.
double integrate_real_line(const std::function<double(double)>& f,
                           double scale,
                           double abs_tol = 1e-10);

// ---------------------------------------------------------------------------
// scalar minimization

struct Bracket
{
  double lo;
  double hi;
};

struct MinimizeResult
{
  double argmin = 0.0;
  double value = 0.0;
  bool at_boundary = false;
  std::size_t evaluations = 0;
};

//! Golden-section search in log(h) on a positive bracket.
//!
//! Guaranteed to converge for unimodal objectives. When the best point is
//! an endpoint, that endpoint is returned with `at_boundary` set. Non-finite
//! objective values throw ComputationError.
MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               Bracket bracket,
                               double rel_tol = 1e-6);

enum class ScanMode
{
  global,     ///< best grid point overall
  first_local ///< leftmost interior grid point that is a local minimum
};

//! Log-spaced grid scan followed by golden-section polish in the cell
//! around the chosen grid point. For rough or multimodal objectives.
MinimizeResult minimize_scan(const std::function<double(double)>& f,
                             Bracket bracket,
                             std::size_t grid_points = 200,
                             double rel_tol = 1e-6,
                             ScanMode mode = ScanMode::global);

} // namespace bwlab
