#pragma once

#include "bwlab/numeric.hpp"
#include "bwlab/sample.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bwlab {

inline constexpr int kMaxHermiteOrder = 24;

//! Probabilists' Hermite polynomial H_j(x), with phi^(j) = (-1)^j phi H_j.
//! Evaluated by the three-term recurrence H_{j+1} = x H_j - j H_{j-1}.
double hermite_poly(int j, double x);

//! H_0(x), ..., H_jmax(x) in one recurrence pass.
std::vector<double> hermite_poly_all(int jmax, double x);

//! k-th derivative of H_j at x, using H_j' = j H_{j-1}.
double hermite_poly_derivative(int j, int k, double x);

//! Coefficients w(2j, l) = (2j)! / {l! (2j-2l)! 2^l}, l = 0..j, so that
//! H_2j(x) = sum_l (-1)^l w(2j, l) x^(2j-2l).
std::vector<double> hermite_zero_coeffs(int j);

//! E H_2j(cZ) for standard normal Z: {(2j)! / (2^j j!)} (c^2 - 1)^j.
double normal_hermite_moment(int j, double c);

//! lambda_{2j,2i} = integral of H_2j(u) phi(u) u^(2i) du, computed from
//! exact integer arithmetic. Zero for j > i.
double lambda_moment(int j, int i);

//! sum_{0 <= j <= i} (-1)^j lambda_{2j,2i} / (2^j j!), evaluated exactly;
//! vanishes for every i >= 1.
double appendix_identity_check(int i);

//! Even-coefficient Hermite expansion of the difference density:
//!
//!   g_2m(y) = phi(y / tau) / tau * sum_j alpha_2j / (2j)! H_2j(y / (h_H tau)),
//!
//! with tau = sqrt(2) sigma. `alphas` holds alpha_0, alpha_2, ..., alpha_2m.
struct HermiteModel
{
  double sigma = 1.0;
  double h_H = 1.0;
  std::vector<double> alphas{ 1.0 };

  int order() const { return static_cast<int>(alphas.size()) - 1; }
};

//! Model density at y. May be negative; that is permitted.
double expansion_density(const HermiteModel& model, double y);

struct AlphaOptions
{
  //! Samples larger than this are replaced by a uniform random subsample
  //! of this many points before the pair sweep.
  std::size_t max_points = 4000;
  std::uint64_t subsample_seed = 0;
};

struct AlphaEstimate
{
  std::vector<double> alphas;
  bool subsampled = false;
  std::size_t points_used = 0;
};

//! The points entering a pair sweep: the sample itself, or a seeded
//! uniform subsample of `max_points` kept in original order.
std::vector<double> sweep_points(const Sample& sample, const AlphaOptions& options, bool* subsampled);

//! Pair-average coefficient estimates alpha_0, alpha_2, ..., alpha_2m:
//!
//!   mean over i < l of h_H^-1 H_2j(u) exp{-(1 - h_H^2) u^2 / 2},
//!   u = Y_il / (h_H sqrt(2) sigma).
//!
//! Requires n >= 2 and 0 < h_H <= 1.5.
AlphaEstimate estimate_alphas(const Sample& sample,
                              double sigma,
                              double h_H,
                              int m,
                              const AlphaOptions& options);

std::vector<double> estimate_alphas(const Sample& sample, double sigma, double h_H, int m);

//! Diagonals-in coefficients
//! (1 - 1/n) alpha_2j + (n h_H)^-1 (-1)^j (2j)! / (2^j j!).
std::vector<double> diagonals_in_alphas(std::span<const double> alphas,
                                        SampleSize n,
                                        double h_H);

//! Exact coefficients of a density g by quadrature of the defining
//! integral. Throws ComputationError if the quadrature fails, which
//! happens when g's tails do not beat the growing weight (h_H > 1).
std::vector<double> alphas_from_density(const std::function<double(double)>& g,
                                        double sigma,
                                        double h_H,
                                        int m);

} // namespace bwlab
