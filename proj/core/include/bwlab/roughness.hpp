#pragma once

#include "bwlab/hermite.hpp"
#include "bwlab/kernels.hpp"
#include "bwlab/numeric.hpp"
#include "bwlab/sample.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bwlab {

struct RoughnessEstimate
{
  double value = 0.0;
  std::string estimator;
  std::map<std::string, double> pilots;
  std::size_t n_pairs = 0;
  std::vector<std::string> flags;
};

//! Fourth derivative at zero of the expansion density with the given
//! coefficients: the model value of R(f'').
double r2m_model(std::span<const double> alphas, double sigma, double h_H);

//! Even derivative of order `order` at zero of the expansion density.
//! Needs at least one coefficient, and terms through `order` when order is
//! 6 or more. Order 4 agrees with r2m_model.
double g_even_derivative_model(std::span<const double> alphas, double sigma, double h_H, int order);

//! Pair weight c(j) = (-1)^j {1 + 4j/h_H^2 + (4/3) j(j-1)/h_H^4} / (2^j j!).
double r2m_pair_weight(int j, double h_H);

//! Pair-sum estimator of R(f'') from an order-2m expansion.
RoughnessEstimate r2m_hat(const Sample& sample,
                          double sigma,
                          double h_H,
                          int m,
                          const AlphaOptions& options = {});

//! The positive amount the diagonals-in estimator adds to (1 - 1/n) R_2m.
double diagonals_in_increment(SampleSize n, double sigma, double h_H, int m);

//! Diagonals-in sister of r2m_hat.
RoughnessEstimate r2m_diag(const Sample& sample,
                           double sigma,
                           double h_H,
                           int m,
                           const AlphaOptions& options = {});

//! b_2m = (2 pi)^(-1/2) alpha~_(2m+2) / h~_H^(2m+2) from coefficients at the
//! pilot Hermite bandwidth; the series is truncated after its first term.
double bias_coefficient_hat(const Sample& sample,
                            double sigma,
                            int m,
                            double h_H_tilde,
                            const AlphaOptions& options = {});

//! Same coefficient from a given alpha_(2m+2).
double bias_coefficient(double alpha_2m2, int m, double h_H_tilde);

//! Estimates of g^(6)(0) from coefficients through order 6 (s6) or 8 (s8).
double s6_hat(const Sample& sample, double sigma, double h_H_tilde, const AlphaOptions& options = {});
double s8_hat(const Sample& sample, double sigma, double h_H_tilde, const AlphaOptions& options = {});

//! R(f'') as the fourth derivative at zero of the multiplicatively
//! corrected normal start for g, with pilot kernel L and bandwidth h~.
//! Uses tau = sqrt(2) sigma.
RoughnessEstimate r_normal_start(const Sample& sample, double sigma, double h_tilde, Kernel L);
RoughnessEstimate r_normal_start(const Sample& sample, double h_tilde, Kernel L = Kernel::normal());

//! Exponent cap for exp(Y^2 / (2 tau^2)).
inline constexpr double kNormalStartExponentCap = 40.0;

struct LocalQuarticFit
{
  double a = 0.0;
  double b = 0.0; ///< coefficient of t^2
  double c = 0.0; ///< coefficient of t^4
  int iterations = 0;
  //! Score vector at the solution: moments minus model moments.
  std::array<double, 3> score{};
};

//! Maximizes m0 a + m2 b + m4 c - int L_w(t) exp(a + b t^2 + c t^4) dt,
//! where m_k is the L_w-weighted empirical moment of order k and L is the
//! Epanechnikov kernel with bandwidth w. Damped Newton; throws
//! ComputationError after 100 iterations.
LocalQuarticFit fit_local_quartic(const std::array<double, 3>& moments, double bandwidth);

//! Model moments int L_w(t) t^(2k) exp(a + b t^2 + c t^4) dt, k = 0, 1, 2.
std::array<double, 3> local_quartic_moments(double a, double b, double c, double bandwidth);

//! Local-likelihood R* = exp(a) (24 c + 12 b^2). L must be Epanechnikov.
RoughnessEstimate r_local_likelihood(const Sample& sample, double bandwidth, Kernel L = Kernel::epanechnikov());

//! Kernel estimate of the difference density at y: the symmetrized pair
//! average, or with `diagonals` the integral of fhat(x) fhat(x + y).
double g_kernel_estimate(const Sample& sample, double y, double h, Kernel L, bool diagonals);

} // namespace bwlab
