#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own quadrature, minimizers or closed forms.

#include "bwlab/kernels.hpp"
#include "bwlab/mixtures.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double quad(const std::function<double(double)>& f, double a, double b, double tol = 1e-14)
{
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return GK::integrate(f, a, b, 20, tol);
}

inline double quad_line(const std::function<double(double)>& f, double tol = 1e-14)
{
  const double inf = std::numeric_limits<double>::infinity();
  return quad(f, -inf, inf, tol);
}

//! Integral split at the given interior breakpoints.
inline double quad_pieces(const std::function<double(double)>& f, std::vector<double> cuts, double tol = 1e-14)
{
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    s += quad(f, cuts[i], cuts[i + 1], tol);
  return s;
}

inline double phi(double x)
{
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

//! Textbook kernel definitions, written out again.
inline double K(bwlab::Kernel k, double u)
{
  if (k.kind() == bwlab::KernelKind::normal)
    return phi(u);
  return std::abs(u) <= 0.5 ? 1.5 * (1.0 - 4.0 * u * u) : 0.0;
}

inline double kernel_reach(bwlab::Kernel k)
{
  return k.kind() == bwlab::KernelKind::normal ? 12.0 : 0.5;
}

inline double mixture_pdf(const bwlab::NormalMixture& m, double x)
{
  double s = 0.0;
  for (const auto& c : m.components())
    s += c.weight * phi((x - c.mean) / c.sd) / c.sd;
  return s;
}

//! MISE of the kernel estimator by double quadrature of integrated
//! variance plus integrated squared bias.
inline double brute_force_mise(const bwlab::NormalMixture& f, bwlab::Kernel k, double n, double h)
{
  const double reach = kernel_reach(k);
  auto moments = [&](double x) {
    auto m1 = [&](double u) { return K(k, u) * mixture_pdf(f, x + h * u); };
    auto m2 = [&](double u) { return K(k, u) * K(k, u) * mixture_pdf(f, x + h * u); };
    std::vector<double> cuts{ -reach, 0.0, reach };
    return std::pair{ quad_pieces(m1, cuts, 1e-12), quad_pieces(m2, cuts, 1e-12) / h };
  };
  auto integrand = [&](double x) {
    const auto [e1, e2] = moments(x);
    const double var = (e2 - e1 * e1) / n;
    const double bias = e1 - mixture_pdf(f, x);
    return var + bias * bias;
  };
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& c : f.components()) {
    lo = std::min(lo, c.mean - 14.0 * c.sd);
    hi = std::max(hi, c.mean + 14.0 * c.sd);
  }
  lo -= reach * h;
  hi += reach * h;
  return quad_pieces(integrand, { lo, 0.5 * (lo + hi), hi }, 1e-11);
}

inline double roughness_by_quadrature(const std::function<double(double)>& f)
{
  return quad_line([&](double x) { return f(x) * f(x); });
}

//! Central difference of order `k` (even, <= 8) with step s, Richardson
//! extrapolated once.
inline double central_difference(const std::function<double(double)>& f, int k, double x, double s)
{
  auto raw = [&](double step) {
    // binomial stencil: sum (-1)^i C(k, i) f(x + (k/2 - i) step)
    double total = 0.0;
    double c = 1.0;
    for (int i = 0; i <= k; ++i) {
      if (i > 0)
        c = c * (k - i + 1) / i;
      total += ((i % 2) ? -c : c) * f(x + (k / 2.0 - i) * step);
    }
    return total / std::pow(step, k);
  };
  const double a = raw(s);
  const double b = raw(0.5 * s);
  return (4.0 * b - a) / 3.0;
}

//! Gauss-Hermite rule for weight exp(-x^2) with N points (Newton on the
//! physicists' recurrence).
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int N)
{
  std::vector<double> x(N), w(N);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (N + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * N + 1.0) - 1.85575 * std::pow(2.0 * N + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(N), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < N; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * N) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15)
        break;
    }
    x[i] = z;
    x[N - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[N - 1 - i] = w[i];
  }
  return { x, w };
}

//! E q(Z) for standard normal Z by Gauss-Hermite.
inline double normal_expectation(const std::function<double(double)>& q, int N = 60)
{
  const auto [x, w] = gauss_hermite(N);
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    s += w[i] * q(std::numbers::sqrt2 * x[i]);
  return s / std::sqrt(std::numbers::pi);
}

//! Hermite polynomials from the explicit sum over w(2j, l), j even orders
//! only, and from a naive power-series product for odd ones.
inline double hermite_explicit(int j, double x)
{
  // sum_l (-1)^l j! / (l! (j-2l)! 2^l) x^(j-2l)
  double s = 0.0;
  for (int l = 0; 2 * l <= j; ++l) {
    double c = std::tgamma(j + 1.0) / (std::tgamma(l + 1.0) * std::tgamma(j - 2.0 * l + 1.0) * std::pow(2.0, l));
    s += ((l % 2) ? -c : c) * std::pow(x, j - 2 * l);
  }
  return s;
}

} // namespace oracle
