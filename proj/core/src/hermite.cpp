#include "bwlab/hermite.hpp"

#include "bwlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bwlab {

namespace {

__extension__ typedef __int128 Int128;

void check_order(int j, const char* what)
{
  if (j < 0 || j > kMaxHermiteOrder) {
    throw InvalidArgument(std::string(what) + ": Hermite order must lie in [0, " +
                          std::to_string(kMaxHermiteOrder) + "]");
  }
}

Int128 factorial(int k)
{
  Int128 r = 1;
  for (int i = 2; i <= k; ++i)
    r *= i;
  return r;
}

//! (2k - 1)!! = (2k)! / (k! 2^k), the 2k-th standard normal moment.
Int128 double_factorial_odd(int k)
{
  Int128 r = 1;
  for (int i = 2 * k - 1; i > 1; i -= 2)
    r *= i;
  return r;
}

Int128 binomial(int n, int k)
{
  Int128 r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

//! w(2j, l) = C(2j, 2l) (2l - 1)!!.
Int128 w_coefficient(int j, int l)
{
  return binomial(2 * j, 2 * l) * double_factorial_odd(l);
}

Int128 lambda_exact(int j, int i)
{
  if (j > i)
    return 0;
  Int128 total = 0;
  for (int l = 0; l <= j; ++l) {
    const Int128 term = w_coefficient(j, l) * double_factorial_odd(j - l + i);
    total += (l % 2 == 0) ? term : -term;
  }
  return total;
}

double to_double(Int128 x)
{
  return static_cast<double>(static_cast<long double>(x));
}

double hermite_zero_value(int two_j)
{
  // H_2j(0) = (-1)^j (2j - 1)!!
  const int j = two_j / 2;
  const double v = to_double(double_factorial_odd(j));
  return (j % 2 == 0) ? v : -v;
}

} // namespace

double hermite_poly(int j, double x)
{
  check_order(j, "hermite_poly");
  if (j == 0)
    return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < j; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_poly_all(int jmax, double x)
{
  check_order(jmax, "hermite_poly_all");
  std::vector<double> h(static_cast<std::size_t>(jmax) + 1);
  h[0] = 1.0;
  if (jmax >= 1)
    h[1] = x;
  for (int k = 1; k < jmax; ++k)
    h[k + 1] = x * h[k] - k * h[k - 1];
  return h;
}

double hermite_poly_derivative(int j, int k, double x)
{
  check_order(j, "hermite_poly_derivative");
  if (k < 0)
    throw InvalidArgument("hermite_poly_derivative: negative derivative order");
  if (k > j)
    return 0.0;
  double falling = 1.0;
  for (int i = 0; i < k; ++i)
    falling *= j - i;
  return falling * hermite_poly(j - k, x);
}

std::vector<double> hermite_zero_coeffs(int j)
{
  if (j < 0 || 2 * j > kMaxHermiteOrder)
    throw InvalidArgument("hermite_zero_coeffs: need 0 <= j <= 12");
  std::vector<double> w(static_cast<std::size_t>(j) + 1);
  for (int l = 0; l <= j; ++l)
    w[l] = to_double(w_coefficient(j, l));
  return w;
}

double normal_hermite_moment(int j, double c)
{
  if (j < 0)
    throw InvalidArgument("normal_hermite_moment: negative order");
  return to_double(double_factorial_odd(j)) * std::pow(c * c - 1.0, j);
}

double lambda_moment(int j, int i)
{
  if (j < 0 || i < 0 || i > 10)
    throw InvalidArgument("lambda_moment: need 0 <= j and 0 <= i <= 10");
  return to_double(lambda_exact(j, i));
}

double appendix_identity_check(int i)
{
  if (i < 1 || i > 8)
    throw InvalidArgument("appendix_identity_check: need 1 <= i <= 8");
  // common denominator 2^i i! turns every term into an integer
  const Int128 denom = (Int128{ 1 } << i) * factorial(i);
  Int128 total = 0;
  for (int j = 0; j <= i; ++j) {
    const Int128 scale = denom / ((Int128{ 1 } << j) * factorial(j));
    const Int128 term = lambda_exact(j, i) * scale;
    total += (j % 2 == 0) ? term : -term;
  }
  return to_double(total) / to_double(denom);
}

double expansion_density(const HermiteModel& model, double y)
{
  const int m = model.order();
  if (m < 0)
    throw InvalidArgument("expansion_density: empty coefficient list");
  const double tau = std::numbers::sqrt2 * model.sigma;
  const auto h = hermite_poly_all(2 * m, y / (model.h_H * tau));
  double sum = 0.0;
  double fact = 1.0; // (2j)!
  for (int j = 0; j <= m; ++j) {
    if (j > 0)
      fact *= (2.0 * j - 1.0) * (2.0 * j);
    sum += model.alphas[j] / fact * h[2 * j];
  }
  return normal_pdf(y / tau) / tau * sum;
}

std::vector<double> sweep_points(const Sample& sample, const AlphaOptions& options, bool* subsampled)
{
  std::vector<double> points(sample.values().begin(), sample.values().end());
  if (subsampled)
    *subsampled = false;
  if (options.max_points < 2 || points.size() <= options.max_points)
    return points;
  // partial Fisher-Yates, then restore the original order of the kept points
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{ 0 });
  Stream stream(options.subsample_seed);
  for (std::size_t k = 0; k < options.max_points; ++k) {
    const auto r = k + static_cast<std::size_t>(stream.below(idx.size() - k));
    std::swap(idx[k], idx[r]);
  }
  idx.resize(options.max_points);
  std::sort(idx.begin(), idx.end());
  std::vector<double> kept(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    kept[k] = points[idx[k]];
  if (subsampled)
    *subsampled = true;
  return kept;
}

AlphaEstimate estimate_alphas(const Sample& sample,
                              double sigma,
                              double h_H,
                              int m,
                              const AlphaOptions& options)
{
  if (sample.size() < 2)
    throw InvalidArgument("estimate_alphas: need at least two observations");
  if (!(sigma > 0.0))
    throw InvalidArgument("estimate_alphas: sigma must be positive");
  if (!(h_H > 0.0 && h_H <= 1.5))
    throw InvalidArgument("estimate_alphas: h_H must lie in (0, 1.5]");
  if (m < 0 || 2 * m > kMaxHermiteOrder)
    throw InvalidArgument("estimate_alphas: order out of range");

  AlphaEstimate out;
  const std::vector<double> points = sweep_points(sample, options, &out.subsampled);
  out.points_used = points.size();

  const double scale = 1.0 / (h_H * std::numbers::sqrt2 * sigma);
  const double damp = 0.5 * (1.0 - h_H * h_H);
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(m) + 1);
  std::vector<double> h(2 * static_cast<std::size_t>(m) + 1);
  const std::size_t n = points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double u = (points[l] - points[i]) * scale;
      const double weight = std::exp(-damp * u * u);
      h[0] = 1.0;
      if (m > 0)
        h[1] = u;
      for (int k = 1; k < 2 * m; ++k)
        h[k + 1] = u * h[k] - k * h[k - 1];
      for (int j = 0; j <= m; ++j)
        sums[j].add(h[2 * j] * weight);
    }
  }

  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  out.alphas.resize(sums.size());
  for (std::size_t j = 0; j < sums.size(); ++j)
    out.alphas[j] = sums[j].value() / (pairs * h_H);
  return out;
}

std::vector<double> estimate_alphas(const Sample& sample, double sigma, double h_H, int m)
{
  return estimate_alphas(sample, sigma, h_H, m, AlphaOptions{}).alphas;
}

std::vector<double> diagonals_in_alphas(std::span<const double> alphas, SampleSize n, double h_H)
{
  n.require_at_least(2, "diagonals_in_alphas");
  if (!(h_H > 0.0))
    throw InvalidArgument("diagonals_in_alphas: h_H must be positive");
  std::vector<double> out(alphas.size());
  const double inv_n = n.inverse();
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double diag = hermite_zero_value(2 * static_cast<int>(j)); // (-1)^j (2j)!/(2^j j!)
    out[j] = (1.0 - inv_n) * alphas[j] + inv_n / h_H * diag;
  }
  return out;
}

std::vector<double> alphas_from_density(const std::function<double(double)>& g,
                                        double sigma,
                                        double h_H,
                                        int m)
{
  if (!(sigma > 0.0) || !(h_H > 0.0))
    throw InvalidArgument("alphas_from_density: sigma and h_H must be positive");
  if (m < 0 || 2 * m > kMaxHermiteOrder)
    throw InvalidArgument("alphas_from_density: order out of range");

  const double tau = std::numbers::sqrt2 * sigma;
  const double damp = 0.5 * (1.0 - h_H * h_H);
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    // substitute y = h_H tau u
    auto integrand = [&](double u) {
      const double gy = g(h_H * tau * u);
      if (gy == 0.0)
        return 0.0;
      return tau * hermite_poly(2 * j, u) * std::exp(-damp * u * u) * gy;
    };
    try {
      out[j] = integrate_real_line(integrand, 2.0, 1e-13);
    } catch (const ComputationError& e) {
      throw ComputationError(std::string("alphas_from_density: quadrature failed (h_H too "
                                         "large for the tails of g?): ") +
                             e.what());
    }
  }
  return out;
}

} // namespace bwlab
