#include "bwlab/roughness.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

namespace bwlab {

namespace {

void check_sigma_h(double sigma, double h_H, const char* what)
{
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidArgument(std::string(what) + ": sigma must be positive");
  if (!(h_H > 0.0 && h_H <= 1.5))
    throw InvalidArgument(std::string(what) + ": h_H must lie in (0, 1.5]");
}

double pow_int(double x, int k)
{
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= x;
  return r;
}

} // namespace

double r2m_pair_weight(int j, double h_H)
{
  double denom = 1.0; // 2^j j!
  for (int i = 1; i <= j; ++i)
    denom *= 2.0 * i;
  const double h2 = h_H * h_H;
  const double brace = 1.0 + 4.0 * j / h2 + (4.0 / 3.0) * j * (j - 1) / (h2 * h2);
  return ((j % 2 == 0) ? 1.0 : -1.0) * brace / denom;
}

double r2m_model(std::span<const double> alphas, double sigma, double h_H)
{
  if (alphas.empty())
    throw InvalidArgument("r2m_model: empty coefficient list");
  double s = 0.0;
  for (std::size_t j = 0; j < alphas.size(); ++j)
    s += alphas[j] * r2m_pair_weight(static_cast<int>(j), h_H);
  return 3.0 / (8.0 * kSqrtPi * pow_int(sigma, 5)) * s;
}

double g_even_derivative_model(std::span<const double> alphas, double sigma, double h_H, int order)
{
  if (alphas.empty())
    throw InvalidArgument("g_even_derivative_model: empty coefficient list");
  if (order < 0 || order % 2 != 0 || order > 12)
    throw InvalidArgument("g_even_derivative_model: order must be even and at most 12");
  if (order >= 6 && alphas.size() < static_cast<std::size_t>(order / 2 + 1))
    throw InvalidArgument("g_even_derivative_model: order 6 and above need terms through that order");
  const double tau = std::numbers::sqrt2 * sigma;
  const double phi0 = kInvSqrt2Pi;
  double total = 0.0;
  double fact = 1.0; // (2j)!
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const int two_j = 2 * static_cast<int>(j);
    if (j > 0)
      fact *= (two_j - 1.0) * two_j;
    // Leibniz over the even orders k falling on phi
    double inner = 0.0;
    double binom = 1.0; // C(order, k)
    for (int k = 0; k <= order; ++k) {
      if (k > 0)
        binom = binom * (order - k + 1) / k;
      if (k % 2 != 0)
        continue;
      const int p = order - k;
      const double hp = hermite_poly_derivative(two_j, p, 0.0);
      if (hp == 0.0)
        continue;
      inner += binom * phi0 * hermite_poly(k, 0.0) * hp / pow_int(h_H, p);
    }
    total += alphas[j] / fact * inner;
  }
  return total / pow_int(tau, order + 1);
}

RoughnessEstimate r2m_hat(const Sample& sample,
                          double sigma,
                          double h_H,
                          int m,
                          const AlphaOptions& options)
{
  if (sample.size() < 2)
    throw InvalidArgument("r2m_hat: need at least two observations");
  check_sigma_h(sigma, h_H, "r2m_hat");
  if (m < 0 || 2 * m > kMaxHermiteOrder)
    throw InvalidArgument("r2m_hat: order out of range");

  RoughnessEstimate out;
  out.estimator = "r2m";
  bool subsampled = false;
  const auto points = sweep_points(sample, options, &subsampled);
  if (subsampled)
    out.flags.push_back("subsampled");

  std::vector<double> c(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j)
    c[j] = r2m_pair_weight(j, h_H);

  const double scale = 1.0 / (h_H * std::numbers::sqrt2 * sigma);
  const double damp = 0.5 * (1.0 - h_H * h_H);
  std::vector<double> h(2 * static_cast<std::size_t>(m) + 1);
  CompensatedSum sum;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double u = (points[l] - points[i]) * scale;
      h[0] = 1.0;
      if (m > 0)
        h[1] = u;
      for (int k = 1; k < 2 * m; ++k)
        h[k + 1] = u * h[k] - k * h[k - 1];
      double poly = 0.0;
      for (int j = 0; j <= m; ++j)
        poly += c[j] * h[2 * j];
      sum.add(poly * std::exp(-damp * u * u));
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  out.value = 3.0 / (8.0 * kSqrtPi * pow_int(sigma, 5)) * sum.value() / (pairs * h_H);
  out.n_pairs = n * (n - 1) / 2;
  out.pilots = { { "sigma", sigma }, { "h_H", h_H }, { "m", static_cast<double>(m) } };
  return out;
}

double diagonals_in_increment(SampleSize n, double sigma, double h_H, int m)
{
  n.require_at_least(2, "diagonals_in_increment");
  if (!(sigma > 0.0) || !(h_H > 0.0) || m < 0)
    throw InvalidArgument("diagonals_in_increment: bad arguments");
  const double h2 = h_H * h_H;
  double s = 0.0;
  double central = 1.0; // (2j)! / (2^(2j) (j!)^2)
  for (int j = 0; j <= m; ++j) {
    if (j > 0)
      central *= (2.0 * j - 1.0) / (2.0 * j);
    s += central * ((4.0 / 3.0) * j * (j - 1) + 4.0 * j * h2 + h2 * h2);
  }
  const double tau = std::numbers::sqrt2 * sigma;
  return n.inverse() / pow_int(h_H, 5) * 3.0 / pow_int(tau, 5) * kInvSqrt2Pi * s;
}

RoughnessEstimate r2m_diag(const Sample& sample,
                           double sigma,
                           double h_H,
                           int m,
                           const AlphaOptions& options)
{
  RoughnessEstimate out = r2m_hat(sample, sigma, h_H, m, options);
  const SampleSize n = out.flags.empty() ? SampleSize(sample.size()) : SampleSize(options.max_points);
  out.value = (1.0 - n.inverse()) * out.value + diagonals_in_increment(n, sigma, h_H, m);
  out.estimator = "r2m-diag";
  return out;
}

double bias_coefficient(double alpha_2m2, int m, double h_H_tilde)
{
  if (!(h_H_tilde > 0.0) || m < 0)
    throw InvalidArgument("bias_coefficient: bad arguments");
  return kInvSqrt2Pi * alpha_2m2 / pow_int(h_H_tilde, 2 * m + 2);
}

double bias_coefficient_hat(const Sample& sample,
                            double sigma,
                            int m,
                            double h_H_tilde,
                            const AlphaOptions& options)
{
  const auto a = estimate_alphas(sample, sigma, h_H_tilde, m + 1, options).alphas;
  return bias_coefficient(a.back(), m, h_H_tilde);
}

double s6_hat(const Sample& sample, double sigma, double h_H_tilde, const AlphaOptions& options)
{
  if (sample.size() < 4)
    throw InvalidArgument("s6_hat: need at least four observations");
  const auto a = estimate_alphas(sample, sigma, h_H_tilde, 3, options).alphas;
  return g_even_derivative_model(a, sigma, h_H_tilde, 6);
}

double s8_hat(const Sample& sample, double sigma, double h_H_tilde, const AlphaOptions& options)
{
  if (sample.size() < 4)
    throw InvalidArgument("s8_hat: need at least four observations");
  const auto a = estimate_alphas(sample, sigma, h_H_tilde, 4, options).alphas;
  return g_even_derivative_model(a, sigma, h_H_tilde, 6);
}

RoughnessEstimate r_normal_start(const Sample& sample, double sigma, double h_tilde, Kernel L)
{
  if (sample.size() < 2)
    throw InvalidArgument("r_normal_start: need at least two observations");
  if (!(sigma > 0.0) || !(h_tilde > 0.0))
    throw InvalidArgument("r_normal_start: sigma and h~ must be positive");
  if (L.kind() != KernelKind::normal)
    throw InvalidArgument("r_normal_start: the pilot kernel needs four derivatives");

  const double tau2 = 2.0 * sigma * sigma;
  const double c0 = 3.0 / (tau2 * tau2 * h_tilde);
  const double c2 = -6.0 / (tau2 * pow_int(h_tilde, 3));
  const double c4 = 1.0 / pow_int(h_tilde, 5);
  RoughnessEstimate out;
  out.estimator = "normal-start";
  bool capped = false;
  CompensatedSum sum;
  const auto xs = sample.values();
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double y = xs[l] - xs[i];
      double e = 0.5 * y * y / tau2;
      if (e > kNormalStartExponentCap) {
        e = kNormalStartExponentCap;
        capped = true;
      }
      const double z = y / h_tilde;
      const double term = c0 * kernel_derivative(L, 0, z) + c2 * kernel_derivative(L, 2, z) +
                          c4 * kernel_derivative(L, 4, z);
      sum.add(std::exp(e) * term);
    }
  }
  if (capped)
    out.flags.push_back("exponent-capped");
  out.n_pairs = n * (n - 1) / 2;
  out.value = sum.value() / static_cast<double>(out.n_pairs);
  out.pilots = { { "sigma", sigma }, { "h_tilde", h_tilde } };
  return out;
}

RoughnessEstimate r_normal_start(const Sample& sample, double h_tilde, Kernel L)
{
  return r_normal_start(sample, estimate_sigma(sample), h_tilde, L);
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 40>;

//! 0.75 int_{-1}^{1} (1 - z^2) z^(2k) exp(a + B z^2 + C z^4) dz, k = 0..4.
std::array<double, 5> standard_moments(double a, double B, double C)
{
  std::array<double, 5> out{};
  for (int k = 0; k < 5; ++k) {
    auto f = [&](double z) {
      const double z2 = z * z;
      return (1.0 - z2) * pow_int(z2, k) * std::exp(a + B * z2 + C * z2 * z2);
    };
    out[k] = 1.5 * Gauss::integrate(f, 0.0, 1.0);
  }
  return out;
}

bool solve3(std::array<std::array<double, 3>, 3> A, std::array<double, 3> b, std::array<double, 3>& x)
{
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col]))
        piv = r;
    if (!(std::abs(A[piv][col]) > 1e-300))
      return false;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int k = col; k < 3; ++k)
        A[r][k] -= f * A[col][k];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k)
      s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return true;
}

} // namespace

std::array<double, 3> local_quartic_moments(double a, double b, double c, double bandwidth)
{
  if (!(bandwidth > 0.0))
    throw InvalidArgument("local_quartic_moments: bandwidth must be positive");
  const double half = 0.5 * bandwidth;
  const double h2 = half * half;
  const auto z = standard_moments(a, b * h2, c * h2 * h2);
  return { z[0], z[1] * h2, z[2] * h2 * h2 };
}

LocalQuarticFit fit_local_quartic(const std::array<double, 3>& moments, double bandwidth)
{
  if (!(bandwidth > 0.0))
    throw InvalidArgument("fit_local_quartic: bandwidth must be positive");
  if (!(moments[0] > 0.0) || !(moments[1] > 0.0) || !(moments[2] > 0.0))
    throw InvalidArgument("fit_local_quartic: weighted moments must be positive");

  // Newton in z = t / (bandwidth / 2), where the quartic is well scaled
  const double half = 0.5 * bandwidth;
  const double h2 = half * half;
  const std::array<double, 3> M{ moments[0], moments[1] / h2, moments[2] / (h2 * h2) };
  auto objective = [&](const std::array<double, 3>& t, const std::array<double, 5>& z) {
    return M[0] * t[0] + M[1] * t[1] + M[2] * t[2] - z[0];
  };

  std::array<double, 3> theta{ std::log(M[0]), 0.0, 0.0 };
  auto zm = standard_moments(theta[0], theta[1], theta[2]);
  double value = objective(theta, zm);
  const double tol = 1e-13 * M[0];
  for (int iter = 1; iter <= 100; ++iter) {
    const std::array<double, 3> score{ M[0] - zm[0], M[1] - zm[1], M[2] - zm[2] };
    if (std::abs(score[0]) <= tol && std::abs(score[1]) <= tol && std::abs(score[2]) <= tol) {
      LocalQuarticFit fit;
      fit.a = theta[0];
      fit.b = theta[1] / h2;
      fit.c = theta[2] / (h2 * h2);
      fit.iterations = iter - 1;
      fit.score = { score[0], score[1] * h2, score[2] * h2 * h2 };
      return fit;
    }
    const std::array<std::array<double, 3>, 3> H{ { { zm[0], zm[1], zm[2] },
                                                    { zm[1], zm[2], zm[3] },
                                                    { zm[2], zm[3], zm[4] } } };
    std::array<double, 3> step{};
    if (!solve3(H, score, step))
      throw ComputationError("fit_local_quartic: singular Hessian");
    const double score_norm = std::abs(score[0]) + std::abs(score[1]) + std::abs(score[2]);
    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      const std::array<double, 3> trial{ theta[0] + lambda * step[0],
                                         theta[1] + lambda * step[1],
                                         theta[2] + lambda * step[2] };
      const auto zt = standard_moments(trial[0], trial[1], trial[2]);
      const double vt = objective(trial, zt);
      // near the optimum the objective gain is below rounding; a smaller
      // score is then the only usable signal
      const double st = std::abs(M[0] - zt[0]) + std::abs(M[1] - zt[1]) + std::abs(M[2] - zt[2]);
      if (std::isfinite(vt) && (vt > value || st < score_norm)) {
        theta = trial;
        zm = zt;
        value = vt;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      // no ascent possible: accept only if already stationary to 1e-9
      if (score_norm <= 1e-9 * M[0]) {
        LocalQuarticFit fit{ theta[0], theta[1] / h2, theta[2] / (h2 * h2), iter, {} };
        fit.score = { score[0], score[1] * h2, score[2] * h2 * h2 };
        return fit;
      }
      throw ComputationError("fit_local_quartic: line search failed");
    }
  }
  throw ComputationError("fit_local_quartic: no convergence after 100 iterations");
}

RoughnessEstimate r_local_likelihood(const Sample& sample, double bandwidth, Kernel L)
{
  if (L.kind() != KernelKind::epanechnikov)
    throw InvalidArgument("r_local_likelihood: L must have bounded support (epanechnikov)");
  if (!(bandwidth > 0.0))
    throw InvalidArgument("r_local_likelihood: bandwidth must be positive");
  const auto xs = sample.values();
  const std::size_t n = xs.size();
  std::array<CompensatedSum, 3> sums;
  std::size_t inside = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double y = xs[l] - xs[i];
      const double w = kernel_eval(L, y / bandwidth) / bandwidth;
      if (w <= 0.0)
        continue;
      ++inside;
      const double y2 = y * y;
      sums[0].add(w);
      sums[1].add(w * y2);
      sums[2].add(w * y2 * y2);
    }
  }
  if (inside < 3)
    throw InvalidArgument("r_local_likelihood: fewer than three pairs inside the kernel support");
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const std::array<double, 3> moments{ sums[0].value() / pairs,
                                       sums[1].value() / pairs,
                                       sums[2].value() / pairs };
  const auto fit = fit_local_quartic(moments, bandwidth);
  RoughnessEstimate out;
  out.estimator = "local-lik";
  out.value = std::exp(fit.a) * (24.0 * fit.c + 12.0 * fit.b * fit.b);
  out.n_pairs = n * (n - 1) / 2;
  out.pilots = { { "b", bandwidth },
                 { "a_hat", fit.a },
                 { "beta_hat", fit.b },
                 { "gamma_hat", fit.c },
                 { "iterations", static_cast<double>(fit.iterations) },
                 { "pairs_in_support", static_cast<double>(inside) } };
  return out;
}

double g_kernel_estimate(const Sample& sample, double y, double h, Kernel L, bool diagonals)
{
  if (!(h > 0.0))
    throw InvalidArgument("g_kernel_estimate: bandwidth must be positive");
  const auto xs = sample.values();
  const std::size_t n = xs.size();
  CompensatedSum sum;
  if (diagonals) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        sum.add(self_convolution(L, (xs[l] - xs[i] - y) / h));
    return sum.value() / (static_cast<double>(n) * static_cast<double>(n) * h);
  }
  if (n < 2)
    throw InvalidArgument("g_kernel_estimate: need at least two observations");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t l = i + 1; l < n; ++l) {
      const double d = xs[l] - xs[i];
      sum.add(0.5 * (kernel_eval(L, (d - y) / h) + kernel_eval(L, (d + y) / h)));
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return sum.value() / (pairs * h);
}

} // namespace bwlab
