#include "bwlab/mise.hpp"

#include <cmath>
#include <mutex>
#include <utility>

namespace bwlab {

namespace {

double q_normal_kernel_mixture(const NormalMixture& g, SampleSize n, double h)
{
  // int phi_sqrt2(v) g(hv) dv and int phi(v) g(hv) dv are normal convolutions
  const double c = 1.0 - n.inverse();
  double s = 0.0;
  for (const auto& comp : g.components()) {
    const double s2 = comp.sd * comp.sd;
    s += comp.weight * (c * normal_pdf(comp.mean, 0.0, 2.0 * h * h + s2) -
                        2.0 * normal_pdf(comp.mean, 0.0, h * h + s2));
  }
  return s;
}

double q_epanechnikov(const std::function<double(double)>& g, SampleSize n, double h)
{
  const Kernel k = Kernel::epanechnikov();
  auto integrand = [&](double v) { return a_k(k, n, v) * g(h * v); };
  // breakpoints where g_K and K lose smoothness
  return integrate(integrand, -1.0, -0.5, 2.5e-11) + integrate(integrand, -0.5, 0.0, 2.5e-11) +
         integrate(integrand, 0.0, 0.5, 2.5e-11) + integrate(integrand, 0.5, 1.0, 2.5e-11);
}

void check_h(double h, const char* what)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidArgument(std::string(what) + ": bandwidth must be positive and finite");
}

} // namespace

double exact_q(const NormalMixture& g, Kernel kernel, SampleSize n, double h)
{
  check_h(h, "exact_q");
  n.require_at_least(2, "exact_q");
  if (kernel.kind() == KernelKind::normal)
    return q_normal_kernel_mixture(g, n, h);
  return q_epanechnikov([&](double y) { return g.pdf(y); }, n, h);
}

double exact_q(const std::function<double(double)>& g, Kernel kernel, SampleSize n, double h)
{
  check_h(h, "exact_q");
  n.require_at_least(2, "exact_q");
  if (kernel.kind() == KernelKind::epanechnikov)
    return q_epanechnikov(g, n, h);
  auto integrand = [&](double v) { return a_k(kernel, n, v) * g(h * v); };
  return integrate_real_line(integrand, 2.0, 1e-10);
}

double exact_dna(const DifferenceDensity& g, Kernel kernel, SampleSize n, double h)
{
  return exact_dna(g.g, kernel, n, h);
}

double exact_dna(const NormalMixture& g, Kernel kernel, SampleSize n, double h)
{
  return n.inverse() / h * kernel.constants().r_k + exact_q(g, kernel, n, h);
}

double exact_dna(const std::function<double(double)>& g, Kernel kernel, SampleSize n, double h)
{
  return n.inverse() / h * kernel.constants().r_k + exact_q(g, kernel, n, h);
}

double q0_normal(double h, SampleSize n)
{
  if (!(h >= 0.0))
    throw InvalidArgument("q0_normal: h must be nonnegative");
  n.require_at_least(2, "q0_normal");
  return 0.5 / kSqrtPi *
         ((1.0 - n.inverse()) / std::sqrt(1.0 + h * h) - 2.0 / std::sqrt(1.0 + 0.5 * h * h));
}

namespace {

double compute_reference_constant(Kernel kernel, SampleSize n)
{
  const auto kc = kernel.constants();
  if (n.is_infinite())
    return std::pow(kc.r_k / (kc.k2 * kc.k2 * 3.0 / (8.0 * kSqrtPi)), 0.2);

  const double scale = std::pow(n.value(), -0.2);
  const NormalMixture g = NormalMixture::normal(0.0, std::numbers::sqrt2);
  std::function<double(double)> objective;
  if (kernel.kind() == KernelKind::normal) {
    objective = [&](double b) {
      const double h = b * scale;
      return n.inverse() / h * kc.r_k + q0_normal(h, n);
    };
  } else {
    objective = [&](double b) { return exact_dna(g, kernel, n, b * scale); };
  }
  const double b_inf = compute_reference_constant(kernel, SampleSize::infinite());
  const auto coarse = minimize_scan(objective, { 0.5 * b_inf, 2.0 * b_inf }, 41, 1e-4);
  const auto fine =
    minimize_scalar(objective, { coarse.argmin * 0.97, coarse.argmin * 1.03 }, 1e-9);
  if (coarse.at_boundary || fine.at_boundary)
    throw ComputationError("reference_constant: minimizer not bracketed");
  return fine.argmin;
}

} // namespace

double reference_constant(Kernel kernel, SampleSize n)
{
  if (!n.is_infinite())
    n.require_at_least(3, "reference_constant");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  const auto key = std::pair{ static_cast<int>(kernel.kind()), n.value() };
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
  }
  const double value = compute_reference_constant(kernel, n);
  std::lock_guard lock(mutex);
  cache.emplace(key, value);
  return value;
}

double reference_bandwidth(Kernel kernel, SampleSize n, double sigma)
{
  if (!(sigma > 0.0))
    throw InvalidArgument("reference_bandwidth: sigma must be positive");
  const double shrink = n.is_infinite() ? 0.0 : std::pow(n.value(), -0.2);
  return reference_constant(kernel, n) * sigma * shrink;
}

double hermite_dna(std::span<const double> alphas, double sigma, double h_H, SampleSize n, double h)
{
  check_h(h, "hermite_dna");
  n.require_at_least(2, "hermite_dna");
  if (alphas.empty())
    throw InvalidArgument("hermite_dna: empty coefficient list");
  if (!(sigma > 0.0) || !(h_H > 0.0))
    throw InvalidArgument("hermite_dna: sigma and h_H must be positive");

  const double s2 = sigma * sigma;
  const double h2 = h * h;
  const double shrink = (1.0 - h_H * h_H) / (h_H * h_H);
  const double r1 = (s2 - h2 * shrink) / (s2 + h2);
  const double r2 = (s2 - 0.5 * h2 * shrink) / (s2 + 0.5 * h2);

  double sum1 = 0.0;
  double sum2 = 0.0;
  double p1 = 1.0;
  double p2 = 1.0;
  double denom = 1.0; // 2^j j!
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (j > 0) {
      denom *= 2.0 * static_cast<double>(j);
      p1 *= -r1;
      p2 *= -r2;
    }
    sum1 += alphas[j] / denom * p1;
    sum2 += alphas[j] / denom * p2;
  }
  return 0.5 / kSqrtPi *
         (n.inverse() / h + (1.0 - n.inverse()) / std::sqrt(s2 + h2) * sum1 -
          2.0 / std::sqrt(s2 + 0.5 * h2) * sum2);
}

EvenDerivativesAtZero even_derivatives_at_zero(const NormalMixture& g)
{
  return { mixture_pdf_derivative(g, 0, 0.0),
           mixture_pdf_derivative(g, 2, 0.0),
           mixture_pdf_derivative(g, 4, 0.0),
           mixture_pdf_derivative(g, 6, 0.0) };
}

double taylor_q(const EvenDerivativesAtZero& d, Kernel kernel, SampleSize n, double h)
{
  const auto kc = kernel.constants();
  const double inv = n.inverse();
  const double h2 = h * h;
  const double h4 = h2 * h2;
  return -(1.0 + inv) * d.g0 + 0.25 * kc.k2 * kc.k2 * h4 * d.g4 * (1.0 - inv) +
         kc.k2 * kc.k4 * h4 * h2 * d.g6 * (1.0 - inv) / 24.0 - kc.k2 * h2 * inv * d.g2;
}

double amise_optimal_h(Kernel kernel, double r_estimate, double n)
{
  if (!(r_estimate > 0.0) || !std::isfinite(r_estimate))
    throw InvalidArgument("amise_optimal_h: roughness estimate must be positive");
  if (!(n > 0.0))
    throw InvalidArgument("amise_optimal_h: n must be positive");
  const auto kc = kernel.constants();
  return std::pow(kc.r_k / (kc.k2 * kc.k2 * r_estimate * n), 0.2);
}

Bracket default_bracket(Kernel kernel, SampleSize n, double sigma)
{
  const double h_ref = reference_bandwidth(kernel, n, sigma);
  return { h_ref / 8.0, 8.0 * h_ref };
}

DnaMinimum minimize_dna(const DnaCurve& curve, SearchStrategy strategy, double rel_tol)
{
  if (!curve.evaluate)
    throw InvalidArgument("minimize_dna: curve has no evaluator");
  Bracket b = curve.bracket;
  DnaMinimum out;
  for (int attempt = 0;; ++attempt) {
    MinimizeResult r;
    switch (strategy) {
      case SearchStrategy::golden:
        r = minimize_scalar(curve.evaluate, b, rel_tol);
        break;
      case SearchStrategy::grid_then_golden:
        r = minimize_scan(curve.evaluate, b, 200, rel_tol, ScanMode::global);
        break;
      case SearchStrategy::first_local_minimum:
        r = minimize_scan(curve.evaluate, b, 200, rel_tol, ScanMode::first_local);
        break;
    }
    out.h = r.argmin;
    out.value = r.value;
    out.evaluations += r.evaluations;
    out.at_boundary = r.at_boundary;
    if (!r.at_boundary || attempt == 6)
      break;
    // push out the end the optimum sits on
    if (r.argmin <= std::sqrt(b.lo * b.hi))
      b.lo /= 2.0;
    else
      b.hi *= 2.0;
    ++out.expansions;
    out.bracket_expanded = true;
  }
  return out;
}

} // namespace bwlab
