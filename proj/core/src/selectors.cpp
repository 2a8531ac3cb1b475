#include "bwlab/selectors.hpp"

#include "bwlab/roughness.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace bwlab {

namespace {

constexpr double kNuLow = 4.01;
constexpr double kNuHigh = 500.0;
constexpr double kMaxHermiteBandwidth = 1.5;

void require_size(const Sample& sample, std::size_t minimum, const char* what)
{
  if (sample.size() < minimum) {
    throw InvalidArgument(std::string(what) + ": need at least " + std::to_string(minimum) +
                          " observations");
  }
}

void add_minimum_flags(SelectionReport& report, const DnaMinimum& r)
{
  if (r.bracket_expanded)
    report.flags.push_back("bracket-expanded");
  if (r.at_boundary)
    report.flags.push_back("minimum-at-boundary");
}

SelectionReport base_report(Method method, Kernel kernel, double sigma)
{
  SelectionReport r;
  r.method = method;
  r.kernel = kernel;
  r.sigma_hat = sigma;
  r.pilots["sigma_hat"] = sigma;
  return r;
}

double pair_sum(const Sample& sample, const auto& f)
{
  CompensatedSum s;
  const auto xs = sample.values();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t l = i + 1; l < xs.size(); ++l)
      s.add(f(xs[l] - xs[i]));
  return s.value();
}

} // namespace

// ---------------------------------------------------------------------------
// names and config

std::string_view method_name(Method method)
{
  switch (method) {
    case Method::ucv:
      return "ucv";
    case Method::ucv_classic:
      return "ucv-classic";
    case Method::normal_reference:
      return "nrr";
    case Method::hermite:
      return "hermite";
    case Method::proposal1:
      return "p1";
    case Method::proposal2:
      return "p2";
    case Method::proposal3:
      return "p3";
    case Method::t_tail:
      return "t-tail";
    case Method::normal_start:
      return "normal-start";
  }
  return "?";
}

std::vector<Method> all_methods()
{
  return { Method::ucv,       Method::ucv_classic, Method::normal_reference,
           Method::hermite,   Method::proposal1,   Method::proposal2,
           Method::proposal3, Method::t_tail,      Method::normal_start };
}

Method parse_method(std::string_view name)
{
  for (Method m : all_methods())
    if (method_name(m) == name)
      return m;
  if (name == "normal-reference" || name == "nr")
    return Method::normal_reference;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

std::string_view nu_method_name(NuMethod method)
{
  return method == NuMethod::kurtosis ? "kurtosis" : "median";
}

NuMethod parse_nu_method(std::string_view name)
{
  if (name == "kurtosis")
    return NuMethod::kurtosis;
  if (name == "median")
    return NuMethod::median;
  throw InvalidArgument("unknown nu method '" + std::string(name) + "'");
}

std::string config_text(const SelectorConfig& c)
{
  char buf[512];
  std::snprintf(buf,
                sizeof buf,
                "method=%s;kernel=%s;m=%d;h_H=%.17g;h_H_tilde=%.17g;h_tilde_scale=%.17g;"
                "nu=%s;p1_coupled=%d;max_points=%zu;seed=%llu;rel_tol=%.17g",
                std::string(method_name(c.method)).c_str(),
                std::string(c.kernel.name()).c_str(),
                c.m,
                c.h_H,
                c.h_H_tilde,
                c.h_tilde_scale,
                std::string(nu_method_name(c.nu_method)).c_str(),
                c.proposal1_coupled ? 1 : 0,
                c.max_points,
                static_cast<unsigned long long>(c.seed),
                c.rel_tol);
  return buf;
}

std::string config_hash(const SelectorConfig& config)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool SelectionReport::has_flag(std::string_view flag) const
{
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::size_t minimum_sample_size(Method method)
{
  switch (method) {
    case Method::ucv:
    case Method::ucv_classic:
    case Method::normal_reference:
      return 3;
    case Method::hermite:
    case Method::normal_start:
      return 4;
    case Method::t_tail:
      return 5;
    case Method::proposal1:
    case Method::proposal2:
      return 6;
    case Method::proposal3:
      return 8;
  }
  return 3;
}

// ---------------------------------------------------------------------------
// UCV

double ucv_objective(const Sample& sample, Kernel kernel, double h)
{
  require_size(sample, 2, "ucv_objective");
  if (!(h > 0.0))
    throw InvalidArgument("ucv_objective: bandwidth must be positive");
  const SampleSize n(sample.size());
  const double nn = static_cast<double>(sample.size());
  const double s = pair_sum(sample, [&](double y) { return a_k(kernel, n, y / h); });
  return kernel.constants().r_k / (nn * h) + 2.0 * s / (nn * (nn - 1.0) * h);
}

double ucv_classic(const Sample& sample, Kernel kernel, double h)
{
  require_size(sample, 2, "ucv_classic");
  if (!(h > 0.0))
    throw InvalidArgument("ucv_classic: bandwidth must be positive");
  const auto xs = sample.values();
  const std::size_t n = xs.size();
  const double nn = static_cast<double>(n);

  // int fhat^2 over all ordered pairs, diagonal included
  CompensatedSum sq;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      sq.add(self_convolution(kernel, (xs[l] - xs[i]) / h));
  const double int_f2 = sq.value() / (nn * nn * h);

  CompensatedSum loo;
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum fi;
    for (std::size_t l = 0; l < n; ++l)
      if (l != i)
        fi.add(kernel_eval(kernel, (xs[i] - xs[l]) / h));
    loo.add(fi.value() / ((nn - 1.0) * h));
  }
  return int_f2 - 2.0 * loo.value() / nn;
}

UcvObjective::UcvObjective(const Sample& sample, Kernel kernel)
  : n_(sample.size())
  , kernel_(kernel)
{
  require_size(sample, 2, "UcvObjective");
  const auto xs = sample.values();
  abs_diffs_.reserve(sample.pair_count());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t l = i + 1; l < xs.size(); ++l)
      abs_diffs_.push_back(std::abs(xs[l] - xs[i]));
  std::sort(abs_diffs_.begin(), abs_diffs_.end());
}

double UcvObjective::operator()(double h) const
{
  const SampleSize n(n_);
  const double nn = static_cast<double>(n_);
  // A_K vanishes beyond |v| = 1 for the Epanechnikov kernel
  const double reach = kernel_.kind() == KernelKind::epanechnikov
                         ? h
                         : std::numeric_limits<double>::infinity();
  CompensatedSum s;
  for (double y : abs_diffs_) {
    if (y >= reach)
      break;
    s.add(a_k(kernel_, n, y / h));
  }
  return kernel_.constants().r_k / (nn * h) + 2.0 * s.value() / (nn * (nn - 1.0) * h);
}

SelectionReport select_ucv(const Sample& sample, Kernel kernel)
{
  require_size(sample, 3, "select_ucv");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  const UcvObjective objective(sample, kernel);
  DnaCurve curve{ std::cref(objective), default_bracket(kernel, n, sigma), "ucv", {} };
  const auto r = minimize_dna(curve, SearchStrategy::grid_then_golden);
  auto report = base_report(Method::ucv, kernel, sigma);
  report.h_hat = r.h;
  report.pilots["objective"] = r.value;
  add_minimum_flags(report, r);
  return report;
}

// ---------------------------------------------------------------------------
// normal reference and Hermite

SelectionReport select_normal_reference(const Sample& sample, Kernel kernel, bool asymptotic)
{
  require_size(sample, 3, "select_normal_reference");
  const double sigma = estimate_sigma(sample);
  const double nn = static_cast<double>(sample.size());
  const SampleSize key = asymptotic ? SampleSize::infinite() : SampleSize(sample.size());
  const double constant = reference_constant(kernel, key);
  auto report = base_report(Method::normal_reference, kernel, sigma);
  report.h_hat = constant * sigma * std::pow(nn, -0.2);
  report.pilots["reference_constant"] = constant;
  if (asymptotic)
    report.flags.push_back("asymptotic-constant");
  return report;
}

namespace {

SelectionReport hermite_from_alphas(const Sample& sample,
                                    std::vector<double> alphas,
                                    double sigma,
                                    double h_H)
{
  const SampleSize n(sample.size());
  DnaCurve curve{ [&](double h) { return hermite_dna(alphas, sigma, h_H, n, h); },
                  default_bracket(Kernel::normal(), n, sigma),
                  "hermite",
                  {} };
  const auto r = minimize_dna(curve, SearchStrategy::grid_then_golden);
  auto report = base_report(Method::hermite, Kernel::normal(), sigma);
  report.h_hat = r.h;
  report.pilots["h_H"] = h_H;
  report.pilots["m"] = static_cast<double>(alphas.size() - 1);
  for (std::size_t j = 0; j < alphas.size(); ++j)
    report.pilots["alpha_" + std::to_string(2 * j)] = alphas[j];
  add_minimum_flags(report, r);
  return report;
}

} // namespace

SelectionReport select_hermite(const Sample& sample, int m, double h_H, const AlphaOptions& options)
{
  require_size(sample, 4, "select_hermite");
  if (m < 1 || m > 4)
    throw InvalidArgument("select_hermite: m must lie in 1..4");
  const double sigma = estimate_sigma(sample);
  const auto est = estimate_alphas(sample, sigma, h_H, m, options);
  auto report = hermite_from_alphas(sample, est.alphas, sigma, h_H);
  if (est.subsampled)
    report.flags.push_back("subsampled");
  return report;
}

SelectionReport select_hermite_with_alphas(const Sample& sample, std::span<const double> alphas, double h_H)
{
  require_size(sample, 4, "select_hermite");
  const double sigma = estimate_sigma(sample);
  auto report = hermite_from_alphas(sample, { alphas.begin(), alphas.end() }, sigma, h_H);
  report.flags.push_back("alphas-supplied");
  return report;
}

// ---------------------------------------------------------------------------
// Proposals 1 and 3

double corrected_roughness(const TaylorPilots& p)
{
  const double tau5 = std::pow(p.tau, 5);
  if (p.m == 2)
    return p.r_hat - p.b_hat * p.h_H * p.h_H / (2.0 * tau5);
  if (p.m == 3)
    return p.r_hat + p.b_hat * std::pow(p.h_H, 4) / (8.0 * tau5);
  throw InvalidArgument("corrected_roughness: m must be 2 or 3");
}

double taylor_objective(Kernel kernel, SampleSize n, double r_corrected, double s_hat, double h)
{
  const auto kc = kernel.constants();
  const double h4 = std::pow(h, 4);
  const double c = 1.0 - n.inverse();
  return n.inverse() / h * kc.r_k + 0.25 * kc.k2 * kc.k2 * h4 * r_corrected * c +
         kc.k2 * kc.k4 * h4 * h * h * s_hat * c / 24.0;
}

namespace {

SelectionReport taylor_selector(const Sample& sample,
                                Method method,
                                Kernel kernel,
                                const TaylorPilots& pilots,
                                double sigma,
                                double h_H_tilde,
                                const std::function<double(double)>& objective,
                                bool corrected_positive)
{
  const SampleSize n(sample.size());
  auto report = base_report(method, kernel, sigma);
  report.pilots["h_H"] = pilots.h_H;
  report.pilots["h_H_tilde"] = h_H_tilde;
  report.pilots["m"] = pilots.m;
  report.pilots["tau_hat"] = pilots.tau;
  report.pilots["R_hat"] = pilots.r_hat;
  report.pilots[pilots.m == 2 ? "b4_hat" : "b6_hat"] = pilots.b_hat;
  report.pilots[pilots.m == 2 ? "S6_hat" : "S8_hat"] = pilots.s_hat;
  report.pilots["R_corrected"] = corrected_roughness(pilots);

  auto fallback = [&](const char* why) {
    const auto nr = select_normal_reference(sample, kernel);
    report.h_hat = nr.h_hat;
    report.pilots["reference_constant"] = nr.pilots.at("reference_constant");
    report.flags.push_back("fallback-used");
    report.flags.push_back(why);
    return report;
  };
  if (!corrected_positive)
    return fallback("corrected-roughness-nonpositive");

  // the h^6 term is usually negative, so take the first interior local minimum
  const Bracket b = default_bracket(kernel, n, sigma);
  const auto r = minimize_scan(objective, b, 200, 1e-6, ScanMode::first_local);
  if (r.at_boundary)
    return fallback("no-local-minimum");
  report.h_hat = r.argmin;
  report.pilots["objective"] = r.value;
  return report;
}

} // namespace

double proposal2_c_hat(Kernel kernel, double r_pilot, double b4)
{
  if (!(r_pilot > 0.0) || !(b4 < 0.0))
    throw InvalidArgument("proposal2_c_hat: need R > 0 and b4 < 0");
  const auto kc = kernel.constants();
  const double lead = (6.0 * kInvSqrt2Pi) / (kc.r_k / (kc.k2 * kc.k2));
  return std::pow(lead, 1.0 / 7.0) * std::pow(r_pilot, 1.0 / 7.0) * std::pow(-b4, -1.0 / 7.0);
}

SelectionReport select_proposal1(const Sample& sample,
                                 Kernel kernel,
                                 double h_H,
                                 double h_H_tilde,
                                 bool coupled,
                                 const AlphaOptions& options)
{
  require_size(sample, 6, "select_proposal1");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  TaylorPilots p;
  p.m = 2;
  p.tau = std::numbers::sqrt2 * sigma;
  p.h_H = h_H;
  p.r_hat = r2m_hat(sample, sigma, h_H, 2, options).value;
  p.b_hat = bias_coefficient_hat(sample, sigma, 2, h_H_tilde, options);
  p.s_hat = s6_hat(sample, sigma, h_H_tilde, options);

  if (!coupled) {
    const double rc = corrected_roughness(p);
    auto objective = [&](double h) { return taylor_objective(kernel, n, rc, p.s_hat, h); };
    return taylor_selector(sample, Method::proposal1, kernel, p, sigma, h_H_tilde, objective, rc > 0.0);
  }

  // h_H tied to h through the Proposal 2 constant
  const double b4 = std::min(p.b_hat, -proposal2_b4_floor(h_H_tilde));
  const double r_pilot = p.r_hat > 0.0 ? p.r_hat : 3.0 / (8.0 * kSqrtPi * std::pow(sigma, 5));
  const double c_hat = proposal2_c_hat(kernel, r_pilot, b4);
  auto objective = [&](double h) {
    TaylorPilots q = p;
    q.h_H = std::min(c_hat * std::pow(h, 5.0 / 7.0), kMaxHermiteBandwidth);
    q.r_hat = r2m_hat(sample, sigma, q.h_H, 2, options).value;
    return taylor_objective(kernel, n, corrected_roughness(q), p.s_hat, h);
  };
  auto report = taylor_selector(sample, Method::proposal1, kernel, p, sigma, h_H_tilde, objective, true);
  report.pilots["c_hat"] = c_hat;
  report.flags.push_back("coupled-h_H");
  if (!report.has_flag("fallback-used")) {
    const double h_H_used = std::min(c_hat * std::pow(report.h_hat, 5.0 / 7.0), kMaxHermiteBandwidth);
    report.pilots["h_H"] = h_H_used;
  }
  return report;
}

SelectionReport select_proposal3(const Sample& sample,
                                 Kernel kernel,
                                 double h_H,
                                 double h_H_tilde,
                                 const AlphaOptions& options)
{
  require_size(sample, 8, "select_proposal3");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  TaylorPilots p;
  p.m = 3;
  p.tau = std::numbers::sqrt2 * sigma;
  p.h_H = h_H;
  p.r_hat = r2m_hat(sample, sigma, h_H, 3, options).value;
  p.b_hat = bias_coefficient_hat(sample, sigma, 3, h_H_tilde, options);
  p.s_hat = s8_hat(sample, sigma, h_H_tilde, options);
  const double rc = corrected_roughness(p);
  auto objective = [&](double h) { return taylor_objective(kernel, n, rc, p.s_hat, h); };
  return taylor_selector(sample, Method::proposal3, kernel, p, sigma, h_H_tilde, objective, rc > 0.0);
}

// ---------------------------------------------------------------------------
// Proposal 2

double proposal2_quick_h_H(double b4, double n)
{
  if (!(b4 < 0.0) || !(n > 0.0))
    throw InvalidArgument("proposal2_quick_h_H: need b4 < 0 and n > 0");
  return std::pow(6.0 * kInvSqrt2Pi, 1.0 / 7.0) * std::pow(-1.0 / b4, 1.0 / 7.0) *
         std::pow(n, -1.0 / 7.0);
}

double proposal2_fixed_point_h_H(double b4, double n)
{
  const double quick = proposal2_quick_h_H(b4, n);
  double x = quick;
  for (int i = 0; i < 500; ++i) {
    const double x2 = x * x;
    const double next = quick * std::pow(1.0 + 5.0 * x2 + 1.875 * x2 * x2, 1.0 / 7.0);
    if (std::abs(next - x) <= 1e-14 * next)
      return next;
    x = next;
  }
  throw ComputationError("proposal2_fixed_point_h_H: iteration did not settle");
}

double proposal2_b4_floor(double h_H_tilde)
{
  return 0.1 * kInvSqrt2Pi * 6.0 / std::pow(h_H_tilde, 6);
}

double proposal2_objective(const Sample& sample, double sigma, double c_hat, double h, const AlphaOptions& options)
{
  const SampleSize n(sample.size());
  const double h_H = std::min(c_hat * std::pow(h, 5.0 / 7.0), kMaxHermiteBandwidth);
  const auto a = estimate_alphas(sample, sigma, h_H, 2, options).alphas;
  const auto ad = diagonals_in_alphas(a, n, h_H);
  return hermite_dna(ad, sigma, h_H, n, h);
}

SelectionReport select_proposal2(const Sample& sample, double h_H_pilot, double h_H_tilde, const AlphaOptions& options)
{
  require_size(sample, 6, "select_proposal2");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  const Kernel kernel = Kernel::normal();
  auto report = base_report(Method::proposal2, kernel, sigma);

  double r_pilot = r2m_hat(sample, sigma, h_H_pilot, 2, options).value;
  report.pilots["R_pilot"] = r_pilot;
  if (!(r_pilot > 0.0)) {
    r_pilot = 3.0 / (8.0 * kSqrtPi * std::pow(sigma, 5));
    report.flags.push_back("r-pilot-nonpositive");
  }
  const double b4_hat = bias_coefficient_hat(sample, sigma, 2, h_H_tilde, options);
  const double floor = proposal2_b4_floor(h_H_tilde);
  const double b4 = -std::max(std::abs(b4_hat), floor);
  if (b4_hat >= 0.0)
    report.flags.push_back("b4-nonnegative");
  else if (b4 != b4_hat)
    report.flags.push_back("b4-floored");
  const double c_hat = proposal2_c_hat(kernel, r_pilot, b4);

  report.pilots["h_H_pilot"] = h_H_pilot;
  report.pilots["h_H_tilde"] = h_H_tilde;
  report.pilots["b4_hat"] = b4_hat;
  report.pilots["b4_used"] = b4;
  report.pilots["c_hat"] = c_hat;
  report.pilots["m"] = 2;

  DnaCurve curve{ [&](double h) { return proposal2_objective(sample, sigma, c_hat, h, options); },
                  default_bracket(kernel, n, sigma),
                  "p2",
                  {} };
  const auto r = minimize_dna(curve, SearchStrategy::golden);
  report.h_hat = r.h;
  report.pilots["objective"] = r.value;
  const double h_H_raw = c_hat * std::pow(r.h, 5.0 / 7.0);
  report.pilots["h_H"] = std::min(h_H_raw, kMaxHermiteBandwidth);
  if (h_H_raw > kMaxHermiteBandwidth)
    report.flags.push_back("h_H-clamped");
  if (sample.size() > options.max_points && options.max_points >= 2)
    report.flags.push_back("subsampled");
  add_minimum_flags(report, r);
  return report;
}

// ---------------------------------------------------------------------------
// t tail

double pair_kurtosis(const Sample& sample, double sigma)
{
  require_size(sample, 2, "pair_kurtosis");
  const double s4 = 4.0 * std::pow(sigma, 4);
  const double sum = pair_sum(sample, [&](double y) { return y * y * y * y / s4; });
  return sum / static_cast<double>(sample.pair_count());
}

std::optional<double> nu_from_kurtosis(double lambda4)
{
  if (!(lambda4 > 3.0))
    return std::nullopt;
  const double nu = 4.0 + 2.0 / (lambda4 / 3.0 - 1.0);
  if (nu > kNuHigh)
    return std::nullopt;
  return nu;
}

std::optional<double> nu_from_median(double z0)
{
  if (!(z0 > 0.0) || !std::isfinite(z0))
    return std::nullopt;
  auto F = [&](double nu) {
    boost::math::students_t dist(nu);
    return boost::math::cdf(dist, std::sqrt(nu / (nu - 2.0)) * z0) - 0.75;
  };
  double lo = kNuLow;
  double hi = kNuHigh;
  double f_lo = F(lo);
  const double f_hi = F(hi);
  if (f_lo == 0.0)
    return lo;
  if (f_lo * f_hi > 0.0)
    return std::nullopt;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = F(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double t_q(double nu, double sigma, Kernel kernel, SampleSize n, double h, double* tail_bound)
{
  if (!(nu > 2.0) || !(sigma > 0.0) || !(h > 0.0))
    throw InvalidArgument("t_q: need nu > 2, sigma > 0, h > 0");
  n.require_at_least(2, "t_q");
  // Y = s T with Var(Y) = 2 sigma^2
  const double s = std::numbers::sqrt2 * sigma * std::sqrt((nu - 2.0) / nu);
  const boost::math::students_t dist(nu);
  auto g = [&](double y) { return boost::math::pdf(dist, y / s) / s; };
  const double y_max = 40.0 * std::numbers::sqrt2 * sigma;

  // integrate over v = y / h on [0, V]; g and A_K are even
  double v_max = y_max / h;
  if (kernel.kind() == KernelKind::epanechnikov)
    v_max = std::min(v_max, 1.0);
  else
    v_max = std::min(v_max, 16.0);
  auto integrand = [&](double v) { return a_k(kernel, n, v) * g(h * v); };
  double q = 0.0;
  if (kernel.kind() == KernelKind::epanechnikov) {
    const double mid = std::min(0.5, v_max);
    q = integrate(integrand, 0.0, mid, 2.5e-11);
    if (v_max > mid)
      q += integrate(integrand, mid, v_max, 2.5e-11);
  } else {
    const double mid = std::min(4.0, v_max);
    q = integrate(integrand, 0.0, mid, 2.5e-11);
    if (v_max > mid)
      q += integrate(integrand, mid, v_max, 2.5e-11);
  }
  q *= 2.0;

  if (tail_bound) {
    // |A_K| <= g_K + 2K, both decreasing in |v|; remaining mass of g beyond h V
    const double envelope = self_convolution(kernel, v_max) + 2.0 * kernel_eval(kernel, v_max);
    const double mass = 2.0 * boost::math::cdf(boost::math::complement(dist, h * v_max / s));
    *tail_bound = envelope * mass / h;
  }
  return q;
}

SelectionReport select_t_tail(const Sample& sample, Kernel kernel, NuMethod nu_method)
{
  require_size(sample, 5, "select_t_tail");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  auto report = base_report(Method::t_tail, kernel, sigma);
  report.pilots["nu_method"] = nu_method == NuMethod::kurtosis ? 0.0 : 1.0;

  std::optional<double> nu;
  if (nu_method == NuMethod::kurtosis) {
    const double lambda4 = pair_kurtosis(sample, sigma);
    report.pilots["lambda4_hat"] = lambda4;
    nu = nu_from_kurtosis(lambda4);
  } else {
    std::vector<double> abs_y;
    abs_y.reserve(sample.pair_count());
    const auto xs = sample.values();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      for (std::size_t l = i + 1; l < xs.size(); ++l)
        abs_y.push_back(std::abs(xs[l] - xs[i]));
    std::sort(abs_y.begin(), abs_y.end());
    const std::size_t k = abs_y.size();
    const double med = (k % 2 == 1) ? abs_y[k / 2] : 0.5 * (abs_y[k / 2 - 1] + abs_y[k / 2]);
    const double z0 = med / (std::numbers::sqrt2 * sigma);
    report.pilots["z0"] = z0;
    nu = nu_from_median(z0);
  }

  if (!nu) {
    const auto nr = select_normal_reference(sample, kernel);
    report.h_hat = nr.h_hat;
    report.pilots["reference_constant"] = nr.pilots.at("reference_constant");
    report.flags.push_back("fallback-used");
    report.flags.push_back("normal-reference-fallback");
    return report;
  }
  report.pilots["nu_hat"] = *nu;
  const double r_k = kernel.constants().r_k;
  double worst_tail = 0.0;
  DnaCurve curve{ [&](double h) {
                   double tail = 0.0;
                   const double v = n.inverse() / h * r_k + t_q(*nu, sigma, kernel, n, h, &tail);
                   worst_tail = std::max(worst_tail, tail);
                   return v;
                 },
                  default_bracket(kernel, n, sigma),
                  "t-tail",
                  {} };
  const auto r = minimize_dna(curve, SearchStrategy::golden);
  report.h_hat = r.h;
  report.pilots["objective"] = r.value;
  report.pilots["tail_bound"] = worst_tail;
  if (worst_tail > 1e-8)
    report.flags.push_back("tail-bound-large");
  add_minimum_flags(report, r);
  return report;
}

// ---------------------------------------------------------------------------
// normal start

double normal_start_objective(const Sample& sample, double sigma, double h_tilde, double h)
{
  require_size(sample, 2, "normal_start_objective");
  if (!(sigma > 0.0) || !(h_tilde > 0.0) || !(h > 0.0))
    throw InvalidArgument("normal_start_objective: sigma, h~ and h must be positive");
  const double h2 = h * h;
  const double ht2 = h_tilde * h_tilde;
  const double tau2 = 2.0 * sigma * sigma;
  const double s1sq = 1.0 / (1.0 + h2 / tau2 + h2 / ht2);
  const double s2sq = 1.0 / (0.5 + h2 / tau2 + h2 / ht2);
  const double f1 = 1.0 - h2 * s1sq / ht2 - ht2 / tau2;
  const double f2 = 1.0 - h2 * s2sq / ht2 - ht2 / tau2;
  const double pre_t = kInvSqrt2Pi * std::sqrt(s1sq) / h_tilde;
  const double pre_s = kInvSqrt2Pi * std::sqrt(s2sq) / (std::numbers::sqrt2 * h_tilde);

  CompensatedSum t_sum;
  CompensatedSum s_sum;
  const auto xs = sample.values();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t l = i + 1; l < xs.size(); ++l) {
      const double z2 = (xs[l] - xs[i]) * (xs[l] - xs[i]) / ht2;
      t_sum.add(std::exp(-0.5 * z2 * f1));
      s_sum.add(std::exp(-0.5 * z2 * f2));
    }
  }
  const double pairs = static_cast<double>(sample.pair_count());
  const double nn = static_cast<double>(sample.size());
  const double t_hat = pre_t * t_sum.value() / pairs;
  const double s_hat = pre_s * s_sum.value() / pairs;
  return 0.5 / kSqrtPi / (nn * h) + (1.0 - 1.0 / nn) * s_hat - 2.0 * t_hat;
}

SelectionReport select_normal_start(const Sample& sample, double h_tilde)
{
  require_size(sample, 4, "select_normal_start");
  if (!(h_tilde > 0.0))
    throw InvalidArgument("select_normal_start: h~ must be positive");
  const double sigma = estimate_sigma(sample);
  const SampleSize n(sample.size());
  DnaCurve curve{ [&](double h) { return normal_start_objective(sample, sigma, h_tilde, h); },
                  default_bracket(Kernel::normal(), n, sigma),
                  "normal-start",
                  {} };
  const auto r = minimize_dna(curve, SearchStrategy::grid_then_golden);
  auto report = base_report(Method::normal_start, Kernel::normal(), sigma);
  report.h_hat = r.h;
  report.pilots["h_tilde"] = h_tilde;
  report.pilots["objective"] = r.value;
  add_minimum_flags(report, r);
  return report;
}

// ---------------------------------------------------------------------------

SelectionReport select(const Sample& sample, const SelectorConfig& config)
{
  const std::size_t minimum = minimum_sample_size(config.method);
  if (sample.size() < minimum) {
    throw InvalidArgument(std::string(method_name(config.method)) + ": need at least " +
                          std::to_string(minimum) + " observations");
  }
  const AlphaOptions options{ config.max_points, config.seed };
  const bool normal_only = config.method == Method::hermite || config.method == Method::proposal2 ||
                           config.method == Method::normal_start;
  if (normal_only && config.kernel.kind() != KernelKind::normal)
    throw InvalidArgument(std::string(method_name(config.method)) + " requires the normal kernel");

  SelectionReport report;
  switch (config.method) {
    case Method::ucv:
      report = select_ucv(sample, config.kernel);
      break;
    case Method::ucv_classic: {
      // debug path: the leave-one-out form, minimized the same way
      const double sigma = estimate_sigma(sample);
      const SampleSize n(sample.size());
      DnaCurve curve{ [&](double h) { return ucv_classic(sample, config.kernel, h); },
                      default_bracket(config.kernel, n, sigma),
                      "ucv-classic",
                      {} };
      const auto r = minimize_dna(curve, SearchStrategy::grid_then_golden);
      report = base_report(Method::ucv_classic, config.kernel, sigma);
      report.h_hat = r.h;
      report.pilots["objective"] = r.value;
      add_minimum_flags(report, r);
      break;
    }
    case Method::normal_reference:
      report = select_normal_reference(sample, config.kernel);
      break;
    case Method::hermite:
      report = select_hermite(sample, config.m, config.h_H, options);
      break;
    case Method::proposal1:
      report = select_proposal1(sample, config.kernel, config.h_H, config.h_H_tilde, config.proposal1_coupled, options);
      break;
    case Method::proposal2:
      report = select_proposal2(sample, config.h_H, config.h_H_tilde, options);
      break;
    case Method::proposal3:
      report = select_proposal3(sample, config.kernel, config.h_H, config.h_H_tilde, options);
      break;
    case Method::t_tail:
      report = select_t_tail(sample, config.kernel, config.nu_method);
      break;
    case Method::normal_start: {
      const double sigma = estimate_sigma(sample);
      const double h_tilde = config.h_tilde_scale * std::numbers::sqrt2 * sigma *
                             std::pow(static_cast<double>(sample.size()), -0.2);
      report = select_normal_start(sample, h_tilde);
      report.pilots["h_tilde_scale"] = config.h_tilde_scale;
      break;
    }
  }
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  return report;
}

} // namespace bwlab
