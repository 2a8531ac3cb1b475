// Acceptance checks. One PASS/FAIL line per criterion.
//
//   acceptance [--known-red NAME]... [--only NAME]
//
// Exit status is 0 when every failing criterion is named with --known-red.

#include "cli.hpp"

#include "bwlab/hermite.hpp"
#include "bwlab/mise.hpp"
#include "bwlab/mixtures.hpp"
#include "bwlab/random.hpp"
#include "bwlab/roughness.hpp"
#include "bwlab/selectors.hpp"
#include "bwlab/simulate.hpp"

#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace bwlab;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;
};

std::string num(double x, int digits = 6)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

unsigned threads()
{
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

Sample draw(const NormalMixture& f, std::size_t n, std::uint64_t master, std::uint64_t rep)
{
  auto s = Stream::derive(master, rep);
  return sample_mixture(f, n, s);
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double factorial(int k)
{
  double f = 1;
  for (int i = 2; i <= k; ++i)
    f *= i;
  return f;
}

// --------------------------------------------------------------------------

Outcome table1()
{
  struct Row
  {
    const char* n;
    double b, c;
  };
  const Row rows[] = { { "3", 1.2871, 5.2821 },  { "4", 1.2628, 5.2177 },    { "5", 1.2458, 5.1737 },
                       { "6", 1.2331, 5.1411 },  { "7", 1.2230, 5.1156 },    { "8", 1.2148, 5.0949 },
                       { "9", 1.2080, 5.0776 },  { "10", 1.2021, 5.0628 },   { "11", 1.1970, 5.0500 },
                       { "12", 1.1925, 5.0388 }, { "13", 1.1885, 5.0288 },   { "14", 1.1849, 5.0198 },
                       { "15", 1.1816, 5.0117 }, { "16", 1.1786, 5.0043 },   { "17", 1.1759, 4.9975 },
                       { "18", 1.1734, 4.9913 }, { "19", 1.1711, 4.9855 },   { "20", 1.1689, 4.9801 },
                       { "50", 1.1368, 4.8996 }, { "100", 1.1190, 4.8540 },  { "1000", 1.0842, 4.7617 },
                       { "inf", 1.0592, 4.6898 } };
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0;
  int entries = 0;
  for (const auto& r : rows) {
    const SampleSize n = std::string(r.n) == "inf" ? SampleSize::infinite() : SampleSize(std::stoul(r.n));
    for (auto [k, printed] : { std::pair{ Kernel::normal(), r.b }, std::pair{ Kernel::epanechnikov(), r.c } }) {
      const double err = std::abs(reference_constant(k, n) - printed);
      worst = std::max(worst, err);
      ++entries;
      if (err > 5e-4) {
        o.pass = false;
        o.detail += " [" + std::string(k.name()) + " n=" + r.n + " off by " + num(err) + "]";
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds >= 60)
    o.pass = false;
  o.detail = std::to_string(entries) + " entries, max |err| " + num(worst, 3) + ", " + num(seconds, 3) + " s" + o.detail;
  return o;
}

double ucv_by_definition(const Sample& s, Kernel k, double h)
{
  const auto x = s.values();
  const double n = static_cast<double>(x.size());
  // int fhat^2 by quadrature of the estimate itself
  auto fhat = [&](double t) {
    double v = 0;
    for (double a : x)
      v += oracle::K(k, (t - a) / h);
    return v / (n * h);
  };
  // Epanechnikov: polynomial between the kinks a +- h/2; normal: one adaptive pass
  std::vector<double> cuts;
  const double reach = oracle::kernel_reach(k) * h;
  for (double a : x) {
    cuts.push_back(a - reach);
    cuts.push_back(a + reach);
    if (k.kind() == KernelKind::normal)
      cuts.push_back(a);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (k.kind() == KernelKind::normal)
    cuts = { cuts.front(), cuts.back() };
  double r = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    // no kernel reaches a piece that is empty at both ends and the middle
    if (fhat(a) == 0 && fhat(0.5 * (a + b)) == 0 && fhat(b) == 0)
      continue;
    auto f2 = [&](double t) { return fhat(t) * fhat(t); };
    // between kinks the Epanechnikov fhat^2 is a quartic, so 10 Legendre nodes are exact
    r += k.kind() == KernelKind::normal ? oracle::quad(f2, a, b, 1e-12)
                                        : boost::math::quadrature::gauss<double, 10>::integrate(f2, a, b);
  }
  double loo = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double fi = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i)
        fi += oracle::K(k, (x[i] - x[j]) / h);
    loo += fi / ((n - 1) * h);
  }
  return r - 2 * loo / n;
}

Outcome ucv_equivalence()
{
  Stream s(31337);
  Outcome o;
  double worst = 0, worst_def = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 2 + s.below(49);
    std::vector<double> v(n);
    for (auto& x : v)
      x = 1.5 * s.normal() + (s.uniform() < 0.25 ? 2.5 : 0.0);
    const Sample sample(v);
    const Kernel k = s.uniform() < 0.5 ? Kernel::normal() : Kernel::epanechnikov();
    const double h = 0.05 + 1.5 * s.uniform();
    const double pair_form = ucv_objective(sample, k, h);
    worst = std::max(worst, std::abs(pair_form - ucv_classic(sample, k, h)));
    if (c < 20)
      worst_def = std::max(worst_def, std::abs(pair_form - ucv_by_definition(sample, k, h)));
  }
  o.pass = worst <= 1e-10 && worst_def <= 1e-9;
  o.detail = "100 cases, max |pair - leave-one-out| " + num(worst, 3) + "; 20 cases vs quadrature of fhat^2 " + num(worst_def, 3);
  return o;
}

Outcome exact_mise()
{
  Outcome o;
  double worst = 0;
  int cases = 0;
  for (const char* name : { "bimodal", "separated", "skewed" }) {
    const auto f = preset_mixture(name);
    const auto g = difference_density(f);
    const double rf = roughness_true(f, 0);
    for (Kernel k : { Kernel::normal(), Kernel::epanechnikov() }) {
      const double scale = k.kind() == KernelKind::normal ? 1.0 : 2.2;
      for (std::size_t n : { 20u, 100u }) {
        for (int i = 0; i < 10; ++i) {
          const double h = scale * 0.05 * std::pow(1.45, i);
          const double err = std::abs(exact_dna(g, k, n, h) + rf - oracle::brute_force_mise(f, k, n, h));
          worst = std::max(worst, err);
          ++cases;
        }
      }
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = std::to_string(cases) + " cases, max |exact - brute force| " + num(worst, 3);
  return o;
}

Outcome q0_closed_form()
{
  Outcome o;
  double worst = 0;
  const double n = 50;
  for (int i = 0; i < 20; ++i) {
    const double h = 0.02 * std::pow(1.4, i);
    // int A_K(v) g(h v) dv with g = N(0, 2) and K normal
    const double q = oracle::quad_line([&](double v) {
      const double a = (1 - 1 / n) * oracle::phi(v / std::sqrt(2.0)) / std::sqrt(2.0) - 2 * oracle::phi(v);
      return a * oracle::phi(h * v / std::sqrt(2.0)) / std::sqrt(2.0);
    });
    worst = std::max(worst, std::abs(q0_normal(h, 50) - q));
  }
  o.pass = worst <= 1e-8;
  o.detail = "20 bandwidths, max |closed form - quadrature| " + num(worst, 3);
  return o;
}

Outcome hermite_identities()
{
  Outcome o;
  double orth = 0;
  for (int j = 0; j <= 8; ++j) {
    for (int k = 0; k <= 8; ++k) {
      const double q = oracle::quad_line([&](double x) { return hermite_poly(j, x) * hermite_poly(k, x) * oracle::phi(x); });
      const double want = j == k ? factorial(j) : 0.0;
      orth = std::max(orth, std::abs(q - want) / std::max(1.0, want));
    }
  }
  double moment = 0;
  for (int j = 0; j <= 4; ++j) {
    for (double c : { 0.3, 0.8, 1.0, 1.6, 2.5 }) {
      const double gh = oracle::normal_expectation([&](double z) { return oracle::hermite_explicit(2 * j, c * z); });
      moment = std::max(moment, std::abs(normal_hermite_moment(j, c) - gh) / std::max(1.0, std::abs(gh)));
    }
  }
  double sums = 0;
  double sums_quad = 0;
  for (int i = 1; i <= 8; ++i) {
    sums = std::max(sums, std::abs(appendix_identity_check(i)));
    // same sum from quadrature moments of H_2j(u) u^2i
    double s = 0;
    double scale = 0;
    for (int j = 0; j <= i; ++j) {
      const double lam = oracle::normal_expectation([&](double u) { return oracle::hermite_explicit(2 * j, u) * std::pow(u, 2 * i); }, 80);
      const double term = lam / (std::pow(2.0, j) * factorial(j));
      s += (j % 2 ? -term : term);
      scale = std::max(scale, std::abs(term));
    }
    sums_quad = std::max(sums_quad, std::abs(s) / scale);
  }
  o.pass = orth <= 1e-9 && moment <= 1e-8 && sums == 0.0 && sums_quad <= 1e-9;
  o.detail = "orthogonality (rel. to j!) " + num(orth, 3) + ", E H_2j(cZ) vs Gauss-Hermite " + num(moment, 3) +
             ", sums exact " + num(sums, 3) + " / by quadrature " + num(sums_quad, 3);
  return o;
}

Outcome bias_rate()
{
  Outcome o;
  const auto f = preset_mixture("bimodal");
  const auto g = difference_density(f).g;
  const double sigma = std::sqrt(f.variance());
  const double truth = roughness_true(f, 2);
  const std::vector<double> grid{ 0.4, 0.3, 0.2, 0.15, 0.1 };
  std::vector<double> lx;
  for (double h : grid)
    lx.push_back(std::log(h));
  for (int m : { 2, 3 }) {
    std::vector<double> ly;
    for (double h : grid) {
      const auto a = alphas_from_density([&](double y) { return g.pdf(y); }, sigma, h, m);
      ly.push_back(std::log(std::abs(r2m_model(a, sigma, h) - truth)));
    }
    const double s = slope(lx, ly);
    const bool ok = std::abs(s - (2 * m - 2)) <= 0.4;
    o.pass = o.pass && ok;
    o.detail += "m=" + std::to_string(m) + " slope " + num(s, 4) + " (want " + std::to_string(2 * m - 2) + "), ";
  }
  double b4 = 0;
  for (double ht : { 0.5, 0.8, 1.0 }) {
    const double tau = std::sqrt(2.0) * 1.3;
    const auto a = alphas_from_density([&](double y) { return oracle::phi(y / tau) / tau; }, 1.3, ht, 3);
    b4 = std::max(b4, std::abs(bias_coefficient(a[3], 2, ht)));
  }
  o.pass = o.pass && b4 <= 1e-9;
  o.detail += "normal b4 " + num(b4, 3);
  return o;
}

Outcome variance_order()
{
  Outcome o;
  // E f^(4)(X)^2 - R(f'')^2 for N(0, 1), with f^(4) = phi H_4
  const double rf2 = 3.0 / (8.0 * std::sqrt(std::numbers::pi));
  const double bracket = oracle::quad_line([](double x) {
                           const double f4 = oracle::phi(x) * (x * x * x * x - 6 * x * x + 3);
                           return f4 * f4 * oracle::phi(x);
                         }) -
                         rf2 * rf2;
  std::vector<double> lx, ly;
  std::string levels;
  bool level_ok = true;
  for (std::size_t n : { 100u, 200u, 400u }) {
    std::vector<double> v(500);
    std::vector<std::thread> pool;
    const unsigned T = threads();
    for (unsigned t = 0; t < T; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < v.size(); r += T)
          v[r] = r2m_hat(draw(NormalMixture::normal(), n, 4242 + n, r), 1.0, 0.8, 2).value;
      });
    for (auto& th : pool)
      th.join();
    double mean = 0;
    for (double x : v)
      mean += x / v.size();
    double var = 0;
    for (double x : v)
      var += (x - mean) * (x - mean) / (v.size() - 1.0);
    const double ref = 4.0 / n * bracket;
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(var));
    level_ok = level_ok && var / ref <= 2.0 && var / ref >= 0.5;
    levels += " n=" + std::to_string(n) + ": var/ref " + num(var / ref, 3);
  }
  const double s = slope(lx, ly);
  o.pass = std::abs(s + 1) <= 0.25 && level_ok;
  o.detail = "slope " + num(s, 4) + "," + levels + " (sigma known)";
  return o;
}

//! Fourth derivative at 0 of phi(y / tau) / tau * sum d_j / (2j)! H_2j(y / (h tau)),
//! built from the Hermite values at zero.
double model_fourth_derivative(const std::vector<double>& d, double sigma, double h)
{
  const double tau = std::sqrt(2.0) * sigma;
  auto H0 = [](int n) { // H_n(0)
    if (n % 2)
      return 0.0;
    const int k = n / 2;
    return (k % 2 ? -1.0 : 1.0) * factorial(n) / (std::pow(2.0, k) * factorial(k));
  };
  auto P = [&](int r) { // r-th derivative of the polynomial factor at 0
    double s = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const int n = 2 * static_cast<int>(j);
      if (n < r)
        continue;
      s += d[j] / factorial(n) * factorial(n) / factorial(n - r) * H0(n - r) / std::pow(h * tau, r);
    }
    return s;
  };
  const double p0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double w[5] = { p0 / tau, 0.0, -p0 / std::pow(tau, 3), 0.0, 3 * p0 / std::pow(tau, 5) };
  const int binom[5] = { 1, 4, 6, 4, 1 };
  double s = 0;
  for (int k = 0; k <= 4; ++k)
    s += binom[k] * w[k] * P(4 - k);
  return s;
}

Outcome diagonals_gap()
{
  Outcome o;
  double worst = 0;
  double smallest = 1e300;
  int cases = 0;
  for (std::size_t n : { 10u, 50u, 200u }) {
    const auto x = draw(preset_mixture("skewed"), n, 77, n);
    const double sigma = estimate_sigma(x);
    for (int m : { 1, 2, 3, 4 }) {
      for (double h : { 0.4, 0.8, 1.0, 1.2 }) {
        const double gap = r2m_diag(x, sigma, h, m).value - (1 - 1.0 / n) * r2m_hat(x, sigma, h, m).value;
        std::vector<double> d(m + 1);
        for (int j = 0; j <= m; ++j) {
          const double h0 = (j % 2 ? -1.0 : 1.0) * factorial(2 * j) / (std::pow(2.0, j) * factorial(j));
          d[j] = h0 / (n * h);
        }
        const double closed = model_fourth_derivative(d, sigma, h);
        worst = std::max(worst, std::abs(gap - closed) / std::max(1.0, std::abs(closed)));
        smallest = std::min(smallest, closed);
        ++cases;
      }
    }
  }
  o.pass = worst <= 1e-12 && smallest > 0;
  o.detail = std::to_string(cases) + " (m, h_H, n) cases, max |gap - closed form| " + num(worst, 3) + ", smallest term " + num(smallest, 4);
  return o;
}

Outcome selector_sanity()
{
  Outcome o;
  SimConfig c;
  c.mixture = NormalMixture::normal();
  c.n = 100;
  c.reps = 200;
  c.master_seed = 20261015;
  c.threads = threads();
  const Method methods[] = { Method::normal_reference, Method::hermite, Method::proposal1, Method::proposal2, Method::t_tail, Method::ucv };
  for (Method m : methods) {
    SelectorConfig s;
    s.method = m;
    c.methods.push_back(s);
  }
  const auto r = run_selector_comparison(c);
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    const auto& s = r.summaries[i];
    const double ratio = s.median / s.truth;
    const bool ucv = methods[i] == Method::ucv;
    const bool ok = s.failures == 0 && (ucv ? ratio >= 0.6 && ratio <= 1.6 : ratio >= 0.9 && ratio <= 1.1);
    o.pass = o.pass && ok;
    o.detail += std::string(method_name(methods[i])) + " " + num(ratio, 4) + (ok ? "" : " OUT") +
                (s.fallbacks ? " (" + std::to_string(s.fallbacks) + " fallbacks)" : "") + ", ";
  }

  // invariance on a sample whose values sit on a 1/64 grid
  Stream st(808);
  std::vector<double> v(60);
  for (auto& x : v)
    x = std::round(64.0 * (st.normal() + (st.uniform() < 0.3 ? 2.0 : 0.0))) / 64.0;
  const Sample x(v);
  bool location = true;
  double scale = 0;
  for (Method m : all_methods()) {
    SelectorConfig s;
    s.method = m;
    const double h = select(x, s).h_hat;
    location = location && select(x.affine(1.0, 512.0), s).h_hat == h && select(x.affine(1.0, -7.25), s).h_hat == h;
    scale = std::max(scale, std::abs(select(x.affine(2.5, 0.0), s).h_hat / (2.5 * h) - 1));
  }
  o.pass = o.pass && location && scale <= 1e-5;
  o.detail += std::string("location ") + (location ? "exact" : "NOT exact") + ", scale rel. err " + num(scale, 3);
  return o;
}

std::vector<double> raw_moments(const NormalMixture& m, int kmax)
{
  // E(mu + s Z)^k from normal moments
  std::vector<double> out(kmax + 1, 0.0);
  for (const auto& c : m.components()) {
    for (int k = 0; k <= kmax; ++k) {
      double e = 0;
      for (int i = 0; i <= k; i += 2) {
        const double zi = factorial(i) / (std::pow(2.0, i / 2) * factorial(i / 2));
        e += factorial(k) / (factorial(i) * factorial(k - i)) * std::pow(c.mean, k - i) * std::pow(c.sd, i) * zi;
      }
      out[k] += c.weight * e;
    }
  }
  return out;
}

//! Standardized 4th and 6th cumulants from raw moments.
std::pair<double, double> standardized_cumulants(const NormalMixture& m)
{
  const auto r = raw_moments(m, 6);
  std::vector<double> mu(7, 0.0);
  for (int k = 0; k <= 6; ++k)
    for (int i = 0; i <= k; ++i)
      mu[k] += factorial(k) / (factorial(i) * factorial(k - i)) * r[i] * std::pow(-r[1], k - i);
  const double k2 = mu[2];
  const double k4 = mu[4] - 3 * mu[2] * mu[2];
  const double k6 = mu[6] - 15 * mu[4] * mu[2] - 10 * mu[3] * mu[3] + 30 * std::pow(mu[2], 3);
  return { k4 / (k2 * k2), k6 / std::pow(k2, 3) };
}

Outcome cumulant_halving()
{
  Outcome o;
  double worst = 0;
  for (const char* name : { "bimodal", "skewed" }) {
    const auto f = preset_mixture(name);
    const auto [f4, f6] = standardized_cumulants(f);
    const auto [g4, g6] = standardized_cumulants(difference_density(f).g);
    worst = std::max({ worst, std::abs(g4 - 0.5 * f4), std::abs(g6 - 0.25 * f6) });
    for (int j : { 2, 3 }) {
      const auto [lib_g, lib_half] = cumulant_ratio_check(f, j);
      worst = std::max(worst, std::abs(lib_g - lib_half));
      worst = std::max(worst, std::abs(lib_g - (j == 2 ? g4 : g6)));
    }
  }
  o.pass = worst <= 1e-9;
  o.detail = "2 mixtures, j = 2, 3, max deviation " + num(worst, 3);
  return o;
}

Outcome normal_start_limits()
{
  Outcome o;
  const auto x = draw(NormalMixture::normal(), 40, 91, 0);
  const double sigma = estimate_sigma(x);
  double worst_ucv = 0;
  for (int i = 0; i < 20; ++i) {
    const double h = 0.1 * std::pow(1.15, i);
    worst_ucv = std::max(worst_ucv, std::abs(normal_start_objective(x, sigma, 1e-4, h) - ucv_by_definition(x, Kernel::normal(), h)));
  }
  // at sigma = 1e6 the objective is int h^-1 A_K(y / h) ghat(y) dy + R(K) / (n h),
  // ghat the off-diagonal pair kernel estimate with bandwidth h~
  const auto ys = draw(NormalMixture::normal(), 20, 92, 0);
  const auto y = ys.values();
  const double n = 20, ht = 0.4;
  auto ghat = [&](double t) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j)
        if (i != j)
          s += oracle::phi((t - (y[j] - y[i])) / ht) / ht;
    return s / (n * (n - 1));
  };
  double worst_scv = 0;
  for (int i = 0; i < 20; ++i) {
    const double h = 0.1 * std::pow(1.15, i);
    const double q = oracle::quad_pieces(
      [&](double t) {
        const double v = t / h;
        const double a = (1 - 1 / n) * oracle::phi(v / std::sqrt(2.0)) / std::sqrt(2.0) - 2 * oracle::phi(v);
        return a / h * ghat(t);
      },
      { -40.0, -8.0, -2.0, 0.0, 2.0, 8.0, 40.0 },
      1e-10);
    const double want = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * n * h) + q;
    worst_scv = std::max(worst_scv, std::abs(normal_start_objective(ys, 1e6, ht, h) - want));
  }
  o.pass = worst_ucv <= 1e-3 && worst_scv <= 1e-3;
  o.detail = "h~=1e-4 vs UCV " + num(worst_ucv, 3) + ", sigma=1e6 vs smoothed quadrature " + num(worst_scv, 3) + " (20 bandwidths each)";
  return o;
}

Outcome determinism()
{
  Outcome o;
  auto run = [](std::vector<std::string> args, const std::string& t) {
    args.push_back("--threads");
    args.push_back(t);
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::to_string(code) + "\n" + out.str();
  };
  const std::vector<std::vector<std::string>> commands{
    { "simulate", "--preset", "bimodal", "--n", "60", "--reps", "24", "--seed", "5", "--format", "csv",
      "--methods", "nrr,ucv,hermite,p1,p2,p3,t-tail,normal-start" },
    { "contest", "--preset", "skewed", "--n", "80", "--reps", "24", "--seed", "6", "--format", "csv", "--pilot-scale", "2",
      "--estimators", "r2m,r2m-diag,r2m-corrected,normal-start,local-lik" },
  };
  int compared = 0;
  for (const auto& cmd : commands) {
    const auto ref = run(cmd, "1");
    if (ref.rfind("0\n", 0) != 0) {
      o.pass = false;
      o.detail += cmd[0] + " failed to run; ";
      continue;
    }
    for (const char* t : { "1", "3", "8" }) {
      ++compared;
      if (run(cmd, t) != ref) {
        o.pass = false;
        o.detail += cmd[0] + " differs at threads=" + t + "; ";
      }
    }
  }
  o.detail += std::to_string(compared) + " reruns compared byte for byte against threads=1";
  return o;
}

} // namespace

int main(int argc, char** argv)
{
  std::set<std::string> known_red;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-red" && i + 1 < argc)
      known_red.insert(argv[++i]);
    else if (a == "--only" && i + 1 < argc)
      only = argv[++i];
    else {
      std::cerr << "usage: acceptance [--known-red NAME]... [--only NAME]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
    { "table1", table1 },
    { "ucv-equivalence", ucv_equivalence },
    { "exact-mise", exact_mise },
    { "q0-closed-form", q0_closed_form },
    { "hermite-identities", hermite_identities },
    { "bias-rate", bias_rate },
    { "variance-order", variance_order },
    { "diagonals-in-gap", diagonals_gap },
    { "selector-sanity", selector_sanity },
    { "cumulant-halving", cumulant_halving },
    { "normal-start-limits", normal_start_limits },
    { "determinism", determinism },
  };

  int unexpected = 0;
  for (const auto& [name, check] : checks) {
    if (!only.empty() && name != only)
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = { false, std::string("threw: ") + e.what() };
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string tag = o.pass ? "PASS" : "FAIL";
    if (!o.pass && known_red.count(name))
      tag += " (known)";
    else if (!o.pass)
      ++unexpected;
    std::cout << tag << "  " << name << "  " << o.detail << "  [" << num(seconds, 3) << " s]" << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
