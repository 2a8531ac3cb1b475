#include "bwlab/mixtures.hpp"

#include "bwlab/hermite.hpp"

#include <algorithm>
#include <cmath>

namespace bwlab {

namespace {

double binom(int n, int k)
{
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

//! E (mu + s Z)^k.
double normal_raw_moment(double mu, double s, int k)
{
  double total = 0.0;
  double dfact = 1.0; // (i - 1)!! for even i
  for (int i = 0; i <= k; i += 2) {
    if (i > 0)
      dfact *= i - 1;
    total += binom(k, i) * std::pow(mu, k - i) * std::pow(s, i) * dfact;
  }
  return total;
}

std::vector<double> cumulants(const NormalMixture& m, int kmax)
{
  // cumulants of the centred variable from its raw moments
  std::vector<double> mom(kmax + 1);
  for (int k = 0; k <= kmax; ++k)
    mom[k] = m.central_moment(k);
  std::vector<double> kap(kmax + 1, 0.0);
  for (int n = 1; n <= kmax; ++n) {
    double s = mom[n];
    for (int k = 1; k < n; ++k)
      s -= binom(n - 1, k - 1) * kap[k] * mom[n - k];
    kap[n] = s;
  }
  return kap;
}

} // namespace

NormalMixture::NormalMixture(std::vector<MixtureComponent> components, bool renormalize)
  : components_(std::move(components))
{
  if (components_.empty())
    throw InvalidArgument("mixture: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!std::isfinite(c.weight) || c.weight < 0.0)
      throw InvalidArgument("mixture: weights must be finite and nonnegative");
    if (!std::isfinite(c.mean))
      throw InvalidArgument("mixture: means must be finite");
    if (!std::isfinite(c.sd) || !(c.sd > 0.0))
      throw InvalidArgument("mixture: sds must be finite and positive");
    total += c.weight;
  }
  if (!(total > 0.0))
    throw InvalidArgument("mixture: weights sum to zero");
  if (renormalize) {
    for (auto& c : components_)
      c.weight /= total;
  } else if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("mixture: weights sum to " + std::to_string(total) + ", not 1");
  }
}

NormalMixture NormalMixture::normal(double mean, double sd)
{
  return NormalMixture({ { 1.0, mean, sd } });
}

double NormalMixture::pdf(double x) const
{
  double s = 0.0;
  for (const auto& c : components_)
    s += c.weight * normal_pdf((x - c.mean) / c.sd) / c.sd;
  return s;
}

double NormalMixture::cdf(double x) const
{
  double s = 0.0;
  for (const auto& c : components_)
    s += c.weight * 0.5 * std::erfc(-(x - c.mean) / (c.sd * std::numbers::sqrt2));
  return s;
}

double NormalMixture::derivative(int order, double x) const
{
  return mixture_pdf_derivative(*this, order, x);
}

double NormalMixture::mean() const
{
  double s = 0.0;
  for (const auto& c : components_)
    s += c.weight * c.mean;
  return s;
}

double NormalMixture::variance() const
{
  return central_moment(2);
}

double NormalMixture::raw_moment(int k) const
{
  if (k < 0)
    throw InvalidArgument("raw_moment: negative order");
  double s = 0.0;
  for (const auto& c : components_)
    s += c.weight * normal_raw_moment(c.mean, c.sd, k);
  return s;
}

double NormalMixture::central_moment(int k) const
{
  if (k < 0)
    throw InvalidArgument("central_moment: negative order");
  const double mu = mean();
  double s = 0.0;
  for (const auto& c : components_)
    s += c.weight * normal_raw_moment(c.mean - mu, c.sd, k);
  return s;
}

bool NormalMixture::is_symmetric_about_zero() const
{
  for (const auto& c : components_) {
    const bool mirrored = std::any_of(components_.begin(), components_.end(), [&](const auto& d) {
      return d.mean == -c.mean && d.sd == c.sd && d.weight == c.weight;
    });
    if (!mirrored)
      return false;
  }
  return true;
}

DifferenceDensity difference_density(const NormalMixture& f)
{
  const auto& cs = f.components();
  std::vector<MixtureComponent> out;
  for (const auto& ci : cs) {
    for (const auto& cj : cs) {
      const MixtureComponent d{ ci.weight * cj.weight,
                                cj.mean - ci.mean,
                                std::sqrt(ci.sd * ci.sd + cj.sd * cj.sd) };
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) {
        return e.mean == d.mean && e.sd == d.sd;
      });
      if (it == out.end())
        out.push_back(d);
      else
        it->weight += d.weight;
    }
  }
  return { NormalMixture(std::move(out), true), f.variance() };
}

double mixture_pdf_derivative(const NormalMixture& m, int order, double x)
{
  if (order < 0 || order > kMaxMixtureDerivative)
    throw InvalidArgument("mixture_pdf_derivative: order must lie in [0, 12]");
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  double s = 0.0;
  for (const auto& c : m.components()) {
    const double z = (x - c.mean) / c.sd;
    s += c.weight * sign * normal_pdf(z) * hermite_poly(order, z) / std::pow(c.sd, order + 1);
  }
  return s;
}

double roughness_true(const NormalMixture& f, int deriv_order)
{
  if (deriv_order < 0 || deriv_order > 3)
    throw InvalidArgument("roughness_true: derivative order must lie in [0, 3]");
  const auto g = difference_density(f).g;
  const double v = mixture_pdf_derivative(g, 2 * deriv_order, 0.0);
  return (deriv_order % 2 == 0) ? v : -v;
}

double standardized_cumulant(const NormalMixture& m, int k)
{
  if (k < 2 || k > 16)
    throw InvalidArgument("standardized_cumulant: order must lie in [2, 16]");
  const auto kap = cumulants(m, k);
  return kap[k] / std::pow(kap[2], 0.5 * k);
}

std::pair<double, double> cumulant_ratio_check(const NormalMixture& f, int j)
{
  if (j < 2 || j > 8)
    throw InvalidArgument("cumulant_ratio_check: j must lie in [2, 8]");
  const auto g = difference_density(f).g;
  return { standardized_cumulant(g, 2 * j),
           std::pow(0.5, j - 1) * standardized_cumulant(f, 2 * j) };
}

Sample sample_mixture(const NormalMixture& m, std::size_t n, Stream& stream)
{
  if (n == 0)
    throw InvalidArgument("sample_mixture: n must be at least 1");
  const auto& cs = m.components();
  std::vector<double> cumulative(cs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    acc += cs[k].weight;
    cumulative[k] = acc;
  }
  std::vector<double> xs(n);
  for (auto& x : xs) {
    std::size_t k = 0;
    if (cs.size() > 1) {
      const double u = stream.uniform() * acc;
      k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin());
      k = std::min(k, cs.size() - 1);
    }
    x = cs[k].mean + cs[k].sd * stream.normal();
  }
  return Sample(std::move(xs));
}

NormalMixture preset_mixture(std::string_view name)
{
  if (name == "gaussian" || name == "normal")
    return NormalMixture::normal();
  if (name == "bimodal")
    return NormalMixture({ { 0.5, -1.0, 2.0 / 3.0 }, { 0.5, 1.0, 2.0 / 3.0 } });
  if (name == "separated")
    return NormalMixture({ { 0.5, -1.5, 0.5 }, { 0.5, 1.5, 0.5 } });
  if (name == "skewed")
    return NormalMixture({ { 0.2, 0.0, 1.0 }, { 0.2, 0.5, 2.0 / 3.0 }, { 0.6, 13.0 / 12.0, 5.0 / 9.0 } });
  throw InvalidArgument("unknown mixture preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
  return { "gaussian", "bimodal", "separated", "skewed" };
}

} // namespace bwlab
