#include "bwlab/hermite.hpp"
#include "bwlab/mixtures.hpp"
#include "bwlab/random.hpp"
#include "bwlab/roughness.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace bwlab;

namespace {

const double kNormalR = 3.0 / (8.0 * kSqrtPi);

Sample normal_sample(std::size_t n, std::uint64_t seed, double sd = 1.0)
{
  Stream s(seed);
  return sample_mixture(NormalMixture::normal(0.0, sd), n, s);
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::vector<double> pair_differences(const Sample& s)
{
  const auto x = s.values();
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t l = i + 1; l < x.size(); ++l)
      y.push_back(x[l] - x[i]);
  return y;
}

} // namespace

TEST(R2mModel, NormalValue)
{
  const std::vector<double> a{ 1.0, 0.0, 0.0 };
  EXPECT_NEAR(r2m_model(a, 1.0, 0.8), kNormalR, 1e-15);
  EXPECT_NEAR(r2m_model(a, 1.0, 0.8), 0.211571, 1e-6);
  EXPECT_NEAR(r2m_model(a, 2.0, 0.3), kNormalR / 32.0, 1e-15);
}

TEST(R2mModel, PairWeights)
{
  for (double h : { 0.3, 0.8, 1.2 }) {
    EXPECT_DOUBLE_EQ(r2m_pair_weight(0, h), 1.0);
    EXPECT_NEAR(r2m_pair_weight(1, h) * h * h, -2.0 - 0.5 * h * h, 1e-13);
    EXPECT_NEAR(r2m_pair_weight(2, h) * std::pow(h, 4), 1.0 / 3.0 + h * h + 0.125 * std::pow(h, 4), 1e-13);
  }
}

TEST(R2mModel, MatchesFourthDerivativeOfExpansion)
{
  const HermiteModel model{ 1.3, 0.7, { 1.0, 0.2, -0.15, 0.05 } };
  const double fd = oracle::central_difference([&](double y) { return expansion_density(model, y); }, 4, 0.0, 0.05);
  const double r = r2m_model(model.alphas, model.sigma, model.h_H);
  EXPECT_NEAR(r, fd, 1e-5 * std::abs(r));
}

TEST(R2mModel, ConvergesWithExactCoefficients)
{
  const auto f = preset_mixture("skewed");
  const auto g = difference_density(f).g;
  const double sigma = std::sqrt(f.variance());
  const double truth = roughness_true(f, 2);
  double prev = 1e9;
  for (double h_H : { 0.4, 0.2, 0.1 }) {
    const auto a = alphas_from_density([&](double y) { return g.pdf(y); }, sigma, h_H, 2);
    const double err = std::abs(r2m_model(a, sigma, h_H) - truth);
    EXPECT_LT(err, prev);
    if (prev < 1e9)
      EXPECT_NEAR(prev / err, 4.0, 1.5) << h_H;
    prev = err;
  }
}

TEST(R2mHat, EqualsModelOfEstimatedCoefficients)
{
  Stream s(4);
  const auto x = sample_mixture(preset_mixture("bimodal"), 150, s);
  for (int m : { 0, 1, 2, 4 }) {
    const double sigma = estimate_sigma(x);
    const auto a = estimate_alphas(x, sigma, 0.8, m);
    const auto r = r2m_hat(x, sigma, 0.8, m);
    EXPECT_NEAR(r.value, r2m_model(a, sigma, 0.8), 1e-12 * std::max(1.0, std::abs(r.value)));
    EXPECT_EQ(r.n_pairs, 150u * 149u / 2u);
    EXPECT_EQ(r.pilots.at("h_H"), 0.8);
  }
}

TEST(R2mHat, NormalMonteCarlo)
{
  std::vector<double> v;
  for (int rep = 0; rep < 200; ++rep)
    v.push_back(r2m_hat(normal_sample(500, 1000 + rep), 1.0, 0.8, 2).value);
  EXPECT_NEAR(median(v), kNormalR, 0.15 * kNormalR);
}

TEST(R2mHat, ScaleEquivariance)
{
  const auto x = normal_sample(120, 9);
  const double c = 2.5;
  const double r1 = r2m_hat(x, 1.1, 0.6, 3).value;
  const double r2 = r2m_hat(x.affine(c, 0.0), 1.1 * c, 0.6, 3).value;
  EXPECT_NEAR(r2, r1 / std::pow(c, 5), 1e-11 * std::abs(r1));
}

TEST(R2mDiag, AddedTerm)
{
  for (double h_H : { 0.3, 0.8, 1.5 })
    for (int m : { 0, 1, 2, 5 })
      EXPECT_GT(diagonals_in_increment(100, 1.2, h_H, m), 0.0);
  const double sigma = 1.2, h_H = 0.6, n = 50;
  EXPECT_NEAR(diagonals_in_increment(50, sigma, h_H, 0),
              3.0 / (n * h_H * std::pow(std::sqrt(2.0) * sigma, 5) * std::sqrt(2.0 * kPi)),
              1e-15);
  EXPECT_EQ(diagonals_in_increment(SampleSize::infinite(), sigma, h_H, 3), 0.0);
}

TEST(R2mDiag, DecomposesIntoScaledHatPlusIncrement)
{
  const auto x = normal_sample(80, 21);
  for (int m : { 0, 2, 3 }) {
    const double d = r2m_diag(x, 1.0, 0.8, m).value;
    const double expected = (1.0 - 1.0 / 80) * r2m_hat(x, 1.0, 0.8, m).value + diagonals_in_increment(80, 1.0, 0.8, m);
    EXPECT_NEAR(d, expected, 1e-12);
    const auto a = diagonals_in_alphas(estimate_alphas(x, 1.0, 0.8, m), 80, 0.8);
    EXPECT_NEAR(d, r2m_model(a, 1.0, 0.8), 1e-12);
  }
}

TEST(BiasCoefficient, ZeroForNormal)
{
  const auto g = NormalMixture::normal(0.0, std::sqrt(2.0) * 1.4);
  const auto a = alphas_from_density([&](double y) { return g.pdf(y); }, 1.4, 1.0, 4);
  EXPECT_NEAR(bias_coefficient(a[3], 2, 1.0), 0.0, 1e-10);
  EXPECT_NEAR(bias_coefficient(a[4], 3, 1.0), 0.0, 1e-10);
  EXPECT_THROW(bias_coefficient(0.1, 2, 0.0), InvalidArgument);
}

TEST(BiasCoefficient, Formula)
{
  EXPECT_NEAR(bias_coefficient(0.3, 2, 0.5), 0.3 / std::sqrt(2.0 * kPi) / std::pow(0.5, 6), 1e-12);
  const auto x = normal_sample(60, 5);
  const auto a = estimate_alphas(x, 1.0, 0.9, 3);
  EXPECT_DOUBLE_EQ(bias_coefficient_hat(x, 1.0, 2, 0.9), bias_coefficient(a[3], 2, 0.9));
}

TEST(BiasCoefficient, SignMatchesSixthDerivativeOfG)
{
  // G(x) = exp(x^2 / 2) g(tau x) tau
  const auto f = preset_mixture("bimodal");
  const auto g = difference_density(f).g;
  const double sigma = std::sqrt(f.variance());
  const double tau = std::sqrt(2.0) * sigma;
  auto G = [&](double x) { return std::exp(0.5 * x * x) * oracle::mixture_pdf(g, tau * x) * tau; };
  const double g6 = oracle::central_difference(G, 6, 0.0, 0.05);
  const auto a = alphas_from_density([&](double y) { return g.pdf(y); }, sigma, 0.5, 3);
  const double b4 = bias_coefficient(a[3], 2, 0.5);
  EXPECT_LT(g6, 0.0);
  EXPECT_EQ(std::signbit(b4), std::signbit(g6));
}

TEST(BiasCoefficient, StableUnderDoublingForSmoothG)
{
  const auto f = preset_mixture("skewed");
  const auto g = difference_density(f).g;
  const double sigma = std::sqrt(f.variance());
  auto b = [&](double ht) {
    const auto a = alphas_from_density([&](double y) { return g.pdf(y); }, sigma, ht, 3);
    return bias_coefficient(a[3], 2, ht);
  };
  const double b1 = b(0.1), b2 = b(0.2);
  EXPECT_NEAR(b2 / b1, 1.0, 0.3);
}

TEST(EvenDerivativeModel, OrderFourIsR2m)
{
  const std::vector<double> a{ 1.0, 0.4, -0.2, 0.1 };
  const double r = r2m_model(a, 0.9, 0.7);
  EXPECT_NEAR(g_even_derivative_model(a, 0.9, 0.7, 4), r, 1e-14 * std::abs(r));
}

TEST(EvenDerivativeModel, OrderSixNormal)
{
  const std::vector<double> a{ 1.0, 0.0, 0.0, 0.0 };
  for (double sigma : { 1.0, 1.7 }) {
    const auto g = NormalMixture::normal(0.0, std::sqrt(2.0) * sigma);
    EXPECT_NEAR(g_even_derivative_model(a, sigma, 0.8, 6), mixture_pdf_derivative(g, 6, 0.0), 1e-13);
  }
  EXPECT_THROW(g_even_derivative_model(std::vector<double>{ 1.0, 0.0 }, 1.0, 0.8, 6), InvalidArgument);
}

TEST(EvenDerivativeModel, OrderSixFiniteDifference)
{
  const HermiteModel model{ 1.1, 0.8, { 1.0, -0.3, 0.12, 0.04, -0.02 } };
  const double fd = oracle::central_difference([&](double y) { return expansion_density(model, y); }, 6, 0.0, 0.04);
  const double v = g_even_derivative_model(model.alphas, model.sigma, model.h_H, 6);
  EXPECT_NEAR(v, fd, 1e-4 * std::abs(v));
}

TEST(S6, NormalDataAndSign)
{
  std::vector<double> r6, r8;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    const auto x = normal_sample(3000, 70 + seed);
    const double sigma = estimate_sigma(x);
    const auto g = NormalMixture::normal(0.0, std::sqrt(2.0) * sigma);
    const double truth = mixture_pdf_derivative(g, 6, 0.0);
    const double s6 = s6_hat(x, sigma, 1.0);
    EXPECT_LT(s6, 0.0);
    r6.push_back(s6 / truth);
    r8.push_back(s8_hat(x, sigma, 1.0) / truth);
    const auto a = estimate_alphas(x, sigma, 1.0, 3);
    EXPECT_NEAR(s6, g_even_derivative_model(a, sigma, 1.0, 6), 1e-12 * std::abs(s6));
  }
  EXPECT_NEAR(median(r6), 1.0, 0.15);
  EXPECT_NEAR(median(r8), 1.0, 0.2);
}

TEST(S6, MixtureTruthIsNegative)
{
  for (const char* name : { "gaussian", "skewed", "bimodal" }) {
    const auto f = preset_mixture(name);
    EXPECT_NEAR(mixture_pdf_derivative(difference_density(f).g, 6, 0.0), -roughness_true(f, 3), 1e-10) << name;
  }
}

TEST(NormalStart, SinglePair)
{
  const Sample x({ 0.7, 0.7 + 1e-300 });
  const double sigma = 0.9, h = 0.5;
  const double tau2 = 2 * sigma * sigma;
  const Kernel L = Kernel::normal();
  const double expected = 3.0 / (tau2 * tau2) * kernel_derivative(L, 0, 0.0) / h -
                          6.0 / tau2 * kernel_derivative(L, 2, 0.0) / std::pow(h, 3) +
                          kernel_derivative(L, 4, 0.0) / std::pow(h, 5);
  EXPECT_NEAR(r_normal_start(x, sigma, h, L).value, expected, 1e-12 * std::abs(expected));
}

TEST(NormalStart, FourthDerivativeOfMultiplicativeEstimate)
{
  const auto x = normal_sample(50, 12);
  const double sigma = 1.0, h = 0.5, tau2 = 2.0;
  const auto ys = pair_differences(x);
  auto ghat = [&](double y) {
    double s = 0.0;
    for (double d : ys)
      s += std::exp(0.5 * d * d / tau2) * 0.5 * (oracle::phi((d - y) / h) + oracle::phi((d + y) / h)) / h;
    return std::exp(-0.5 * y * y / tau2) * s / ys.size();
  };
  const double fd = oracle::central_difference(ghat, 4, 0.0, 0.02);
  const double r = r_normal_start(x, sigma, h, Kernel::normal()).value;
  EXPECT_NEAR(r, fd, 0.02 * std::abs(fd));
}

TEST(NormalStart, NormalMonteCarlo)
{
  std::vector<double> ratio;
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = normal_sample(500, 5000 + rep);
    const double sigma = estimate_sigma(x);
    ratio.push_back(r_normal_start(x, sigma, 0.5, Kernel::normal()).value / (kNormalR / std::pow(sigma, 5)));
  }
  EXPECT_NEAR(median(ratio), 1.0, 0.15);
}

TEST(NormalStart, ExponentCapFlag)
{
  const Sample x({ 0.0, 0.1, 0.2, 0.05, 60.0 });
  const auto r = r_normal_start(x, 1.0, 0.5, Kernel::normal());
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "exponent-capped"), r.flags.end());
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(LocalLikelihood, ExactFitRecovery)
{
  const double w = 1.2;
  const double a0 = -1.3, b0 = 0.4, c0 = -0.7;
  const auto m = local_quartic_moments(a0, b0, c0, w);
  const auto fit = fit_local_quartic(m, w);
  EXPECT_NEAR(fit.a, a0, 1e-6);
  EXPECT_NEAR(fit.b, b0, 1e-6);
  EXPECT_NEAR(fit.c, c0, 1e-6);
}

TEST(LocalLikelihood, ModelMomentsMatchQuadrature)
{
  const double w = 0.8, a = 0.1, b = -0.5, c = 0.9;
  const auto m = local_quartic_moments(a, b, c, w);
  for (int k = 0; k < 3; ++k) {
    const double ref = oracle::quad([&](double t) {
      return oracle::K(Kernel::epanechnikov(), t / w) / w * std::pow(t, 2 * k) * std::exp(a + b * t * t + c * std::pow(t, 4));
    }, -0.5 * w, 0.5 * w, 1e-13);
    EXPECT_NEAR(m[k], ref, 1e-12) << k;
  }
}

TEST(LocalLikelihood, StationaryAtOptimum)
{
  const auto x = normal_sample(300, 31);
  const double w = 1.0;
  std::array<double, 3> mom{};
  const auto ys = pair_differences(x);
  for (double y : ys) {
    const double l = oracle::K(Kernel::epanechnikov(), y / w) / w;
    mom[0] += l;
    mom[1] += l * y * y;
    mom[2] += l * std::pow(y, 4);
  }
  for (auto& v : mom)
    v /= ys.size();
  const auto fit = fit_local_quartic(mom, w);
  auto objective = [&](double a, double b, double c) {
    const double integral = oracle::quad([&](double t) {
      return oracle::K(Kernel::epanechnikov(), t / w) / w * std::exp(a + b * t * t + c * std::pow(t, 4));
    }, -0.5 * w, 0.5 * w, 1e-14);
    return mom[0] * a + mom[1] * b + mom[2] * c - integral;
  };
  const double e = 1e-4;
  const double ga = (objective(fit.a + e, fit.b, fit.c) - objective(fit.a - e, fit.b, fit.c)) / (2 * e);
  const double gb = (objective(fit.a, fit.b + e, fit.c) - objective(fit.a, fit.b - e, fit.c)) / (2 * e);
  const double gc = (objective(fit.a, fit.b, fit.c + e) - objective(fit.a, fit.b, fit.c - e)) / (2 * e);
  EXPECT_NEAR(ga, 0.0, 1e-8);
  EXPECT_NEAR(gb, 0.0, 1e-8);
  EXPECT_NEAR(gc, 0.0, 1e-8);
  for (double s : fit.score)
    EXPECT_NEAR(s, 0.0, 1e-8);
  const double r = r_local_likelihood(x, w).value;
  EXPECT_NEAR(r, std::exp(fit.a) * (24 * fit.c + 12 * fit.b * fit.b), 1e-9 * std::abs(r));
}

TEST(LocalLikelihood, PopulationMomentsGiveTruth)
{
  // g = N(0, 2) is exactly log-quadratic, so the fit is beta = -1/4, gamma = 0
  const auto g = NormalMixture::normal(0.0, std::sqrt(2.0));
  for (double w : { 1.0, 2.0 }) {
    std::array<double, 3> mom{};
    for (int k = 0; k < 3; ++k)
      mom[k] = oracle::quad([&](double t) { return oracle::K(Kernel::epanechnikov(), t / w) / w * std::pow(t, 2 * k) * g.pdf(t); },
                            -0.5 * w, 0.5 * w, 1e-15);
    const auto fit = fit_local_quartic(mom, w);
    EXPECT_NEAR(fit.b, -0.25, 1e-7);
    EXPECT_NEAR(fit.c, 0.0, 1e-6);
    EXPECT_NEAR(std::exp(fit.a) * (24 * fit.c + 12 * fit.b * fit.b), kNormalR, 1e-6);
  }
}

TEST(LocalLikelihood, NormalMonteCarlo)
{
  // window b = 3, i.e. support +-1.5; at b = 1 the quartic coefficient is
  // dominated by small-sample bias at n = 500
  std::vector<double> v;
  for (int rep = 0; rep < 200; ++rep)
    v.push_back(r_local_likelihood(normal_sample(500, 9000 + rep), 3.0).value);
  EXPECT_NEAR(median(v), kNormalR, 0.25 * kNormalR);
}

TEST(LocalLikelihood, SmallWindowConvergesAll)
{
  for (int rep = 0; rep < 200; ++rep)
    EXPECT_NO_THROW(r_local_likelihood(normal_sample(500, 9000 + rep), 1.0)) << rep;
}

TEST(LocalLikelihood, RejectsUnboundedKernel)
{
  EXPECT_THROW(r_local_likelihood(normal_sample(20, 1), 1.0, Kernel::normal()), InvalidArgument);
  EXPECT_THROW(r_local_likelihood(Sample({ 0.0, 10.0, 20.0 }), 1.0), InvalidArgument);
}

TEST(GKernelEstimate, SymmetricAndDiagonalSpike)
{
  const auto x = normal_sample(40, 3);
  for (Kernel L : { Kernel::normal(), Kernel::epanechnikov() }) {
    for (bool diag : { false, true })
      for (double y : { 0.2, 0.9 })
        EXPECT_EQ(g_kernel_estimate(x, y, 0.3, L, diag), g_kernel_estimate(x, -y, 0.3, L, diag));
    EXPECT_GE(g_kernel_estimate(x, 0.0, 0.3, L, true), self_convolution(L, 0.0) / (40 * 0.3));
  }
}

TEST(GKernelEstimate, IntegratesToOneAndNearTruth)
{
  const auto small = normal_sample(200, 8);
  const double total = oracle::quad_pieces([&](double y) { return g_kernel_estimate(small, y, 0.3, Kernel::normal(), false); },
                                           { -12.0, -3.0, 0.0, 3.0, 12.0 }, 1e-8);
  EXPECT_NEAR(total, 1.0, 1e-3);
  const auto big = normal_sample(2000, 8);
  const auto g = NormalMixture::normal(0.0, std::sqrt(2.0));
  for (double y : { 0.0, 0.8, 1.6 })
    EXPECT_NEAR(g_kernel_estimate(big, y, 0.3, Kernel::normal(), false), g.pdf(y), 0.02);
}
