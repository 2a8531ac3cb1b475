#pragma once

#include "bwlab/numeric.hpp"
#include "bwlab/random.hpp"
#include "bwlab/sample.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bwlab {

struct MixtureComponent
{
  double weight;
  double mean;
  double sd;
};

inline constexpr int kMaxMixtureDerivative = 12;

//! Finite normal mixture sum w_k N(mu_k, s_k^2).
class NormalMixture
{
public:
  //! Validates weights (nonnegative, summing to 1 within 1e-12 unless
  //! `renormalize`), finite means and positive sds.
  explicit NormalMixture(std::vector<MixtureComponent> components, bool renormalize = false);

  static NormalMixture normal(double mean = 0.0, double sd = 1.0);

  const std::vector<MixtureComponent>& components() const { return components_; }

  double pdf(double x) const;
  double cdf(double x) const;
  double derivative(int order, double x) const;

  double mean() const;
  double variance() const;
  //! E X^k, exact.
  double raw_moment(int k) const;
  //! E (X - EX)^k, exact.
  double central_moment(int k) const;

  bool is_symmetric_about_zero() const;

private:
  std::vector<MixtureComponent> components_;
};

//! Density of X_j - X_i for independent X_i, X_j ~ f, plus Var(X).
struct DifferenceDensity
{
  NormalMixture g;
  double sigma2;
};

DifferenceDensity difference_density(const NormalMixture& f);

//! Exact k-th derivative of the mixture pdf, k <= 12.
double mixture_pdf_derivative(const NormalMixture& m, int order, double x);

//! R(f^(k)) = (-1)^k g^(2k)(0), k in 0..3.
double roughness_true(const NormalMixture& f, int deriv_order);

//! (standardized 2j-th cumulant of g, 2^(1-j) x that of f), j >= 2.
std::pair<double, double> cumulant_ratio_check(const NormalMixture& f, int j);

//! Standardized k-th cumulant kappa_k / kappa_2^(k/2).
double standardized_cumulant(const NormalMixture& m, int k);

Sample sample_mixture(const NormalMixture& m, std::size_t n, Stream& stream);

//! Named presets: gaussian, bimodal, separated, skewed.
NormalMixture preset_mixture(std::string_view name);
std::vector<std::string> preset_names();

} // namespace bwlab
