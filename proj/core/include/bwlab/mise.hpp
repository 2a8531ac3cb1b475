#pragma once

#include "bwlab/kernels.hpp"
#include "bwlab/mixtures.hpp"
#include "bwlab/numeric.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bwlab {

//! q(h) = int A_K(v) g(hv) dv for a normal-mixture g. Closed form for the
//! normal kernel, adaptive quadrature otherwise.
double exact_q(const NormalMixture& g, Kernel kernel, SampleSize n, double h);

//! q(h) for an arbitrary density callable, by quadrature.
double exact_q(const std::function<double(double)>& g, Kernel kernel, SampleSize n, double h);

//! DNA(h) = MISE(h) - R(f) = (nh)^-1 R(K) + q(h).
double exact_dna(const DifferenceDensity& g, Kernel kernel, SampleSize n, double h);
double exact_dna(const NormalMixture& g, Kernel kernel, SampleSize n, double h);
double exact_dna(const std::function<double(double)>& g, Kernel kernel, SampleSize n, double h);

//! q for g = N(0, 2) and the normal kernel.
double q0_normal(double h, SampleSize n);

//! b_n (normal kernel) or c_n (Epanechnikov): h = constant * sigma / n^(1/5)
//! minimizes the exact MISE under normal f. n >= 3, or infinite for the
//! asymptotic constant. Results are memoized.
double reference_constant(Kernel kernel, SampleSize n);

//! Finite-sample normal reference bandwidth constant * sigma / n^(1/5).
double reference_bandwidth(Kernel kernel, SampleSize n, double sigma);

//! Closed-form Hermite DNA objective for the normal kernel: the expansion
//! with coefficients `alphas` = (alpha_0, ..., alpha_2m) substituted for g.
double hermite_dna(std::span<const double> alphas, double sigma, double h_H, SampleSize n, double h);

struct EvenDerivativesAtZero
{
  double g0 = 0.0;
  double g2 = 0.0;
  double g4 = 0.0;
  double g6 = 0.0;
};

EvenDerivativesAtZero even_derivatives_at_zero(const NormalMixture& g);

//! Small-h expansion of q(h) through the h^6 term.
double taylor_q(const EvenDerivativesAtZero& d, Kernel kernel, SampleSize n, double h);

//! {R(K) / (k2^2 r)}^(1/5) n^(-1/5); throws InvalidArgument if r <= 0.
double amise_optimal_h(Kernel kernel, double r_estimate, double n);

enum class SearchStrategy
{
  golden,
  grid_then_golden,
  first_local_minimum
};

struct DnaCurve
{
  std::function<double(double)> evaluate;
  Bracket bracket{ 0.0, 0.0 };
  std::string method;
  std::map<std::string, double> parameters;
};

struct DnaMinimum
{
  double h = 0.0;
  double value = 0.0;
  int expansions = 0;
  bool bracket_expanded = false;
  bool at_boundary = false;
  std::size_t evaluations = 0;
};

//! [h_ref / 8, 8 h_ref] around the finite-n normal reference bandwidth.
Bracket default_bracket(Kernel kernel, SampleSize n, double sigma);

//! Minimizes the curve; when the optimum sits on a bracket end, that end is
//! pushed out by a factor 2, at most 6 times.
DnaMinimum minimize_dna(const DnaCurve& curve,
                        SearchStrategy strategy = SearchStrategy::golden,
                        double rel_tol = 1e-6);

} // namespace bwlab
