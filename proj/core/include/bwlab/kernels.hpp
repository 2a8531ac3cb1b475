#pragma once

#include "bwlab/numeric.hpp"
#include "bwlab/sample.hpp"

#include <string_view>

namespace bwlab {

enum class KernelKind
{
  normal,
  epanechnikov
};

struct KernelConstants
{
  double r_k; ///< R(K) = int K^2
  double k2;  ///< int u^2 K
  double k4;
  double k6;
};

//! Symmetric probability kernel. The Epanechnikov kernel lives on
//! |u| <= 1/2 as K(u) = 1.5 (1 - 4u^2).
class Kernel
{
public:
  constexpr Kernel(KernelKind kind = KernelKind::normal) // NOLINT(google-explicit-constructor)
    : kind_(kind)
  {}

  static constexpr Kernel normal() { return Kernel(KernelKind::normal); }
  static constexpr Kernel epanechnikov() { return Kernel(KernelKind::epanechnikov); }

  constexpr KernelKind kind() const { return kind_; }
  std::string_view name() const;
  KernelConstants constants() const;

  //! Half-width of the support; infinity for the normal kernel.
  double support() const;

  friend constexpr bool operator==(Kernel a, Kernel b) { return a.kind_ == b.kind_; }

private:
  KernelKind kind_;
};

//! Parses "normal" or "epanechnikov" (also "epa"); throws InvalidArgument.
Kernel parse_kernel(std::string_view name);

double kernel_eval(Kernel kernel, double u);

//! k-th derivative of K. Any order for the normal kernel; the Epanechnikov
//! kernel only supports order 0 and throws otherwise.
double kernel_derivative(Kernel kernel, int order, double u);

//! g_K(y) = int K(u) K(u + y) du.
double self_convolution(Kernel kernel, double y);

//! A_K(v) = (1 - 1/n) g_K(v) - 2 K(v); requires n >= 2.
double a_k(Kernel kernel, SampleSize n, double v);

//! Plain kernel estimate n^-1 sum K_h(X_i - x).
double kde(const Sample& sample, Kernel kernel, double h, double x);

} // namespace bwlab
