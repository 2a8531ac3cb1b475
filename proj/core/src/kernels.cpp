#include "bwlab/kernels.hpp"

#include "bwlab/hermite.hpp"

#include <string>

namespace bwlab {

std::string_view Kernel::name() const
{
  return kind_ == KernelKind::normal ? "normal" : "epanechnikov";
}

KernelConstants Kernel::constants() const
{
  if (kind_ == KernelKind::normal)
    return { 1.0 / (2.0 * kSqrtPi), 1.0, 3.0, 15.0 };
  return { 6.0 / 5.0, 1.0 / 20.0, 3.0 / 560.0, 1.0 / 1344.0 };
}

double Kernel::support() const
{
  return kind_ == KernelKind::normal ? std::numeric_limits<double>::infinity() : 0.5;
}

Kernel parse_kernel(std::string_view name)
{
  if (name == "normal" || name == "gaussian")
    return Kernel::normal();
  if (name == "epanechnikov" || name == "epa")
    return Kernel::epanechnikov();
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

double kernel_eval(Kernel kernel, double u)
{
  if (kernel.kind() == KernelKind::normal)
    return normal_pdf(u);
  if (std::abs(u) >= 0.5)
    return 0.0;
  return 1.5 * (1.0 - 4.0 * u * u);
}

double kernel_derivative(Kernel kernel, int order, double u)
{
  if (order < 0)
    throw InvalidArgument("kernel_derivative: negative order");
  if (kernel.kind() == KernelKind::normal) {
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * normal_pdf(u) * hermite_poly(order, u);
  }
  if (order != 0)
    throw InvalidArgument("kernel_derivative: Epanechnikov kernel has no smooth derivatives");
  return kernel_eval(kernel, u);
}

double self_convolution(Kernel kernel, double y)
{
  if (kernel.kind() == KernelKind::normal)
    return 0.5 / kSqrtPi * std::exp(-0.25 * y * y);
  const double a = std::abs(y);
  if (a >= 1.0)
    return 0.0;
  const double a2 = a * a;
  return 1.2 * (1.0 - 5.0 * a2 + 5.0 * a2 * a - a2 * a2 * a);
}

double a_k(Kernel kernel, SampleSize n, double v)
{
  n.require_at_least(2, "a_k");
  return (1.0 - n.inverse()) * self_convolution(kernel, v) - 2.0 * kernel_eval(kernel, v);
}

double kde(const Sample& sample, Kernel kernel, double h, double x)
{
  if (!(h > 0.0))
    throw InvalidArgument("kde: bandwidth must be positive");
  CompensatedSum s;
  for (double xi : sample.values())
    s.add(kernel_eval(kernel, (xi - x) / h));
  return s.value() / (static_cast<double>(sample.size()) * h);
}

} // namespace bwlab
