#include "bwlab/sample.hpp"

#include "bwlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bwlab {

Sample::Sample(std::vector<double> values)
  : values_(std::move(values))
{
  if (values_.empty())
    throw InvalidArgument("Sample: no observations");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw InvalidArgument("Sample: non-finite value at index " + std::to_string(i));
  }
}

Sample Sample::affine(double scale, double shift) const
{
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [=](double x) {
    return scale * x + shift;
  });
  return Sample(std::move(out));
}

double quantile(std::span<const double> sorted, double p)
{
  const auto n = static_cast<double>(sorted.size());
  const double pos = std::clamp(p * (n + 1.0), 1.0, n); // 1-based
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lower);
  if (lower >= sorted.size())
    return sorted.back();
  return sorted[lower - 1] + frac * (sorted[lower] - sorted[lower - 1]);
}

double sample_sd(const Sample& sample)
{
  if (sample.size() < 2)
    throw InvalidArgument("sample_sd: need at least two observations");
  // anchored at the minimum so the result only sees differences
  const auto xs = sample.values();
  const double anchor = *std::min_element(xs.begin(), xs.end());
  CompensatedSum sum;
  for (double x : xs)
    sum.add(x - anchor);
  const double mean = sum.value() / static_cast<double>(sample.size());
  CompensatedSum ss;
  for (double x : xs)
    ss.add((x - anchor - mean) * (x - anchor - mean));
  return std::sqrt(ss.value() / static_cast<double>(sample.size() - 1));
}

double estimate_sigma(const Sample& sample)
{
  if (sample.size() < 2)
    throw InvalidArgument("estimate_sigma: need at least two observations");
  std::vector<double> sorted(sample.values().begin(), sample.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double anchor = sorted.front();
  for (double& x : sorted)
    x -= anchor;
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const double sd = sample_sd(sample);
  const double sigma = std::min(sd, iqr / 1.349);
  if (!(sigma > 0.0)) {
    // IQR can vanish with heavy ties while the sd is still positive
    if (sd > 0.0 && iqr == 0.0)
      return sd;
    throw InvalidArgument("estimate_sigma: degenerate sample (no spread)");
  }
  return sigma;
}

} // namespace bwlab
