#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bwlab {

//! A univariate sample X_1, ..., X_n of finite values.
class Sample
{
public:
  //! Throws InvalidArgument if empty or any value is not finite.
  explicit Sample(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  //! Number of unordered pairs n(n-1)/2.
  std::size_t pair_count() const { return size() * (size() - 1) / 2; }

  //! Sample with every value mapped by x -> scale * x + shift.
  Sample affine(double scale, double shift) const;

private:
  std::vector<double> values_;
};

//! Quantile with plotting position p(n+1), clamped to the sample range.
double quantile(std::span<const double> sorted, double p);

//! Sample standard deviation with divisor n - 1.
double sample_sd(const Sample& sample);

//! min(sd, IQR / 1.349); throws InvalidArgument for a sample without spread.
double estimate_sigma(const Sample& sample);

} // namespace bwlab
