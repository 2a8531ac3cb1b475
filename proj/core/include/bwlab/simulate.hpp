#pragma once

#include "bwlab/kernels.hpp"
#include "bwlab/mixtures.hpp"
#include "bwlab/selectors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bwlab {

enum class RoughnessKind
{
  r2m,
  r2m_diag,
  r2m_corrected, ///< R_4 minus its estimated leading bias
  normal_start,
  local_likelihood
};

std::string_view roughness_kind_name(RoughnessKind kind);
RoughnessKind parse_roughness_kind(std::string_view name);

struct RoughnessEntry
{
  RoughnessKind kind = RoughnessKind::r2m;
  int m = 2;
  double h_H = 0.8;
  double h_H_tilde = 1.0;
  //! Normal-start h~ and local-likelihood window, in units of sigma_hat.
  double pilot_scale = 0.5;

  std::string label() const;
};

struct SimConfig
{
  NormalMixture mixture = NormalMixture::normal();
  std::size_t n = 100;
  std::size_t reps = 100;
  std::uint64_t master_seed = 1;
  std::vector<SelectorConfig> methods;
  std::vector<RoughnessEntry> estimators;
  unsigned threads = 1;
  //! Keep per-replication values in the result.
  bool keep_replications = true;
};

struct Summary
{
  std::string label;
  double truth = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::size_t fallbacks = 0;
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  //! median |value / truth - 1|
  double median_abs_rel_error = 0.0;
};

struct Replication
{
  std::size_t rep = 0;
  std::string label;
  double value = 0.0; ///< NaN when the method failed
  std::vector<std::string> flags;
  std::string error;
};

struct SimResult
{
  std::vector<Summary> summaries;
  std::vector<Replication> replications; ///< rep-major, method order within a rep
  double runtime_seconds = 0.0;
};

//! Minimizer of the exact DNA for the closed-form difference mixture.
double true_optimal_h(const NormalMixture& mixture, Kernel kernel, SampleSize n);

//! Summary of successful values against `truth`; `fallbacks` counts the
//! replications whose flags contain "fallback-used".
Summary summarize(const std::string& label, double truth, const std::vector<Replication>& reps);

SimResult run_selector_comparison(const SimConfig& config);
SimResult run_roughness_contest(const SimConfig& config);

} // namespace bwlab
