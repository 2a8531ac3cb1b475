#include "bwlab/simulate.hpp"

#include "bwlab/roughness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace bwlab {

std::string_view roughness_kind_name(RoughnessKind kind)
{
  switch (kind) {
    case RoughnessKind::r2m:
      return "r2m";
    case RoughnessKind::r2m_diag:
      return "r2m-diag";
    case RoughnessKind::r2m_corrected:
      return "r2m-corrected";
    case RoughnessKind::normal_start:
      return "normal-start";
    case RoughnessKind::local_likelihood:
      return "local-lik";
  }
  return "?";
}

RoughnessKind parse_roughness_kind(std::string_view name)
{
  for (auto k : { RoughnessKind::r2m,
                  RoughnessKind::r2m_diag,
                  RoughnessKind::r2m_corrected,
                  RoughnessKind::normal_start,
                  RoughnessKind::local_likelihood }) {
    if (roughness_kind_name(k) == name)
      return k;
  }
  throw InvalidArgument("unknown roughness estimator '" + std::string(name) + "'");
}

std::string RoughnessEntry::label() const
{
  char buf[128];
  switch (kind) {
    case RoughnessKind::r2m:
    case RoughnessKind::r2m_diag:
      std::snprintf(buf, sizeof buf, "%s(m=%d,h_H=%g)", std::string(roughness_kind_name(kind)).c_str(), m, h_H);
      break;
    case RoughnessKind::r2m_corrected:
      std::snprintf(buf, sizeof buf, "r2m-corrected(h_H=%g,h_H_tilde=%g)", h_H, h_H_tilde);
      break;
    case RoughnessKind::normal_start:
      std::snprintf(buf, sizeof buf, "normal-start(h~=%g*sigma)", pilot_scale);
      break;
    case RoughnessKind::local_likelihood:
      std::snprintf(buf, sizeof buf, "local-lik(b=%g*sigma)", pilot_scale);
      break;
  }
  return buf;
}

double true_optimal_h(const NormalMixture& mixture, Kernel kernel, SampleSize n)
{
  n.require_at_least(2, "true_optimal_h");
  const auto g = difference_density(mixture).g;
  const double sigma = std::sqrt(mixture.variance());
  DnaCurve curve{ [&](double h) { return exact_dna(g, kernel, n, h); },
                  default_bracket(kernel, n.value() < 3 ? SampleSize(3) : n, sigma),
                  "exact",
                  {} };
  return minimize_dna(curve, SearchStrategy::grid_then_golden, 1e-9).h;
}

Summary summarize(const std::string& label, double truth, const std::vector<Replication>& reps)
{
  Summary s;
  s.label = label;
  s.truth = truth;
  std::vector<double> ok;
  std::vector<double> rel;
  CompensatedSum sum;
  CompensatedSum sq_err;
  for (const auto& r : reps) {
    if (std::find(r.flags.begin(), r.flags.end(), "fallback-used") != r.flags.end())
      ++s.fallbacks;
    if (!std::isfinite(r.value)) {
      ++s.failures;
      continue;
    }
    ok.push_back(r.value);
    sum.add(r.value);
    sq_err.add((r.value - truth) * (r.value - truth));
    rel.push_back(std::abs(r.value / truth - 1.0));
  }
  s.successes = ok.size();
  if (ok.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.median = s.mean = s.sd = s.q1 = s.q3 = s.bias = s.mse = s.median_abs_rel_error = nan;
    return s;
  }
  const double k = static_cast<double>(ok.size());
  s.mean = sum.value() / k;
  CompensatedSum dev;
  for (double v : ok)
    dev.add((v - s.mean) * (v - s.mean));
  s.sd = ok.size() > 1 ? std::sqrt(dev.value() / (k - 1.0)) : 0.0;
  s.bias = s.mean - truth;
  s.mse = sq_err.value() / k;
  std::sort(ok.begin(), ok.end());
  std::sort(rel.begin(), rel.end());
  s.median = quantile(ok, 0.5);
  s.q1 = quantile(ok, 0.25);
  s.q3 = quantile(ok, 0.75);
  s.median_abs_rel_error = quantile(rel, 0.5);
  return s;
}

namespace {

template<class Task>
void run_parallel(std::size_t reps, unsigned threads, Task task)
{
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r)
      task(r);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < reps; r = next++)
        task(r);
    });
  }
  for (auto& t : pool)
    t.join();
}

void validate(const SimConfig& config, bool contest)
{
  if (config.reps < 1)
    throw InvalidArgument("simulation: reps must be at least 1");
  if (config.n < 2)
    throw InvalidArgument("simulation: n must be at least 2");
  if (contest ? config.estimators.empty() : config.methods.empty())
    throw InvalidArgument(contest ? "contest: no estimators given" : "simulate: no methods given");
}

//! Runs `count` labelled evaluations per replication and collects them.
template<class Eval>
std::vector<std::vector<Replication>> collect(const SimConfig& config, std::size_t count, Eval eval)
{
  std::vector<std::vector<Replication>> per_rep(config.reps);
  run_parallel(config.reps, config.threads, [&](std::size_t rep) {
    Stream stream = Stream::derive(config.master_seed, rep);
    const Sample sample = sample_mixture(config.mixture, config.n, stream);
    const std::uint64_t sub_seed = stream.next_u64();
    auto& out = per_rep[rep];
    out.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      out[k].rep = rep;
      try {
        eval(k, sample, sub_seed, out[k]);
      } catch (const std::exception& e) {
        out[k].value = std::numeric_limits<double>::quiet_NaN();
        out[k].error = e.what();
      }
    }
  });
  return per_rep;
}

SimResult assemble(const SimConfig& config,
                   const std::vector<std::vector<Replication>>& per_rep,
                   const std::vector<std::string>& labels,
                   const std::vector<double>& truths)
{
  SimResult result;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    std::vector<Replication> column;
    column.reserve(per_rep.size());
    for (const auto& row : per_rep) {
      column.push_back(row[k]);
      column.back().label = labels[k];
    }
    result.summaries.push_back(summarize(labels[k], truths[k], column));
  }
  if (config.keep_replications) {
    for (const auto& row : per_rep) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        result.replications.push_back(row[k]);
        result.replications.back().label = labels[k];
      }
    }
  }
  return result;
}

} // namespace

SimResult run_selector_comparison(const SimConfig& config)
{
  validate(config, false);
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> labels;
  std::vector<double> truths;
  for (const auto& m : config.methods) {
    std::string label(method_name(m.method));
    char buf[96] = "";
    switch (m.method) {
      case Method::hermite:
        std::snprintf(buf, sizeof buf, "(m=%d,h_H=%g)", m.m, m.h_H);
        break;
      case Method::proposal1:
      case Method::proposal3:
        std::snprintf(buf, sizeof buf, "(h_H=%g,h_H_tilde=%g)", m.h_H, m.h_H_tilde);
        break;
      case Method::proposal2:
        std::snprintf(buf, sizeof buf, "(h_H=%g)", m.h_H);
        break;
      case Method::normal_start:
        std::snprintf(buf, sizeof buf, "(h~=%g)", m.h_tilde_scale);
        break;
      case Method::t_tail:
        std::snprintf(buf, sizeof buf, "(%s)", std::string(nu_method_name(m.nu_method)).c_str());
        break;
      default:
        break;
    }
    label += buf;
    label += "/" + std::string(m.kernel.name());
    labels.push_back(label);
    truths.push_back(true_optimal_h(config.mixture, m.kernel, SampleSize(config.n)));
  }
  const auto per_rep = collect(config, config.methods.size(), [&](std::size_t k, const Sample& sample, std::uint64_t seed, Replication& out) {
    SelectorConfig cfg = config.methods[k];
    cfg.seed = seed;
    const auto report = select(sample, cfg);
    out.value = report.h_hat;
    out.flags = report.flags;
  });
  auto result = assemble(config, per_rep, labels, truths);
  result.runtime_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SimResult run_roughness_contest(const SimConfig& config)
{
  validate(config, true);
  const auto start = std::chrono::steady_clock::now();
  const double truth = roughness_true(config.mixture, 2);
  std::vector<std::string> labels;
  for (const auto& e : config.estimators)
    labels.push_back(e.label());
  const std::vector<double> truths(labels.size(), truth);

  const auto per_rep = collect(config, config.estimators.size(), [&](std::size_t k, const Sample& sample, std::uint64_t seed, Replication& out) {
    const auto& e = config.estimators[k];
    const AlphaOptions options{ 4000, seed };
    const double sigma = estimate_sigma(sample);
    switch (e.kind) {
      case RoughnessKind::r2m: {
        const auto r = r2m_hat(sample, sigma, e.h_H, e.m, options);
        out.value = r.value;
        out.flags = r.flags;
        break;
      }
      case RoughnessKind::r2m_diag: {
        const auto r = r2m_diag(sample, sigma, e.h_H, e.m, options);
        out.value = r.value;
        out.flags = r.flags;
        break;
      }
      case RoughnessKind::r2m_corrected: {
        TaylorPilots p;
        p.m = 2;
        p.tau = std::numbers::sqrt2 * sigma;
        p.h_H = e.h_H;
        p.r_hat = r2m_hat(sample, sigma, e.h_H, 2, options).value;
        p.b_hat = bias_coefficient_hat(sample, sigma, 2, e.h_H_tilde, options);
        out.value = corrected_roughness(p);
        break;
      }
      case RoughnessKind::normal_start: {
        const auto r = r_normal_start(sample, sigma, e.pilot_scale * sigma, Kernel::normal());
        out.value = r.value;
        out.flags = r.flags;
        break;
      }
      case RoughnessKind::local_likelihood: {
        const auto r = r_local_likelihood(sample, e.pilot_scale * sigma, Kernel::epanechnikov());
        out.value = r.value;
        out.flags = r.flags;
        break;
      }
    }
  });
  auto result = assemble(config, per_rep, labels, truths);
  result.runtime_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

} // namespace bwlab
