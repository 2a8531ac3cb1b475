#pragma once

#include "bwlab/hermite.hpp"
#include "bwlab/kernels.hpp"
#include "bwlab/mise.hpp"
#include "bwlab/sample.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bwlab {

enum class Method
{
  ucv,
  ucv_classic,
  normal_reference,
  hermite,
  proposal1,
  proposal2,
  proposal3,
  t_tail,
  normal_start
};

//! CLI spelling: ucv, ucv-classic, nrr, hermite, p1, p2, p3, t-tail, normal-start.
std::string_view method_name(Method method);
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

enum class NuMethod
{
  kurtosis,
  median
};

std::string_view nu_method_name(NuMethod method);
NuMethod parse_nu_method(std::string_view name);

struct SelectorConfig
{
  Method method = Method::normal_reference;
  Kernel kernel = Kernel::normal();
  int m = 2;
  double h_H = 0.8;       ///< Hermite bandwidth (dimensionless)
  double h_H_tilde = 1.0; ///< pilot Hermite bandwidth for bias and S6 terms
  //! Normal-start pilot h~ = h_tilde_scale * sqrt(2) sigma_hat * n^(-1/5).
  double h_tilde_scale = 1.0;
  NuMethod nu_method = NuMethod::kurtosis;
  //! Proposal 1 with h_H = c_hat h^(5/7) instead of the fixed h_H.
  bool proposal1_coupled = false;
  std::size_t max_points = 4000;
  std::uint64_t seed = 0;
  double rel_tol = 1e-6;
};

//! Stable FNV-1a hash of the canonical config text, as 16 hex digits.
std::string config_hash(const SelectorConfig& config);
//! Canonical "key=value;..." text of the config.
std::string config_text(const SelectorConfig& config);

struct SelectionReport
{
  double h_hat = 0.0;
  Method method = Method::normal_reference;
  Kernel kernel = Kernel::normal();
  double sigma_hat = 0.0;
  std::map<std::string, double> pilots;
  std::vector<std::string> flags;
  std::string config_hash;
  std::uint64_t seed = 0;

  bool has_flag(std::string_view flag) const;
};

// ---------------------------------------------------------------------------
// objectives

//! R(K)/(nh) + {n(n-1)}^-1 sum_{i != j} h^-1 A_K(Y_ij / h).
double ucv_objective(const Sample& sample, Kernel kernel, double h);

//! Leave-one-out form: int fhat^2 - 2 n^-1 sum_i fhat_(i)(X_i).
double ucv_classic(const Sample& sample, Kernel kernel, double h);

//! Pair-average evaluator for the UCV objective that reuses sorted |Y_ij|.
class UcvObjective
{
public:
  UcvObjective(const Sample& sample, Kernel kernel);
  double operator()(double h) const;

private:
  std::vector<double> abs_diffs_;
  std::size_t n_;
  Kernel kernel_;
};

//! Normal-start objective R(K)/(nh) + (1 - 1/n) S(h) - 2 T(h), normal K and L.
double normal_start_objective(const Sample& sample, double sigma, double h_tilde, double h);

//! Pilot quantities feeding Proposals 1 and 3.
struct TaylorPilots
{
  double r_hat = 0.0;  ///< R_2m at h_H
  double b_hat = 0.0;  ///< b_2m at h~_H
  double s_hat = 0.0;  ///< g^(6)(0) estimate at h~_H
  double tau = 0.0;    ///< sqrt(2) sigma_hat
  double h_H = 0.0;
  int m = 2;
};

//! Bias-corrected roughness used by the h^4 term.
double corrected_roughness(const TaylorPilots& p);

//! (nh)^-1 R(K) + k2^2 h^4 R_c (1 - 1/n) / 4 + k2 k4 h^6 S (1 - 1/n) / 24.
double taylor_objective(Kernel kernel, SampleSize n, double r_corrected, double s_hat, double h);

//! c_hat of Proposal 2 for the given pilot R and (negative) b4.
double proposal2_c_hat(Kernel kernel, double r_pilot, double b4);

//! h_H = {6/sqrt(2 pi)}^(1/7) (-1/b4)^(1/7) n^(-1/7).
double proposal2_quick_h_H(double b4, double n);

//! Fixed point of h_H = quick * (1 + 5 h_H^2 + (15/8) h_H^4)^(1/7).
double proposal2_fixed_point_h_H(double b4, double n);

//! Floor applied to the Proposal 2 b4 estimate: 0.1 (2 pi)^(-1/2) 3! / h~_H^6.
double proposal2_b4_floor(double h_H_tilde);

//! Proposal 2 objective at h for a fixed c_hat.
double proposal2_objective(const Sample& sample, double sigma, double c_hat, double h, const AlphaOptions& options = {});

//! q(h) for the scaled t model of g with nu degrees of freedom and
//! Var(Y) = 2 sigma^2. `tail_bound` receives the truncation bound.
double t_q(double nu, double sigma, Kernel kernel, SampleSize n, double h, double* tail_bound = nullptr);

//! Kurtosis statistic: pair mean of Y^4 / (4 sigma^4).
double pair_kurtosis(const Sample& sample, double sigma);

//! nu from the kurtosis route; nullopt when lambda4 <= 3 or nu > 500.
std::optional<double> nu_from_kurtosis(double lambda4);

//! nu solving G_nu(sqrt(nu/(nu-2)) z0) = 3/4 on (4.01, 500]; nullopt if none.
std::optional<double> nu_from_median(double z0);

// ---------------------------------------------------------------------------
// selectors

SelectionReport select_ucv(const Sample& sample, Kernel kernel);
SelectionReport select_normal_reference(const Sample& sample, Kernel kernel, bool asymptotic = false);
SelectionReport select_hermite(const Sample& sample, int m, double h_H, const AlphaOptions& options = {});
//! Hermite rule with the coefficient estimates replaced by `alphas`.
SelectionReport select_hermite_with_alphas(const Sample& sample, std::span<const double> alphas, double h_H);
SelectionReport select_proposal1(const Sample& sample, Kernel kernel, double h_H, double h_H_tilde, bool coupled = false, const AlphaOptions& options = {});
SelectionReport select_proposal2(const Sample& sample, double h_H_pilot = 0.8, double h_H_tilde = 1.0, const AlphaOptions& options = {});
SelectionReport select_proposal3(const Sample& sample, Kernel kernel, double h_H, double h_H_tilde, const AlphaOptions& options = {});
SelectionReport select_t_tail(const Sample& sample, Kernel kernel, NuMethod nu_method);
SelectionReport select_normal_start(const Sample& sample, double h_tilde);

//! Dispatches on config.method and stamps the config hash and seed.
SelectionReport select(const Sample& sample, const SelectorConfig& config);

//! Smallest n accepted by a method.
std::size_t minimum_sample_size(Method method);

} // namespace bwlab
