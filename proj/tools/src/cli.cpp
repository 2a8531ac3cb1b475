#include "cli.hpp"

#include "io.hpp"

#include "bwlab/mise.hpp"
#include "bwlab/roughness.hpp"
#include "bwlab/selectors.hpp"
#include "bwlab/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

namespace bwlab::cli {

namespace {

using Cell = std::variant<std::string, double, long long>;

struct Table
{
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  //! Fixed decimals per column in table mode; -1 means %.10g.
  std::vector<int> decimals;
};

struct Document
{
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Table> tables;
};

std::string join(const std::vector<std::string>& parts, const char* sep)
{
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i)
      s += sep;
    s += parts[i];
  }
  return s;
}

std::string human(const Cell& c, int decimals)
{
  if (auto s = std::get_if<std::string>(&c))
    return *s;
  if (auto i = std::get_if<long long>(&c))
    return std::to_string(*i);
  const double x = std::get<double>(c);
  char buf[40];
  if (decimals >= 0)
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  else
    std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string exact(const Cell& c)
{
  if (auto s = std::get_if<std::string>(&c))
    return *s;
  if (auto i = std::get_if<long long>(&c))
    return std::to_string(*i);
  return fmt(std::get<double>(c));
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"')
      q += '"';
    q += ch;
  }
  return q + "\"";
}

void emit(const Document& doc, const std::string& format, std::ostream& os)
{
  if (format == "json") {
    nlohmann::ordered_json j;
    j["command"] = doc.command;
    auto& cfg = j["config"];
    cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : doc.config)
      cfg[k] = v;
    auto& tables = j["tables"];
    tables = nlohmann::ordered_json::object();
    for (const auto& t : doc.tables) {
      auto rows = nlohmann::ordered_json::array();
      for (const auto& r : t.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < t.columns.size(); ++k) {
          const auto& c = r[k];
          if (auto s = std::get_if<std::string>(&c))
            row[t.columns[k]] = *s;
          else if (auto i = std::get_if<long long>(&c))
            row[t.columns[k]] = *i;
          else if (std::isfinite(std::get<double>(c)))
            row[t.columns[k]] = std::get<double>(c);
          else
            row[t.columns[k]] = nullptr;
        }
        rows.push_back(std::move(row));
      }
      tables[t.name] = std::move(rows);
    }
    os << j.dump(2) << '\n';
    return;
  }

  if (format == "csv") {
    os << "# bwlab " << doc.command << '\n';
    for (const auto& [k, v] : doc.config)
      os << "# " << k << '=' << v << '\n';
    for (const auto& t : doc.tables) {
      if (doc.tables.size() > 1)
        os << "# table=" << t.name << '\n';
      std::vector<std::string> head;
      for (const auto& c : t.columns)
        head.push_back(csv_field(c));
      os << join(head, ",") << '\n';
      for (const auto& r : t.rows) {
        std::vector<std::string> cells;
        for (const auto& c : r)
          cells.push_back(csv_field(exact(c)));
        os << join(cells, ",") << '\n';
      }
    }
    return;
  }

  // human table
  os << "# bwlab " << doc.command << '\n';
  std::size_t key_width = 0;
  for (const auto& [k, v] : doc.config)
    key_width = std::max(key_width, k.size());
  for (const auto& [k, v] : doc.config)
    os << "# " << k << std::string(key_width - k.size(), ' ') << " : " << v << '\n';
  for (const auto& t : doc.tables) {
    os << '\n';
    std::vector<std::vector<std::string>> text;
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t k = 0; k < t.columns.size(); ++k)
      width[k] = t.columns[k].size();
    for (const auto& r : t.rows) {
      std::vector<std::string> line;
      for (std::size_t k = 0; k < r.size(); ++k) {
        line.push_back(human(r[k], k < t.decimals.size() ? t.decimals[k] : -1));
        width[k] = std::max(width[k], line.back().size());
      }
      text.push_back(std::move(line));
    }
    auto put = [&](const std::vector<std::string>& line) {
      std::string s;
      for (std::size_t k = 0; k < line.size(); ++k) {
        if (k)
          s += "  ";
        s += line[k] + std::string(width[k] - line[k].size(), ' ');
      }
      while (!s.empty() && s.back() == ' ')
        s.pop_back();
      os << s << '\n';
    };
    put(t.columns);
    for (const auto& line : text)
      put(line);
  }
}

// ---------------------------------------------------------------------------
// shared options

struct Common
{
  std::string format = "table";
  std::string output;
  std::optional<std::uint64_t> seed;
};

struct DataOptions
{
  std::string input;
  std::optional<std::string> column;
};

struct MixtureOptions
{
  std::string mixture_file;
  std::string preset;
  bool renormalize = false;
};

struct PilotOptions
{
  std::string kernel = "normal";
  int m = 2;
  double h_H = 0.8;
  double h_H_tilde = 1.0;
  double h_tilde_scale = 1.0;
  std::string nu_method = "kurtosis";
  bool p1_coupled = false;
  std::size_t max_points = 4000;
};

void add_common(CLI::App* sub, Common& c)
{
  sub->add_option("--format", c.format, "table, csv or json")->check(CLI::IsMember({ "table", "csv", "json" }));
  sub->add_option("-o,--output", c.output, "write the report to this file");
  sub->add_option("--seed", c.seed, "master seed (default: $BWLAB_SEED, else 1)");
}

void add_data(CLI::App* sub, DataOptions& d)
{
  sub->add_option("input,-i,--input", d.input, "data file: one value per line, or CSV with --col")->required();
  sub->add_option("--col", d.column, "CSV column by header name or 1-based index");
}

void add_mixture(CLI::App* sub, MixtureOptions& m)
{
  sub->add_option("--mixture", m.mixture_file, "mixture spec file (JSON: weights, means, sds)");
  sub->add_option("--preset", m.preset, "built-in mixture: gaussian, bimodal, separated, skewed");
  sub->add_flag("--renormalize", m.renormalize, "rescale mixture weights to sum to one");
}

void add_pilots(CLI::App* sub, PilotOptions& p)
{
  sub->add_option("--kernel", p.kernel, "normal or epanechnikov");
  sub->add_option("--m", p.m, "expansion order");
  sub->add_option("--h-H", p.h_H, "Hermite bandwidth");
  sub->add_option("--h-H-tilde", p.h_H_tilde, "pilot Hermite bandwidth");
  sub->add_option("--h-tilde-scale", p.h_tilde_scale, "normal-start pilot, in units of sqrt(2) sigma n^(-1/5)");
  sub->add_option("--nu-method", p.nu_method, "t-tail route: kurtosis or median");
  sub->add_flag("--p1-coupled", p.p1_coupled, "Proposal 1 with h_H tied to h");
  sub->add_option("--max-points", p.max_points, "subsample size cap for pair sweeps");
}

std::uint64_t resolve_seed(const Common& c)
{
  if (c.seed)
    return *c.seed;
  if (const char* env = std::getenv("BWLAB_SEED")) {
    const auto v = parse_double(env);
    if (!v || *v < 0.0 || std::floor(*v) != *v || *v > 1.8e19)
      throw InvalidArgument(std::string("BWLAB_SEED is not a nonnegative integer: '") + env + "'");
    return static_cast<std::uint64_t>(std::stoull(env));
  }
  return 1;
}

NormalMixture resolve_mixture(const MixtureOptions& m, std::string& label)
{
  if (!m.mixture_file.empty() && !m.preset.empty())
    throw InvalidArgument("give either --mixture or --preset, not both");
  if (!m.mixture_file.empty()) {
    label = m.mixture_file;
    return read_mixture_file(m.mixture_file, m.renormalize);
  }
  if (!m.preset.empty()) {
    label = "preset:" + m.preset;
    return preset_mixture(m.preset);
  }
  throw InvalidArgument("missing --mixture FILE or --preset NAME");
}

std::string describe_mixture(const NormalMixture& f)
{
  std::vector<std::string> parts;
  for (const auto& c : f.components())
    parts.push_back(fmt(c.weight) + "*N(" + fmt(c.mean) + "," + fmt(c.sd) + "^2)");
  return join(parts, " + ");
}

SelectorConfig selector_config(const std::string& method, const PilotOptions& p, std::uint64_t seed)
{
  SelectorConfig c;
  c.method = parse_method(method);
  c.kernel = parse_kernel(p.kernel);
  c.m = p.m;
  c.h_H = p.h_H;
  c.h_H_tilde = p.h_H_tilde;
  c.h_tilde_scale = p.h_tilde_scale;
  c.nu_method = parse_nu_method(p.nu_method);
  c.proposal1_coupled = p.p1_coupled;
  c.max_points = p.max_points;
  c.seed = seed;
  if (!(c.h_H > 0.0 && c.h_H <= 1.5) || !(c.h_H_tilde > 0.0 && c.h_H_tilde <= 1.5))
    throw InvalidArgument("Hermite bandwidths must lie in (0, 1.5]");
  if (!(c.h_tilde_scale > 0.0))
    throw InvalidArgument("--h-tilde-scale must be positive");
  if (c.m < 1 || c.m > 4)
    throw InvalidArgument("--m must lie in 1..4");
  return c;
}

void pilot_config(Document& doc, const PilotOptions& p)
{
  doc.config.push_back({ "kernel", p.kernel });
  doc.config.push_back({ "m", std::to_string(p.m) });
  doc.config.push_back({ "h_H", fmt(p.h_H) });
  doc.config.push_back({ "h_H_tilde", fmt(p.h_H_tilde) });
  doc.config.push_back({ "h_tilde_scale", fmt(p.h_tilde_scale) });
  doc.config.push_back({ "nu_method", p.nu_method });
  doc.config.push_back({ "p1_coupled", p.p1_coupled ? "true" : "false" });
  doc.config.push_back({ "max_points", std::to_string(p.max_points) });
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty())
      throw InvalidArgument("empty entry in list '" + s + "'");
    out.push_back(item);
  }
  if (out.empty())
    throw InvalidArgument("empty list");
  return out;
}

void write(const Document& doc, const Common& c, std::ostream& out)
{
  if (c.output.empty()) {
    emit(doc, c.format, out);
    return;
  }
  std::ofstream f(c.output);
  if (!f)
    throw InvalidArgument("cannot write output file '" + c.output + "'");
  emit(doc, c.format, f);
}

// ---------------------------------------------------------------------------
// commands

Document cmd_select(const DataOptions& d, const std::string& method, const PilotOptions& p, std::uint64_t seed)
{
  const Sample sample(read_values_file(d.input, d.column));
  const auto cfg = selector_config(method, p, seed);
  const auto report = select(sample, cfg);

  Document doc;
  doc.command = "select";
  doc.config.push_back({ "input", d.input });
  doc.config.push_back({ "col", d.column.value_or("-") });
  doc.config.push_back({ "n", std::to_string(sample.size()) });
  doc.config.push_back({ "method", std::string(method_name(cfg.method)) });
  pilot_config(doc, p);
  doc.config.push_back({ "seed", std::to_string(seed) });
  doc.config.push_back({ "config_hash", report.config_hash });

  Table t{ "report", { "key", "value" }, {}, {} };
  t.rows.push_back({ std::string("h_hat"), report.h_hat });
  t.rows.push_back({ std::string("sigma_hat"), report.sigma_hat });
  t.rows.push_back({ std::string("method"), std::string(method_name(report.method)) });
  t.rows.push_back({ std::string("kernel"), std::string(report.kernel.name()) });
  t.rows.push_back({ std::string("flags"), report.flags.empty() ? std::string("-") : join(report.flags, ";") });
  for (const auto& [k, v] : report.pilots)
    t.rows.push_back({ "pilot." + k, v });
  doc.tables.push_back(std::move(t));
  return doc;
}

struct EstimateOptions
{
  std::string estimator = "r2m";
  std::optional<double> sigma;
  double pilot_scale = 0.5;
};

Document cmd_estimate(const DataOptions& d, const EstimateOptions& e, const PilotOptions& p, std::uint64_t seed)
{
  const Sample sample(read_values_file(d.input, d.column));
  const double sigma = e.sigma ? *e.sigma : estimate_sigma(sample);
  if (!(sigma > 0.0))
    throw InvalidArgument("--sigma must be positive");
  if (!(p.h_H > 0.0 && p.h_H <= 1.5) || !(p.h_H_tilde > 0.0 && p.h_H_tilde <= 1.5))
    throw InvalidArgument("Hermite bandwidths must lie in (0, 1.5]");
  if (p.m < 0 || p.m > 12)
    throw InvalidArgument("--m must lie in 0..12");
  const AlphaOptions options{ p.max_points, seed };

  Document doc;
  doc.command = "estimate";
  doc.config.push_back({ "input", d.input });
  doc.config.push_back({ "col", d.column.value_or("-") });
  doc.config.push_back({ "n", std::to_string(sample.size()) });
  doc.config.push_back({ "estimator", e.estimator });
  doc.config.push_back({ "sigma", fmt(sigma) + (e.sigma ? "" : " (estimated)") });
  doc.config.push_back({ "m", std::to_string(p.m) });
  doc.config.push_back({ "h_H", fmt(p.h_H) });
  doc.config.push_back({ "h_H_tilde", fmt(p.h_H_tilde) });
  doc.config.push_back({ "pilot_scale", fmt(e.pilot_scale) });
  doc.config.push_back({ "max_points", std::to_string(p.max_points) });
  doc.config.push_back({ "seed", std::to_string(seed) });

  Table t{ "estimate", { "key", "value" }, {}, {} };
  auto add_report = [&](const RoughnessEstimate& r) {
    t.rows.push_back({ std::string("value"), r.value });
    t.rows.push_back({ std::string("estimator"), r.estimator });
    t.rows.push_back({ std::string("n_pairs"), static_cast<long long>(r.n_pairs) });
    t.rows.push_back({ std::string("flags"), r.flags.empty() ? std::string("-") : join(r.flags, ";") });
    for (const auto& [k, v] : r.pilots)
      t.rows.push_back({ "pilot." + k, v });
  };

  const std::string& name = e.estimator;
  if (name == "r2m") {
    add_report(r2m_hat(sample, sigma, p.h_H, p.m, options));
  } else if (name == "r2m-diag") {
    add_report(r2m_diag(sample, sigma, p.h_H, p.m, options));
  } else if (name == "normal-start") {
    add_report(r_normal_start(sample, sigma, e.pilot_scale * sigma, Kernel::normal()));
  } else if (name == "local-lik") {
    add_report(r_local_likelihood(sample, e.pilot_scale * sigma, Kernel::epanechnikov()));
  } else if (name == "bias") {
    t.rows.push_back({ std::string("value"), bias_coefficient_hat(sample, sigma, p.m, p.h_H_tilde, options) });
    t.rows.push_back({ std::string("estimator"), std::string("b_2m") });
  } else if (name == "s6") {
    t.rows.push_back({ std::string("value"), s6_hat(sample, sigma, p.h_H_tilde, options) });
    t.rows.push_back({ std::string("estimator"), std::string("s6") });
  } else if (name == "s8") {
    t.rows.push_back({ std::string("value"), s8_hat(sample, sigma, p.h_H_tilde, options) });
    t.rows.push_back({ std::string("estimator"), std::string("s8") });
  } else if (name == "alphas") {
    const auto a = estimate_alphas(sample, sigma, p.h_H, p.m, options);
    for (std::size_t j = 0; j < a.alphas.size(); ++j)
      t.rows.push_back({ "alpha_" + std::to_string(2 * j), a.alphas[j] });
    t.rows.push_back({ std::string("points_used"), static_cast<long long>(a.points_used) });
  } else {
    throw InvalidArgument("unknown estimator '" + name +
                          "' (r2m, r2m-diag, normal-start, local-lik, bias, s6, s8, alphas)");
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

const std::vector<std::string> kTable1Sizes{ "3",  "4",  "5",  "6",  "7",  "8",  "9",  "10",
                                             "11", "12", "13", "14", "15", "16", "17", "18",
                                             "19", "20", "50", "100", "1000", "inf" };

Document cmd_table1(const std::string& list)
{
  const auto items = list.empty() ? kTable1Sizes : split_list(list);
  Document doc;
  doc.command = "table1";
  doc.config.push_back({ "n", join(items, ",") });
  Table t{ "table1", { "n", "b_n", "c_n" }, {}, { -1, 4, 4 } };
  for (const auto& item : items) {
    SampleSize n = SampleSize::infinite();
    if (item != "inf") {
      const auto v = parse_double(item);
      if (!v || *v < 3.0 || std::floor(*v) != *v)
        throw InvalidArgument("table1: sample sizes must be integers >= 3 or 'inf', got '" + item + "'");
      n = SampleSize(static_cast<std::size_t>(*v));
    }
    t.rows.push_back({ item, reference_constant(Kernel::normal(), n), reference_constant(Kernel::epanechnikov(), n) });
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

struct CurveOptions
{
  std::size_t n = 100;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::size_t points = 41;
  std::string h_list;
};

Document cmd_mise_curve(const MixtureOptions& mo, const std::string& kernel_name, const CurveOptions& c)
{
  std::string label;
  const NormalMixture f = resolve_mixture(mo, label);
  const Kernel kernel = parse_kernel(kernel_name);
  if (c.n < 2)
    throw InvalidArgument("mise-curve: --n must be at least 2");
  const SampleSize n(c.n);
  std::vector<double> grid;
  if (!c.h_list.empty()) {
    for (const auto& item : split_list(c.h_list)) {
      const auto v = parse_double(item);
      if (!v || !(*v > 0.0))
        throw InvalidArgument("mise-curve: bad bandwidth '" + item + "'");
      grid.push_back(*v);
    }
    for (std::size_t k = 1; k < grid.size(); ++k)
      if (!(grid[k] > grid[k - 1]))
        throw InvalidArgument("mise-curve: --bandwidths must increase");
  } else {
    const double sigma = std::sqrt(f.variance());
    const double h_ref = reference_bandwidth(kernel, SampleSize(std::max<std::size_t>(c.n, 3)), sigma);
    const double lo = c.h_min.value_or(h_ref / 4.0);
    const double hi = c.h_max.value_or(h_ref * 4.0);
    if (!(lo > 0.0) || !(hi > lo) || c.points < 2)
      throw InvalidArgument("mise-curve: need 0 < h-min < h-max and at least 2 points");
    for (std::size_t k = 0; k < c.points; ++k)
      grid.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(c.points - 1)));
  }

  const auto g = difference_density(f).g;
  const double r_f = roughness_true(f, 0);
  Document doc;
  doc.command = "mise-curve";
  doc.config.push_back({ "mixture", label });
  doc.config.push_back({ "components", describe_mixture(f) });
  doc.config.push_back({ "kernel", std::string(kernel.name()) });
  doc.config.push_back({ "n", std::to_string(c.n) });
  doc.config.push_back({ "R(f)", fmt(r_f) });
  doc.config.push_back({ "grid", c.h_list.empty() ? "log " + fmt(grid.front()) + ".." + fmt(grid.back()) + " x" + std::to_string(grid.size()) : "explicit" });
  Table t{ "curve", { "h", "dna", "mise" }, {}, {} };
  for (double h : grid) {
    const double dna = exact_dna(g, kernel, n, h);
    t.rows.push_back({ h, dna, dna + r_f });
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

struct SimOptions
{
  std::size_t n = 100;
  std::size_t reps = 100;
  std::string methods = "nrr,ucv,hermite";
  std::string estimators = "r2m,r2m-diag";
  double pilot_scale = 0.5;
  unsigned threads = 1;
  std::string dump;
};

void write_dump(const SimResult& r, const std::string& path)
{
  std::ofstream f(path);
  if (!f)
    throw InvalidArgument("cannot write dump file '" + path + "'");
  f << "rep,label,value,flags,error\n";
  for (const auto& rep : r.replications) {
    f << rep.rep << ',' << csv_field(rep.label) << ',' << fmt(rep.value) << ','
      << csv_field(rep.flags.empty() ? "-" : join(rep.flags, ";")) << ',' << csv_field(rep.error.empty() ? "-" : rep.error) << '\n';
  }
}

Table summary_table(const SimResult& r)
{
  Table t{ "summary",
           { "label", "truth", "ok", "failed", "fallbacks", "median", "mean", "sd", "q1", "q3", "bias", "mse",
             "median_ratio", "median_abs_rel_err" },
           {},
           {} };
  for (const auto& s : r.summaries) {
    t.rows.push_back({ s.label, s.truth, static_cast<long long>(s.successes), static_cast<long long>(s.failures),
                       static_cast<long long>(s.fallbacks), s.median, s.mean, s.sd, s.q1, s.q3, s.bias, s.mse,
                       s.median / s.truth, s.median_abs_rel_error });
  }
  return t;
}

Document cmd_simulate(const MixtureOptions& mo, const PilotOptions& p, const SimOptions& so, std::uint64_t seed,
                      bool contest, bool& all_failed)
{
  std::string label;
  SimConfig cfg;
  cfg.mixture = resolve_mixture(mo, label);
  cfg.n = so.n;
  cfg.reps = so.reps;
  cfg.master_seed = seed;
  cfg.threads = std::max(1u, so.threads);
  cfg.keep_replications = !so.dump.empty();

  Document doc;
  doc.command = contest ? "contest" : "simulate";
  doc.config.push_back({ "mixture", label });
  doc.config.push_back({ "components", describe_mixture(cfg.mixture) });
  doc.config.push_back({ "n", std::to_string(so.n) });
  doc.config.push_back({ "reps", std::to_string(so.reps) });
  doc.config.push_back({ "seed", std::to_string(seed) });

  if (contest) {
    for (const auto& name : split_list(so.estimators)) {
      RoughnessEntry e;
      e.kind = parse_roughness_kind(name);
      e.m = p.m;
      e.h_H = p.h_H;
      e.h_H_tilde = p.h_H_tilde;
      e.pilot_scale = so.pilot_scale;
      cfg.estimators.push_back(e);
    }
    doc.config.push_back({ "estimators", so.estimators });
    doc.config.push_back({ "m", std::to_string(p.m) });
    doc.config.push_back({ "h_H", fmt(p.h_H) });
    doc.config.push_back({ "h_H_tilde", fmt(p.h_H_tilde) });
    doc.config.push_back({ "pilot_scale", fmt(so.pilot_scale) });
    doc.config.push_back({ "truth", "R(f'') = " + fmt(roughness_true(cfg.mixture, 2)) });
  } else {
    for (const auto& name : split_list(so.methods))
      cfg.methods.push_back(selector_config(name, p, seed));
    doc.config.push_back({ "methods", so.methods });
    pilot_config(doc, p);
    doc.config.push_back({ "truth", "exact MISE minimizer h_n" });
  }
  doc.config.push_back({ "dump", so.dump.empty() ? "-" : so.dump });

  const SimResult result = contest ? run_roughness_contest(cfg) : run_selector_comparison(cfg);
  all_failed = std::any_of(result.summaries.begin(), result.summaries.end(),
                           [](const Summary& s) { return s.successes == 0; });
  if (!so.dump.empty())
    write_dump(result, so.dump);
  doc.tables.push_back(summary_table(result));
  return doc;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "bwlab: kernel density bandwidth selection laboratory", "bwlab" };
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  DataOptions data;
  MixtureOptions mixture;
  PilotOptions pilots;
  EstimateOptions est;
  CurveOptions curve;
  SimOptions sim;
  std::string method = "nrr";
  std::string n_list;

  auto* s_select = app.add_subcommand("select", "select a bandwidth for a data file");
  add_common(s_select, common);
  add_data(s_select, data);
  add_pilots(s_select, pilots);
  s_select->add_option("--method", method, "ucv, ucv-classic, nrr, hermite, p1, p2, p3, t-tail, normal-start");

  auto* s_est = app.add_subcommand("estimate", "estimate R(f'') and related pilot quantities");
  add_common(s_est, common);
  add_data(s_est, data);
  s_est->add_option("--estimator", est.estimator, "r2m, r2m-diag, normal-start, local-lik, bias, s6, s8, alphas");
  s_est->add_option("--sigma", est.sigma, "scale sigma (default: estimated)");
  s_est->add_option("--m", pilots.m, "expansion order");
  s_est->add_option("--h-H", pilots.h_H, "Hermite bandwidth");
  s_est->add_option("--h-H-tilde", pilots.h_H_tilde, "pilot Hermite bandwidth");
  s_est->add_option("--pilot-scale", est.pilot_scale, "normal-start h~ or local-likelihood window, in sigma units");
  s_est->add_option("--max-points", pilots.max_points, "subsample size cap for pair sweeps");

  auto* s_table = app.add_subcommand("table1", "finite-sample normal reference constants b_n and c_n");
  add_common(s_table, common);
  s_table->add_option("--n", n_list, "comma-separated sample sizes (>= 3) or inf");

  auto* s_curve = app.add_subcommand("mise-curve", "exact DNA and MISE over a bandwidth grid");
  add_common(s_curve, common);
  add_mixture(s_curve, mixture);
  s_curve->add_option("--kernel", pilots.kernel, "normal or epanechnikov");
  s_curve->add_option("--n", curve.n, "sample size");
  s_curve->add_option("--h-min", curve.h_min, "smallest bandwidth");
  s_curve->add_option("--h-max", curve.h_max, "largest bandwidth");
  s_curve->add_option("--points", curve.points, "grid size (log spaced)");
  s_curve->add_option("--bandwidths", curve.h_list, "explicit comma-separated bandwidths");

  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo comparison of bandwidth selectors");
  auto* s_contest = app.add_subcommand("contest", "Monte Carlo contest of R(f'') estimators");
  for (auto* sub : { s_sim, s_contest }) {
    add_common(sub, common);
    add_mixture(sub, mixture);
    sub->add_option("--n", sim.n, "sample size");
    sub->add_option("--reps", sim.reps, "replications");
    sub->add_option("--threads", sim.threads, "worker threads (results do not depend on it)");
    sub->add_option("--dump", sim.dump, "per-replication CSV file");
  }
  add_pilots(s_sim, pilots);
  s_sim->add_option("--methods", sim.methods, "comma-separated selector list");
  s_contest->add_option("--estimators", sim.estimators, "r2m, r2m-diag, r2m-corrected, normal-start, local-lik");
  s_contest->add_option("--m", pilots.m, "expansion order");
  s_contest->add_option("--h-H", pilots.h_H, "Hermite bandwidth");
  s_contest->add_option("--h-H-tilde", pilots.h_H_tilde, "pilot Hermite bandwidth");
  s_contest->add_option("--pilot-scale", sim.pilot_scale, "normal-start h~ or local-likelihood window, in sigma units");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "bwlab: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    const std::uint64_t seed = resolve_seed(common);
    Document doc;
    int status = kExitOk;
    if (s_select->parsed()) {
      doc = cmd_select(data, method, pilots, seed);
    } else if (s_est->parsed()) {
      doc = cmd_estimate(data, est, pilots, seed);
    } else if (s_table->parsed()) {
      doc = cmd_table1(n_list);
    } else if (s_curve->parsed()) {
      doc = cmd_mise_curve(mixture, pilots.kernel, curve);
    } else {
      bool all_failed = false;
      doc = cmd_simulate(mixture, pilots, sim, seed, s_contest->parsed(), all_failed);
      if (all_failed) {
        err << "bwlab: every replication failed for at least one method\n";
        status = kExitCompute;
      }
    }
    write(doc, common, out);
    return status;
  } catch (const InvalidArgument& e) {
    err << "bwlab: " << e.what() << '\n';
    return kExitInput;
  } catch (const ComputationError& e) {
    err << "bwlab: computation failed: " << e.what() << '\n';
    return kExitCompute;
  } catch (const std::exception& e) {
    err << "bwlab: " << e.what() << '\n';
    return kExitCompute;
  }
}

} // namespace bwlab::cli
