#include "bwlab/numeric.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace bwlab {

void SampleSize::require_at_least(std::size_t minimum, const char* what) const
{
  if (!is_infinite() && n_ < static_cast<double>(minimum)) {
    throw InvalidArgument(std::string(what) + ": sample size must be at least " +
                          std::to_string(minimum));
  }
}

namespace {

struct Panel
{
  double a, b;
  double fa, fm, fb;
  double whole;
  double tol;
  int depth;
};

double simpson(double a, double b, double fa, double fm, double fb)
{
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double checked(const std::function<double(double)>& f, double x)
{
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw ComputationError("quadrature: non-finite integrand at x = " + std::to_string(x));
  }
  return y;
}

constexpr int kInitialPanels = 16;
constexpr int kMaxDepth = 48;

} // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a,
                                  double b,
                                  double abs_tol,
                                  std::size_t max_intervals)
{
  QuadratureResult result;
  if (a == b)
    return result;
  if (!(abs_tol > 0.0))
    throw InvalidArgument("adaptive_simpson: tolerance must be positive");

  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<Panel> stack;
  stack.reserve(2 * kMaxDepth + kInitialPanels);
  const double width = (b - a) / kInitialPanels;
  double left = a;
  double f_left = checked(f, a);
  // pushed in reverse so panels are processed left to right
  std::vector<Panel> initial;
  for (int i = 0; i < kInitialPanels; ++i) {
    const double right = (i + 1 == kInitialPanels) ? b : a + (i + 1) * width;
    const double mid = 0.5 * (left + right);
    const double f_mid = checked(f, mid);
    const double f_right = checked(f, right);
    initial.push_back({ left,
                        right,
                        f_left,
                        f_mid,
                        f_right,
                        simpson(left, right, f_left, f_mid, f_right),
                        abs_tol / kInitialPanels,
                        0 });
    left = right;
    f_left = f_right;
  }
  stack.assign(initial.rbegin(), initial.rend());

  CompensatedSum total;
  CompensatedSum error;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();

    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double f_lm = checked(f, lm);
    const double f_rm = checked(f, rm);
    const double s_left = simpson(p.a, m, p.fa, f_lm, p.fm);
    const double s_right = simpson(m, p.b, p.fm, f_rm, p.fb);
    const double delta = s_left + s_right - p.whole;

    const bool budget_exhausted = result.intervals + stack.size() + 2 > max_intervals;
    if (std::abs(delta) <= 15.0 * p.tol || p.depth >= kMaxDepth || budget_exhausted) {
      if (std::abs(delta) > 15.0 * p.tol)
        result.converged = false;
      total.add(s_left + s_right + delta / 15.0);
      error.add(std::abs(delta) / 15.0);
      ++result.intervals;
      continue;
    }
    stack.push_back({ m, p.b, p.fm, f_rm, p.fb, s_right, 0.5 * p.tol, p.depth + 1 });
    stack.push_back({ p.a, m, p.fa, f_lm, p.fm, s_left, 0.5 * p.tol, p.depth + 1 });
  }

  result.value = sign * total.value();
  result.error_estimate = error.value();
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol)
{
  const QuadratureResult r = adaptive_simpson(f, a, b, abs_tol);
  if (!r.converged) {
    throw ComputationError("integrate: adaptive Simpson did not converge on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return r.value;
}

double integrate_real_line(const std::function<double(double)>& f, double scale, double abs_tol)
{
  if (!(scale > 0.0))
    throw InvalidArgument("integrate_real_line: scale must be positive");
  auto mapped = [&](double t) {
    const double d = 1.0 - t * t;
    if (d <= 0.0)
      return 0.0;
    const double x = scale * t / d;
    const double jac = scale * (1.0 + t * t) / (d * d);
    // the integrand must decay faster than 1/x^2 for the mapped form to vanish
    return f(x) * jac;
  };
  return integrate(mapped, -1.0, 0.0, 0.5 * abs_tol) + integrate(mapped, 0.0, 1.0, 0.5 * abs_tol);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949; // (sqrt(5) - 1) / 2

class CountingObjective
{
public:
  explicit CountingObjective(const std::function<double(double)>& f)
    : f_(f)
  {}

  double at_log(double log_h)
  {
    const double h = std::exp(log_h);
    const double v = f_(h);
    ++count;
    if (!std::isfinite(v)) {
      throw ComputationError("minimize: non-finite objective at h = " + std::to_string(h));
    }
    return v;
  }

  std::size_t count = 0;

private:
  const std::function<double(double)>& f_;
};

void validate(Bracket bracket, double rel_tol)
{
  if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo)) {
    throw InvalidArgument("minimize: bracket must satisfy 0 < lo < hi");
  }
  if (!(rel_tol >= 1e-10 && rel_tol <= 1e-2)) {
    throw InvalidArgument("minimize: rel_tol must lie in [1e-10, 1e-2]");
  }
}

//! Golden section on [a, b] in log space; returns (log argmin, value).
std::pair<double, double> golden(CountingObjective& obj, double a, double b, double tol)
{
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = obj.at_log(c);
  double fd = obj.at_log(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = obj.at_log(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = obj.at_log(d);
    }
  }
  return fc <= fd ? std::pair{ c, fc } : std::pair{ d, fd };
}

} // namespace

MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               Bracket bracket,
                               double rel_tol)
{
  validate(bracket, rel_tol);
  CountingObjective obj(f);
  const double a = std::log(bracket.lo);
  const double b = std::log(bracket.hi);
  auto [x, fx] = golden(obj, a, b, rel_tol);

  MinimizeResult result{ std::exp(x), fx, false, 0 };
  const double f_lo = obj.at_log(a);
  const double f_hi = obj.at_log(b);
  if (f_lo <= result.value && f_lo <= f_hi) {
    result = { bracket.lo, f_lo, true, 0 };
  } else if (f_hi <= result.value) {
    result = { bracket.hi, f_hi, true, 0 };
  } else if (x - a < 2.0 * rel_tol || b - x < 2.0 * rel_tol) {
    result.at_boundary = true;
  }
  result.evaluations = obj.count;
  return result;
}

MinimizeResult minimize_scan(const std::function<double(double)>& f,
                             Bracket bracket,
                             std::size_t grid_points,
                             double rel_tol,
                             ScanMode mode)
{
  validate(bracket, rel_tol);
  if (grid_points < 3)
    throw InvalidArgument("minimize_scan: need at least 3 grid points");

  CountingObjective obj(f);
  const double a = std::log(bracket.lo);
  const double b = std::log(bracket.hi);
  const double step = (b - a) / static_cast<double>(grid_points - 1);
  std::vector<double> xs(grid_points);
  std::vector<double> fs(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    xs[i] = (i + 1 == grid_points) ? b : a + step * static_cast<double>(i);
    fs[i] = obj.at_log(xs[i]);
  }

  std::size_t best = 0;
  bool found = false;
  if (mode == ScanMode::global) {
    best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    found = true;
  } else {
    for (std::size_t i = 1; i + 1 < grid_points; ++i) {
      if (fs[i] < fs[i - 1] && fs[i] <= fs[i + 1]) {
        best = i;
        found = true;
        break;
      }
    }
    if (!found) {
      best = fs.front() <= fs.back() ? 0 : grid_points - 1;
    }
  }

  MinimizeResult result{ std::exp(xs[best]), fs[best], false, 0 };
  if (!found || best == 0 || best + 1 == grid_points) {
    result.at_boundary = true;
    result.evaluations = obj.count;
    return result;
  }

  auto [x, fx] = golden(obj, xs[best - 1], xs[best + 1], rel_tol);
  if (fx <= fs[best]) {
    result.argmin = std::exp(x);
    result.value = fx;
  }
  result.evaluations = obj.count;
  return result;
}

} // namespace bwlab
