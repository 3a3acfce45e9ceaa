// Copyright 2026 The dggfso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgg/special_numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "dgg/errors.hpp"
#include "dgg/log_gamma.hpp"

namespace dgg {

MeijerGSpec MeijerGSpec::with_argument(std::vector<double> a_top, std::vector<double> a_bottom,
                                       std::vector<double> b_top, std::vector<double> b_bottom,
                                       double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw ValidationError("malformed spec: Meijer G argument must be finite and positive");
  }
  return {std::move(a_top), std::move(a_bottom), std::move(b_top), std::move(b_bottom),
          std::log(z)};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class MellinBarnes {
 public:
  explicit MellinBarnes(const MeijerGSpec& spec) : spec_(spec) {}

  template <class T>
  std::complex<T> log_integrand(std::complex<T> s) const {
    using C = std::complex<T>;
    C acc = s * T(spec_.log_argument);
    for (double b : spec_.b_top) acc += log_gamma(C(T(b)) - s);
    for (double a : spec_.a_top) acc += log_gamma(C(T(1) - T(a)) + s);
    for (double b : spec_.b_bottom) acc -= log_gamma(C(T(1) - T(b)) + s);
    for (double a : spec_.a_bottom) acc -= log_gamma(C(T(a)) - s);
    return acc;
  }

  // log|F(c)| on the real axis; +inf where a gamma factor is singular.
  double log_abs(double c) const {
    double acc = c * spec_.log_argument;
    auto add = [&](double x, double sign) {
      if (x <= 0.0 && x == std::floor(x)) {
        acc = sign > 0 ? kInf : -kInf;
        return;
      }
      acc += sign * std::lgamma(x);
    };
    for (double b : spec_.b_top) add(b - c, 1.0);
    for (double a : spec_.a_top) add(1.0 - a + c, 1.0);
    for (double b : spec_.b_bottom) add(1.0 - b + c, -1.0);
    for (double a : spec_.a_bottom) add(a - c, -1.0);
    return std::isfinite(acc) ? acc : kInf;
  }

  double curvature(double c) const {
    using boost::math::trigamma;
    double acc = 0.0;
    for (double b : spec_.b_top) acc += trigamma(b - c);
    for (double a : spec_.a_top) acc += trigamma(1.0 - a + c);
    for (double b : spec_.b_bottom) acc -= trigamma(1.0 - b + c);
    for (double a : spec_.a_bottom) acc -= trigamma(a - c);
    return acc;
  }

 private:
  const MeijerGSpec& spec_;
};

void validate(const MeijerGSpec& spec, double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 1e-4) {
    throw ValidationError("malformed spec: rel_tol must lie in (0, 1e-4]");
  }
  if (!std::isfinite(spec.log_argument)) {
    throw ValidationError("malformed spec: Meijer G argument must be finite and positive");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(spec.a_top) || !finite(spec.a_bottom) || !finite(spec.b_top) ||
      !finite(spec.b_bottom)) {
    throw ValidationError("malformed spec: non-finite parameter");
  }
  const double m = static_cast<double>(spec.b_top.size());
  const double n = static_cast<double>(spec.a_top.size());
  const double p = n + static_cast<double>(spec.a_bottom.size());
  const double q = m + static_cast<double>(spec.b_bottom.size());
  if (!(m + n - 0.5 * (p + q) > 0.0)) {
    throw ValidationError(
        "malformed spec: contour integral needs m + n > (p + q) / 2 for exponential decay");
  }
  if (spec.a_top.empty() && spec.b_top.empty()) {
    throw ValidationError("malformed spec: m = n = 0");
  }
}

// Finds the abscissa minimizing |F(c)| between the two pole families.
double find_saddle(const MellinBarnes& mb, double lo, double hi) {
  // c(u) maps the whole real line onto (lo, hi), resolving minima that sit
  // exponentially close to a pole.
  auto to_c = [&](double u) {
    if (std::isfinite(lo) && std::isfinite(hi)) return lo + (hi - lo) / (1.0 + std::exp(-u));
    if (std::isfinite(hi)) return hi - std::exp(u);
    return lo + std::exp(u);
  };
  const bool bounded = std::isfinite(lo) && std::isfinite(hi);
  const double u_min = bounded ? -36.0 : -36.0;
  const double u_max = bounded ? 36.0 : 9.0;
  const double du = 0.25;
  double best_u = u_min;
  double best = kInf;
  for (double u = u_min; u <= u_max; u += du) {
    const double c = to_c(u);
    if (!(c > lo && c < hi)) continue;
    const double v = mb.log_abs(c);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }
  if (!std::isfinite(best)) {
    throw NumericError("evaluation failed: integrand singular along every candidate contour");
  }
  auto objective = [&](double u) {
    const double c = to_c(u);
    if (!(c > lo && c < hi)) return kInf;
    return mb.log_abs(c);
  };
  const auto r = boost::math::tools::brent_find_minima(objective, best_u - du, best_u + du, 40);
  const double c = to_c(r.first);
  return (c > lo && c < hi) ? c : to_c(best_u);
}

struct Pass {
  double mantissa = 0.0;  // relative to exp(log|F(c)|)
  double abs_sum = 0.0;
  std::int64_t nodes = 0;
};

template <class T>
Pass trapezoid(const MellinBarnes& mb, double c, double log_peak, double h, double rel_tol,
               double min_extent) {
  using C = std::complex<T>;
  constexpr std::int64_t kMaxNodes = 4'000'000;
  const C s0(T(c), T(0));
  T sum = T(0.5) * std::exp(mb.log_integrand(s0) - T(log_peak)).real();
  T abs_sum = std::abs(sum);
  const double log_cut = std::log(rel_tol) - 7.0;
  double prev_log_mag = 0.0;
  int quiet = 0;
  std::int64_t k = 1;
  for (;; ++k) {
    const double t = static_cast<double>(k) * h;
    const std::complex<T> term = std::exp(mb.log_integrand(C(T(c), T(t))) - T(log_peak));
    sum += term.real();
    abs_sum += std::abs(term.real());
    const double log_mag = std::log(std::abs(term)) ;
    const double scale = std::log(std::max(static_cast<double>(std::abs(sum)), 1e-300));
    if (log_mag - scale < log_cut && log_mag <= prev_log_mag && t >= min_extent) {
      if (++quiet >= 8) break;
    } else {
      quiet = 0;
    }
    prev_log_mag = log_mag;
    if (k >= kMaxNodes) {
      throw NumericError("evaluation failed: contour truncation did not converge");
    }
  }
  const double factor = h / std::numbers::pi;
  return {static_cast<double>(sum) * factor, static_cast<double>(abs_sum) * factor, k + 1};
}

}  // namespace

MeijerGReport meijer_g_report(const MeijerGSpec& spec, const MeijerGOptions& opts) {
  validate(spec, opts.rel_tol);
  double lo = -kInf;
  for (double a : spec.a_top) lo = std::max(lo, a - 1.0);
  double hi = kInf;
  for (double b : spec.b_top) hi = std::min(hi, b);
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "malformed spec: no vertical contour separates the poles (max a_top - 1 = " << lo
       << ", min b_top = " << hi << ")";
    throw ValidationError(os.str());
  }

  const MellinBarnes mb(spec);
  const double c = find_saddle(mb, lo, hi);
  const double log_peak = mb.log_abs(c);
  const double curv = mb.curvature(c);
  const double width = (curv > 0.0 && std::isfinite(curv)) ? 1.0 / std::sqrt(curv) : 1.0;

  MeijerGReport report;
  report.contour_abscissa = c;
  bool extended = false;
  double h = 0.5 * width;
  double previous = std::numeric_limits<double>::quiet_NaN();
  std::int64_t nodes = 0;
  for (int level = 0; level <= opts.max_refinements; ++level, h *= 0.5) {
    Pass pass = extended ? trapezoid<long double>(mb, c, log_peak, h, opts.rel_tol, 4.0 * width)
                         : trapezoid<double>(mb, c, log_peak, h, opts.rel_tol, 4.0 * width);
    double condition = pass.abs_sum / std::max(std::abs(pass.mantissa), 1e-300);
    // Rounding in log_gamma grows with the parameter count and the phase
    // magnitude; switch to extended accumulation when it threatens rel_tol.
    const double params = static_cast<double>(spec.a_top.size() + spec.a_bottom.size() +
                                              spec.b_top.size() + spec.b_bottom.size());
    const double noise = condition * 1e-15 * std::sqrt(params + 1.0);
    if (!extended && noise > 0.01 * opts.rel_tol) {
      extended = true;
      pass = trapezoid<long double>(mb, c, log_peak, h, opts.rel_tol, 4.0 * width);
      condition = pass.abs_sum / std::max(std::abs(pass.mantissa), 1e-300);
    }
    nodes += pass.nodes;
    report.value = {pass.mantissa, log_peak};
    report.step = h;
    report.refinements = level;
    report.condition = condition;
    report.extended_precision = extended;
    report.nodes = nodes;
    if (level > 0 && std::abs(pass.mantissa - previous) <= opts.rel_tol * std::abs(pass.mantissa)) {
      if (condition * (extended ? 1e-18 : 1e-15) > opts.rel_tol) break;
      return report;
    }
    previous = pass.mantissa;
  }
  std::ostringstream os;
  os.precision(17);
  os << "evaluation failed: Meijer G contour integral did not converge to rel_tol "
     << opts.rel_tol << " (last two estimates " << ScaledValue{previous, log_peak}.value()
     << ", " << report.value.value() << "; log scale " << log_peak << ", condition "
     << report.condition << ")";
  throw NumericError(os.str());
}

ScaledValue meijer_g_scaled(const MeijerGSpec& spec, double rel_tol) {
  MeijerGOptions opts;
  opts.rel_tol = rel_tol;
  return meijer_g_report(spec, opts).value;
}

double meijer_g(const MeijerGSpec& spec, double rel_tol) {
  return meijer_g_scaled(spec, rel_tol).value();
}

double erfc(double x) { return std::erfc(x); }

std::vector<double> delta_seq(int j, double x) {
  if (j < 1) throw ValidationError("invalid order: delta_seq needs j >= 1");
  std::vector<double> out(static_cast<std::size_t>(j));
  for (int i = 0; i < j; ++i) out[static_cast<std::size_t>(i)] = (x + i) / j;
  return out;
}

RationalExponent make_rational(std::int64_t num, std::int64_t den, double target) {
  if (num < 1 || den < 1) throw ValidationError("rational exponent needs num, den >= 1");
  const std::int64_t g = std::gcd(num, den);
  RationalExponent r{num / g, den / g, target, 0.0};
  r.rel_error = std::abs(r.value() - target) / std::abs(target);
  return r;
}

RationalExponent rationalize(double x, std::int64_t max_den, double rel_tol,
                             RationalizePolicy policy) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("rationalize needs x > 0");
  if (max_den < 1) throw ValidationError("rationalize needs max_den >= 1");

  // Convergents h_k / k_k of the continued fraction of x.
  long double y = x;
  std::int64_t h_prev = 1, k_prev = 0;  // h_{-1}, k_{-1}
  std::int64_t h = static_cast<std::int64_t>(std::floor(y));
  std::int64_t k = 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> convergents;
  std::int64_t sc_num = 0, sc_den = 0;  // best semiconvergent past the last convergent
  for (;;) {
    if (h >= 1) convergents.emplace_back(h, k);
    const long double frac = y - std::floor(y);
    if (frac < 1e-15L) break;
    y = 1.0L / frac;
    const auto a = static_cast<std::int64_t>(std::floor(y));
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den || h_next < 0) {
      // Semiconvergents (j h + h_prev) / (j k + k_prev) with j < a.
      const std::int64_t j = (max_den - k_prev) / k;
      if (j >= 1) {
        sc_num = j * h + h_prev;
        sc_den = j * k + k_prev;
      }
      break;
    }
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
  }

  if (policy == RationalizePolicy::kSimplest) {
    for (auto [n, d] : convergents) {
      const RationalExponent r = make_rational(n, d, x);
      if (r.rel_error <= rel_tol) return r;
    }
  } else if (!convergents.empty() || sc_num >= 1) {
    RationalExponent best;
    bool have = false;
    if (!convergents.empty()) {
      best = make_rational(convergents.back().first, convergents.back().second, x);
      have = true;
    }
    if (sc_num >= 1) {
      const RationalExponent sc = make_rational(sc_num, sc_den, x);
      if (!have || sc.rel_error < best.rel_error) best = sc;
    }
    if (best.rel_error <= rel_tol) return best;
  }
  throw ValidationError("rationalization failed; increase max_den or rel_tol");
}

}  // namespace dgg
