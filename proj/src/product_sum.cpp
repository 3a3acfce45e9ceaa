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

#include "dgg/product_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dgg/errors.hpp"

namespace dgg {

namespace {

struct Candidate {
  std::int64_t alpha = 0;
  std::vector<std::int64_t> k;
  std::int64_t beta = 0;
  double worst = std::numeric_limits<double>::infinity();
};

// Best k for a given alpha: floor or ceil of alpha / gamma.
Candidate fit(std::int64_t alpha, const std::vector<double>& gammas) {
  Candidate c{alpha, {}, 0, 0.0};
  for (double g : gammas) {
    const double ideal = static_cast<double>(alpha) / g;
    const auto lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(ideal)));
    const std::int64_t hi = lo + 1;
    auto err = [&](std::int64_t k) {
      return std::abs(static_cast<double>(alpha) / static_cast<double>(k) - g) / g;
    };
    const std::int64_t k = err(lo) <= err(hi) ? lo : hi;
    c.k.push_back(k);
    c.beta += k;
    c.worst = std::max(c.worst, err(k));
  }
  return c;
}

void check_n(const ProductModel& pm, int n) {
  if (n != pm.n_channels) {
    std::ostringstream os;
    os << "product model was built from " << pm.n_channels << " channels, not " << n;
    throw ValidationError(os.str());
  }
}

void check_support(double r) {
  if (!(r > 0.0)) throw ValidationError("support violation: argument must be > 0");
}

ScaledValue g_density(const ProductModel& pm, double log_arg, double rel_tol) {
  return meijer_g_scaled(MeijerGSpec{{}, {}, pm.j_params, {}, log_arg}, rel_tol);
}

ScaledValue g_cumulative(const ProductModel& pm, double log_arg, double rel_tol) {
  return meijer_g_scaled(MeijerGSpec{{1.0}, {}, pm.j_params, {0.0}, log_arg}, rel_tol);
}

}  // namespace

double ProductModel::max_rel_error() const {
  double worst = 0.0;
  for (const auto& r : rationalized) worst = std::max(worst, r.rel_error);
  return worst;
}

std::vector<DoubleGGChannel> ProductModel::effective_channels() const {
  std::vector<DoubleGGChannel> out;
  for (int n = 0; n < n_channels; ++n) {
    GGParams x = factors[2 * n];
    GGParams y = factors[2 * n + 1];
    const std::int64_t k1 = k[2 * n];
    const std::int64_t k2 = k[2 * n + 1];
    x.gamma = static_cast<double>(alpha) / static_cast<double>(k1);
    y.gamma = static_cast<double>(alpha) / static_cast<double>(k2);
    DoubleGGChannel ch{x, y, make_rational(k2, k1, static_cast<double>(k2) / k1), {}};
    out.push_back(ch);
  }
  return out;
}

void refresh_derived(ProductModel& pm) {
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const double two_n = static_cast<double>(pm.factors.size());
  pm.beta = std::accumulate(pm.k.begin(), pm.k.end(), std::int64_t{0});
  pm.log_xi = (two_n - static_cast<double>(pm.beta)) * half_log_two_pi;
  pm.log_omega = 0.0;
  pm.j_params.clear();
  for (std::size_t l = 0; l < pm.factors.size(); ++l) {
    const GGParams& f = pm.factors[l];
    const double k = static_cast<double>(pm.k[l]);
    pm.log_xi += (f.m - 0.5) * std::log(k) - std::lgamma(f.m);
    pm.log_omega += k * std::log(k * f.omega / f.m);
    const auto d = delta_seq(static_cast<int>(pm.k[l]), f.m);
    pm.j_params.insert(pm.j_params.end(), d.begin(), d.end());
  }
}

ProductModel build_product_model(std::span<const DoubleGGChannel> channels,
                                 const ProductModelOptions& opts) {
  if (channels.empty()) throw ValidationError("product model needs at least one channel");
  if (!(opts.rel_tol > 0.0) || opts.beta_cap < 2 || opts.max_alpha < 1) {
    throw ValidationError("invalid product model options");
  }
  ProductModel pm;
  pm.n_channels = static_cast<int>(channels.size());
  std::vector<double> gammas;
  for (const DoubleGGChannel& ch : channels) {
    validate(ch);
    pm.factors.push_back(ch.large_scale);
    pm.factors.push_back(ch.small_scale);
    gammas.push_back(ch.large_scale.gamma);
    gammas.push_back(ch.small_scale.gamma);
  }

  using Policy = ProductModelOptions::Policy;
  Candidate best;
  std::int64_t smallest_over_cap = 0;
  for (std::int64_t alpha = 1; alpha <= opts.max_alpha; ++alpha) {
    Candidate c = fit(alpha, gammas);
    if (opts.policy == Policy::kMinimalOrder) {
      if (c.worst > opts.rel_tol) continue;
      if (c.beta > opts.beta_cap) {
        if (smallest_over_cap == 0 || c.beta < smallest_over_cap) smallest_over_cap = c.beta;
        continue;
      }
      if (best.alpha == 0 || c.beta < best.beta || (c.beta == best.beta && c.worst < best.worst)) {
        best = std::move(c);
      }
    } else {
      if (c.beta > opts.beta_cap) continue;
      if (best.alpha == 0 || c.worst < best.worst) best = std::move(c);
    }
  }
  if (best.alpha == 0 || best.worst > opts.rel_tol) {
    if (smallest_over_cap > 0) {
      std::ostringstream os;
      os << "model order too large: beta = " << smallest_over_cap << " exceeds the cap "
         << opts.beta_cap;
      throw ValidationError(os.str());
    }
    throw ValidationError("rationalization failed; increase max_den or rel_tol");
  }

  pm.alpha = best.alpha;
  pm.k = best.k;
  for (std::size_t l = 0; l < gammas.size(); ++l) {
    pm.rationalized.push_back(make_rational(pm.alpha, pm.k[l], gammas[l]));
  }
  refresh_derived(pm);
  return pm;
}

double product_pdf(const ProductModel& pm, double r, double rel_tol) {
  check_support(r);
  const double a = static_cast<double>(pm.alpha);
  const ScaledValue g = g_density(pm, a * std::log(r) - pm.log_omega, rel_tol);
  return g.times_exp(std::log(a) + pm.log_xi - std::log(r)).value();
}

double product_cdf(const ProductModel& pm, double r, double rel_tol) {
  check_support(r);
  const double a = static_cast<double>(pm.alpha);
  const ScaledValue g = g_cumulative(pm, a * std::log(r) - pm.log_omega, rel_tol);
  return std::min(1.0, g.times_exp(pm.log_xi).value());
}

double sum_cdf_upper(const ProductModel& pm, int n, double r, double rel_tol) {
  check_n(pm, n);
  check_support(r);
  const double an = static_cast<double>(pm.alpha) * n;
  const ScaledValue g = g_cumulative(pm, an * std::log(r / n) - pm.log_omega, rel_tol);
  return std::min(1.0, g.times_exp(pm.log_xi).value());
}

double sum_pdf_upper(const ProductModel& pm, int n, double r, double rel_tol) {
  check_n(pm, n);
  check_support(r);
  const double an = static_cast<double>(pm.alpha) * n;
  const ScaledValue g = g_density(pm, an * std::log(r / n) - pm.log_omega, rel_tol);
  return g.times_exp(std::log(an) + pm.log_xi - std::log(r)).value();
}

}  // namespace dgg
