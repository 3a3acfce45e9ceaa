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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dgg/dgg_model.hpp"

namespace dgg {

/// How the 2N exponents gamma_l are replaced by alpha / k_l with integer
/// alpha and k_l.
struct ProductModelOptions {
  enum class Policy {
    /// Smallest beta = sum k_l whose worst relative error meets rel_tol.
    kMinimalOrder,
    /// Smallest worst relative error with beta <= beta_cap.
    kMostAccurate,
  };
  double rel_tol = 5e-3;
  int beta_cap = 200;
  std::int64_t max_alpha = 4096;
  Policy policy = Policy::kMinimalOrder;
};

/// Distribution of R = prod_l U_l over the 2N GG factors of N channels, in
/// the form (alpha xi / r) G^{beta,0}_{0,beta}[r^alpha / omega | J].
struct ProductModel {
  std::vector<GGParams> factors;
  /// gamma_l' = alpha / k_l, reduced, with the error against gamma_l.
  std::vector<RationalExponent> rationalized;
  std::vector<std::int64_t> k;
  std::int64_t alpha = 1;
  std::int64_t beta = 0;
  double log_xi = 0.0;
  double log_omega = 0.0;
  std::vector<double> j_params;
  int n_channels = 0;

  double xi() const { return std::exp(log_xi); }
  /// May overflow to inf for large beta; use log_omega.
  double omega() const { return std::exp(log_omega); }
  double max_rel_error() const;
  /// The channels this model describes exactly: gamma_l replaced by
  /// alpha / k_l and p/q = k_2/k_1 for each channel.
  std::vector<DoubleGGChannel> effective_channels() const;
};

ProductModel build_product_model(std::span<const DoubleGGChannel> channels,
                                 const ProductModelOptions& opts = {});

/// Recomputes xi, omega and J from `factors`, `k` and `alpha`.
void refresh_derived(ProductModel& pm);

double product_pdf(const ProductModel& pm, double r, double rel_tol = 1e-8);

double product_cdf(const ProductModel& pm, double r, double rel_tol = 1e-8);

/// AM-GM upper bound on the cdf of the sum of the N irradiances.
double sum_cdf_upper(const ProductModel& pm, int n, double r, double rel_tol = 1e-8);

/// Derivative of sum_cdf_upper in r.
double sum_pdf_upper(const ProductModel& pm, int n, double r, double rel_tol = 1e-8);

}  // namespace dgg
