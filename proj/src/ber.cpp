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

#include "dgg/ber.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dgg/errors.hpp"
#include "dgg/rng.hpp"

namespace dgg {

namespace {

// erfc(27) is below the smallest normal double.
constexpr double kErfcCutoff = 27.0;
constexpr std::uint64_t kBitLevelTag = 0xb17b17b17b17b17bULL;

// Running mean / sum of squared deviations, merged in a fixed order.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
};

void check_channels(std::span<const DoubleGGChannel> channels) {
  if (channels.empty()) throw ValidationError("at least one channel is required");
  for (const DoubleGGChannel& ch : channels) validate(ch);
}

double z_score(double confidence) {
  return std::numbers::sqrt2 * boost::math::erf_inv(confidence);
}

BERPoint finish(double snr_db, const Moments& mom, const MCConfig& cfg) {
  BERPoint p;
  p.snr_db = snr_db;
  p.estimator = Estimator::kMC;
  p.n_samples = static_cast<std::size_t>(mom.count);
  p.ber = mom.mean;
  p.std_error = mom.count > 1.0 ? std::sqrt(mom.m2 / (mom.count - 1.0) / mom.count) : 0.0;
  const double half = z_score(cfg.confidence) * p.std_error;
  p.ci_low = std::max(0.0, p.ber - half);
  p.ci_high = std::min(0.5, p.ber + half);
  p.ci_high = std::max(p.ci_high, p.ber);
  p.low_precision = p.ber <= 0.0 || half > 0.5 * p.ber;
  return p;
}

std::vector<ChannelSampler> make_samplers(std::span<const DoubleGGChannel> channels) {
  std::vector<ChannelSampler> out;
  out.reserve(channels.size());
  for (const DoubleGGChannel& ch : channels) out.emplace_back(ch);
  return out;
}

// One batch of the semi-analytic estimator. Samplers are rebuilt per batch
// because the gamma distribution caches normal deviates between calls.
void semi_analytic_batch(std::span<const DoubleGGChannel> channels, std::span<const double> scale,
                         std::uint64_t seed, std::size_t batch, std::size_t count,
                         Moments* out) {
  auto rng = make_stream(seed, batch);
  auto samplers = make_samplers(channels);
  for (std::size_t i = 0; i < count; ++i) {
    double sum_i = 0.0;
    for (ChannelSampler& s : samplers) sum_i += s(rng);
    for (std::size_t k = 0; k < scale.size(); ++k) {
      const double arg = scale[k] * sum_i;
      out[k].add(arg < kErfcCutoff ? 0.5 * std::erfc(arg) : 0.0);
    }
  }
}

void bitlevel_batch(std::span<const DoubleGGChannel> channels, double gamma_bar,
                    std::uint64_t seed, std::size_t batch, std::size_t count, Moments& out) {
  auto rng = make_stream(splitmix64(seed ^ kBitLevelTag), batch);
  auto samplers = make_samplers(channels);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int n = static_cast<int>(channels.size());
  const double n0 = 1.0 / gamma_bar;
  const double sigma = std::sqrt(0.5 * n0);
  for (std::size_t i = 0; i < count; ++i) {
    double sum_i = 0.0;
    for (ChannelSampler& s : samplers) sum_i += s(rng);
    const int bit = static_cast<int>(rng() >> 63);
    const double r = ook_received(bit, sum_i, n, 1.0, sigma * noise(rng));
    out.add(ook_detect(r, sum_i, n, 1.0, n0) != bit ? 1.0 : 0.0);
  }
}

std::size_t batch_count(const MCConfig& cfg) {
  return (cfg.n_samples + cfg.batch_size - 1) / cfg.batch_size;
}

std::size_t batch_length(const MCConfig& cfg, std::size_t b) {
  return std::min(cfg.batch_size, cfg.n_samples - b * cfg.batch_size);
}

}  // namespace

SNRConfig SNRConfig::from_db(double db) {
  if (!std::isfinite(db)) throw ValidationError("SNR must be finite");
  return {db, std::pow(10.0, db / 10.0)};
}

SNRConfig SNRConfig::from_linear(double gamma_bar) {
  if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) {
    throw ValidationError("SNR must be positive and finite");
  }
  return {10.0 * std::log10(gamma_bar), gamma_bar};
}

void MCConfig::validate() const {
  if (batch_size < 1 || n_samples < batch_size) {
    throw ValidationError("invalid Monte Carlo config: need n_samples >= batch_size >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError("invalid Monte Carlo config: confidence must be in (0, 1)");
  }
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::kMC:
      return "mc";
    case Estimator::kBound:
      return "bound";
    case Estimator::kAsymptotic:
      return "asymptotic";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "mc") return Estimator::kMC;
  if (name == "bound") return Estimator::kBound;
  if (name == "asymptotic") return Estimator::kAsymptotic;
  throw ValidationError("unknown estimator '" + std::string(name) +
                        "'; valid estimators: mc, bound, asymptotic");
}

double conditional_ber(double gamma_bar, int n, double sum_i) {
  if (!(gamma_bar > 0.0)) throw ValidationError("SNR must be positive");
  if (n < 1) throw ValidationError("number of apertures must be >= 1");
  return 0.5 * std::erfc(std::sqrt(gamma_bar) * sum_i / (2.0 * n));
}

std::vector<BERPoint> mc_ber_curve(std::span<const DoubleGGChannel> channels,
                                   std::span<const double> snr_db, const MCConfig& cfg,
                                   Execution exec) {
  check_channels(channels);
  cfg.validate();
  const int n = static_cast<int>(channels.size());
  std::vector<double> scale;
  for (double db : snr_db) scale.push_back(std::sqrt(SNRConfig::from_db(db).gamma_bar) / (2.0 * n));

  const std::size_t n_batches = batch_count(cfg);
  const std::size_t width = scale.size();
  std::vector<Moments> partial(n_batches * width);
  const auto n_batches_signed = static_cast<std::int64_t>(n_batches);
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < n_batches_signed; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      semi_analytic_batch(channels, scale, cfg.seed, ub, batch_length(cfg, ub),
                          partial.data() + ub * width);
    }
  } else {
    for (std::size_t b = 0; b < n_batches; ++b) {
      semi_analytic_batch(channels, scale, cfg.seed, b, batch_length(cfg, b),
                          partial.data() + b * width);
    }
  }

  std::vector<BERPoint> out;
  for (std::size_t k = 0; k < width; ++k) {
    Moments total;
    for (std::size_t b = 0; b < n_batches; ++b) total.merge(partial[b * width + k]);
    out.push_back(finish(snr_db[k], total, cfg));
  }
  return out;
}

BERPoint mc_ber(std::span<const DoubleGGChannel> channels, const SNRConfig& snr,
                const MCConfig& cfg, Execution exec) {
  const double db[] = {snr.gamma_bar_db};
  return mc_ber_curve(channels, db, cfg, exec).front();
}

double ook_received(int bit, double sum_i, int n, double eta, double noise) {
  return eta * bit * sum_i / n + noise;
}

int ook_detect(double r, double sum_i, int n, double eta, double n0) {
  const double on = eta * sum_i / n;
  const double log_on = -(r - on) * (r - on) / n0;
  const double log_off = -r * r / n0;
  return log_on > log_off ? 1 : 0;
}

BERPoint mc_ber_bitlevel(std::span<const DoubleGGChannel> channels, const SNRConfig& snr,
                         const MCConfig& cfg, Execution exec) {
  check_channels(channels);
  cfg.validate();
  const std::size_t n_batches = batch_count(cfg);
  std::vector<Moments> partial(n_batches);
  const auto n_batches_signed = static_cast<std::int64_t>(n_batches);
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < n_batches_signed; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      bitlevel_batch(channels, snr.gamma_bar, cfg.seed, ub, batch_length(cfg, ub), partial[ub]);
    }
  } else {
    for (std::size_t b = 0; b < n_batches; ++b) {
      bitlevel_batch(channels, snr.gamma_bar, cfg.seed, b, batch_length(cfg, b), partial[b]);
    }
  }
  Moments total;
  for (const Moments& m : partial) total.merge(m);
  return finish(snr.gamma_bar_db, total, cfg);
}

BoundTerms bound_terms(const ProductModel& pm, int n) {
  if (n != pm.n_channels) {
    throw ValidationError("product model channel count does not match N");
  }
  BoundTerms t;
  t.n = n;
  const std::int64_t alpha_n = pm.alpha * n;
  t.q = alpha_n % 2 == 0 ? 1 : 2;
  t.s = alpha_n % 2 == 0 ? alpha_n / 2 : alpha_n;
  t.mu = 1.0 - n;
  for (const GGParams& f : pm.factors) t.mu += f.m;
  for (double j : pm.j_params) {
    if (t.q == 1) {
      t.k_q.push_back(j);
    } else {
      t.k_q.push_back(j / 2.0);
      t.k_q.push_back((j + 1.0) / 2.0);
    }
  }

  const double s = static_cast<double>(t.s);
  const double q = static_cast<double>(t.q);
  const double beta = static_cast<double>(pm.beta);
  const double nn = static_cast<double>(n);
  t.log_prefactor = std::log(nn * static_cast<double>(pm.alpha)) + pm.log_xi + t.mu * std::log(q) -
                    std::log(2.0 * std::numbers::sqrt2 * s) -
                    (s + (q - 1.0) * beta) * 0.5 * std::log(2.0 * std::numbers::pi);

  const int si = static_cast<int>(t.s);
  t.spec.a_top = delta_seq(si, 1.0);
  const auto half = delta_seq(si, 0.5);
  t.spec.a_top.insert(t.spec.a_top.end(), half.begin(), half.end());
  t.spec.b_top = t.k_q;
  t.spec.b_bottom = delta_seq(si, 0.0);
  t.spec.log_argument = s * std::log(4.0 * s * nn * nn) -
                        q * (pm.log_omega + beta * std::log(q) +
                             static_cast<double>(alpha_n) * std::log(nn));
  return t;
}

double ber_upper_bound(const BoundTerms& terms, const SNRConfig& snr, double rel_tol) {
  if (!(snr.gamma_bar > 0.0)) throw ValidationError("SNR must be positive");
  MeijerGSpec spec = terms.spec;
  spec.log_argument -= static_cast<double>(terms.s) * std::log(snr.gamma_bar);
  try {
    const ScaledValue g = meijer_g_scaled(spec, rel_tol);
    return std::clamp(g.times_exp(terms.log_prefactor).value(), 0.0, 0.5);
  } catch (const NumericError& e) {
    std::ostringstream os;
    os << e.what() << " [bound terms: s=" << terms.s << " q=" << terms.q << " mu=" << terms.mu
       << " order=" << terms.k_q.size() << " N=" << terms.n << " snr_db=" << snr.gamma_bar_db
       << "]";
    throw NumericError(os.str());
  }
}

double ber_upper_bound(const ProductModel& pm, int n, const SNRConfig& snr, double rel_tol) {
  return ber_upper_bound(bound_terms(pm, n), snr, rel_tol);
}

AsymptoticTerms asymptotic_terms(const ProductModel& pm, int n, const AsymptoticOptions& opts) {
  if (n != pm.n_channels) {
    throw ValidationError("product model channel count does not match N");
  }
  // Only the first element m_l / k_l of each factor's block can be minimal.
  auto first = [](const ProductModel& p, std::size_t l) {
    return p.factors[l].m / static_cast<double>(p.k[l]);
  };
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < pm.factors.size(); ++l) lowest = std::min(lowest, first(pm, l));
  std::vector<std::size_t> tied;
  for (std::size_t l = 0; l < pm.factors.size(); ++l) {
    if (std::abs(first(pm, l) - lowest) <= 1e-12 * lowest) tied.push_back(l);
  }

  ProductModel model = pm;
  AsymptoticTerms t;
  if (tied.size() > 1) {
    if (!opts.perturb_ties) {
      throw ValidationError("asymptotic expression undefined for repeated minimal exponents");
    }
    for (std::size_t r = 1; r < tied.size(); ++r) {
      model.factors[tied[r]].m += 1e-6 * static_cast<double>(r);
    }
    refresh_derived(model);
    t.perturbed = true;
  }

  const auto it = std::min_element(model.j_params.begin(), model.j_params.end());
  t.c_k = *it;
  t.c_j_list.assign(model.j_params.begin(), it);
  t.c_j_list.insert(t.c_j_list.end(), it + 1, model.j_params.end());

  const double nn = static_cast<double>(n);
  const double an = static_cast<double>(model.alpha) * nn;
  const double expo = an * t.c_k;
  t.diversity_order = 0.5 * expo;
  double log_c = std::lgamma(0.5 * (1.0 + expo)) + model.log_xi -
                 std::log(2.0 * std::sqrt(std::numbers::pi) * t.c_k) -
                 t.c_k * (model.log_omega + an * std::log(nn)) + expo * std::log(2.0 * nn);
  for (double c : t.c_j_list) log_c += std::lgamma(c - t.c_k);
  t.log_coefficient = log_c;
  return t;
}

double asymptotic_ber(const AsymptoticTerms& terms, const SNRConfig& snr) {
  if (!(snr.gamma_bar > 0.0)) throw ValidationError("SNR must be positive");
  return std::exp(terms.log_coefficient - terms.diversity_order * std::log(snr.gamma_bar));
}

double asymptotic_ber(const ProductModel& pm, int n, const SNRConfig& snr,
                      const AsymptoticOptions& opts) {
  return asymptotic_ber(asymptotic_terms(pm, n, opts), snr);
}

double diversity_order(std::span<const DoubleGGChannel> channels, int n) {
  if (n < 1 || static_cast<std::size_t>(n) != channels.size()) {
    throw ValidationError("channel count does not match N");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (const DoubleGGChannel& ch : channels) {
    lowest = std::min({lowest, ch.large_scale.m * ch.large_scale.gamma,
                       ch.small_scale.m * ch.small_scale.gamma});
  }
  return 0.5 * n * lowest;
}

std::optional<double> crossing_snr_db(std::span<const BERPoint> curve, double target) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const BERPoint& a = curve[i - 1];
    const BERPoint& b = curve[i];
    if (!(a.ber > 0.0 && b.ber > 0.0)) continue;
    if (a.ber >= target && b.ber <= target) {
      const double la = std::log10(a.ber);
      const double lb = std::log10(b.ber);
      if (la == lb) return a.snr_db;
      const double w = (la - std::log10(target)) / (la - lb);
      return a.snr_db + w * (b.snr_db - a.snr_db);
    }
  }
  return std::nullopt;
}

double bound_crossing_snr_db(const BoundTerms& terms, double target, double lo_db, double hi_db,
                             double rel_tol) {
  const double log_target = std::log(target);
  auto f = [&](double db) {
    return std::log(ber_upper_bound(terms, SNRConfig::from_db(db), rel_tol)) - log_target;
  };
  const double f_lo = f(lo_db);
  const double f_hi = f(hi_db);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    std::ostringstream os;
    os << "target BER " << target << " is not bracketed by [" << lo_db << ", " << hi_db
       << "] dB";
    throw NumericError(os.str());
  }
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo_db, hi_db, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(40), iters);
  return 0.5 * (a + b);
}

}  // namespace dgg
