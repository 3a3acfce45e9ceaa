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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "dgg/errors.hpp"
#include "dgg/log_gamma.hpp"
#include "dgg/special_numerics.hpp"
#include "oracles.hpp"

using namespace dgg;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// G^{2,0}_{1,2}[x | 1; 0, 1/2] = sqrt(pi) erfc(sqrt(x))
MeijerGSpec erfc_spec(double x) { return MeijerGSpec::with_argument({}, {1.0}, {0.0, 0.5}, {}, x); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("erfc against series and continued-fraction oracle") {
  CHECK(dgg::erfc(0.0) == 1.0);
  CHECK(dgg::erfc(1.0) == doctest::Approx(0.157299207050285).epsilon(1e-14));
  for (double x : {-3.0, -0.7, 0.01, 0.3, 1.0, 1.9, 2.1, 4.0, 8.0, 20.0}) {
    CHECK(rel(dgg::erfc(x), oracle::series_erfc(x)) < 1e-13);
  }
  for (double x : {0.2, 1.0, 3.5}) CHECK(dgg::erfc(-x) == doctest::Approx(2.0 - dgg::erfc(x)));
  double prev = 2.0;
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    CHECK(dgg::erfc(x) < prev);
    prev = dgg::erfc(x);
  }
}

TEST_CASE("erfc Meijer G identity on a log grid over [1e-3, 10]") {
  for (int i = 0; i <= 40; ++i) {
    const double x = std::pow(10.0, -3.0 + 4.0 * i / 40.0);
    const double g = meijer_g(erfc_spec(x), 1e-12) / kSqrtPi;
    CHECK(std::abs(g - oracle::series_erfc(std::sqrt(x))) <= 1e-10);
  }
}

TEST_CASE("erfc Meijer G examples") {
  CHECK(meijer_g(erfc_spec(1.0)) == doctest::Approx(0.278806).epsilon(1e-6));
  CHECK(meijer_g(erfc_spec(1e-14)) == doctest::Approx(kSqrtPi).epsilon(1e-6));
}

TEST_CASE("Meijer G closed forms") {
  // G^{1,0}_{0,1}[x | b] = x^b e^{-x}
  for (double x : {0.05, 1.0, 7.0}) {
    const double g = meijer_g(MeijerGSpec::with_argument({}, {}, {0.3}, {}, x));
    CHECK(rel(g, std::pow(x, 0.3) * std::exp(-x)) < 1e-8);
  }
  // G^{1,1}_{1,1}[x | a; b] = Gamma(1 - a + b) x^b (1 + x)^(a - b - 1)
  for (double x : {0.1, 2.0, 30.0}) {
    const double a = 0.4, b = 0.7;
    const double g = meijer_g(MeijerGSpec::with_argument({a}, {}, {b}, {}, x));
    CHECK(rel(g, std::tgamma(1 - a + b) * std::pow(x, b) * std::pow(1 + x, a - b - 1)) < 1e-8);
  }
  // G^{2,0}_{0,2}[x | a, b] = 2 x^((a+b)/2) K_{a-b}(2 sqrt(x))
  for (double x : {1e-3, 0.5, 1.0, 9.0, 60.0}) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.65, 0.85}, std::pair{0.5, 1.8}}) {
      const double g = meijer_g(MeijerGSpec::with_argument({}, {}, {a, b}, {}, x));
      const double ref = 2.0 * std::pow(x, 0.5 * (a + b)) * std::cyl_bessel_k(std::abs(a - b), 2.0 * std::sqrt(x));
      CHECK(rel(g, ref) < 1e-8);
    }
  }
}

TEST_CASE("Meijer G order reduction by Gauss multiplication") {
  // G^{k,0}_{0,k}[x | D(k; m)] = (2 pi)^((k-1)/2) k^(-1/2) exp(-k x^(1/k)) x^(m/k)
  for (int k : {2, 5, 17}) {
    const double m = 1.3;
    for (double x : {1e-4, 0.3, 20.0}) {
      const double g = meijer_g(MeijerGSpec::with_argument({}, {}, delta_seq(k, m), {}, x));
      const double ref = std::pow(2.0 * std::numbers::pi, 0.5 * (k - 1)) * std::pow(k, -0.5) *
                         std::exp(-k * std::pow(x, 1.0 / k)) * std::pow(x, m / k);
      CHECK(rel(g, ref) < 1e-8);
    }
  }
}

TEST_CASE("Meijer G is deterministic and reports diagnostics") {
  const MeijerGSpec spec = MeijerGSpec::with_argument({1.0}, {}, delta_seq(7, 0.5), {0.0}, 0.8);
  const MeijerGReport a = meijer_g_report(spec);
  const MeijerGReport b = meijer_g_report(spec);
  CHECK(a.value.mantissa == b.value.mantissa);
  CHECK(a.value.log_scale == b.value.log_scale);
  CHECK(a.nodes > 0);
  CHECK(a.contour_abscissa > 0.0);
}

TEST_CASE("Meijer G rejects malformed specs") {
  const MeijerGSpec ok = erfc_spec(1.0);
  CHECK_THROWS_AS(meijer_g(ok, 0.0), ValidationError);
  CHECK_THROWS_AS(meijer_g(ok, 1e-3), ValidationError);
  // m + n must exceed (p + q) / 2.
  CHECK_THROWS_AS(meijer_g(MeijerGSpec::with_argument({}, {}, {1.0}, {0.5, 0.2}, 1.0)), ValidationError);
  // No contour separates the poles when a_top - 1 >= b_top.
  CHECK_THROWS_AS(meijer_g(MeijerGSpec::with_argument({2.5}, {}, {1.0}, {}, 1.0)), ValidationError);
  CHECK_THROWS_WITH_AS(meijer_g(MeijerGSpec::with_argument({}, {}, {NAN}, {}, 1.0)),
                       doctest::Contains("malformed spec"), ValidationError);
}

TEST_CASE("complex log gamma") {
  for (double x : {0.1, 0.5, 1.0, 3.7, 25.0, 171.0, -0.5, -2.3}) {
    CHECK(dgg::log_gamma(std::complex<double>(x, 0.0)).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
  // Gamma(z + 1) = z Gamma(z) for complex z, compared modulo 2 pi i.
  for (std::complex<double> z : {std::complex{0.3, 2.0}, std::complex{-4.2, 0.7}, std::complex{12.0, -30.0}}) {
    const std::complex<double> d = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
    CHECK(std::abs(d.real()) < 1e-12);
    const double turns = d.imag() / (2.0 * std::numbers::pi);
    CHECK(std::abs(turns - std::round(turns)) < 1e-12);
  }
}

TEST_CASE("delta_seq") {
  CHECK(delta_seq(1, 2.35) == std::vector<double>{2.35});
  CHECK(delta_seq(2, 1.0) == std::vector<double>{0.5, 1.0});
  const auto d = delta_seq(3, 0.55);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == doctest::Approx(0.183333333333));
  CHECK(d[1] == doctest::Approx(0.516666666667));
  CHECK(d[2] == doctest::Approx(0.85));
  const auto e = delta_seq(17, 0.5);
  CHECK(e.front() == doctest::Approx(0.5 / 17));
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] - e[i - 1] == doctest::Approx(1.0 / 17));
  CHECK_THROWS_WITH_AS(delta_seq(0, 1.0), doctest::Contains("invalid order"), ValidationError);
}

TEST_CASE("rationalize examples") {
  const RationalExponent two = rationalize(2.0, 10, 1e-3);
  CHECK(two.num == 2);
  CHECK(two.den == 1);
  CHECK(two.rel_error == 0.0);

  const RationalExponent a = rationalize(2.1690 / 0.8530, 11, 5e-3);
  CHECK(a.num == 28);
  CHECK(a.den == 11);
  CHECK(a.rel_error == doctest::Approx(1.0e-3).epsilon(0.05));

  CHECK_THROWS_WITH_AS(rationalize(std::numbers::pi, 1, 1e-6),
                       doctest::Contains("rationalization failed; increase max_den or rel_tol"),
                       ValidationError);
}

TEST_CASE("rationalize matches exhaustive search over denominators") {
  for (double x : {0.7638, 2.1690 / 0.8530, 1.8621 / 0.7638, 0.9135 / 1.4385, 0.4205 / 0.6643,
                   std::numbers::e, 0.0731}) {
    // Closest fraction with den <= 25, ties to the smaller denominator.
    std::int64_t bn = 0, bd = 1;
    double best = INFINITY;
    for (std::int64_t d = 1; d <= 25; ++d) {
      for (std::int64_t n : {static_cast<std::int64_t>(std::floor(x * d)), static_cast<std::int64_t>(std::ceil(x * d))}) {
        if (n < 1) continue;
        const double err = std::abs(static_cast<double>(n) / d - x);
        if (err < best - 1e-15) {
          best = err;
          bn = n / std::gcd(n, d);
          bd = d / std::gcd(n, d);
        }
      }
    }
    const RationalExponent r = rationalize(x, 25, 1.0);
    CHECK(r.num == bn);
    CHECK(r.den == bd);
  }
}

TEST_CASE("rationalize is idempotent on representable rationals") {
  for (auto [n, d] : {std::pair{17, 7}, std::pair{7, 11}, std::pair{28, 11}, std::pair{3, 25}, std::pair{1, 1}}) {
    const RationalExponent r = rationalize(static_cast<double>(n) / d, 25, 1e-12);
    CHECK(r.num == n);
    CHECK(r.den == d);
    const RationalExponent s = rationalize(r.value(), 25, 1e-12);
    CHECK(s.num == r.num);
    CHECK(s.den == r.den);
  }
}

TEST_CASE("rationalize simplest policy returns the first adequate convergent") {
  // 1.8621 / 0.7638 = [2; 2, 3, 1, 1, ...]: convergents 2, 5/2, 17/7, 22/9, ...
  const RationalExponent r = rationalize(1.8621 / 0.7638, 25, 5e-3, RationalizePolicy::kSimplest);
  CHECK(r.num == 17);
  CHECK(r.den == 7);
}
