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
#include <complex>
#include <numbers>

namespace dgg {

namespace detail {

// log(sin(pi z)) modulo 2*pi*i, stable for large |Im z|.
template <class T>
std::complex<T> log_sin_pi(std::complex<T> z) {
  using C = std::complex<T>;
  const C w = std::numbers::pi_v<T> * z;
  if (std::abs(w.imag()) < T(20)) return std::log(std::sin(w));
  const C i(0, 1);
  if (w.imag() > 0) {
    // sin w = e^{-iw} (1 - e^{2iw}) * (i/2)
    return -i * w + std::log(C(1) - std::exp(T(2) * i * w)) + std::log(C(0, T(0.5)));
  }
  // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
  return i * w + std::log(C(1) - std::exp(T(-2) * i * w)) - std::log(C(0, T(2)));
}

}  // namespace detail

/// Complex log-gamma, correct modulo 2*pi*i.
///
/// Only exp(log_gamma(z)) is meaningful to callers: the imaginary part is not
/// continued along any branch. Shifts |z| >= 10 then applies the Stirling
/// series (9 Bernoulli terms, truncation below 1e-19 there); reflection for
/// Re z < 1/2.
template <class T>
std::complex<T> log_gamma(std::complex<T> z) {
  using C = std::complex<T>;
  if (z.real() < T(0.5)) {
    return std::log(std::numbers::pi_v<T>) - detail::log_sin_pi(z) - log_gamma(C(1) - z);
  }
  C shift(1);
  while (std::norm(z) < T(100)) {
    shift *= z;
    z += T(1);
  }
  // B_{2k} / (2k (2k-1))
  static constexpr T kStirling[] = {
      T(1) / T(12),          T(-1) / T(360),      T(1) / T(1260),
      T(-1) / T(1680),       T(1) / T(1188),      T(-691) / T(360360),
      T(1) / T(156),         T(-3617) / T(122400), T(43867) / T(244188)};
  const C inv = C(1) / z;
  const C inv2 = inv * inv;
  C series(0);
  C pw = inv;
  for (T coeff : kStirling) {
    series += coeff * pw;
    pw *= inv2;
  }
  const T half_log_two_pi = T(0.5) * std::log(T(2) * std::numbers::pi_v<T>);
  return (z - T(0.5)) * std::log(z) - z + half_log_two_pi + series - std::log(shift);
}

}  // namespace dgg
