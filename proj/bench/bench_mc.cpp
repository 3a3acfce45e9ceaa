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

// Serial reference against the OpenMP kernels, plus the closed-form bound.

#include <benchmark/benchmark.h>

#include <vector>

#include "dgg/ber.hpp"

namespace {

const std::vector<double> kSnr{10.0, 20.0, 30.0, 40.0, 50.0, 60.0};

dgg::MCConfig config(std::size_t n) {
  dgg::MCConfig c;
  c.n_samples = n;
  c.batch_size = 1 << 15;
  c.seed = 3;
  return c;
}

std::vector<dgg::DoubleGGChannel> channels(int n) {
  return std::vector<dgg::DoubleGGChannel>(static_cast<std::size_t>(n), dgg::preset("b"));
}

void BM_CurveSerial(benchmark::State& state) {
  const auto chans = channels(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgg::mc_ber_curve(chans, kSnr, config(1 << 20), dgg::Execution::kSerial));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}

void BM_CurveParallel(benchmark::State& state) {
  const auto chans = channels(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgg::mc_ber_curve(chans, kSnr, config(1 << 20), dgg::Execution::kParallel));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}

void BM_BitLevelSerial(benchmark::State& state) {
  const auto chans = channels(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dgg::mc_ber_bitlevel(chans, dgg::SNRConfig::from_db(20.0), config(1 << 20), dgg::Execution::kSerial));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}

void BM_BitLevelParallel(benchmark::State& state) {
  const auto chans = channels(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dgg::mc_ber_bitlevel(chans, dgg::SNRConfig::from_db(20.0), config(1 << 20), dgg::Execution::kParallel));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}

void BM_Bound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dgg::BoundTerms t = dgg::bound_terms(dgg::build_product_model(channels(n)), n);
  for (auto _ : state) {
    for (double s : kSnr) benchmark::DoNotOptimize(dgg::ber_upper_bound(t, dgg::SNRConfig::from_db(s)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kSnr.size()));
}

}  // namespace

BENCHMARK(BM_CurveSerial)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveParallel)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BitLevelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BitLevelParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bound)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
