#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tfsieve/kernels.hpp"

using namespace tfsieve;

namespace {

std::vector<cplx> random_cplx(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Default grids: 513 time samples at 1/32, 193 x 193 phase cells at 1/16.
kernels::StftLayout default_layout() {
  kernels::StftLayout L;
  L.nt = 513;
  L.t0 = -8.0;
  L.dt = 1.0 / 32;
  L.nx = 193;
  for (int i = 0; i < L.nx; ++i) L.shift.push_back(2L * (i - 96));
  L.nxi = 193;
  L.xi0 = -6.0;
  L.dxi = 1.0 / 16;
  L.fft_len = 512;
  return L;
}

void threads_arg(benchmark::State& state) { kernels::set_threads(static_cast<int>(state.range(0))); }

void BM_StftSerial(benchmark::State& state) {
  const auto L = default_layout();
  const auto f = random_cplx(L.nt, 1), g = random_cplx(L.nt, 2);
  std::vector<cplx> out(static_cast<std::size_t>(L.nx) * L.nxi);
  for (auto _ : state) {
    kernels::serial::stft_direct(L, f.data(), g.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_StftDirectParallel(benchmark::State& state) {
  threads_arg(state);
  const auto L = default_layout();
  const auto f = random_cplx(L.nt, 1), g = random_cplx(L.nt, 2);
  std::vector<cplx> out(static_cast<std::size_t>(L.nx) * L.nxi);
  for (auto _ : state) {
    kernels::parallel::stft_direct(L, f.data(), g.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_StftFft(benchmark::State& state) {
  threads_arg(state);
  const auto L = default_layout();
  const auto f = random_cplx(L.nt, 1), g = random_cplx(L.nt, 2);
  std::vector<cplx> out(static_cast<std::size_t>(L.nx) * L.nxi);
  for (auto _ : state) {
    kernels::parallel::stft_fft(L, f.data(), g.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

constexpr int kImage = 772;  // default grid refined four times

void BM_CorrelateSerial(benchmark::State& state) {
  const int half = static_cast<int>(state.range(0));
  const auto img = random_real(kImage * kImage, 3), st = random_real((2 * half + 1) * (2 * half + 1), 4);
  std::vector<double> out(img.size());
  for (auto _ : state) {
    kernels::serial::correlate_direct(img.data(), kImage, kImage, st.data(), half, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CorrelateParallel(benchmark::State& state) {
  kernels::set_threads(static_cast<int>(state.range(1)));
  const int half = static_cast<int>(state.range(0));
  const auto img = random_real(kImage * kImage, 3), st = random_real((2 * half + 1) * (2 * half + 1), 4);
  std::vector<double> out(img.size());
  for (auto _ : state) {
    kernels::parallel::correlate_direct(img.data(), kImage, kImage, st.data(), half, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CorrelateFft(benchmark::State& state) {
  const int half = static_cast<int>(state.range(0));
  const auto img = random_real(kImage * kImage, 3), st = random_real((2 * half + 1) * (2 * half + 1), 4);
  std::vector<double> out(img.size());
  for (auto _ : state) {
    kernels::correlate_fft(img.data(), kImage, kImage, st.data(), half, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

constexpr std::size_t kRows = 193 * 193;
constexpr int kCols = 25;

void BM_GramSerial(benchmark::State& state) {
  const auto A = random_cplx(kRows * kCols, 5);
  const auto w = random_real(kRows, 6);
  std::vector<cplx> out(kCols * kCols);
  for (auto _ : state) {
    kernels::serial::gram(A.data(), kRows, kCols, w.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_GramParallel(benchmark::State& state) {
  threads_arg(state);
  const auto A = random_cplx(kRows * kCols, 5);
  const auto w = random_real(kRows, 6);
  std::vector<cplx> out(kCols * kCols);
  for (auto _ : state) {
    kernels::parallel::gram(A.data(), kRows, kCols, w.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_StftSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StftDirectParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StftFft)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorrelateSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorrelateParallel)->Args({4, 1})->Args({4, 4})->Args({16, 1})->Args({16, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorrelateFft)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GramSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GramParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
