#include <benchmark/benchmark.h>

#include "csimrec/bench.hpp"
#include "csimrec/metrics.hpp"
#include "csimrec/solver1d.hpp"
#include "csimrec/solver2d.hpp"
#include "csimrec/transforms.hpp"

namespace {

using namespace csimrec;

Eigen::VectorXd noise(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 128.0 + 40.0 * rng.normal();
  return v;
}

Eigen::MatrixXd smooth_image(int side) {
  Eigen::MatrixXd img(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      img(r, c) = 128.0 + 60.0 * std::sin(0.05 * r) * std::cos(0.08 * c) + 0.2 * (r - c);
  return img;
}

void BM_CsimQuad(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const Eigen::VectorXd x = noise(rng, n);
  const Eigen::VectorXd y = noise(rng, n);
  const CsimParams p = csim_weights(n, n - 1.0, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(csim_quad(x, y, p));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CsimQuad)->Arg(64)->Arg(65536);

void BM_ApplyW(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const Eigen::VectorXd x = noise(rng, n);
  const CsimParams p = csim_weights(n, n - 1.0, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_w(x, p));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ApplyW)->Arg(64)->Arg(65536);

void BM_Dct2dForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Dct2d t(side, side);
  const Eigen::MatrixXd x = smooth_image(side);
  for (auto _ : state) benchmark::DoNotOptimize(t.forward(x));
}
BENCHMARK(BM_Dct2dForward)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RecoverPatch(benchmark::State& state) {
  const double sr = static_cast<double>(state.range(0)) / 10.0;
  const Dictionary d = build_overcomplete_dct(64, 128);
  Rng rng(3);
  const Eigen::VectorXd truth = noise(rng, 64);
  const SamplingMask1D mask = random_mask(64, sr, rng);
  const Eigen::VectorXd y = mask.gather(truth);
  SolverConfig1D cfg = SolverConfig1D::defaults_for(sr);
  cfg.center = true;
  for (auto _ : state) benchmark::DoNotOptimize(recover_patch(y, mask, d, cfg));
}
BENCHMARK(BM_RecoverPatch)->Arg(1)->Arg(5)->Arg(9)->Unit(benchmark::kMicrosecond);

void BM_Inpaint(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Eigen::MatrixXd truth = smooth_image(side);
  Rng rng(4);
  const Mask2D mask = random_mask_2d(side, side, 0.3, rng);
  const Eigen::MatrixXd y = mask.apply(truth);
  const SolverConfig2D cfg = SolverConfig2D::defaults_for(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(inpaint(y, mask, cfg));
}
BENCHMARK(BM_Inpaint)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
