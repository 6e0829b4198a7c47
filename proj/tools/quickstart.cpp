// Granulate a synthetic dataset, fit both twin classifiers and report
// test accuracy.

#include <cstdio>

#include "gbtsvm/all.hpp"

int main() {
  gbt::SynthSpec spec;
  spec.kind = gbt::SynthKind::crossplane;
  spec.n = 400;
  spec.seed = 7;
  const gbt::Dataset data = gbt::generate_synthetic(spec);

  const auto [raw_train, raw_test] = gbt::train_test_split(data, 0.7, 7);
  const auto [train, scale] = gbt::minmax_normalize(raw_train);
  const gbt::Dataset test = scale.apply(raw_test);

  gbt::GranulationConfig gc;
  gc.purity_threshold = 0.95;
  gc.seed = 7;
  const gbt::GranulationResult balls = gbt::granulate(train, gc);
  std::printf("%ld samples -> %ld balls\n", static_cast<long>(train.n()),
              static_cast<long>(balls.size()));

  gbt::GBTSVMHyper h;
  h.d1 = h.d2 = 0.01;
  h.solver.max_sweeps = 200000;
  const gbt::TwinModel gb = gbt::fit_linear(balls, h);

  gbt::LSHyper lh;
  lh.d1 = lh.d2 = 1e-4;
  lh.d3 = lh.d4 = 1e-5;
  lh.solver.max_sweeps = 200000;
  const gbt::TwinModel ls = gbt::fit_ls(balls, lh);

  std::printf("GBTSVM    test accuracy %.2f%%\n",
              gbt::accuracy(gbt::predict_batch(gb, test.features), test.labels));
  std::printf("LS-GBTSVM test accuracy %.2f%%\n",
              gbt::accuracy(gbt::predict_batch(ls, test.features), test.labels));
  return 0;
}
