#ifndef GBTSVM_PIPELINE_HPP
#define GBTSVM_PIPELINE_HPP

// End-to-end training (granulate, then fit) and the benchmark protocol:
// datasets x noise levels x models, each cell a seeded 70:30 split with
// optional k-fold grid search on the training part.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/evaluation.hpp"
#include "gbtsvm/gbtsvm.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/lsgbtsvm.hpp"
#include "gbtsvm/twin_model.hpp"

namespace gbt {

enum class ModelKind {
  gbtsvm,
  lsgbtsvm,
  tsvm,  ///< point-based twin SVM baseline, no granulation
};

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::gbtsvm: return "gbtsvm";
    case ModelKind::lsgbtsvm: return "lsgbtsvm";
    case ModelKind::tsvm: return "tsvm";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "gbtsvm") return ModelKind::gbtsvm;
  if (s == "lsgbtsvm") return ModelKind::lsgbtsvm;
  if (s == "tsvm") return ModelKind::tsvm;
  throw Error(ErrorKind::invalid_argument, "unknown model '" + std::string(s) + "'");
}

struct PipelineConfig {
  ModelKind model = ModelKind::gbtsvm;
  KernelKind kernel = KernelKind::linear;
  HyperCell cell;  ///< d1..d4 and sigma
  double delta = 1e-6;
  GranulationConfig granulation;
  SolverConfig solver;
  LSSolverKind ls_solver = LSSolverKind::generic;

  GBTSVMHyper gbtsvm_hyper() const {
    GBTSVMHyper h;
    h.d1 = cell.d1;
    h.d2 = cell.d2;
    h.delta = delta;
    h.solver = solver;
    h.kernel = kernel == KernelKind::linear ? KernelSpec::linear() : KernelSpec::gaussian(cell.sigma);
    return h;
  }

  LSHyper ls_hyper() const {
    LSHyper h;
    h.d1 = cell.d1;
    h.d2 = cell.d2;
    h.d3 = cell.d3;
    h.d4 = cell.d4;
    h.solver = solver;
    h.kernel = kernel == KernelKind::linear ? KernelSpec::linear() : KernelSpec::gaussian(cell.sigma);
    h.solver_kind = ls_solver;
    h.seed = granulation.seed;
    return h;
  }
};

/// Fits on balls already generated from `train`.
inline TwinModel fit_on_balls(const GranulationResult& balls, const PipelineConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::gbtsvm: return fit_gbtsvm(balls, cfg.gbtsvm_hyper());
    case ModelKind::lsgbtsvm: return fit_ls(balls, cfg.ls_hyper());
    case ModelKind::tsvm: break;
  }
  throw Error(ErrorKind::invalid_argument, "tsvm is trained on samples, not balls");
}

inline TwinModel fit_pipeline(const Dataset& train, const PipelineConfig& cfg) {
  train.require_trainable(to_string(cfg.model));
  TwinModel m = cfg.model == ModelKind::tsvm
                    ? fit_tsvm(train, cfg.gbtsvm_hyper())
                    : fit_on_balls(granulate(train, cfg.granulation), cfg);
  m.label_map = train.label_map;
  return m;
}

/// Grid family: every cell reuses `base` with d1..d4, sigma replaced.
inline std::function<Trainer(const HyperCell&)> pipeline_family(const PipelineConfig& base) {
  return [base](const HyperCell& cell) {
    PipelineConfig cfg = base;
    cfg.cell = cell;
    return model_trainer([cfg](const Dataset& d) { return fit_pipeline(d, cfg); });
  };
}

/// Small default lattice used by the benchmark: coarser than the full
/// decade grid so that a whole table runs in minutes.
inline GridSpec compact_grid(ModelKind model, KernelKind kernel) {
  GridSpec g;
  g.d_values = decades(-4, 2);
  if (model == ModelKind::lsgbtsvm) g.d34_values = decades(-5, 0);
  if (kernel == KernelKind::gaussian) g.sigma_values = powers_of_two(-3, 3);
  return g;
}

struct TunedFit {
  TwinModel model;
  HyperCell cell;
  double cv_accuracy = 0.0;
  bool tuned = false;
};

/// Grid search on `train` (when `grid` is given) followed by a refit with
/// the best cell.
inline TunedFit fit_tuned(const Dataset& train, const PipelineConfig& base,
                          const GridSpec* grid, int folds, std::uint64_t seed, int jobs = 1) {
  TunedFit out;
  PipelineConfig cfg = base;
  if (grid) {
    const GridResult g = grid_search(train, *grid, folds, pipeline_family(base), seed, jobs);
    cfg.cell = g.best;
    out.cv_accuracy = g.best_accuracy;
    out.tuned = true;
  }
  out.cell = cfg.cell;
  out.model = fit_pipeline(train, cfg);
  return out;
}

struct BenchmarkModel {
  std::string name;
  PipelineConfig config;
};

struct BenchmarkDataset {
  std::string name;
  Dataset data;
};

struct BenchmarkProtocol {
  std::vector<double> noise_levels{0.0};
  double train_fraction = 0.7;
  int folds = 5;
  bool tune = true;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Test accuracy for every (dataset, noise level) row and model column.
/// Label noise is applied to the training part only. A model that fails on
/// a row scores 0 there; its error text is kept in `failures`.
struct BenchmarkResult {
  RankTable table;
  std::vector<std::string> failures;
};

inline BenchmarkResult run_benchmark(const std::vector<BenchmarkDataset>& datasets,
                                     const std::vector<BenchmarkModel>& models,
                                     const BenchmarkProtocol& proto) {
  BenchmarkResult out;
  RankTable& t = out.table;
  for (const auto& m : models) t.model_names.push_back(m.name);
  const Index rows = static_cast<Index>(datasets.size() * proto.noise_levels.size());
  t.accuracies = Eigen::MatrixXd::Zero(rows, static_cast<Index>(models.size()));
  Index r = 0;
  for (const auto& ds : datasets) {
    // Min-max bounds come from the training part only.
    const auto [raw_train, raw_test] = train_test_split(ds.data, proto.train_fraction, proto.seed);
    const auto [train_clean, record] = minmax_normalize(raw_train);
    const Dataset test = record.apply(raw_test);
    for (double noise : proto.noise_levels) {
      t.dataset_names.push_back(ds.name + "@" + detail::format_double(noise));
      const Dataset train = inject_label_noise(train_clean, {noise, proto.seed + 1});
      for (std::size_t c = 0; c < models.size(); ++c) {
        const PipelineConfig& cfg = models[c].config;
        try {
          const GridSpec grid = compact_grid(cfg.model, cfg.kernel);
          const TunedFit fit =
              fit_tuned(train, cfg, proto.tune ? &grid : nullptr, proto.folds, proto.seed, proto.jobs);
          t.accuracies(r, static_cast<Index>(c)) =
              accuracy(predict_batch(fit.model, test.features), test.labels);
        } catch (const Error& e) {
          out.failures.push_back(t.dataset_names.back() + " / " + models[c].name + ": " + e.what());
        }
      }
      ++r;
    }
  }
  return out;
}

}  // namespace gbt

#endif  // GBTSVM_PIPELINE_HPP
