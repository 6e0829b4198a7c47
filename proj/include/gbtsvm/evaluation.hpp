#ifndef GBTSVM_EVALUATION_HPP
#define GBTSVM_EVALUATION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/twin_model.hpp"

namespace gbt {

/// Percentage of positions where pred equals truth.
inline double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::dimension_mismatch, "accuracy: length mismatch");
  }
  if (pred.size() == 0) throw Error(ErrorKind::invalid_argument, "accuracy: empty input");
  return 100.0 * static_cast<double>((pred.array() == truth.array()).count()) /
         static_cast<double>(pred.size());
}

using Classifier = std::function<Eigen::VectorXi(const Eigen::MatrixXd&)>;
using Trainer = std::function<Classifier(const Dataset&)>;

/// Wraps a model-producing fit procedure as a Trainer.
inline Trainer model_trainer(std::function<TwinModel(const Dataset&)> fit) {
  return [fit = std::move(fit)](const Dataset& d) -> Classifier {
    auto model = std::make_shared<TwinModel>(fit(d));
    return [model](const Eigen::MatrixXd& x) { return predict_batch(*model, x); };
  };
}

/// Stratified fold assignment: a seeded shuffle, stably grouped by class and
/// dealt round-robin. Entry i is the fold of sample i.
inline std::vector<int> fold_assignment(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "kfold: k must be at least 2");
  if (k > d.n()) {
    throw Error(ErrorKind::invalid_argument, "kfold: k exceeds the sample count");
  }
  std::vector<Index> order = shuffled_indices(d.n(), seed);
  std::stable_partition(order.begin(), order.end(),
                        [&](Index i) { return d.labels(i) == 1; });
  std::vector<int> fold(static_cast<std::size_t>(d.n()));
  for (std::size_t r = 0; r < order.size(); ++r) {
    fold[static_cast<std::size_t>(order[r])] = static_cast<int>(r % static_cast<std::size_t>(k));
  }
  return fold;
}

struct CVResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};

/// Mean test accuracy over k stratified folds.
inline CVResult kfold_cv_detailed(const Dataset& train, int k, const Trainer& trainer,
                                  std::uint64_t seed) {
  const std::vector<int> fold = fold_assignment(train, k, seed);
  CVResult out;
  for (int f = 0; f < k; ++f) {
    std::vector<Index> in, held;
    for (Index i = 0; i < train.n(); ++i) {
      (fold[static_cast<std::size_t>(i)] == f ? held : in).push_back(i);
    }
    const Dataset tr = train.subset(in);
    const Dataset te = train.subset(held);
    if (!tr.has_both_classes()) {
      throw Error(ErrorKind::degenerate,
                  "kfold: fold " + std::to_string(f) + " leaves a single class for training");
    }
    const Classifier clf = trainer(tr);
    out.fold_accuracy.push_back(accuracy(clf(te.features), te.labels));
  }
  double s = 0.0;
  for (double a : out.fold_accuracy) s += a;
  out.mean_accuracy = s / static_cast<double>(k);
  return out;
}

inline double kfold_cv(const Dataset& train, int k, const Trainer& trainer, std::uint64_t seed) {
  return kfold_cv_detailed(train, k, trainer, seed).mean_accuracy;
}

/// One point of the hyperparameter lattice. Unused axes keep their
/// defaults and take no part in the search.
struct HyperCell {
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double d4 = 1.0;
  double sigma = 1.0;

  auto tuple() const { return std::make_tuple(d1, d2, d3, d4, sigma); }
  bool operator<(const HyperCell& o) const { return tuple() < o.tuple(); }
  bool operator==(const HyperCell& o) const { return tuple() == o.tuple(); }
};

inline std::vector<double> decades(int lo, int hi) {
  std::vector<double> v;
  for (int e = lo; e <= hi; ++e) v.push_back(std::pow(10.0, e));
  return v;
}

inline std::vector<double> powers_of_two(int lo, int hi) {
  std::vector<double> v;
  for (int e = lo; e <= hi; ++e) v.push_back(std::ldexp(1.0, e));
  return v;
}

struct GridSpec {
  std::vector<double> d_values = decades(-5, 5);    ///< d1, d2
  std::vector<double> d34_values;                   ///< d3, d4; empty = not searched
  std::vector<double> sigma_values;                 ///< empty = not searched
  bool tie_d12 = true;                              ///< search d1 = d2 only
  bool tie_d34 = true;                              ///< search d3 = d4 only

  /// Default lattice for a model family.
  static GridSpec defaults(bool ls, bool kernel) {
    GridSpec g;
    if (ls) g.d34_values = decades(-5, 5);
    if (kernel) g.sigma_values = powers_of_two(-5, 5);
    return g;
  }

  void validate() const {
    if (d_values.empty()) throw Error(ErrorKind::invalid_argument, "grid: empty d range");
  }

  /// Every cell, sorted lexicographically by (d1, d2, d3, d4, sigma).
  std::vector<HyperCell> cells() const {
    validate();
    const std::vector<double> one{1.0};
    const auto& d34 = d34_values.empty() ? one : d34_values;
    const auto& sig = sigma_values.empty() ? one : sigma_values;
    std::vector<HyperCell> out;
    for (double d1 : d_values) {
      for (double d2 : d_values) {
        if (tie_d12 && d2 != d1) continue;
        for (double d3 : d34) {
          for (double d4 : d34) {
            if (tie_d34 && d4 != d3) continue;
            for (double s : sig) out.push_back({d1, d2, d3, d4, s});
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct GridCellResult {
  HyperCell cell;
  std::optional<double> accuracy;  ///< empty when the cell failed
  std::string error;
};

struct GridResult {
  HyperCell best;
  double best_accuracy = 0.0;
  std::vector<GridCellResult> cells;  ///< in lattice order
};

/// Exhaustive k-fold search. The best cell maximizes CV accuracy; among
/// equals the lexicographically smallest tuple wins. Cells run on up to
/// `jobs` threads and are reduced in lattice order.
inline GridResult grid_search(const Dataset& train, const GridSpec& grid, int k,
                              const std::function<Trainer(const HyperCell&)>& family,
                              std::uint64_t seed, int jobs = 1) {
  const std::vector<HyperCell> cells = grid.cells();
  GridResult out;
  out.cells.resize(cells.size());
  std::vector<ErrorKind> kinds(cells.size(), ErrorKind::solver);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      GridCellResult& r = out.cells[c];
      r.cell = cells[c];
      try {
        r.accuracy = kfold_cv(train, k, family(cells[c]), seed);
      } catch (const Error& e) {
        r.error = e.what();
        kinds[c] = e.kind();
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  bool found = false;
  for (const auto& r : out.cells) {
    if (r.accuracy && (!found || *r.accuracy > out.best_accuracy)) {
      out.best = r.cell;
      out.best_accuracy = *r.accuracy;
      found = true;
    }
  }
  if (!found) {
    throw Error(kinds.front(), "grid search: every cell failed (first: " +
                                   out.cells.front().error + ")");
  }
  return out;
}

/// Accuracy table: rows are datasets, columns models, entries in [0, 100].
struct RankTable {
  Eigen::MatrixXd accuracies;
  std::vector<std::string> model_names;
  std::vector<std::string> dataset_names;

  Index datasets() const { return accuracies.rows(); }
  Index models() const { return accuracies.cols(); }

  void validate() const {
    if (accuracies.rows() < 2 || accuracies.cols() < 2) {
      throw Error(ErrorKind::invalid_argument, "rank table: need at least 2 datasets and 2 models");
    }
    if (!model_names.empty() && static_cast<Index>(model_names.size()) != models()) {
      throw Error(ErrorKind::dimension_mismatch, "rank table: model name count");
    }
    if (!dataset_names.empty() && static_cast<Index>(dataset_names.size()) != datasets()) {
      throw Error(ErrorKind::dimension_mismatch, "rank table: dataset name count");
    }
    if ((accuracies.array() < 0.0).any() || (accuracies.array() > 100.0).any() ||
        !accuracies.allFinite()) {
      throw Error(ErrorKind::invalid_argument, "rank table: accuracies must lie in [0, 100]");
    }
  }
};

/// Per-dataset ranks, 1 = highest accuracy, ties share the mean position.
inline Eigen::MatrixXd dataset_ranks(const RankTable& t) {
  t.validate();
  const Index q = t.models();
  Eigen::MatrixXd ranks(t.datasets(), q);
  std::vector<Index> order(static_cast<std::size_t>(q));
  for (Index r = 0; r < t.datasets(); ++r) {
    for (Index j = 0; j < q; ++j) order[static_cast<std::size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return t.accuracies(r, a) > t.accuracies(r, b);
    });
    for (Index s = 0; s < q;) {
      Index e = s;
      while (e + 1 < q && t.accuracies(r, order[e + 1]) == t.accuracies(r, order[s])) ++e;
      const double mid = 0.5 * static_cast<double>(s + e) + 1.0;
      for (Index u = s; u <= e; ++u) ranks(r, order[u]) = mid;
      s = e + 1;
    }
  }
  return ranks;
}

inline Eigen::VectorXd average_ranks(const RankTable& t) {
  return dataset_ranks(t).colwise().mean().transpose();
}

struct FriedmanResult {
  double chi2 = 0.0;
  double ff = 0.0;
};

/// chi2_F = 12N / (q(q+1)) [sum R_j^2 - q(q+1)^2 / 4].
inline double friedman_chi2(const Eigen::VectorXd& avg_ranks, int n, int q) {
  if (n < 2 || q < 2) throw Error(ErrorKind::invalid_argument, "friedman: N and q must be >= 2");
  if (avg_ranks.size() != q) {
    throw Error(ErrorKind::dimension_mismatch, "friedman: rank vector length differs from q");
  }
  const double nn = n;
  const double qq = q;
  return 12.0 * nn / (qq * (qq + 1.0)) *
         (avg_ranks.squaredNorm() - qq * (qq + 1.0) * (qq + 1.0) / 4.0);
}

/// chi2_F and F_F = (N-1) chi2_F / (N(q-1) - chi2_F). Throws when the
/// denominator vanishes (every dataset ranks the models identically).
inline FriedmanResult friedman(const Eigen::VectorXd& avg_ranks, int n, int q) {
  FriedmanResult r;
  r.chi2 = friedman_chi2(avg_ranks, n, q);
  const double denom = static_cast<double>(n) * (q - 1) - r.chi2;
  if (denom == 0.0) {
    throw Error(ErrorKind::degenerate, "friedman: F_F denominator is zero");
  }
  r.ff = (n - 1.0) * r.chi2 / denom;
  return r;
}

/// Two-tailed Nemenyi critical values at alpha = 0.05 for q = 2..10 models.
inline double nemenyi_q_alpha(int q) {
  static const std::map<int, double> table{{2, 1.960}, {3, 2.343}, {4, 2.569},
                                           {5, 2.728}, {6, 2.850}, {7, 2.949},
                                           {8, 3.031}, {9, 3.102}, {10, 3.164}};
  const auto it = table.find(q);
  if (it == table.end()) {
    throw Error(ErrorKind::unsupported, "nemenyi: no tabulated q_alpha for q = " + std::to_string(q));
  }
  return it->second;
}

/// CD = q_alpha sqrt(q(q+1) / (6N)).
inline double nemenyi_cd(int q, int n, double q_alpha) {
  if (q <= 0 || n <= 0 || q_alpha < 0.0) {
    throw Error(ErrorKind::invalid_argument, "nemenyi: q and N must be positive");
  }
  return q_alpha * std::sqrt(static_cast<double>(q) * (q + 1) / (6.0 * n));
}

/// N/2 + 1.96 sqrt(N) / 2.
inline double wtl_threshold(int n) {
  return 0.5 * n + 1.96 * std::sqrt(static_cast<double>(n)) / 2.0;
}

struct WinTieLoss {
  /// raw[a][b] = {wins, ties, losses} of model a against model b.
  std::vector<std::vector<std::array<int, 3>>> raw;
  /// Wins after tie redistribution: an odd tie count drops one tie, the
  /// rest are split evenly between both models.
  Eigen::MatrixXd adjusted_wins;
  double threshold = 0.0;

  bool significant(Index a, Index b) const { return adjusted_wins(a, b) >= threshold; }
};

inline WinTieLoss win_tie_loss(const RankTable& t) {
  t.validate();
  const Index q = t.models();
  WinTieLoss out;
  out.raw.assign(static_cast<std::size_t>(q),
                 std::vector<std::array<int, 3>>(static_cast<std::size_t>(q), {0, 0, 0}));
  out.adjusted_wins = Eigen::MatrixXd::Zero(q, q);
  for (Index a = 0; a < q; ++a) {
    for (Index b = 0; b < q; ++b) {
      if (a == b) continue;
      auto& cell = out.raw[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      for (Index r = 0; r < t.datasets(); ++r) {
        const double x = t.accuracies(r, a);
        const double y = t.accuracies(r, b);
        ++cell[x > y ? 0 : (x == y ? 1 : 2)];
      }
      const int ties = cell[1] - (cell[1] % 2);
      out.adjusted_wins(a, b) = cell[0] + ties / 2;
    }
  }
  out.threshold = wtl_threshold(static_cast<int>(t.datasets()));
  return out;
}

/// Everything the benchmark reports about a table.
struct StatsReport {
  Eigen::VectorXd avg_ranks;
  FriedmanResult friedman;
  double cd = 0.0;
  double q_alpha = 0.0;
  WinTieLoss wtl;
};

inline StatsReport compute_stats(const RankTable& t) {
  StatsReport s;
  s.avg_ranks = average_ranks(t);
  const int n = static_cast<int>(t.datasets());
  const int q = static_cast<int>(t.models());
  s.friedman = friedman(s.avg_ranks, n, q);
  s.q_alpha = nemenyi_q_alpha(q);
  s.cd = nemenyi_cd(q, n, s.q_alpha);
  s.wtl = win_tie_loss(t);
  return s;
}

}  // namespace gbt

#endif  // GBTSVM_EVALUATION_HPP
