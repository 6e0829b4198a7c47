#ifndef GBTSVM_GRANULATION_HPP
#define GBTSVM_GRANULATION_HPP

// Granular-ball generation: the training set starts as one ball; any ball
// whose purity is below the threshold is split by 2-means until every ball
// is pure enough (or a singleton).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"

namespace gbt {

struct GranularBall {
  Eigen::VectorXd center;  ///< mean of the members
  double radius = 0.0;     ///< mean Euclidean distance of members to center
  int label = 1;           ///< majority label, ties -> +1
  Index count = 0;
  double purity = 1.0;
};

struct GranulationConfig {
  double purity_threshold = 1.0;  ///< T in (0.5, 1]
  Index min_balls = 2;            ///< num: lower bound on the ball count
  Index max_iterations = 1'000'000;  ///< cap on the number of splits
  std::uint64_t seed = 0;

  void validate() const {
    if (!(purity_threshold > 0.5 && purity_threshold <= 1.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "granulate: purity threshold must lie in (0.5, 1]");
    }
    if (min_balls < 2) {
      throw Error(ErrorKind::invalid_argument, "granulate: min_balls must be >= 2");
    }
  }
};

struct GranulationResult {
  std::vector<GranularBall> balls;
  Index iterations = 0;  ///< splits performed
  std::vector<std::vector<Index>> membership;  ///< sample indices per ball
  /// Total members of the balls split at each depth of the split tree.
  std::vector<Index> split_work_per_level;

  Index size() const { return static_cast<Index>(balls.size()); }

  Index count(int label) const {
    return static_cast<Index>(std::count_if(
        balls.begin(), balls.end(), [&](const auto& b) { return b.label == label; }));
  }

  /// Centers of the balls with this label, stacked as rows in ball order.
  Eigen::MatrixXd centers(int label) const {
    const Index m = balls.empty() ? 0 : balls.front().center.size();
    Eigen::MatrixXd c(count(label), m);
    Index r = 0;
    for (const auto& b : balls) {
      if (b.label == label) c.row(r++) = b.center.transpose();
    }
    return c;
  }

  Eigen::VectorXd radii(int label) const {
    Eigen::VectorXd r(count(label));
    Index i = 0;
    for (const auto& b : balls) {
      if (b.label == label) r(i++) = b.radius;
    }
    return r;
  }
};

/// Share of the majority label.
inline double purity(const Eigen::Ref<const Eigen::VectorXi>& labels) {
  if (labels.size() == 0) {
    throw Error(ErrorKind::invalid_argument, "purity: empty label set");
  }
  const auto pos = static_cast<double>((labels.array() == 1).count());
  const auto total = static_cast<double>(labels.size());
  return std::max(pos, total - pos) / total;
}

namespace detail {

inline double purity_of(const Eigen::VectorXi& labels,
                        const std::vector<Index>& members) {
  Index pos = 0;
  for (const Index i : members) pos += labels(i) == 1 ? 1 : 0;
  const auto total = static_cast<double>(members.size());
  return std::max(static_cast<double>(pos), total - static_cast<double>(pos)) / total;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Member farthest from `from`; ties go to the earliest member.
inline std::size_t farthest_from(const Eigen::MatrixXd& x,
                                 const std::vector<Index>& members,
                                 const Eigen::VectorXd& from) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    const double d = (x.row(members[a]).transpose() - from).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

/// Subsets up to this size get an exact O(k^2) farthest-pair search.
inline constexpr std::size_t kExactFarthestPairLimit = 1024;

/// Initial centroids for 2-means: the farthest pair of members. Exact for
/// small subsets (lexicographically first pair on ties); larger subsets use
/// a double sweep from a start point derived from the seed and the subset,
/// so the same subset always yields the same pair.
inline std::pair<std::size_t, std::size_t> farthest_pair(
    const Eigen::MatrixXd& x, const std::vector<Index>& members,
    std::uint64_t seed) {
  const std::size_t k = members.size();
  if (k <= kExactFarthestPairLimit) {
    std::pair<std::size_t, std::size_t> best{0, 1};
    double best_d = -1.0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const double d = (x.row(members[a]) - x.row(members[b])).squaredNorm();
        if (d > best_d) {
          best_d = d;
          best = {a, b};
        }
      }
    }
    return best;
  }
  const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(members.front()) ^
                                             (static_cast<std::uint64_t>(k) << 32)));
  const std::size_t start = static_cast<std::size_t>(h % k);
  const std::size_t a = farthest_from(x, members, x.row(members[start]).transpose());
  const std::size_t b = farthest_from(x, members, x.row(members[a]).transpose());
  if (a == b) return {a, a == 0 ? 1 : 0};
  return {std::min(a, b), std::max(a, b)};
}

/// Lloyd 2-means over the given rows of x. Returns two nonempty member lists.
inline std::pair<std::vector<Index>, std::vector<Index>> two_means(
    const Eigen::MatrixXd& x, const std::vector<Index>& members,
    std::uint64_t seed) {
  const std::size_t k = members.size();
  if (k < 2) {
    throw Error(ErrorKind::invalid_argument, "2-means: need at least two points");
  }
  const auto [ia, ib] = farthest_pair(x, members, seed);
  Eigen::VectorXd c0 = x.row(members[ia]).transpose();
  Eigen::VectorXd c1 = x.row(members[ib]).transpose();
  std::vector<char> side(k, 0);

  constexpr int kMaxRounds = 100;
  constexpr double kMoveTol = 1e-8;
  const Index m = x.cols();
  for (int round = 0; round < kMaxRounds; ++round) {
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(m);
    Index n0 = 0;
    Index n1 = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const auto row = x.row(members[a]).transpose();
      const bool second = (row - c1).squaredNorm() < (row - c0).squaredNorm();
      side[a] = second ? 1 : 0;
      if (second) {
        s1 += row;
        ++n1;
      } else {
        s0 += row;
        ++n0;
      }
    }
    // An emptied cluster keeps its previous centroid.
    const Eigen::VectorXd next0 = n0 > 0 ? Eigen::VectorXd(s0 / static_cast<double>(n0)) : c0;
    const Eigen::VectorXd next1 = n1 > 0 ? Eigen::VectorXd(s1 / static_cast<double>(n1)) : c1;
    const double move = std::max((next0 - c0).norm(), (next1 - c1).norm());
    c0 = next0;
    c1 = next1;
    if (move < kMoveTol) break;
  }

  std::pair<std::vector<Index>, std::vector<Index>> out;
  for (std::size_t a = 0; a < k; ++a) {
    (side[a] ? out.second : out.first).push_back(members[a]);
  }
  // Empty-cluster repair: move the point farthest from its centroid.
  if (out.first.empty() || out.second.empty()) {
    auto& full = out.first.empty() ? out.second : out.first;
    auto& empty = out.first.empty() ? out.first : out.second;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    for (const Index i : full) mean += x.row(i).transpose();
    mean /= static_cast<double>(full.size());
    const std::size_t far = farthest_from(x, full, mean);
    empty.push_back(full[far]);
    full.erase(full.begin() + static_cast<std::ptrdiff_t>(far));
  }
  return out;
}

inline GranularBall summarize(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                              const std::vector<Index>& members) {
  GranularBall b;
  b.count = static_cast<Index>(members.size());
  b.center = Eigen::VectorXd::Zero(x.cols());
  Index pos = 0;
  for (const Index i : members) {
    b.center += x.row(i).transpose();
    pos += labels(i) == 1 ? 1 : 0;
  }
  b.center /= static_cast<double>(b.count);
  double r = 0.0;
  for (const Index i : members) r += (x.row(i).transpose() - b.center).norm();
  b.radius = r / static_cast<double>(b.count);
  const Index neg = b.count - pos;
  b.label = pos >= neg ? 1 : -1;
  b.purity = static_cast<double>(std::max(pos, neg)) / static_cast<double>(b.count);
  return b;
}

}  // namespace detail

/// 2-means split of the rows of `points` (Lloyd iteration from the farthest
/// pair, at most 100 rounds or until centroids move less than 1e-8).
/// Returns two nonempty, disjoint row-index sets covering all rows.
inline std::pair<std::vector<Index>, std::vector<Index>> two_means_split(
    const Eigen::MatrixXd& points, std::uint64_t seed = 0) {
  std::vector<Index> all(static_cast<std::size_t>(points.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  return detail::two_means(points, all, seed);
}

/// Center, radius, majority label and purity of a point set.
inline GranularBall ball_summary(const Eigen::MatrixXd& points,
                                 const Eigen::VectorXi& labels) {
  if (points.rows() == 0 || points.rows() != labels.size()) {
    throw Error(ErrorKind::invalid_argument,
                "ball_summary: need a nonempty point set with one label per point");
  }
  std::vector<Index> all(static_cast<std::size_t>(points.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  return detail::summarize(points, labels, all);
}

/// Splits impure balls until every ball has purity >= T or is a singleton,
/// then keeps splitting the least pure splittable ball while fewer than
/// `min_balls` balls exist.
inline GranulationResult granulate(const Dataset& d, const GranulationConfig& cfg) {
  cfg.validate();
  d.validate();
  if (d.n() < cfg.min_balls) {
    throw Error(ErrorKind::degenerate,
                "granulate: dataset has fewer samples than min_balls");
  }
  const auto& x = d.features;
  const auto& y = d.labels;

  struct Node {
    std::vector<Index> members;
    std::size_t depth;
    double purity;
  };
  std::deque<Node> pending;
  std::vector<Node> done;
  GranulationResult out;

  auto make_node = [&](std::vector<Index> members, std::size_t depth) {
    const double p = detail::purity_of(y, members);
    return Node{std::move(members), depth, p};
  };
  auto finish = [&]() {
    for (auto& node : done) {
      out.balls.push_back(detail::summarize(x, y, node.members));
      out.membership.push_back(std::move(node.members));
    }
    done.clear();
  };
  auto split = [&](Node node) {
    if (out.iterations >= cfg.max_iterations) {
      done.push_back(std::move(node));
      for (auto& rest : pending) done.push_back(std::move(rest));
      pending.clear();
      finish();
      throw PartialResultError<GranulationResult>(
          ErrorKind::convergence,
          "granulate: exceeded " + std::to_string(cfg.max_iterations) + " splits",
          std::move(out));
    }
    if (out.split_work_per_level.size() <= node.depth) {
      out.split_work_per_level.resize(node.depth + 1, 0);
    }
    out.split_work_per_level[node.depth] += static_cast<Index>(node.members.size());
    auto [a, b] = detail::two_means(x, node.members, cfg.seed);
    ++out.iterations;
    pending.push_back(make_node(std::move(a), node.depth + 1));
    pending.push_back(make_node(std::move(b), node.depth + 1));
  };
  auto drain = [&]() {
    while (!pending.empty()) {
      Node node = std::move(pending.front());
      pending.pop_front();
      if (node.purity < cfg.purity_threshold && node.members.size() >= 2) {
        split(std::move(node));
      } else {
        done.push_back(std::move(node));
      }
    }
  };

  std::vector<Index> all(static_cast<std::size_t>(d.n()));
  std::iota(all.begin(), all.end(), Index{0});
  pending.push_back(make_node(std::move(all), 0));
  drain();
  while (static_cast<Index>(done.size()) < cfg.min_balls) {
    std::size_t pick = done.size();
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (done[i].members.size() < 2) continue;
      if (pick == done.size() || done[i].purity < done[pick].purity) pick = i;
    }
    if (pick == done.size()) break;
    Node node = std::move(done[pick]);
    done.erase(done.begin() + static_cast<std::ptrdiff_t>(pick));
    split(std::move(node));
    drain();
  }
  finish();
  return out;
}

/// One radius-0 ball per sample, in sample order.
inline GranulationResult singleton_balls(const Dataset& d) {
  d.validate();
  GranulationResult out;
  for (Index i = 0; i < d.n(); ++i) {
    out.balls.push_back(detail::summarize(d.features, d.labels, {i}));
    out.membership.push_back({i});
  }
  return out;
}

}  // namespace gbt

#endif  // GBTSVM_GRANULATION_HPP
