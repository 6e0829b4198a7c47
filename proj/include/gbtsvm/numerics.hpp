#ifndef GBTSVM_NUMERICS_HPP
#define GBTSVM_NUMERICS_HPP

// Dense kernels shared by the twin classifiers: SPD solves, the clipped
// Gauss-Seidel/SOR box-QP solver, an exhaustive active-set oracle for tests,
// and power iteration for the largest eigenvalue.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gbtsvm/error.hpp"

namespace gbt {

using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// SPD solve

namespace detail {
inline std::atomic<std::uint64_t>& spd_solve_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// Number of solve_spd calls made by this process so far.
inline std::uint64_t spd_solve_count() {
  return detail::spd_solve_counter().load(std::memory_order_relaxed);
}

/// Solves A X = B for symmetric positive definite A by Cholesky factorization.
inline Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b) {
  detail::spd_solve_counter().fetch_add(1, std::memory_order_relaxed);
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw Error(ErrorKind::dimension_mismatch, "solve_spd: shape mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::not_positive_definite,
                "solve_spd: matrix is not positive definite");
  }
  return llt.solve(b);
}

// ---------------------------------------------------------------------------
// Box-constrained QP:  min 1/2 x'Qx + c'x  s.t.  lower <= x <= upper

struct BoxQP {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;  ///< entries may be -inf
  Eigen::VectorXd upper;  ///< entries may be +inf

  Index size() const { return c.size(); }

  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(Q * x) + c.dot(x);
  }
};

struct SolverConfig {
  double tolerance = 1e-8;
  int max_sweeps = 10000;
  double omega = 1.0;  ///< relaxation factor, (0, 2)
};

struct QPSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  double jitter = 0.0;  ///< diagonal shift applied before solving
};

enum class SweepOrder {
  cyclic,    ///< coordinates 0..k-1 every sweep (classic SOR)
  shuffled,  ///< fresh seeded permutation every sweep
};

/// Max violation of the box-QP optimality conditions at x with gradient g:
/// |g_i| on interior coordinates, max(0, -g_i) at an active lower bound,
/// max(0, g_i) at an active upper bound.
inline double kkt_residual(const BoxQP& p, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& g) {
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const bool at_lower = std::isfinite(p.lower(i)) && x(i) <= p.lower(i);
    const bool at_upper = std::isfinite(p.upper(i)) && x(i) >= p.upper(i);
    double v = 0.0;
    if (at_lower && at_upper) {
      v = 0.0;  // fixed coordinate
    } else if (at_lower) {
      v = std::max(0.0, -g(i));
    } else if (at_upper) {
      v = std::max(0.0, g(i));
    } else {
      v = std::abs(g(i));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

namespace detail {

inline std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline void validate_qp(const BoxQP& p) {
  const Index k = p.size();
  if (p.Q.rows() != k || p.Q.cols() != k || p.lower.size() != k ||
      p.upper.size() != k) {
    throw Error(ErrorKind::dimension_mismatch, "box QP: shape mismatch");
  }
  const double scale = std::max(1.0, p.Q.cwiseAbs().maxCoeff());
  if ((p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::invalid_argument, "box QP: Q is not symmetric");
  }
  for (Index i = 0; i < k; ++i) {
    if (!(p.lower(i) <= p.upper(i))) {
      throw Error(ErrorKind::invalid_argument,
                  "box QP: lower bound exceeds upper bound at " +
                      std::to_string(i));
    }
  }
}

inline double clip(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

}  // namespace detail

/// Diagonal jitter 1e-10 * trace / k used to make PSD-but-singular duals
/// strictly convex.
inline double psd_jitter(const Eigen::MatrixXd& q) {
  if (q.rows() == 0) return 0.0;
  return 1e-10 * q.trace() / static_cast<double>(q.rows());
}

/// Per-sweep observer: (sweep index, objective after the sweep).
using SweepObserver = std::function<void(int, double)>;

/// Clipped Gauss-Seidel with relaxation. Each coordinate update is
///   x_i <- clip(x_i - omega * (Qx + c)_i / Q_ii, lower_i, upper_i)
/// and the gradient is maintained incrementally. The solve stops when a
/// sweep moves no coordinate by more than the tolerance and the recomputed
/// KKT residual is within the tolerance (or its floating-point floor).
/// `jitter` is added to the diagonal of Q before solving.
inline QPSolution solve_box_qp(const BoxQP& problem, const SolverConfig& cfg = {},
                               SweepOrder order = SweepOrder::cyclic,
                               std::uint64_t seed = 0, double jitter = 0.0,
                               const SweepObserver& observer = {}) {
  detail::validate_qp(problem);
  if (!(cfg.omega > 0.0 && cfg.omega < 2.0)) {
    throw Error(ErrorKind::invalid_argument, "box QP: omega must lie in (0, 2)");
  }
  BoxQP p = problem;
  if (jitter != 0.0) p.Q.diagonal().array() += jitter;

  const Index k = p.size();
  for (Index i = 0; i < k; ++i) {
    if (!(p.Q(i, i) > 0.0)) {
      throw Error(ErrorKind::indefinite_diagonal,
                  "box QP: non-positive diagonal entry at " + std::to_string(i));
    }
  }

  QPSolution sol;
  sol.jitter = jitter;
  sol.x.resize(k);
  for (Index i = 0; i < k; ++i) {
    sol.x(i) = detail::clip(0.0, p.lower(i), p.upper(i));
  }
  Eigen::VectorXd g = p.Q * sol.x + p.c;

  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);

  // Floating-point floor for the gradient: entries of Qx + c cannot be
  // resolved below a few ulps of the magnitudes summed to form them.
  auto gradient_floor = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd mag =
        p.Q.cwiseAbs() * x.cwiseAbs() + p.c.cwiseAbs();
    return 64.0 * std::numeric_limits<double>::epsilon() *
           (k == 0 ? 0.0 : mag.maxCoeff());
  };

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    if (order == SweepOrder::shuffled) std::shuffle(perm.begin(), perm.end(), rng);
    double max_change = 0.0;
    for (const Index i : perm) {
      const double proposed = sol.x(i) - cfg.omega * g(i) / p.Q(i, i);
      const double next = detail::clip(proposed, p.lower(i), p.upper(i));
      const double delta = next - sol.x(i);
      if (delta != 0.0) {
        sol.x(i) = next;
        g.noalias() += p.Q.col(i) * delta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    sol.iterations = sweep;
    if (observer) observer(sweep, p.objective(sol.x));

    // The incremental gradient proposes; a fresh gradient confirms.
    if (max_change <= cfg.tolerance || kkt_residual(p, sol.x, g) <= cfg.tolerance) {
      g = p.Q * sol.x + p.c;
      sol.kkt_residual = kkt_residual(p, sol.x, g);
      if (sol.kkt_residual <= std::max(cfg.tolerance, gradient_floor(sol.x))) {
        sol.objective = p.objective(sol.x);
        return sol;
      }
    } else if (sweep % 64 == 0) {
      g = p.Q * sol.x + p.c;  // limit drift of the incremental gradient
    }
  }
  g = p.Q * sol.x + p.c;
  sol.kkt_residual = kkt_residual(p, sol.x, g);
  sol.objective = p.objective(sol.x);
  throw PartialResultError<QPSolution>(
      ErrorKind::convergence,
      "box QP: no convergence after " + std::to_string(cfg.max_sweeps) +
          " sweeps (kkt residual " + detail::short_double(sol.kkt_residual) + ")",
      sol);
}

/// Exhaustive reference solver: every assignment of bounded coordinates to
/// {lower, upper, interior} is tried, the reduced stationarity system solved
/// and the best feasible candidate kept. Exponential; k <= 12 only.
inline QPSolution active_set_oracle(const BoxQP& p) {
  detail::validate_qp(p);
  const Index k = p.size();
  if (k > 12) {
    throw Error(ErrorKind::invalid_argument,
                "active-set oracle: refusing k = " + std::to_string(k) +
                    " (> 12)");
  }
  // State 0 = interior, 1 = at lower, 2 = at upper (when finite).
  std::vector<std::vector<int>> states(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    states[i].push_back(0);
    if (std::isfinite(p.lower(i))) states[i].push_back(1);
    if (std::isfinite(p.upper(i)) && p.upper(i) != p.lower(i)) states[i].push_back(2);
  }
  std::vector<std::size_t> digit(static_cast<std::size_t>(k), 0);

  const double scale =
      std::max({1.0, p.Q.cwiseAbs().maxCoeff(), p.c.cwiseAbs().maxCoeff()});
  QPSolution best;
  bool found = false;
  Eigen::VectorXd x(k);
  while (true) {
    std::vector<Index> free_idx;
    for (Index i = 0; i < k; ++i) {
      const int s = states[i][digit[i]];
      if (s == 0) {
        free_idx.push_back(i);
      } else {
        x(i) = s == 1 ? p.lower(i) : p.upper(i);
      }
    }
    bool ok = true;
    const auto nf = static_cast<Index>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd qff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Index a = 0; a < nf; ++a) {
        rhs(a) = -p.c(free_idx[a]);
        for (Index b = 0; b < nf; ++b) qff(a, b) = p.Q(free_idx[a], free_idx[b]);
        for (Index j = 0; j < k; ++j) {
          const bool is_free =
              std::find(free_idx.begin(), free_idx.end(), j) != free_idx.end();
          if (!is_free) rhs(a) -= p.Q(free_idx[a], j) * x(j);
        }
      }
      const Eigen::VectorXd xf =
          Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(qff).solve(rhs);
      if ((qff * xf - rhs).norm() > 1e-9 * scale * std::max(1.0, rhs.norm())) {
        ok = false;
      }
      for (Index a = 0; a < nf && ok; ++a) {
        const Index i = free_idx[a];
        const double tol = 1e-12 * (1.0 + std::abs(xf(a)));
        if (xf(a) < p.lower(i) - tol || xf(a) > p.upper(i) + tol) ok = false;
        x(i) = detail::clip(xf(a), p.lower(i), p.upper(i));
      }
    }
    if (ok) {
      const double obj = p.objective(x);
      if (!found || obj < best.objective) {
        best.x = x;
        best.objective = obj;
        found = true;
      }
    }
    Index pos = 0;
    while (pos < k) {
      if (++digit[pos] < states[pos].size()) break;
      digit[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  if (!found) {
    throw Error(ErrorKind::solver, "active-set oracle: no feasible stationary point");
  }
  best.kkt_residual = kkt_residual(p, best.x, p.Q * best.x + p.c);
  return best;
}

// ---------------------------------------------------------------------------
// Largest eigenvalue by power iteration

namespace detail {

struct PowerResult {
  double value = 0.0;
  bool converged = false;
};

inline PowerResult power_iterate(const Eigen::MatrixXd& a, std::mt19937_64& rng,
                                 int max_iter) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(a.rows());
  for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  double rho = v.dot(a * v);
  int quiet = 0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return {0.0, true};
    const double next = v.dot(w);
    const double residual = (w - next * v).norm();
    v = w / norm;
    if (residual <= 1e-10 * scale) return {v.dot(a * v), true};
    // A stalled Rayleigh quotient only counts once the residual is small;
    // a +-lambda pair keeps the residual large while the quotient stalls.
    const bool stalled =
        std::abs(next - rho) <= 1e-14 * scale && residual <= 1e-4 * scale;
    quiet = stalled ? quiet + 1 : 0;
    rho = next;
    if (quiet >= 8) return {v.dot(a * v), true};
  }
  return {rho, false};
}

}  // namespace detail

/// Largest (algebraic) eigenvalue of a symmetric matrix. Power iteration
/// from a seeded random start; when the dominant-magnitude eigenvalue is
/// negative the matrix is shifted so the top of the spectrum dominates, and
/// a stagnating run restarts with a Gershgorin shift.
inline double largest_eigenvalue(const Eigen::MatrixXd& a,
                                 std::uint64_t seed = 0x5eedULL) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch,
                "largest_eigenvalue: matrix must be square and nonempty");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    throw Error(ErrorKind::invalid_argument,
                "largest_eigenvalue: matrix is not symmetric");
  }
  if (a.rows() == 1) return a(0, 0);
  if (scale == 0.0) return 0.0;

  constexpr int kMaxIter = 200000;
  std::mt19937_64 rng(seed);
  const Index k = a.rows();
  auto r = detail::power_iterate(a, rng, kMaxIter);
  if (r.converged && r.value >= 0.0) return r.value;
  if (r.converged) {
    // Dominant eigenvalue is negative: A - rho I is PSD with top rho_max - rho.
    const Eigen::MatrixXd shifted = a - r.value * Eigen::MatrixXd::Identity(k, k);
    auto s = detail::power_iterate(shifted, rng, kMaxIter);
    if (s.converged) return s.value + r.value;
  }
  const double shift = a.cwiseAbs().rowwise().sum().maxCoeff();
  const Eigen::MatrixXd shifted = a + shift * Eigen::MatrixXd::Identity(k, k);
  auto s = detail::power_iterate(shifted, rng, 4 * kMaxIter);
  return s.value - shift;
}

}  // namespace gbt

#endif  // GBTSVM_NUMERICS_HPP
