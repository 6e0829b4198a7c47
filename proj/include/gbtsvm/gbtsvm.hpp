#ifndef GBTSVM_GBTSVM_HPP
#define GBTSVM_GBTSVM_HPP

// Granular-ball twin SVM. Each plane solves a box-constrained Wolfe dual
//
//   max_a  a'(e + R) - 1/2 a' G (H'H + delta I)^{-1} G' a,   0 <= a <= d
//
// where H stacks the own-class ball centers with a ones column, G the
// other class, and R the other class's radii. The plane is recovered as
// u = -(H'H + delta I)^{-1} G' a (sign flipped for the second plane).

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/numerics.hpp"
#include "gbtsvm/twin_model.hpp"

namespace gbt {

struct GBTSVMHyper {
  double d1 = 1.0;
  double d2 = 1.0;
  double delta = 1e-6;  ///< ridge added to H'H and G'G before solving
  SolverConfig solver;
  KernelSpec kernel = KernelSpec::linear();

  void validate() const {
    if (!(d1 > 0.0 && d2 > 0.0 && delta > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "gbtsvm: d1, d2 and delta must be positive");
    }
    kernel.validate();
  }
};

/// H = (C1 e1), G = (C2 e2) and the radii of each class, in ball order.
struct LinearBlocks {
  Eigen::MatrixXd H;
  Eigen::MatrixXd G;
  Eigen::VectorXd R1;
  Eigen::VectorXd R2;
};

inline Eigen::MatrixXd append_ones(const Eigen::MatrixXd& c) {
  Eigen::MatrixXd out(c.rows(), c.cols() + 1);
  out.leftCols(c.cols()) = c;
  out.col(c.cols()).setOnes();
  return out;
}

inline void require_two_classes(const GranulationResult& balls, const char* who) {
  if (balls.count(1) == 0 || balls.count(-1) == 0) {
    throw Error(ErrorKind::degenerate,
                std::string(who) + ": balls of both labels are required");
  }
}

inline LinearBlocks assemble_linear(const GranulationResult& balls) {
  require_two_classes(balls, "assemble_linear");
  return {append_ones(balls.centers(1)), append_ones(balls.centers(-1)),
          balls.radii(1), balls.radii(-1)};
}

namespace detail {

/// Solves both duals for design matrices H (own class, first plane) and G.
/// Returns (u1, u2, dual1, dual2).
struct TwinDualResult {
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
  QPSolution dual1;
  QPSolution dual2;
};

inline QPSolution solve_dual(const Eigen::MatrixXd& q, const Eigen::VectorXd& rhs,
                             double cap, const SolverConfig& cfg, const char* which) {
  BoxQP p;
  p.Q = 0.5 * (q + q.transpose());
  p.c = -rhs;
  p.lower = Eigen::VectorXd::Zero(rhs.size());
  p.upper = Eigen::VectorXd::Constant(rhs.size(), cap);
  try {
    return solve_box_qp(p, cfg, SweepOrder::cyclic, 0, psd_jitter(p.Q));
  } catch (const Error& e) {
    throw Error(ErrorKind::solver, std::string("gbtsvm: ") + which + ": " + e.what());
  }
}

inline TwinDualResult solve_twin_duals(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g,
                                       const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
                                       const GBTSVMHyper& hyper) {
  const Index dim = h.cols();
  const Eigen::MatrixXd ridge = hyper.delta * Eigen::MatrixXd::Identity(dim, dim);

  // First plane: X = (H'H + delta I)^{-1} G',  Q = G X,  u1 = -X a.
  const Eigen::MatrixXd x = solve_spd(h.transpose() * h + ridge, g.transpose());
  TwinDualResult out;
  out.dual1 = solve_dual(g * x, Eigen::VectorXd::Ones(g.rows()) + r2, hyper.d1,
                         hyper.solver, "first dual");
  out.u1 = -x * out.dual1.x;

  // Second plane: Y = (G'G + delta I)^{-1} H',  Q = H Y,  u2 = Y c.
  const Eigen::MatrixXd y = solve_spd(g.transpose() * g + ridge, h.transpose());
  out.dual2 = solve_dual(h * y, Eigen::VectorXd::Ones(h.rows()) + r1, hyper.d2,
                         hyper.solver, "second dual");
  out.u2 = y * out.dual2.x;
  return out;
}

inline std::map<std::string, double> hyper_record(const GBTSVMHyper& h) {
  return {{"d1", h.d1},
          {"d2", h.d2},
          {"delta", h.delta},
          {"omega", h.solver.omega},
          {"tolerance", h.solver.tolerance}};
}

inline Plane split_u(const Eigen::VectorXd& u) {
  return Plane{u.head(u.size() - 1), u(u.size() - 1)};
}

}  // namespace detail

/// Linear GBTSVM with the duals and their solutions.
inline TwinFit fit_linear_detailed(const GranulationResult& balls, const GBTSVMHyper& hyper) {
  hyper.validate();
  const LinearBlocks blocks = assemble_linear(balls);
  auto r = detail::solve_twin_duals(blocks.H, blocks.G, blocks.R1, blocks.R2, hyper);
  TwinFit fit;
  fit.model.mode = ModelMode::linear;
  fit.model.plane1 = detail::split_u(r.u1);
  fit.model.plane2 = detail::split_u(r.u2);
  fit.model.kernel = KernelSpec::linear();
  fit.model.hyper = detail::hyper_record(hyper);
  refresh_norms(fit.model);
  fit.dual1 = std::move(r.dual1);
  fit.dual2 = std::move(r.dual2);
  return fit;
}

inline TwinModel fit_linear(const GranulationResult& balls, const GBTSVMHyper& hyper) {
  return fit_linear_detailed(balls, hyper).model;
}

/// Kernel GBTSVM over the empirical kernel map of the stacked centers
/// Z = [C1; C2]: F = (K(C1, Z) e1), E = (K(C2, Z) e2). The planes come out
/// as p coefficients over Z plus a bias.
inline TwinFit fit_kernel_detailed(const GranulationResult& balls, const GBTSVMHyper& hyper) {
  hyper.validate();
  require_two_classes(balls, "fit_kernel");
  const Eigen::MatrixXd c1 = balls.centers(1);
  const Eigen::MatrixXd c2 = balls.centers(-1);
  Eigen::MatrixXd z(c1.rows() + c2.rows(), c1.cols());
  z << c1, c2;
  const Eigen::MatrixXd f = append_ones(gram(hyper.kernel, c1, z));
  const Eigen::MatrixXd e = append_ones(gram(hyper.kernel, c2, z));
  auto r = detail::solve_twin_duals(f, e, balls.radii(1), balls.radii(-1), hyper);

  TwinFit fit;
  fit.model.mode = ModelMode::kernel;
  fit.model.reference_centers = std::move(z);
  fit.model.kernel = hyper.kernel;
  fit.model.plane1 = detail::split_u(r.u1);
  fit.model.plane2 = detail::split_u(r.u2);
  fit.model.hyper = detail::hyper_record(hyper);
  fit.model.hyper["sigma"] = hyper.kernel.sigma;
  refresh_norms(fit.model);
  fit.dual1 = std::move(r.dual1);
  fit.dual2 = std::move(r.dual2);
  return fit;
}

inline TwinModel fit_kernel(const GranulationResult& balls, const GBTSVMHyper& hyper) {
  return fit_kernel_detailed(balls, hyper).model;
}

/// Linear fit for a linear kernel spec, kernel fit otherwise.
inline TwinModel fit_gbtsvm(const GranulationResult& balls, const GBTSVMHyper& hyper) {
  return hyper.kernel.kind == KernelKind::linear ? fit_linear(balls, hyper)
                                                 : fit_kernel(balls, hyper);
}

/// Point-based twin SVM: the same duals assembled directly from the sample
/// matrices A (+1 rows) and B (-1 rows) with zero radii.
inline TwinModel fit_tsvm(const Dataset& d, const GBTSVMHyper& hyper) {
  hyper.validate();
  d.require_trainable("tsvm");
  Eigen::MatrixXd a(d.count(1), d.m());
  Eigen::MatrixXd b(d.count(-1), d.m());
  Index ia = 0;
  Index ib = 0;
  for (Index i = 0; i < d.n(); ++i) {
    if (d.labels(i) == 1) {
      a.row(ia++) = d.features.row(i);
    } else {
      b.row(ib++) = d.features.row(i);
    }
  }
  TwinModel model;
  if (hyper.kernel.kind == KernelKind::linear) {
    auto r = detail::solve_twin_duals(append_ones(a), append_ones(b),
                                      Eigen::VectorXd::Zero(a.rows()),
                                      Eigen::VectorXd::Zero(b.rows()), hyper);
    model.mode = ModelMode::linear;
    model.plane1 = detail::split_u(r.u1);
    model.plane2 = detail::split_u(r.u2);
  } else {
    Eigen::MatrixXd z(d.n(), d.m());
    z << a, b;
    auto r = detail::solve_twin_duals(append_ones(gram(hyper.kernel, a, z)),
                                      append_ones(gram(hyper.kernel, b, z)),
                                      Eigen::VectorXd::Zero(a.rows()),
                                      Eigen::VectorXd::Zero(b.rows()), hyper);
    model.mode = ModelMode::kernel;
    model.reference_centers = std::move(z);
    model.plane1 = detail::split_u(r.u1);
    model.plane2 = detail::split_u(r.u2);
  }
  model.kernel = hyper.kernel;
  model.hyper = detail::hyper_record(hyper);
  model.label_map = d.label_map;
  refresh_norms(model);
  return model;
}

/// Slack vectors implied by a linear model:
///   xi1 = max(0, e1 + R1 - (C1 w2 + e1 b2)),  xi2 = max(0, e2 + R2 + (C2 w1 + e2 b1)).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> slacks(const TwinModel& model,
                                                          const GranulationResult& balls) {
  if (model.is_kernel()) {
    throw Error(ErrorKind::unsupported, "slacks: only defined for linear models");
  }
  const Eigen::MatrixXd c1 = balls.centers(1);
  const Eigen::MatrixXd c2 = balls.centers(-1);
  if (c1.cols() != model.plane1.w.size() && c1.rows() > 0) {
    throw Error(ErrorKind::dimension_mismatch, "slacks: ball dimension differs from model");
  }
  const Eigen::VectorXd xi1 =
      (Eigen::VectorXd::Ones(c1.rows()) + balls.radii(1) -
       c1 * model.plane2.w -
       Eigen::VectorXd::Constant(c1.rows(), model.plane2.b))
          .cwiseMax(0.0);
  const Eigen::VectorXd xi2 =
      (Eigen::VectorXd::Ones(c2.rows()) + balls.radii(-1) + c2 * model.plane1.w +
       Eigen::VectorXd::Constant(c2.rows(), model.plane1.b))
          .cwiseMax(0.0);
  return {xi1, xi2};
}

}  // namespace gbt

#endif  // GBTSVM_GBTSVM_HPP
