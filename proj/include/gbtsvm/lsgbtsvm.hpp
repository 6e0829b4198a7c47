#ifndef GBTSVM_LSGBTSVM_HPP
#define GBTSVM_LSGBTSVM_HPP

// Large-scale granular-ball twin SVM. The regularized primal admits a dual
// whose Hessian is built from Gram blocks of the ball centers alone:
//
//   min 1/2 [a; b]' P [a; b] - d3 b'(e2 + R2),   a free,  0 <= b <= d1 e2
//   P = [[C1C1' + d3 I, C1C2'], [C2C1', C2C2']] + E      (E all ones)
//
// and the planes follow without any matrix inverse:
//   w1 = -(C1'a1 + C2'b1) / d3,   b1 = -(e1'a1 + e2'b1) / d3
//   w2 =  (C2'a2 + C1'b2) / d4,   b2 =  (e2'a2 + e1'b2) / d4

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "gbtsvm/error.hpp"
#include "gbtsvm/gbtsvm.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/numerics.hpp"
#include "gbtsvm/twin_model.hpp"

namespace gbt {

enum class LSSolverKind {
  generic,  ///< shuffled coordinate order every sweep
  sor,      ///< fixed cyclic order
};

inline const char* to_string(LSSolverKind k) {
  return k == LSSolverKind::sor ? "sor" : "generic";
}

inline LSSolverKind parse_ls_solver_kind(std::string_view s) {
  if (s == "sor") return LSSolverKind::sor;
  if (s == "generic") return LSSolverKind::generic;
  throw Error(ErrorKind::invalid_argument, "lsgbtsvm: unknown solver '" + std::string(s) + "'");
}

struct LSHyper {
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double d4 = 1.0;
  SolverConfig solver;
  KernelSpec kernel = KernelSpec::linear();
  LSSolverKind solver_kind = LSSolverKind::generic;
  std::uint64_t seed = 0;  ///< coordinate order for the generic solver

  void validate() const {
    if (!(d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "lsgbtsvm: d1..d4 must be positive");
    }
    kernel.validate();
  }
};

/// One LS dual: the first `n_free` coordinates (the equality multipliers)
/// are unbounded, the rest are boxed in [0, cap].
struct LSDual {
  Eigen::MatrixXd P;
  Eigen::VectorXd linear;
  Index n_free = 0;
  double cap = 0.0;

  BoxQP to_qp() const {
    BoxQP p;
    p.Q = P;
    p.c = linear;
    p.lower.resize(linear.size());
    p.upper.resize(linear.size());
    p.lower.head(n_free).setConstant(-kInf);
    p.upper.head(n_free).setConstant(kInf);
    p.lower.tail(linear.size() - n_free).setZero();
    p.upper.tail(linear.size() - n_free).setConstant(cap);
    return p;
  }
};

namespace detail {

inline LSDual assemble_ls_dual(const KernelSpec& kernel, const Eigen::MatrixXd& own,
                               const Eigen::MatrixXd& other, const Eigen::VectorXd& other_radii,
                               double reg, double cap) {
  const Index p_own = own.rows();
  const Index p_other = other.rows();
  const Index k = p_own + p_other;
  Eigen::MatrixXd stacked(k, own.cols());
  stacked << own, other;
  LSDual dual;
  dual.P = gram(kernel, stacked, stacked);
  dual.P.topLeftCorner(p_own, p_own).diagonal().array() += reg;
  dual.P.array() += 1.0;
  dual.P = 0.5 * (dual.P + dual.P.transpose());
  dual.linear = Eigen::VectorXd::Zero(k);
  dual.linear.tail(p_other) = -reg * (Eigen::VectorXd::Ones(p_other) + other_radii);
  dual.n_free = p_own;
  dual.cap = cap;
  return dual;
}

}  // namespace detail

/// Dual of the +1 plane: own = C1 (free block), other = C2 (boxed by d1).
inline LSDual assemble_dual_pos(const GranulationResult& balls, const LSHyper& hyper) {
  require_two_classes(balls, "lsgbtsvm");
  return detail::assemble_ls_dual(hyper.kernel, balls.centers(1), balls.centers(-1),
                                  balls.radii(-1), hyper.d3, hyper.d1);
}

/// Dual of the -1 plane: own = C2 (free block), other = C1 (boxed by d2).
inline LSDual assemble_dual_neg(const GranulationResult& balls, const LSHyper& hyper) {
  require_two_classes(balls, "lsgbtsvm");
  return detail::assemble_ls_dual(hyper.kernel, balls.centers(-1), balls.centers(1),
                                  balls.radii(1), hyper.d4, hyper.d2);
}

struct LSFit {
  TwinModel model;
  QPSolution dual1;  ///< (alpha1, beta1)
  QPSolution dual2;  ///< (alpha2, beta2)
  /// |d3 w1 + C1'a1 + C2'b1| and |d4 w2 - C2'a2 - C1'b2| (linear modes;
  /// kernel modes report the coefficient-space analogue).
  double stationarity1 = 0.0;
  double stationarity2 = 0.0;
};

namespace detail {

inline QPSolution solve_ls_dual(const LSDual& dual, const LSHyper& hyper, const char* which,
                                std::uint64_t seed) {
  const BoxQP qp = dual.to_qp();
  const SweepOrder order =
      hyper.solver_kind == LSSolverKind::sor ? SweepOrder::cyclic : SweepOrder::shuffled;
  try {
    return solve_box_qp(qp, hyper.solver, order, seed, psd_jitter(qp.Q));
  } catch (const Error& e) {
    throw Error(ErrorKind::solver, std::string("lsgbtsvm: ") + which + ": " + e.what());
  }
}

}  // namespace detail

/// Trains both planes. No linear system is solved anywhere on this path.
inline LSFit fit_ls_detailed(const GranulationResult& balls, const LSHyper& hyper) {
  hyper.validate();
  require_two_classes(balls, "lsgbtsvm");
  const Eigen::MatrixXd c1 = balls.centers(1);
  const Eigen::MatrixXd c2 = balls.centers(-1);
  const Index p1 = c1.rows();
  const Index p2 = c2.rows();

  LSFit fit;
  fit.dual1 = detail::solve_ls_dual(assemble_dual_pos(balls, hyper), hyper, "first dual",
                                    hyper.seed);
  fit.dual2 = detail::solve_ls_dual(assemble_dual_neg(balls, hyper), hyper, "second dual",
                                    hyper.seed + 1);
  const Eigen::VectorXd a1 = fit.dual1.x.head(p1);
  const Eigen::VectorXd b1 = fit.dual1.x.tail(p2);
  const Eigen::VectorXd a2 = fit.dual2.x.head(p2);
  const Eigen::VectorXd b2 = fit.dual2.x.tail(p1);

  TwinModel& model = fit.model;
  model.kernel = hyper.kernel;
  model.hyper = {{"d1", hyper.d1},
                 {"d2", hyper.d2},
                 {"d3", hyper.d3},
                 {"d4", hyper.d4},
                 {"omega", hyper.solver.omega},
                 {"tolerance", hyper.solver.tolerance},
                 {"sor", hyper.solver_kind == LSSolverKind::sor ? 1.0 : 0.0}};
  model.plane1.b = -(a1.sum() + b1.sum()) / hyper.d3;
  model.plane2.b = (a2.sum() + b2.sum()) / hyper.d4;

  if (hyper.kernel.kind == KernelKind::linear) {
    model.mode = ModelMode::ls_linear;
    model.plane1.w = -(c1.transpose() * a1 + c2.transpose() * b1) / hyper.d3;
    model.plane2.w = (c2.transpose() * a2 + c1.transpose() * b2) / hyper.d4;
    fit.stationarity1 =
        (hyper.d3 * model.plane1.w + c1.transpose() * a1 + c2.transpose() * b1).norm();
    fit.stationarity2 =
        (hyper.d4 * model.plane2.w - c2.transpose() * a2 - c1.transpose() * b2).norm();
  } else {
    // Coefficients over the stacked centers Z = [C1; C2].
    model.mode = ModelMode::ls_kernel;
    model.hyper["sigma"] = hyper.kernel.sigma;
    model.reference_centers.resize(p1 + p2, c1.cols());
    model.reference_centers << c1, c2;
    model.plane1.w.resize(p1 + p2);
    model.plane1.w << -a1 / hyper.d3, -b1 / hyper.d3;
    model.plane2.w.resize(p1 + p2);
    model.plane2.w << b2 / hyper.d4, a2 / hyper.d4;
    Eigen::VectorXd m1(p1 + p2);
    m1 << a1, b1;
    Eigen::VectorXd m2(p1 + p2);
    m2 << b2, a2;
    fit.stationarity1 = (hyper.d3 * model.plane1.w + m1).norm();
    fit.stationarity2 = (hyper.d4 * model.plane2.w - m2).norm();
  }
  refresh_norms(model);
  return fit;
}

inline TwinModel fit_ls(const GranulationResult& balls, const LSHyper& hyper) {
  return fit_ls_detailed(balls, hyper).model;
}

}  // namespace gbt

#endif  // GBTSVM_LSGBTSVM_HPP
