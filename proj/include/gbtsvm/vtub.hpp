#ifndef GBTSVM_VTUB_HPP
#define GBTSVM_VTUB_HPP

// Violation-tolerance upper bounds for linear GBTSVM. For two balls of the
// same class the difference of their slack values is bounded by
//
//   -1 pairs:  D^2 (delta + t1)(delta + t1 + t2) sqrt(kappa2) |G|_F d_ij^3
//   +1 pairs:  D^2 (delta + t2)(delta + t1 + t2) sqrt(kappa1) |H|_F d_ij^3
//
// with t1 = lambda_max(H'H), t2 = lambda_max(G'G), kappa = sum (1 + r)^2
// over the radii of the class in question and d_ij the center distance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gbtsvm/error.hpp"
#include "gbtsvm/gbtsvm.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/numerics.hpp"
#include "gbtsvm/twin_model.hpp"

namespace gbt {

struct VTUBParams {
  double Delta = 1e3;   ///< perturbation scale, the inverse of a small theta
  double delta = 1e-6;  ///< ridge shared with GBTSVMHyper

  void validate() const {
    if (!(Delta > 0.0 && delta > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "vtub: Delta and delta must be positive");
    }
  }
};

inline constexpr double kVTUBSlack = 1e-9;

/// Constants shared by every pair of one fitted instance.
struct VTUBConstants {
  double tau1 = 0.0;          ///< lambda_max(H'H)
  double tau2 = 0.0;          ///< lambda_max(G'G)
  double kappa_pos = 0.0;     ///< sum (1 + r)^2 over +1 radii
  double kappa_neg = 0.0;     ///< sum (1 + r)^2 over -1 radii
  double frobenius_h = 0.0;   ///< |H|_F
  double frobenius_g = 0.0;   ///< |G|_F
};

inline double kappa_of(const Eigen::VectorXd& radii) {
  return (Eigen::VectorXd::Ones(radii.size()) + radii).squaredNorm();
}

inline VTUBConstants vtub_constants(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g,
                                    const Eigen::VectorXd& radii_pos,
                                    const Eigen::VectorXd& radii_neg) {
  if (h.cols() != g.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "vtub: H and G differ in width");
  }
  VTUBConstants k;
  k.tau1 = largest_eigenvalue(h.transpose() * h);
  k.tau2 = largest_eigenvalue(g.transpose() * g);
  k.kappa_pos = kappa_of(radii_pos);
  k.kappa_neg = kappa_of(radii_neg);
  k.frobenius_h = h.norm();
  k.frobenius_g = g.norm();
  return k;
}

/// Bound for a pair of -1 balls i, j (rows of G, centers without the ones
/// column).
inline double bound_positive(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g,
                             const Eigen::VectorXd& radii_neg, const VTUBParams& params,
                             Index i, Index j) {
  params.validate();
  if (i < 0 || j < 0 || i >= g.rows() || j >= g.rows()) {
    throw Error(ErrorKind::invalid_argument, "vtub: ball index out of range");
  }
  const double tau1 = largest_eigenvalue(h.transpose() * h);
  const double tau2 = largest_eigenvalue(g.transpose() * g);
  const Index m = g.cols() - 1;
  const double d = (g.row(i).head(m) - g.row(j).head(m)).norm();
  return params.Delta * params.Delta * (params.delta + tau1) *
         (params.delta + tau1 + tau2) * std::sqrt(kappa_of(radii_neg)) * g.norm() * d * d * d;
}

/// Mirror bound for a pair of +1 balls i, j (rows of H).
inline double bound_negative(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g,
                             const Eigen::VectorXd& radii_pos, const VTUBParams& params,
                             Index i, Index j) {
  params.validate();
  if (i < 0 || j < 0 || i >= h.rows() || j >= h.rows()) {
    throw Error(ErrorKind::invalid_argument, "vtub: ball index out of range");
  }
  const double tau1 = largest_eigenvalue(h.transpose() * h);
  const double tau2 = largest_eigenvalue(g.transpose() * g);
  const Index m = h.cols() - 1;
  const double d = (h.row(i).head(m) - h.row(j).head(m)).norm();
  return params.Delta * params.Delta * (params.delta + tau2) *
         (params.delta + tau1 + tau2) * std::sqrt(kappa_of(radii_pos)) * h.norm() * d * d * d;
}

struct VTUBPair {
  int bound = 1;  ///< 1: pair of -1 balls, 2: pair of +1 balls
  Index i = 0;      ///< index within the class, in ball order
  Index j = 0;
  double lhs = 0.0;  ///< |xi_i - xi_j|
  double rhs = 0.0;  ///< bound
  double d_ij = 0.0;
  bool holds = true;
};

struct VTUBReport {
  VTUBParams params;
  VTUBConstants constants;
  std::vector<VTUBPair> pairs;

  std::size_t violations() const {
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [](const VTUBPair& p) { return !p.holds; }));
  }

  /// Largest lhs / rhs over pairs with a positive bound (0 when none).
  double max_ratio() const {
    double r = 0.0;
    for (const auto& p : pairs) {
      if (p.rhs > 0.0) r = std::max(r, p.lhs / p.rhs);
    }
    return r;
  }
};

/// Checks both bounds on every same-class pair i < j of a linear model fitted
/// on `balls`.
inline VTUBReport verify(const TwinModel& model, const GranulationResult& balls,
                         const VTUBParams& params = {}) {
  params.validate();
  if (model.is_kernel()) {
    throw Error(ErrorKind::unsupported, "vtub: only linear models are supported");
  }
  const LinearBlocks blocks = assemble_linear(balls);
  const auto [xi1, xi2] = slacks(model, balls);

  VTUBReport report;
  report.params = params;
  report.constants = vtub_constants(blocks.H, blocks.G, blocks.R1, blocks.R2);
  const VTUBConstants& k = report.constants;
  const double scale = params.Delta * params.Delta * (params.delta + k.tau1 + k.tau2);
  const double factor1 = scale * (params.delta + k.tau1) * std::sqrt(k.kappa_neg) * k.frobenius_g;
  const double factor2 = scale * (params.delta + k.tau2) * std::sqrt(k.kappa_pos) * k.frobenius_h;

  auto sweep = [&](int bound, const Eigen::MatrixXd& design, const Eigen::VectorXd& xi,
                   double factor) {
    const Index m = design.cols() - 1;
    for (Index i = 0; i < design.rows(); ++i) {
      for (Index j = i + 1; j < design.rows(); ++j) {
        VTUBPair pr;
        pr.bound = bound;
        pr.i = i;
        pr.j = j;
        pr.d_ij = (design.row(i).head(m) - design.row(j).head(m)).norm();
        pr.lhs = std::abs(xi(i) - xi(j));
        pr.rhs = factor * pr.d_ij * pr.d_ij * pr.d_ij;
        pr.holds = pr.lhs <= pr.rhs + kVTUBSlack;
        report.pairs.push_back(pr);
      }
    }
  };
  sweep(1, blocks.G, xi2, factor1);
  sweep(2, blocks.H, xi1, factor2);
  return report;
}

}  // namespace gbt

#endif  // GBTSVM_VTUB_HPP
