#ifndef GBTSVM_KERNELS_HPP
#define GBTSVM_KERNELS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>

#include "gbtsvm/error.hpp"

namespace gbt {

using Index = Eigen::Index;

enum class KernelKind { linear, gaussian };

inline const char* to_string(KernelKind k) {
  return k == KernelKind::linear ? "linear" : "gaussian";
}

inline KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "gaussian" || s == "rbf") return KernelKind::gaussian;
  throw Error(ErrorKind::invalid_argument,
              "kernel: unknown kind '" + std::string(s) + "'");
}

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;  ///< gaussian width, > 0

  static KernelSpec linear() { return {KernelKind::linear, 1.0}; }
  static KernelSpec gaussian(double sigma) { return {KernelKind::gaussian, sigma}; }

  void validate() const {
    if (kind == KernelKind::gaussian && !(sigma > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "kernel: sigma must be positive");
    }
  }
};

/// linear: <x, y>;  gaussian: exp(-|x - y|^2 / (2 sigma^2)).
template <typename A, typename B>
double kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<A>& x,
                   const Eigen::MatrixBase<B>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::dimension_mismatch, "kernel: dimension mismatch");
  }
  if (spec.kind == KernelKind::linear) {
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += x(i) * y(i);
    return s;
  }
  double sq = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x(i) - y(i);
    sq += d * d;
  }
  return std::exp(-sq / (2.0 * spec.sigma * spec.sigma));
}

/// Gram block: entry (i, j) = K(X_i, Y_j) over the rows of X and Y.
inline Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& y) {
  spec.validate();
  if (x.cols() != y.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "gram: feature counts differ");
  }
  Eigen::MatrixXd k(x.rows(), y.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < y.rows(); ++j) {
      k(i, j) = kernel_eval(spec, x.row(i), y.row(j));
    }
  }
  return k;
}

}  // namespace gbt

#endif  // GBTSVM_KERNELS_HPP
