#ifndef GBTSVM_TWIN_MODEL_HPP
#define GBTSVM_TWIN_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/numerics.hpp"

namespace gbt {

enum class ModelMode { linear, kernel, ls_linear, ls_kernel };

inline const char* to_string(ModelMode m) {
  switch (m) {
    case ModelMode::linear: return "linear";
    case ModelMode::kernel: return "kernel";
    case ModelMode::ls_linear: return "ls-linear";
    case ModelMode::ls_kernel: return "ls-kernel";
  }
  return "?";
}

inline ModelMode parse_model_mode(std::string_view s) {
  if (s == "linear") return ModelMode::linear;
  if (s == "kernel") return ModelMode::kernel;
  if (s == "ls-linear") return ModelMode::ls_linear;
  if (s == "ls-kernel") return ModelMode::ls_kernel;
  throw Error(ErrorKind::schema, "model: unknown mode '" + std::string(s) + "'");
}

inline bool is_kernel_mode(ModelMode m) {
  return m == ModelMode::kernel || m == ModelMode::ls_kernel;
}

/// One hyperplane w'x + b = 0. In kernel modes w holds one coefficient per
/// reference center and the plane is sum_j w_j K(z_j, x) + b = 0.
struct Plane {
  Eigen::VectorXd w;
  double b = 0.0;
};

/// Pair of nonparallel planes; plane1 hugs the +1 class, plane2 the -1 class.
struct TwinModel {
  ModelMode mode = ModelMode::linear;
  Plane plane1;
  Plane plane2;
  Eigen::MatrixXd reference_centers;  ///< kernel modes only, one row per center
  KernelSpec kernel = KernelSpec::linear();
  double norm1 = 0.0;  ///< |w1|, feature-space norm in kernel modes
  double norm2 = 0.0;
  std::map<std::string, double> hyper;
  std::optional<LabelMap> label_map;

  bool is_kernel() const { return is_kernel_mode(mode); }

  Index input_dim() const {
    return is_kernel() ? reference_centers.cols() : plane1.w.size();
  }
};

/// |w| of a plane: Euclidean in input space, sqrt(w' K w) over the
/// reference centers in kernel modes.
inline double plane_norm(const TwinModel& model, const Plane& plane) {
  if (!model.is_kernel()) return plane.w.norm();
  const Eigen::MatrixXd k =
      gram(model.kernel, model.reference_centers, model.reference_centers);
  return std::sqrt(std::max(0.0, plane.w.dot(k * plane.w)));
}

inline void refresh_norms(TwinModel& model) {
  model.norm1 = plane_norm(model, model.plane1);
  model.norm2 = plane_norm(model, model.plane2);
}

inline constexpr double kDegenerateNorm = 1e-12;

struct Decision {
  double distance1 = 0.0;  ///< |f1(x)| / |w1|
  double distance2 = 0.0;
  bool degenerate1 = false;  ///< |w1| < 1e-12; distance1 is then |b1|
  bool degenerate2 = false;
};

/// Raw plane values (f1(x), f2(x)).
inline std::pair<double, double> plane_values(const TwinModel& model,
                                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.input_dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "decision: input has " + std::to_string(x.size()) +
                    " features, model expects " + std::to_string(model.input_dim()));
  }
  if (!model.is_kernel()) {
    return {model.plane1.w.dot(x) + model.plane1.b, model.plane2.w.dot(x) + model.plane2.b};
  }
  double f1 = model.plane1.b;
  double f2 = model.plane2.b;
  for (Index j = 0; j < model.reference_centers.rows(); ++j) {
    const double k = kernel_eval(model.kernel, model.reference_centers.row(j), x);
    f1 += model.plane1.w(j) * k;
    f2 += model.plane2.w(j) * k;
  }
  return {f1, f2};
}

/// Normalized distances of x to both planes.
inline Decision decision(const TwinModel& model,
                         const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto [f1, f2] = plane_values(model, x);
  Decision d;
  d.degenerate1 = model.norm1 < kDegenerateNorm;
  d.degenerate2 = model.norm2 < kDegenerateNorm;
  d.distance1 = d.degenerate1 ? std::abs(model.plane1.b) : std::abs(f1) / model.norm1;
  d.distance2 = d.degenerate2 ? std::abs(model.plane2.b) : std::abs(f2) / model.norm2;
  return d;
}

/// Nearest plane wins; equal distances go to +1.
inline int predict(const TwinModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Decision d = decision(model, x);
  return d.distance1 <= d.distance2 ? 1 : -1;
}

/// Row-wise predict over a sample matrix.
inline Eigen::VectorXi predict_batch(const TwinModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXi out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = predict(model, x.row(i).transpose());
  return out;
}

/// Training output: the model plus the two dual solutions behind it.
struct TwinFit {
  TwinModel model;
  QPSolution dual1;
  QPSolution dual2;
};

}  // namespace gbt

#endif  // GBTSVM_TWIN_MODEL_HPP
