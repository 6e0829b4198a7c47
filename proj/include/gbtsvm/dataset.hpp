#ifndef GBTSVM_DATASET_HPP
#define GBTSVM_DATASET_HPP

// Binary-classification datasets: CSV ingest, min-max scaling, seeded
// splitting, label-noise injection and synthetic generators.

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "gbtsvm/error.hpp"

namespace gbt {

using Index = Eigen::Index;

/// Raw label values that were mapped onto +1 / -1 at load time.
struct LabelMap {
  std::string positive;
  std::string negative;

  bool operator==(const LabelMap&) const = default;
};

/// Labeled sample matrix. Rows are samples; labels are +1 or -1.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;
  std::vector<std::string> feature_names;
  std::optional<LabelMap> label_map;

  Index n() const { return features.rows(); }
  Index m() const { return features.cols(); }

  Index count(int label) const {
    return static_cast<Index>((labels.array() == label).count());
  }

  bool has_both_classes() const { return count(1) > 0 && count(-1) > 0; }

  /// Rows with the given indices, in the given order. Metadata is preserved.
  Dataset subset(const std::vector<Index>& rows) const {
    Dataset out;
    out.features.resize(static_cast<Index>(rows.size()), m());
    out.labels.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(static_cast<Index>(i)) = features.row(rows[i]);
      out.labels(static_cast<Index>(i)) = labels(rows[i]);
    }
    out.feature_names = feature_names;
    out.label_map = label_map;
    return out;
  }

  /// Throws unless every label is +-1, every feature finite and the shapes agree.
  void validate() const {
    if (labels.size() != features.rows()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "dataset: label count does not match row count");
    }
    for (Index i = 0; i < labels.size(); ++i) {
      if (labels(i) != 1 && labels(i) != -1) {
        throw Error(ErrorKind::schema, "dataset: label at row " +
                                           std::to_string(i) +
                                           " is not +1 or -1");
      }
    }
    if (!features.allFinite()) {
      throw Error(ErrorKind::parse, "dataset: non-finite feature value");
    }
  }

  /// Training-use precondition: n >= 2 and both classes present.
  void require_trainable(std::string_view what) const {
    validate();
    if (n() < 2 || !has_both_classes()) {
      throw Error(ErrorKind::degenerate,
                  std::string(what) + ": training data needs both classes");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Which CSV field holds the label. Defaults to the last field.
struct LabelColumn {
  std::optional<std::size_t> index;

  static LabelColumn last() { return {}; }
  static LabelColumn at(std::size_t i) { return {i}; }
};

struct CsvOptions {
  bool has_header = false;
  LabelColumn label_column = LabelColumn::last();
};

/// Parses comma-separated samples. The greater of the two raw label values
/// (numerically when both parse as numbers, lexicographically otherwise)
/// becomes +1.
inline Dataset read_csv(std::istream& in, const CsvOptions& opts = {}) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::vector<std::string> header;
  std::size_t width = 0;
  std::size_t label_idx = 0;
  std::size_t line_no = 0;
  bool first = true;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (first) {
      width = fields.size();
      if (width < 2) {
        throw Error(ErrorKind::parse, "csv: row " + std::to_string(line_no) +
                                          " needs at least two fields");
      }
      label_idx = opts.label_column.index.value_or(width - 1);
      if (label_idx >= width) {
        throw Error(ErrorKind::schema, "csv: label column " +
                                           std::to_string(label_idx) +
                                           " out of range");
      }
      first = false;
      if (opts.has_header) {
        for (std::size_t j = 0; j < fields.size(); ++j) {
          if (j != label_idx) header.emplace_back(fields[j]);
        }
        continue;
      }
    }
    if (fields.size() != width) {
      throw Error(ErrorKind::parse, "csv: row " + std::to_string(line_no) +
                                        " has " +
                                        std::to_string(fields.size()) +
                                        " fields, expected " +
                                        std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_idx) continue;
      const auto v = detail::parse_double(fields[j]);
      if (!v) {
        throw Error(ErrorKind::parse, "csv: row " + std::to_string(line_no) +
                                          " field " + std::to_string(j + 1) +
                                          " is not numeric: '" +
                                          std::string(fields[j]) + "'");
      }
      if (!std::isfinite(*v)) {
        throw Error(ErrorKind::parse, "csv: row " + std::to_string(line_no) +
                                          " field " + std::to_string(j + 1) +
                                          " is not finite");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
    raw_labels.emplace_back(fields[label_idx]);
  }

  std::vector<std::string> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() == 1) {
    throw SingleClassError("csv: label column holds a single value '" + distinct[0] + "'");
  }
  if (distinct.size() != 2) {
    throw Error(ErrorKind::schema,
                "csv: label column must hold exactly two distinct values, found " +
                    std::to_string(distinct.size()));
  }
  LabelMap map{distinct[1], distinct[0]};
  const auto a = detail::parse_double(distinct[0]);
  const auto b = detail::parse_double(distinct[1]);
  if (a && b && *a > *b) map = LabelMap{distinct[0], distinct[1]};

  Dataset d;
  const auto n = static_cast<Index>(rows.size());
  const auto m = static_cast<Index>(width - 1);
  d.features.resize(n, m);
  d.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) d.features(i, j) = rows[i][j];
    d.labels(i) = raw_labels[i] == map.positive ? 1 : -1;
  }
  d.feature_names = std::move(header);
  d.label_map = std::move(map);
  return d;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "csv: cannot open '" + path + "'");
  return read_csv(in, opts);
}

/// Writes features followed by the label in the last column. Labels are
/// written with their raw values when a label map is present.
inline void write_csv(std::ostream& out, const Dataset& d,
                      bool with_header = false) {
  if (with_header) {
    for (Index j = 0; j < d.m(); ++j) {
      out << (static_cast<std::size_t>(j) < d.feature_names.size()
                  ? d.feature_names[j]
                  : "x" + std::to_string(j));
      out << ',';
    }
    out << "label\n";
  }
  for (Index i = 0; i < d.n(); ++i) {
    for (Index j = 0; j < d.m(); ++j) {
      out << detail::format_double(d.features(i, j)) << ',';
    }
    if (d.label_map) {
      out << (d.labels(i) == 1 ? d.label_map->positive : d.label_map->negative);
    } else {
      out << d.labels(i);
    }
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& d,
                     bool with_header = false) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "csv: cannot write '" + path + "'");
  write_csv(out, d, with_header);
}

// ---------------------------------------------------------------------------
// Normalization

/// Per-feature min/max captured on training data; reapplied to test data.
struct MinMaxRecord {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  double apply(Index feature, double value) const {
    const double span = max(feature) - min(feature);
    if (!(span > 0.0)) return 0.0;
    return (value - min(feature)) / span;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != min.size()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "normalize: feature count differs from record");
    }
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
      for (Index i = 0; i < x.rows(); ++i) out(i, j) = apply(j, x(i, j));
    }
    return out;
  }

  Dataset apply(const Dataset& d) const {
    Dataset out = d;
    out.features = apply(d.features);
    return out;
  }
};

/// Affinely maps each column onto [0, 1]; constant columns map to 0.
inline std::pair<Dataset, MinMaxRecord> minmax_normalize(const Dataset& d) {
  MinMaxRecord rec;
  if (d.n() == 0) {
    rec.min = Eigen::VectorXd::Zero(d.m());
    rec.max = Eigen::VectorXd::Zero(d.m());
  } else {
    rec.min = d.features.colwise().minCoeff().transpose();
    rec.max = d.features.colwise().maxCoeff().transpose();
  }
  return {rec.apply(d), rec};
}

// ---------------------------------------------------------------------------
// Splitting and noise

inline std::vector<Index> shuffled_indices(Index n, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

/// Seeded shuffle split. The training part receives round(fraction * n) rows.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                                    double train_fraction,
                                                    std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument,
                "split: train fraction must lie in (0, 1)");
  }
  const auto idx = shuffled_indices(d.n(), seed);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(d.n())));
  std::vector<Index> train(idx.begin(), idx.begin() + n_train);
  std::vector<Index> test(idx.begin() + n_train, idx.end());
  Dataset tr = d.subset(train);
  if (!tr.has_both_classes()) {
    throw Error(ErrorKind::degenerate,
                "split: training part is missing a class");
  }
  return {std::move(tr), d.subset(test)};
}

struct NoiseSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

/// Negates exactly round(rate * n) labels chosen without replacement.
/// Applying the same spec twice restores the original labels.
inline Dataset inject_label_noise(const Dataset& d, const NoiseSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 0.5)) {
    throw Error(ErrorKind::invalid_argument,
                "noise: rate must lie in [0, 0.5]");
  }
  Dataset out = d;
  const auto flips = static_cast<std::size_t>(
      std::llround(spec.rate * static_cast<double>(d.n())));
  if (flips == 0) return out;
  const auto idx = shuffled_indices(d.n(), spec.seed);
  for (std::size_t k = 0; k < flips; ++k) out.labels(idx[k]) *= -1;
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

enum class SynthKind { linear_margin, crossplane, checkerboard };

inline const char* to_string(SynthKind k) {
  switch (k) {
    case SynthKind::linear_margin: return "linear-margin";
    case SynthKind::crossplane: return "crossplane";
    case SynthKind::checkerboard: return "checkerboard";
  }
  return "?";
}

inline SynthKind parse_synth_kind(std::string_view s) {
  if (s == "linear-margin") return SynthKind::linear_margin;
  if (s == "crossplane") return SynthKind::crossplane;
  if (s == "checkerboard") return SynthKind::checkerboard;
  throw Error(ErrorKind::invalid_argument,
              "synth: unknown kind '" + std::string(s) + "'");
}

struct SynthSpec {
  Index n = 200;
  Index m = 2;
  SynthKind kind = SynthKind::linear_margin;
  double class_balance = 0.5;  ///< fraction of +1 samples
  double separation = 1.0;
  std::uint64_t seed = 0;
};

/// Generates a two-class dataset.
///
/// - linear-margin: unit-variance Gaussian cloud split by a random hyperplane
///   through the origin; each class sits at signed distance
///   separation/2 + |N(0,1)| from it, so the classes are separated by a gap
///   of exactly `separation`.
/// - crossplane: two crossing bands in the first two features
///   (x2 = x1 for +1, x2 = 1 - x1 for -1), band noise 0.05/(1+separation);
///   remaining features are U[0,1].
/// - checkerboard: 4x4 alternating cells on the first two features (8
///   alternating stripes when m = 1); samples fill the central
///   1/(1+separation) of each cell.
inline Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.n < 2 || spec.m < 1 ||
      !(spec.class_balance > 0.0 && spec.class_balance < 1.0) ||
      !(spec.separation >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "synth: invalid spec");
  }
  if (spec.kind == SynthKind::crossplane && spec.m < 2) {
    throw Error(ErrorKind::invalid_argument,
                "synth: crossplane needs at least two features");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Index n = spec.n;
  const Index m = spec.m;
  Index n_pos = static_cast<Index>(
      std::llround(spec.class_balance * static_cast<double>(n)));
  n_pos = std::clamp<Index>(n_pos, 1, n - 1);

  Dataset d;
  d.features.resize(n, m);
  d.labels.resize(n);
  for (Index i = 0; i < n; ++i) d.labels(i) = i < n_pos ? 1 : -1;

  switch (spec.kind) {
    case SynthKind::linear_margin: {
      Eigen::VectorXd w(m);
      for (Index j = 0; j < m; ++j) w(j) = normal(rng);
      if (w.norm() == 0.0) w(0) = 1.0;
      w.normalize();
      for (Index i = 0; i < n; ++i) {
        Eigen::VectorXd x(m);
        for (Index j = 0; j < m; ++j) x(j) = normal(rng);
        x -= x.dot(w) * w;
        const double t = spec.separation / 2.0 + std::abs(normal(rng));
        x += static_cast<double>(d.labels(i)) * t * w;
        d.features.row(i) = x.transpose();
      }
      break;
    }
    case SynthKind::crossplane: {
      const double sd = 0.05 / (1.0 + spec.separation);
      for (Index i = 0; i < n; ++i) {
        const double x1 = unit(rng);
        const double eps = sd * normal(rng);
        d.features(i, 0) = x1;
        d.features(i, 1) = (d.labels(i) == 1 ? x1 : 1.0 - x1) + eps;
        for (Index j = 2; j < m; ++j) d.features(i, j) = unit(rng);
      }
      break;
    }
    case SynthKind::checkerboard: {
      const double fill = 1.0 / (1.0 + spec.separation);
      const int cells = m >= 2 ? 4 : 8;
      for (Index i = 0; i < n; ++i) {
        const int want = d.labels(i) == 1 ? 0 : 1;
        int cx = 0;
        int cy = 0;
        do {
          cx = static_cast<int>(unit(rng) * cells) % cells;
          cy = m >= 2 ? static_cast<int>(unit(rng) * cells) % cells : 0;
        } while ((cx + cy) % 2 != want);
        const double width = 1.0 / cells;
        auto place = [&](int c) {
          return (c + 0.5) * width + (unit(rng) - 0.5) * width * fill;
        };
        d.features(i, 0) = place(cx);
        if (m >= 2) d.features(i, 1) = place(cy);
        for (Index j = 2; j < m; ++j) d.features(i, j) = unit(rng);
      }
      break;
    }
  }

  // Interleave the classes so prefixes of the data are mixed.
  const auto order = shuffled_indices(n, spec.seed ^ 0x9e3779b97f4a7c15ULL);
  return d.subset(order);
}

}  // namespace gbt

#endif  // GBTSVM_DATASET_HPP
