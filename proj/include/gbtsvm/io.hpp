#ifndef GBTSVM_IO_HPP
#define GBTSVM_IO_HPP

// JSON, CSV and SVG serialization of balls, models, metadata and reports.
// Doubles go through the shortest round-trip representation, so a model
// read back from its JSON reproduces every decision value exactly.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/evaluation.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/twin_model.hpp"
#include "gbtsvm/vtub.hpp"

namespace gbt {

using Json = nlohmann::json;

namespace detail {

inline Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json mat_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

inline const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::schema, std::string(what) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double num(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorKind::schema, std::string(what) + ": expected a number");
  return j.get<double>();
}

inline Eigen::VectorXd json_vec(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::schema, std::string(what) + ": expected an array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = num(j[i], what);
  return v;
}

inline Eigen::MatrixXd json_mat(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::schema, std::string(what) + ": expected an array");
  if (j.empty()) return {};
  const Index cols = static_cast<Index>(j.front().size());
  Eigen::MatrixXd m(static_cast<Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = json_vec(j[i], what);
    if (row.size() != cols) {
      throw Error(ErrorKind::schema, std::string(what) + ": ragged matrix");
    }
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  return m;
}

inline Json label_map_json(const std::optional<LabelMap>& lm) {
  if (!lm) return nullptr;
  return Json{{"positive", lm->positive}, {"negative", lm->negative}};
}

inline std::optional<LabelMap> json_label_map(const Json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) throw Error(ErrorKind::schema, "label_map: expected an object or null");
  return LabelMap{field(j, "positive", "label_map").get<std::string>(),
                  field(j, "negative", "label_map").get<std::string>()};
}

}  // namespace detail

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json read_json(std::istream& in, const std::string& what) {
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::parse, what + ": " + e.what());
  }
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return read_json(in, path);
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

// Balls ---------------------------------------------------------------------

inline Json balls_to_json(const GranulationResult& g) {
  Json balls = Json::array();
  for (const auto& b : g.balls) {
    balls.push_back({{"center", detail::vec_json(b.center)},
                     {"radius", b.radius},
                     {"label", b.label},
                     {"count", b.count},
                     {"purity", b.purity}});
  }
  return {{"balls", balls}, {"splits", g.iterations}};
}

inline GranulationResult balls_from_json(const Json& j) {
  GranulationResult g;
  const Json& arr = detail::field(j, "balls", "balls");
  if (!arr.is_array()) throw Error(ErrorKind::schema, "balls: expected an array");
  for (const auto& e : arr) {
    GranularBall b;
    b.center = detail::json_vec(detail::field(e, "center", "ball"), "ball center");
    b.radius = detail::num(detail::field(e, "radius", "ball"), "ball radius");
    b.label = detail::field(e, "label", "ball").get<int>();
    if (b.label != 1 && b.label != -1) throw Error(ErrorKind::schema, "ball: label must be +1 or -1");
    b.count = detail::field(e, "count", "ball").get<Index>();
    b.purity = detail::num(detail::field(e, "purity", "ball"), "ball purity");
    if (!g.balls.empty() && b.center.size() != g.balls.front().center.size()) {
      throw Error(ErrorKind::schema, "balls: centers differ in dimension");
    }
    g.balls.push_back(std::move(b));
  }
  if (j.contains("splits")) g.iterations = j.at("splits").get<Index>();
  return g;
}

// Models --------------------------------------------------------------------

inline Json model_to_json(const TwinModel& m) {
  Json j;
  j["mode"] = to_string(m.mode);
  j["kernel"] = {{"kind", to_string(m.kernel.kind)}, {"sigma", m.kernel.sigma}};
  j["b1"] = m.plane1.b;
  j["b2"] = m.plane2.b;
  if (m.is_kernel()) {
    j["coef1"] = detail::vec_json(m.plane1.w);
    j["coef2"] = detail::vec_json(m.plane2.w);
    j["centers"] = detail::mat_json(m.reference_centers);
  } else {
    j["w1"] = detail::vec_json(m.plane1.w);
    j["w2"] = detail::vec_json(m.plane2.w);
  }
  j["norms"] = {m.norm1, m.norm2};
  j["hyper"] = m.hyper;
  j["label_map"] = detail::label_map_json(m.label_map);
  return j;
}

inline TwinModel model_from_json(const Json& j) {
  TwinModel m;
  try {
    m.mode = parse_model_mode(detail::field(j, "mode", "model").get<std::string>());
    const Json& k = detail::field(j, "kernel", "model");
    m.kernel.kind = parse_kernel_kind(detail::field(k, "kind", "kernel").get<std::string>());
    m.kernel.sigma = detail::num(detail::field(k, "sigma", "kernel"), "kernel sigma");
    m.plane1.b = detail::num(detail::field(j, "b1", "model"), "b1");
    m.plane2.b = detail::num(detail::field(j, "b2", "model"), "b2");
    if (m.is_kernel()) {
      m.plane1.w = detail::json_vec(detail::field(j, "coef1", "model"), "coef1");
      m.plane2.w = detail::json_vec(detail::field(j, "coef2", "model"), "coef2");
      m.reference_centers = detail::json_mat(detail::field(j, "centers", "model"), "centers");
      if (m.reference_centers.rows() != m.plane1.w.size() ||
          m.plane2.w.size() != m.plane1.w.size()) {
        throw Error(ErrorKind::schema, "model: coefficient count differs from center count");
      }
    } else {
      m.plane1.w = detail::json_vec(detail::field(j, "w1", "model"), "w1");
      m.plane2.w = detail::json_vec(detail::field(j, "w2", "model"), "w2");
      if (m.plane1.w.size() != m.plane2.w.size()) {
        throw Error(ErrorKind::schema, "model: w1 and w2 differ in length");
      }
    }
    const Json& norms = detail::field(j, "norms", "model");
    if (!norms.is_array() || norms.size() != 2) {
      throw Error(ErrorKind::schema, "model: norms must hold two numbers");
    }
    m.norm1 = detail::num(norms[0], "norms");
    m.norm2 = detail::num(norms[1], "norms");
    if (j.contains("hyper")) m.hyper = j.at("hyper").get<std::map<std::string, double>>();
    if (j.contains("label_map")) m.label_map = detail::json_label_map(j.at("label_map"));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::schema, std::string("model: ") + e.what());
  }
  return m;
}

// Dataset metadata sidecar --------------------------------------------------

struct DatasetMetadata {
  std::optional<LabelMap> label_map;
  std::optional<MinMaxRecord> normalization;
  std::vector<std::string> feature_names;
};

inline Json metadata_to_json(const DatasetMetadata& md) {
  Json j;
  j["label_map"] = detail::label_map_json(md.label_map);
  if (md.normalization) {
    j["normalization"] = {{"min", detail::vec_json(md.normalization->min)},
                          {"max", detail::vec_json(md.normalization->max)}};
  } else {
    j["normalization"] = nullptr;
  }
  j["feature_names"] = md.feature_names;
  return j;
}

inline DatasetMetadata metadata_from_json(const Json& j) {
  DatasetMetadata md;
  try {
    md.label_map = detail::json_label_map(detail::field(j, "label_map", "metadata"));
    const Json& n = detail::field(j, "normalization", "metadata");
    if (!n.is_null()) {
      MinMaxRecord r;
      r.min = detail::json_vec(detail::field(n, "min", "normalization"), "normalization min");
      r.max = detail::json_vec(detail::field(n, "max", "normalization"), "normalization max");
      if (r.min.size() != r.max.size()) {
        throw Error(ErrorKind::schema, "normalization: min and max differ in length");
      }
      md.normalization = r;
    }
    if (j.contains("feature_names")) {
      md.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::schema, std::string("metadata: ") + e.what());
  }
  return md;
}

// Reports -------------------------------------------------------------------

inline Json vtub_to_json(const VTUBReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"bound", p.bound},
                     {"i", p.i},
                     {"j", p.j},
                     {"lhs", p.lhs},
                     {"rhs", p.rhs},
                     {"d_ij", p.d_ij},
                     {"holds", p.holds}});
  }
  const VTUBConstants& k = r.constants;
  return {{"Delta", r.params.Delta},
          {"delta", r.params.delta},
          {"tau1", k.tau1},
          {"tau2", k.tau2},
          {"kappa", k.kappa_neg},
          {"kappa_positive", k.kappa_pos},
          {"frobenius_norm", k.frobenius_g},
          {"frobenius_norm_positive", k.frobenius_h},
          {"violations", r.violations()},
          {"max_ratio", r.max_ratio()},
          {"pairs", pairs}};
}

inline Json stats_to_json(const RankTable& t, const StatsReport& s) {
  Json raw = Json::array();
  for (const auto& row : s.wtl.raw) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back({c[0], c[1], c[2]});
    raw.push_back(r);
  }
  return {{"models", t.model_names},
          {"N", t.datasets()},
          {"q", t.models()},
          {"avg_ranks", detail::vec_json(s.avg_ranks)},
          {"chi2F", s.friedman.chi2},
          {"FF", s.friedman.ff},
          {"q_alpha", s.q_alpha},
          {"CD", s.cd},
          {"wtl", {{"raw", raw},
                   {"adjusted_wins", detail::mat_json(s.wtl.adjusted_wins)},
                   {"threshold", s.wtl.threshold}}}};
}

// Accuracy tables -----------------------------------------------------------

/// CSV with header "dataset,<model>,...", one dataset per row.
inline RankTable read_rank_table(std::istream& in) {
  RankTable t;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (t.model_names.empty()) {
      if (fields.size() < 3) {
        throw Error(ErrorKind::parse, "accuracy table: header needs a dataset column and 2+ models");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) t.model_names.emplace_back(fields[i]);
      continue;
    }
    if (fields.size() != t.model_names.size() + 1) {
      throw Error(ErrorKind::parse, "accuracy table: line " + std::to_string(line_no) +
                                        " has " + std::to_string(fields.size()) + " fields");
    }
    t.dataset_names.emplace_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) {
        throw Error(ErrorKind::parse, "accuracy table: line " + std::to_string(line_no) +
                                          ": '" + std::string(fields[i]) + "' is not a number");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (t.model_names.empty()) throw Error(ErrorKind::parse, "accuracy table: empty input");
  t.accuracies.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.model_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      t.accuracies(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  t.validate();
  return t;
}

inline RankTable load_rank_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return read_rank_table(in);
}

inline void write_rank_table(std::ostream& out, const RankTable& t) {
  out << "dataset";
  for (const auto& m : t.model_names) out << ',' << m;
  out << '\n';
  for (Index r = 0; r < t.datasets(); ++r) {
    out << (r < static_cast<Index>(t.dataset_names.size()) ? t.dataset_names[r]
                                                           : "d" + std::to_string(r));
    for (Index c = 0; c < t.models(); ++c) out << ',' << detail::format_double(t.accuracies(r, c));
    out << '\n';
  }
}

// Plot ----------------------------------------------------------------------

/// SVG of 2-D balls as circles over an optional sample scatter. +1 is drawn
/// in blue, -1 in red.
inline void write_ball_svg(std::ostream& out, const GranulationResult& g,
                           const Dataset* samples = nullptr) {
  if (g.balls.empty() || g.balls.front().center.size() != 2) {
    throw Error(ErrorKind::unsupported, "plot: only two-dimensional balls can be drawn");
  }
  double lo_x = kInf, lo_y = kInf, hi_x = -kInf, hi_y = -kInf;
  for (const auto& b : g.balls) {
    lo_x = std::min(lo_x, b.center(0) - b.radius);
    hi_x = std::max(hi_x, b.center(0) + b.radius);
    lo_y = std::min(lo_y, b.center(1) - b.radius);
    hi_y = std::max(hi_y, b.center(1) + b.radius);
  }
  if (samples) {
    for (Index i = 0; i < samples->n(); ++i) {
      lo_x = std::min(lo_x, samples->features(i, 0));
      hi_x = std::max(hi_x, samples->features(i, 0));
      lo_y = std::min(lo_y, samples->features(i, 1));
      hi_y = std::max(hi_y, samples->features(i, 1));
    }
  }
  const double size = 600.0;
  const double margin = 20.0;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double s = (size - 2 * margin) / span;
  auto px = [&](double x) { return margin + (x - lo_x) * s; };
  auto py = [&](double y) { return size - margin - (y - lo_y) * s; };
  auto colour = [](int label) { return label == 1 ? "#1f5fbf" : "#c8322d"; };

  std::ostringstream svg;
  svg << std::setprecision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
      << size << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (samples) {
    for (Index i = 0; i < samples->n(); ++i) {
      svg << "<circle cx=\"" << px(samples->features(i, 0)) << "\" cy=\""
          << py(samples->features(i, 1)) << "\" r=\"2\" fill=\""
          << colour(samples->labels(i)) << "\"/>\n";
    }
  }
  for (const auto& b : g.balls) {
    svg << "<circle cx=\"" << px(b.center(0)) << "\" cy=\"" << py(b.center(1)) << "\" r=\""
        << std::max(1.0, b.radius * s) << "\" fill=\"none\" stroke=\"" << colour(b.label)
        << "\" stroke-width=\"1.5\"/>\n";
  }
  svg << "</svg>\n";
  out << svg.str();
}

}  // namespace gbt

#endif  // GBTSVM_IO_HPP
