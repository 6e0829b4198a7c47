#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "gbtsvm/dataset.hpp"
#include "test_support.hpp"

namespace {

using gbt::Dataset;
using gbt::Error;
using gbt::ErrorKind;
using gbt::Index;

Dataset parse(const std::string& text, gbt::CsvOptions opts = {}) {
  std::istringstream in(text);
  return gbt::read_csv(in, opts);
}

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorKind::io;
}

// Runs the perceptron until an epoch without mistakes; false when it
// exceeds the epoch budget.
bool perceptron_separates(const Dataset& d, int max_epochs) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d.m());
  double b = 0.0;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    int mistakes = 0;
    for (Index i = 0; i < d.n(); ++i) {
      const double y = d.labels(i);
      if (y * (w.dot(d.features.row(i).transpose()) + b) <= 0.0) {
        w += y * d.features.row(i).transpose();
        b += y;
        ++mistakes;
      }
    }
    if (mistakes == 0) return true;
  }
  return false;
}

TEST(Csv, GreaterStringLabelIsPositive) {
  const Dataset d = parse("0,0,A\n1,1,B\n2,2,B\n");
  EXPECT_EQ(d.n(), 3);
  EXPECT_EQ(d.m(), 2);
  EXPECT_EQ(d.labels, (Eigen::VectorXi(3) << -1, 1, 1).finished());
  ASSERT_TRUE(d.label_map);
  EXPECT_EQ(d.label_map->positive, "B");
  EXPECT_EQ(d.label_map->negative, "A");
}

TEST(Csv, NumericLabelsCompareNumerically) {
  const Dataset d = parse("1,0\n2,1\n");
  EXPECT_EQ(d.labels, (Eigen::VectorXi(2) << -1, 1).finished());
  // "10" < "9" as strings but not as numbers.
  const Dataset e = parse("1,10\n2,9\n");
  EXPECT_EQ(e.labels, (Eigen::VectorXi(2) << 1, -1).finished());
}

TEST(Csv, ThreeLabelsIsSchemaError) {
  EXPECT_EQ(parse_error_kind("0,a\n1,b\n2,c\n"), ErrorKind::schema);
  EXPECT_EQ(parse_error_kind("0,a\n1,a\n"), ErrorKind::schema);
  EXPECT_THROW(parse("0,a\n1,a\n"), gbt::SingleClassError);
}

TEST(Csv, RaggedRowReportsRowNumber) {
  try {
    parse("0,0,a\n1,b\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(Csv, NonNumericFeatureIsParseError) {
  EXPECT_EQ(parse_error_kind("x,0,a\n1,1,b\n"), ErrorKind::parse);
}

TEST(Csv, HeaderAndLabelColumn) {
  gbt::CsvOptions o;
  o.has_header = true;
  o.label_column = gbt::LabelColumn::at(0);
  const Dataset d = parse("cls,f1,f2\nyes,1,2\nno,3,4\n", o);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(d.features(1, 1), 4.0);
  EXPECT_EQ(d.labels(0), 1);
}

TEST(Csv, WindowsLineEndings) {
  const Dataset d = parse("0.5,0\r\n1.5,1\r\n");
  EXPECT_EQ(d.n(), 2);
  EXPECT_EQ(d.features(1, 0), 1.5);
}

TEST(Csv, WriteThenReadRoundTrips) {
  std::mt19937_64 rng(1);
  Dataset d = gbt::testing::random_dataset(30, 3, rng);
  std::ostringstream out;
  gbt::write_csv(out, d);
  const Dataset back = parse(out.str());
  EXPECT_EQ(back.features, d.features);  // shortest round-trip formatting
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Normalize, ColumnMapsToUnitInterval) {
  Eigen::MatrixXd x(3, 2);
  x << 0, 3, 5, 3, 10, 3;
  const auto [d, rec] = gbt::minmax_normalize(gbt::testing::make_dataset(x, {1, -1, 1}));
  EXPECT_EQ(d.features.col(0), Eigen::Vector3d(0, 0.5, 1));
  EXPECT_TRUE(d.features.col(1).isZero(0.0));
  gbt::MinMaxRecord r;
  r.min = Eigen::VectorXd::Constant(1, 0.0);
  r.max = Eigen::VectorXd::Constant(1, 10.0);
  EXPECT_EQ(r.apply(0, 5.0), 0.5);
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(2);
  Dataset d = gbt::testing::random_dataset(40, 4, rng);
  d.features *= 7.0;
  const auto once = gbt::minmax_normalize(d).first;
  const auto twice = gbt::minmax_normalize(once).first;
  EXPECT_LE((once.features - twice.features).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Split, SizesAndDeterminism) {
  std::mt19937_64 rng(3);
  const Dataset d = gbt::testing::random_dataset(100, 2, rng, 0.0);
  const auto [tr, te] = gbt::train_test_split(d, 0.7, 42);
  EXPECT_EQ(tr.n(), 70);
  EXPECT_EQ(te.n(), 30);
  const auto [tr2, te2] = gbt::train_test_split(d, 0.7, 42);
  EXPECT_EQ(tr.features, tr2.features);
  EXPECT_EQ(te.labels, te2.labels);
}

TEST(Split, PartitionsTheRows) {
  std::mt19937_64 rng(4);
  Dataset d = gbt::testing::random_dataset(57, 2, rng);
  for (Index i = 0; i < d.n(); ++i) d.features(i, 0) = static_cast<double>(i);  // row tag
  const auto [tr, te] = gbt::train_test_split(d, 0.6, 9);
  std::multiset<double> tags;
  for (Index i = 0; i < tr.n(); ++i) tags.insert(tr.features(i, 0));
  for (Index i = 0; i < te.n(); ++i) tags.insert(te.features(i, 0));
  ASSERT_EQ(tags.size(), 57u);
  Index expect = 0;
  for (double t : tags) EXPECT_EQ(t, static_cast<double>(expect++));
}

TEST(Split, SingleClassTrainingIsDegenerate) {
  Dataset d = gbt::testing::make_dataset(Eigen::MatrixXd::Random(10, 2),
                                         std::vector<int>(10, 1));
  try {
    gbt::train_test_split(d, 0.7, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

TEST(Noise, ZeroRateIsIdentity) {
  std::mt19937_64 rng(5);
  const Dataset d = gbt::testing::random_dataset(50, 2, rng);
  EXPECT_EQ(gbt::inject_label_noise(d, {0.0, 1}).labels, d.labels);
}

TEST(Noise, ExactFlipCountAndDeterminism) {
  std::mt19937_64 rng(6);
  const Dataset d = gbt::testing::random_dataset(100, 2, rng);
  const Dataset a = gbt::inject_label_noise(d, {0.1, 77});
  const Dataset b = gbt::inject_label_noise(d, {0.1, 77});
  EXPECT_EQ((a.labels.array() != d.labels.array()).count(), 10);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.features, d.features);
}

TEST(Noise, Involution) {
  std::mt19937_64 rng(7);
  const Dataset d = gbt::testing::random_dataset(80, 2, rng);
  const gbt::NoiseSpec spec{0.15, 3};
  EXPECT_EQ(gbt::inject_label_noise(gbt::inject_label_noise(d, spec), spec).labels, d.labels);
}

TEST(Noise, RateOutsideRangeThrows) {
  std::mt19937_64 rng(8);
  const Dataset d = gbt::testing::random_dataset(10, 2, rng);
  EXPECT_THROW(gbt::inject_label_noise(d, {0.6, 0}), Error);
}

TEST(Synthetic, ShapeAndBothClasses) {
  gbt::SynthSpec s;
  s.n = 1000;
  s.m = 32;
  const Dataset d = gbt::generate_synthetic(s);
  EXPECT_EQ(d.features.rows(), 1000);
  EXPECT_EQ(d.features.cols(), 32);
  EXPECT_TRUE(d.has_both_classes());
}

TEST(Synthetic, Deterministic) {
  for (auto kind : {gbt::SynthKind::linear_margin, gbt::SynthKind::crossplane,
                    gbt::SynthKind::checkerboard}) {
    gbt::SynthSpec s;
    s.kind = kind;
    s.seed = 12;
    EXPECT_EQ(gbt::generate_synthetic(s).features, gbt::generate_synthetic(s).features);
    EXPECT_EQ(gbt::generate_synthetic(s).labels, gbt::generate_synthetic(s).labels);
  }
}

TEST(Synthetic, WideMarginIsLinearlySeparable) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    gbt::SynthSpec s;
    s.n = 300;
    s.m = 5;
    s.separation = 2.0;
    s.seed = seed;
    EXPECT_TRUE(perceptron_separates(gbt::generate_synthetic(s), 10000)) << "seed " << seed;
  }
}

TEST(Synthetic, ClassBalanceIsRespected) {
  gbt::SynthSpec s;
  s.n = 200;
  s.class_balance = 0.25;
  EXPECT_EQ(gbt::generate_synthetic(s).count(1), 50);
}

TEST(Synthetic, CrossplaneNeedsTwoFeatures) {
  gbt::SynthSpec s;
  s.kind = gbt::SynthKind::crossplane;
  s.m = 1;
  EXPECT_THROW(gbt::generate_synthetic(s), Error);
}

TEST(Dataset, ValidateRejectsBadLabels) {
  Dataset d = gbt::testing::make_dataset(Eigen::MatrixXd::Zero(2, 1), {1, 0});
  EXPECT_THROW(d.validate(), Error);
}

}  // namespace
