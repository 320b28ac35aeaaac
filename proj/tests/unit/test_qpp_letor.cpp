#include <gtest/gtest.h>

#include <cmath>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/qpp_letor.hpp"
#include "qpplab/random.hpp"

using namespace qpplab;

namespace {

const Aggregator kAll[] = {Aggregator::Min, Aggregator::Max, Aggregator::Mean, Aggregator::Q1, Aggregator::Median,
                           Aggregator::Q3,  Aggregator::Std, Aggregator::Var,  Aggregator::Sum};

std::vector<double> random_values(Rng& rng) {
  std::vector<double> v(1 + rng.below(20));
  for (auto& x : v) x = rng.normal() * 3.0 + 1.0;
  return v;
}

}  // namespace

TEST(Summarize, Examples) {
  const std::vector<double> v{2, 4, 6};
  EXPECT_EQ(summarize(v, Aggregator::Mean), 4.0);
  EXPECT_EQ(summarize(v, Aggregator::Sum), 12.0);
  EXPECT_EQ(summarize(std::vector<double>{1, 2, 3, 4}, Aggregator::Median), 2.5);
  EXPECT_EQ(summarize(std::vector<double>{1, 2, 3, 4}, Aggregator::Q1), 1.75);
  EXPECT_EQ(summarize(std::vector<double>{1, 2, 3, 4}, Aggregator::Q3), 3.25);
  EXPECT_DOUBLE_EQ(summarize(v, Aggregator::Var), 8.0 / 3.0);
  EXPECT_THROW(summarize(std::vector<double>{}, Aggregator::Mean), Error);
}

TEST(Quantile, TypeSevenEndpoints) {
  const std::vector<double> v{5, 1, 3};
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 5.0);
  EXPECT_EQ(quantile(v, 0.5), 3.0);
}

TEST(Slf, Examples) {
  const std::vector<double> v{2, 4, 6};
  EXPECT_DOUBLE_EQ(slf(v, Aggregator::Mean, 3), 4.0 / 3.0);
  EXPECT_EQ(slf(v, Aggregator::Sum, 2), 6.0);
  for (auto agg : kAll) EXPECT_EQ(slf(v, agg, 1), summarize(v, agg));
  try {
    slf(v, Aggregator::Mean, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateQuery);
  }
}

TEST(Slf, NormalizationIdentity) {
  // slf is exactly summarize / n. Multiplying back by n is exact for powers
  // of two and otherwise within one rounding step.
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto v = random_values(rng);
    const auto agg = kAll[rng.below(9)];
    const int n = 1 + static_cast<int>(rng.below(8));
    const double s = summarize(v, agg);
    const double x = slf(v, agg, n);
    EXPECT_EQ(x, s / n);
    if ((n & (n - 1)) == 0) {
      EXPECT_EQ(x * n, s);
    }
    EXPECT_LE(std::fabs(x * n - s), std::fabs(s) * 0x1p-52);
  }
}

TEST(Slf, OrderInvariant) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    auto v = random_values(rng);
    auto w = v;
    rng.shuffle(w);
    for (auto agg : kAll) EXPECT_EQ(slf(v, agg, 3), slf(w, agg, 3));
  }
}

TEST(Slf, DuplicationProperties) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_values(rng);
    auto doubled = v;
    doubled.insert(doubled.end(), v.begin(), v.end());
    for (auto agg : {Aggregator::Min, Aggregator::Max, Aggregator::Median, Aggregator::Mean, Aggregator::Std,
                     Aggregator::Var}) {
      const double a = summarize(v, agg), b = summarize(doubled, agg);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::fabs(a)));
    }
    EXPECT_NEAR(summarize(doubled, Aggregator::Sum), 2 * summarize(v, Aggregator::Sum), 1e-12 * 100);
  }
}

TEST(Slf, MonotoneAndLinear) {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = random_values(rng);
    auto bumped = v;
    bumped[rng.below(bumped.size())] += rng.uniform() + 0.1;
    EXPECT_GE(slf(bumped, Aggregator::Min, 2), slf(v, Aggregator::Min, 2));
    EXPECT_GE(slf(bumped, Aggregator::Max, 2), slf(v, Aggregator::Max, 2));
    auto scaled = v;
    for (auto& x : scaled) x *= 3.0;
    EXPECT_NEAR(slf(scaled, Aggregator::Sum, 2), 3.0 * slf(v, Aggregator::Sum, 2), 1e-11);
    EXPECT_NEAR(slf(scaled, Aggregator::Mean, 2), 3.0 * slf(v, Aggregator::Mean, 2), 1e-11);
  }
}

TEST(ParseAggregator, Names) {
  for (auto agg : kAll) EXPECT_EQ(parse_aggregator(to_string(agg)), agg);
  EXPECT_EQ(parse_aggregator("median"), Aggregator::Median);
  EXPECT_THROW(parse_aggregator("mode"), Error);
}

namespace {

RunSet one_query_run(int n) {
  RunSet run;
  for (int i = 0; i < n; ++i) run.entries["q1"].push_back({"d" + std::to_string(i), i + 1, 10.0 - i});
  return run;
}

LetorSidecar::Feature feature(const std::string& name, const std::vector<double>& values) {
  LetorSidecar::Feature f{name, {}};
  for (std::size_t i = 0; i < values.size(); ++i) f.values["q1"]["d" + std::to_string(i)] = values[i];
  return f;
}

QueryTermStats three_terms() {
  QueryTermStats s;
  s.terms["q1"] = {{"a", 1}, {"b", 2}, {"c", 3}};
  return s;
}

}  // namespace

TEST(ComputeLetor, SingleFeature) {
  const RunSet run = one_query_run(3);
  const auto scores = align_letor(run, feature("L.BM25", {2, 4, 6}), 100);
  const FeatureTable t = compute_letor(run, {scores}, three_terms(), Aggregator::Mean, 100);
  EXPECT_EQ(t.columns(), std::vector<std::string>{"L.BM25.Mean"});
  EXPECT_DOUBLE_EQ(t.at("q1", "L.BM25.Mean"), 4.0 / 3.0);
}

TEST(ComputeLetor, ColumnsInDeclaredOrderAndTopK) {
  const RunSet run = one_query_run(3);
  const auto b = align_letor(run, feature("L.DFree", {1, 1, 100}), 2);
  const auto a = align_letor(run, feature("L.BM25", {2, 4, 6}), 2);
  const FeatureTable t = compute_letor(run, {b, a}, three_terms(), Aggregator::Sum, 2);
  EXPECT_EQ(t.columns(), (std::vector<std::string>{"L.DFree.Sum", "L.BM25.Sum"}));
  EXPECT_DOUBLE_EQ(t.at("q1", "L.DFree.Sum"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.at("q1", "L.BM25.Sum"), 2.0);
}

TEST(ComputeLetor, MissingDocumentScoresZero) {
  WarningCapture capture;
  const RunSet run = one_query_run(3);
  const auto scores = align_letor(run, feature("L.BM25", {2, 4}), 3);
  EXPECT_EQ(scores.values.at("q1"), (std::vector<double>{2, 4, 0}));
  EXPECT_EQ(capture.count(), 1u);
}

TEST(ComputeLetor, Errors) {
  const RunSet run = one_query_run(3);
  LetorSidecar::Feature empty{"L.BM25", {}};
  EXPECT_THROW(align_letor(run, empty, 3), Error);
  QueryTermStats zero;
  zero.terms["q1"] = {{"a", 0}};
  const auto scores = align_letor(run, feature("L.BM25", {2, 4, 6}), 3);
  try {
    compute_letor(run, {scores}, zero, Aggregator::Mean, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateQuery);
    EXPECT_NE(std::string(e.what()).find("q1"), std::string::npos);
  }
}
