#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/qpp_sota.hpp"
#include "qpplab/random.hpp"

using namespace qpplab;

namespace {

RunSet run_with(const std::string& q, const std::vector<std::pair<std::string, double>>& docs) {
  RunSet run;
  int rank = 1;
  for (const auto& [id, score] : docs) run.entries[q].push_back({id, rank++, score});
  return run;
}

std::vector<double> random_scores(Rng& rng, std::size_t n) {
  std::vector<double> s(n);
  for (auto& x : s) x = rng.normal() * 5.0;
  std::sort(s.rbegin(), s.rend());
  return s;
}

}  // namespace

TEST(Uqc, Examples) {
  EXPECT_EQ(uqc(std::vector<double>{2, 2, 2}, 3), 0.0);
  EXPECT_DOUBLE_EQ(uqc(std::vector<double>{3, 1}, 2), 1.0);
  EXPECT_DOUBLE_EQ(uqc(std::vector<double>{5, 3, 1}, 2), 1.0);
  EXPECT_DOUBLE_EQ(uqc(std::vector<double>{3, 1}, 100), 1.0);
}

TEST(Nqc, Examples) {
  EXPECT_DOUBLE_EQ(nqc(std::vector<double>{3, 1}, 2, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(nqc(std::vector<double>{3, 1}, 2, -2.0), 0.5);
  EXPECT_EQ(nqc(std::vector<double>{4, 4}, 2, 7.0), 0.0);
  try {
    nqc(std::vector<double>{3, 1}, 2, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisionByZero);
  }
}

TEST(Wig, Examples) {
  EXPECT_DOUBLE_EQ(wig(std::vector<double>{4, 2, 1, 1}, 2, WigVariant::MeanDifference), 1.0);
  EXPECT_EQ(wig(std::vector<double>{3, 3, 3}, 2, WigVariant::MeanDifference), 0.0);
  EXPECT_DOUBLE_EQ(wig(std::vector<double>{4, 2}, 2, WigVariant::Classic, 1.0, 4), 1.0);
  EXPECT_THROW(wig(std::vector<double>{4, 2}, 2, WigVariant::Classic), Error);
  EXPECT_THROW(wig(std::vector<double>{4, 2}, 2, WigVariant::Classic, 1.0), Error);
}

TEST(Qf, Examples) {
  std::vector<std::pair<std::string, double>> docs;
  for (int i = 0; i < 10; ++i) docs.push_back({"d" + std::to_string(i), 10.0 - i});
  const RunSet a = run_with("q", docs);
  EXPECT_EQ(qf(a, a, "q", 10), 1.0);
  EXPECT_EQ(qf(a, a, "q", 4), 1.0);

  std::vector<std::pair<std::string, double>> other;
  for (int i = 0; i < 10; ++i) other.push_back({"x" + std::to_string(i), 10.0 - i});
  EXPECT_EQ(qf(a, run_with("q", other), "q", 10), 0.0);

  std::vector<std::pair<std::string, double>> half;
  for (int i = 0; i < 10; ++i) half.push_back({(i % 2 ? "x" : "d") + std::to_string(i), 10.0 - i});
  EXPECT_DOUBLE_EQ(qf(a, run_with("q", half), "q", 10), 0.5);

  // Short lists keep the full divisor.
  const RunSet shorter = run_with("q", {{"d0", 1.0}, {"d1", 0.5}});
  EXPECT_DOUBLE_EQ(qf(shorter, shorter, "q", 10), 0.2);
  EXPECT_THROW(qf(a, run_with("other", docs), "q", 10), Error);
}

TEST(Qf, SymmetricAndBounded) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<std::string, double>> x, y;
    for (int i = 0; i < 20; ++i) {
      x.push_back({"d" + std::to_string(rng.below(30)) + "_" + std::to_string(i), rng.normal()});
      y.push_back({"d" + std::to_string(rng.below(30)) + "_" + std::to_string(rng.below(20)), rng.normal()});
    }
    std::ostringstream unused;
    RunSet a, b;
    for (auto& [id, s] : x) a.entries["q"].push_back({id, 0, s});
    for (auto& [id, s] : y) b.entries["q"].push_back({id, 0, s});
    const double ab = qf(a, b, "q", 10), ba = qf(b, a, "q", 10);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(SotaPredictors, ScaleAndShiftProperties) {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_scores(rng, 2 + rng.below(40));
    const int k = 1 + static_cast<int>(rng.below(20));
    const double c = 0.01 + rng.uniform() * 100.0;
    const double shift = rng.normal() * 10.0;
    const double corpus = 0.5 + rng.uniform() * 5.0;
    std::vector<double> scaled, shifted;
    for (double v : s) {
      scaled.push_back(v * c);
      shifted.push_back(v + shift);
    }
    const double u = uqc(s, k);
    EXPECT_NEAR(uqc(scaled, k), c * u, 1e-12 * std::max(1.0, c * u));
    EXPECT_NEAR(uqc(shifted, k), u, 1e-9 * std::max(1.0, u));
    const double w = wig(s, k, WigVariant::MeanDifference);
    EXPECT_NEAR(wig(scaled, k, WigVariant::MeanDifference), c * w, 1e-11 * std::max(1.0, std::fabs(c * w)) * 10);
    EXPECT_NEAR(wig(shifted, k, WigVariant::MeanDifference), w, 1e-9 * std::max(1.0, std::fabs(w)) * 10);
    const double n = nqc(s, k, corpus);
    EXPECT_NEAR(nqc(scaled, k, corpus * c), n, 1e-12 * std::max(1.0, n));
  }
}

TEST(ComputeSota, SingleQueryRow) {
  WarningCapture capture;
  const RunSet run = run_with("q1", {{"a", 3.0}, {"b", 1.0}});
  CorpusScoreTable corpus{{{"q1", 2.0}}};
  QueryTermStats terms;
  terms.terms["q1"] = {{"t", 5}};
  PredictorConfig cfg;
  cfg.k_nqc = cfg.k_uqc = cfg.k_wig = 2;
  const FeatureTable t = compute_sota(run, cfg, corpus, terms);
  EXPECT_EQ(t.columns(), (std::vector<std::string>{"UQC", "NQC", "WIG"}));
  EXPECT_DOUBLE_EQ(t.at("q1", "UQC"), 1.0);
  EXPECT_DOUBLE_EQ(t.at("q1", "NQC"), 0.5);
  EXPECT_TRUE(capture.contains("QF"));
  EXPECT_EQ(t.provenance().front(), Provenance::Computed);
}

TEST(ComputeSota, FeedbackAddsQf) {
  const RunSet run = run_with("q1", {{"a", 3.0}, {"b", 1.0}});
  CorpusScoreTable corpus{{{"q1", 2.0}}};
  QueryTermStats terms;
  terms.terms["q1"] = {{"t", 5}};
  const FeatureTable t = compute_sota(run, PredictorConfig{}, corpus, terms, &run);
  EXPECT_EQ(t.columns().back(), "QF");
}

TEST(ComputeSota, MissingCorpusScoreNamesQuery) {
  const RunSet run = run_with("q7", {{"a", 3.0}, {"b", 1.0}});
  QueryTermStats terms;
  terms.terms["q7"] = {{"t", 5}};
  WarningCapture quiet;
  try {
    compute_sota(run, PredictorConfig{}, CorpusScoreTable{}, terms);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("q7"), std::string::npos);
  }
}

TEST(PredictorConfig, RejectsNonPositiveDepths) {
  PredictorConfig cfg;
  cfg.k_wig = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
