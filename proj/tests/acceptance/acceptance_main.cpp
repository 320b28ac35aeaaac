// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "qpplab/diagnostics.hpp"
#include "qpplab/effectiveness.hpp"
#include "qpplab/error.hpp"
#include "qpplab/learners.hpp"
#include "qpplab/numeric_format.hpp"
#include "qpplab/qpp_letor.hpp"
#include "qpplab/qpp_sota.hpp"
#include "qpplab/random.hpp"
#include "qpplab/selective.hpp"
#include "qpplab/statlab.hpp"
#include "test_util.hpp"

using namespace qpplab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome outcome(bool pass, std::string detail) { return {pass, std::move(detail)}; }

// ---------------------------------------------------------------------------

Outcome significance_anchor() {
  const auto p = [](double r) { return correlation_at(Coefficient::Pearson, r, 102).p_value; };
  const bool five = p(0.194) > 0.05 && p(0.196) < 0.05;
  const bool one = p(0.253) > 0.01 && p(0.255) < 0.01;
  std::ostringstream d;
  d << "p(0.194)=" << format_fixed(p(0.194), 5) << " p(0.196)=" << format_fixed(p(0.196), 5)
    << " p(0.253)=" << format_fixed(p(0.253), 5) << " p(0.255)=" << format_fixed(p(0.255), 5);
  return outcome(five && one, d.str());
}

Outcome anova_anchor() {
  // Four groups of 152: means c·(-3, -1, 1, 3) and deviations ±s around them,
  // sized so that SS_between = 4.554 and SS_within = 6.662.
  const int size = 152;
  const double c = std::sqrt(4.554 / (size * 20.0));
  const double s = std::sqrt(6.662 / 4.0 / size);
  std::map<std::string, std::vector<double>> groups;
  const double offsets[] = {-3, -1, 1, 3};
  for (int g = 0; g < 4; ++g) {
    auto& v = groups["C" + std::to_string(g)];
    for (int i = 0; i < size; ++i) v.push_back(0.5 + c * offsets[g] + (i % 2 ? s : -s));
  }
  const auto t = anova_one_way(groups, "Collection");
  const std::string ms_b = format_fixed(t.factor.mean_sq, 3), ms_w = format_fixed(t.residuals.mean_sq, 3);
  const bool pass = t.factor.df == 3 && t.residuals.df == 604 && ms_b == "1.518" && ms_w == "0.011" &&
                    std::fabs(t.f_value - 137.6) <= 0.5;
  return outcome(pass, "SSB=" + format_fixed(t.factor.sum_sq, 3) + " SSW=" + format_fixed(t.residuals.sum_sq, 3) +
                           " MS=" + ms_b + "/" + ms_w + " F=" + format_fixed(t.f_value, 2));
}

Outcome oracle_routing() {
  Rng rng(3);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PerQuery e1, e2;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      e1[q] = rng.uniform();
      e2[q] = rng.below(5) == 0 ? e1[q] : rng.uniform();
    }
    const auto o = oracle_route(e1, e2);
    const auto replay = evaluate_policy(o.choices, e1, e2);
    if (!(o.mean_meta >= std::max(o.mean_r1, o.mean_r2)) || replay.mean_meta != o.mean_meta) ++bad;
  }
  return outcome(bad == 0, std::to_string(bad) + "/1000 violations");
}

Outcome effectiveness_oracle() {
  WarningCapture quiet;
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    Ranking ranking;
    Judgments judgments;
    std::vector<int> ranked, all;
    for (std::size_t i = 0; i < n; ++i) {
      const int g = static_cast<int>(rng.below(4));
      const std::string id = "d" + std::to_string(i);
      ranking.push_back({id, static_cast<int>(i) + 1, -static_cast<double>(i)});
      judgments[id] = g;
      ranked.push_back(g);
      all.push_back(g);
    }
    for (std::size_t i = 0, extra = rng.below(3); i < extra; ++i) {
      const int g = static_cast<int>(rng.below(4));
      judgments["u" + std::to_string(i)] = g;
      all.push_back(g);
    }
    worst = std::max({worst, std::fabs(ndcg(ranking, judgments) - oracle::ndcg(ranked, all)),
                      std::fabs(average_precision(ranking, judgments) - oracle::average_precision(ranked, all)),
                      std::fabs(precision_at(ranking, judgments, 10) - oracle::precision_at(ranked, 10)),
                      std::fabs(mrr_at(ranking, judgments, 10) - oracle::mrr_at(ranked, 10))});
  }
  return outcome(worst <= 1e-12, "max deviation " + format_exact(worst));
}

Outcome correlation_oracle() {
  Rng rng(5);
  double worst = 0.0;
  int undefined = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(10);
    const bool ties = rng.below(2) == 1;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? static_cast<double>(rng.below(4)) : rng.normal();
      y[i] = ties ? static_cast<double>(rng.below(4)) : rng.normal();
    }
    try {
      worst = std::max({worst, std::fabs(pearson(x, y).coefficient - oracle::pearson(x, y)),
                        std::fabs(kendall_tau_b(x, y).coefficient - oracle::kendall_tau_b(x, y))});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Undefined) throw;
      ++undefined;  // a constant column; no coefficient exists to compare
    }
  }
  return outcome(worst <= 1e-10,
                 "max deviation " + format_exact(worst) + ", " + std::to_string(undefined) + " constant draws skipped");
}

Outcome predictor_invariants() {
  Rng rng(6);
  double nqc_gap = 0.0, uqc_gap = 0.0, wig_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(2 + rng.below(100));
    for (auto& v : s) v = rng.normal() * 5.0;
    std::sort(s.rbegin(), s.rend());
    const int k = 1 + static_cast<int>(rng.below(50));
    const double c = 0.01 + rng.uniform() * 100.0, corpus = 0.5 + rng.uniform() * 10.0;
    std::vector<double> scaled;
    for (double v : s) scaled.push_back(v * c);
    const auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); };
    const double n0 = nqc(s, k, corpus), u0 = uqc(s, k), w0 = wig(s, k, WigVariant::MeanDifference);
    if (n0 != 0.0) nqc_gap = std::max(nqc_gap, rel(nqc(scaled, k, corpus * c), n0));
    if (u0 != 0.0) uqc_gap = std::max(uqc_gap, rel(uqc(scaled, k), c * u0));
    if (w0 != 0.0) wig_gap = std::max(wig_gap, rel(wig(scaled, k, WigVariant::MeanDifference), c * w0));
  }

  const Aggregator aggs[] = {Aggregator::Min, Aggregator::Max, Aggregator::Mean, Aggregator::Q1, Aggregator::Median,
                             Aggregator::Q3,  Aggregator::Std, Aggregator::Var,  Aggregator::Sum};
  int slf_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(1 + rng.below(100));
    for (auto& x : v) x = rng.normal() * 3.0;
    const Aggregator agg = aggs[rng.below(9)];
    const int n_q = 1 + static_cast<int>(rng.below(10));
    if (slf(v, agg, n_q) * n_q != summarize(v, agg)) ++slf_mismatch;
  }
  const bool pass = nqc_gap <= 1e-12 && uqc_gap <= 1e-12 && wig_gap <= 1e-12 && slf_mismatch == 0;
  return outcome(pass, "NQC " + format_exact(nqc_gap) + ", UQC " + format_exact(uqc_gap) + ", WIG " +
                           format_exact(wig_gap) + " relative; slf·N != summarize in " +
                           std::to_string(slf_mismatch) + "/1000");
}

Outcome cv_protocol() {
  bool partition = true;
  for (int n = 2; n <= 500; ++n) {
    std::vector<QueryId> q;
    for (int i = 0; i < n; ++i) q.push_back("q" + std::to_string(i));
    const auto split = two_fold_split(q, static_cast<std::uint64_t>(n));
    std::set<QueryId> joined(split.fold_a.begin(), split.fold_a.end());
    joined.insert(split.fold_b.begin(), split.fold_b.end());
    const auto a = split.fold_a.size(), b = split.fold_b.size();
    if (joined.size() != static_cast<std::size_t>(n) || a + b != static_cast<std::size_t>(n) ||
        (a > b ? a - b : b - a) > 1)
      partition = false;
  }

  Rng rng(7);
  FeatureTable features;
  std::map<QueryId, double> x, target;
  for (int i = 0; i < 100; ++i) {
    const std::string q = "q" + std::to_string(i);
    x[q] = rng.normal();
    target[q] = 0.3 * x[q] - 2.0;
  }
  features.add_column("X", Provenance::Ingested, x);
  const auto cv = cross_validate(features, target, LearnerSpec{}, 11);
  const bool one_each = cv.out_of_fold.size() == target.size();
  const bool linear = std::fabs(cv.pearson.coefficient - 1.0) <= 1e-9;
  return outcome(partition && one_each && linear, std::string("partition ") + (partition ? "ok" : "broken") +
                                                      ", out-of-fold " + std::to_string(cv.out_of_fold.size()) +
                                                      "/100, r=" + format_exact(cv.pearson.coefficient));
}

// Looks up the SYN1/NDCG line of a correlate TSV.
std::vector<std::string> syn1_row(const std::string& text) {
  std::istringstream in(testutil::strip_header(text));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, '\t')) f.push_back(field);
    if (f.size() == 9 && f[2] == "SYN1" && f[3] == "NDCG") return f;
  }
  return {};
}

Outcome null_pipeline() {
  testutil::TempDir dir("acceptance");
  int quiet_null = 0, strong = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    for (const char* a : {"0", "1"}) {
      const std::string col = dir / ("s" + std::to_string(seed) + "_" + a);
      const std::string sd = std::to_string(seed);
      auto r = testutil::run_cli(
          {"synth", "--queries", "200", "--docs", "50", "--informativeness", a, "--seed", sd, "--out", col});
      if (r.code != 0) return outcome(false, "synth failed: " + r.err);
      r = testutil::run_cli(
          {"eval", "--run", col + "/sys1.run", "--qrels", col + "/qrels.txt", "--measures", "NDCG", "--out",
           col + "/eval.tsv"});
      if (r.code != 0) return outcome(false, "eval failed: " + r.err);
      r = testutil::run_cli({"correlate", "--features", col + "/predictors.tsv", "--eval", col + "/eval.tsv"});
      if (r.code != 0) return outcome(false, "correlate failed: " + r.err);
      const auto row = syn1_row(r.out);
      if (row.empty()) return outcome(false, "no SYN1/NDCG row");
      if (std::string(a) == "0") quiet_null += row[8] == "none";
      else {
        double r_value = 0.0;
        strong += parse_real(row[5], r_value) && r_value >= 0.95;
      }
    }
  }
  return outcome(quiet_null >= 18 && strong == 20, "no marker under the null in " + std::to_string(quiet_null) +
                                                       "/20 seeds, r >= 0.95 in " + std::to_string(strong) +
                                                       "/20 informative seeds");
}

Outcome sweep_boundary() {
  Rng rng(9);
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    PerQuery e1, e2, p, informative;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      e1[q] = rng.uniform();
      e2[q] = rng.uniform();
      p[q] = rng.normal() * 2.0;
      informative[q] = e2[q] - e1[q];
    }
    Choices r1, r2;
    for (const auto& [q, _] : p) {
      r1[q] = Ranker::R1;
      r2[q] = Ranker::R2;
    }
    const auto sweep = threshold_sweep(p, e1, e2, 0.01);
    if (sweep.points.front().mean_meta != evaluate_policy(r2, e1, e2).mean_meta ||
        sweep.points.back().mean_meta != evaluate_policy(r1, e1, e2).mean_meta)
      ++bad;
    // When P has one sign the grid stops short of 0; its endpoint is then the T = 0 routing.
    const auto perfect = threshold_sweep(informative, e1, e2, 0.01);
    const double oracle_mean = oracle_route(e1, e2).mean_meta;
    const auto zero = std::find_if(perfect.points.begin(), perfect.points.end(),
                                   [](const SweepPoint& pt) { return pt.threshold == 0.0; });
    if (perfect.points[perfect.best].mean_meta != oracle_mean ||
        (zero != perfect.points.end() && zero->mean_meta != oracle_mean))
      ++bad;
  }
  return outcome(bad == 0, std::to_string(bad) + " violations over 500 instances");
}

Outcome determinism() {
  testutil::TempDir dir("determinism");
  const auto c = [&](const std::string& name) { return dir / ("c/" + name); };
  if (testutil::run_cli({"synth", "--queries", "60", "--docs", "40", "--seed", "5", "--out", dir / "c"}).code != 0)
    return outcome(false, "synth failed");
  testutil::run_cli({"eval", "--run", c("sys1.run"), "--qrels", c("qrels.txt"), "--out", dir / "e1.tsv"});
  testutil::run_cli({"eval", "--run", c("sys2.run"), "--qrels", c("qrels.txt"), "--out", dir / "e2.tsv"});
  testutil::run_cli({"correlate", "--features", c("predictors.tsv"), "--eval", dir / "e1.tsv", "--ranker", "sys1",
                     "--out", dir / "corr1.tsv"});
  testutil::run_cli({"correlate", "--features", c("predictors.tsv"), "--eval", dir / "e2.tsv", "--ranker", "sys2",
                     "--out", dir / "corr2.tsv"});

  // Each command writes its main output to stdout plus, for some, side files.
  struct Command {
    std::vector<std::string> args;
    std::vector<std::string> side_files;
  };
  const std::vector<Command> commands{
      {{"eval", "--run", c("sys1.run"), "--qrels", c("qrels.txt")}, {}},
      {{"predict", "sota", "letor", "--run", c("sys1.run"), "--corpus-scores", c("corpus_scores.tsv"), "--term-stats",
        c("term_stats.tsv"), "--feedback", c("feedback.run"), "--letor", c("letor.tsv")},
       {}},
      {{"correlate", "--features", c("predictors.tsv"), "--eval", dir / "e1.tsv", "--coefficient", "kendall"}, {}},
      {{"regress", "--features", c("predictors.tsv"), "--eval", dir / "e1.tsv", "--learner", "linear,forest,single",
        "--seed", "3", "--predictions", dir / "pred.tsv"},
       {dir / "pred.tsv"}},
      {{"anova", "--input", dir / "corr1.tsv", "--input", dir / "corr2.tsv", "--by", "ranker"}, {}},
      {{"select", "--eval1", dir / "e1.tsv", "--eval2", dir / "e2.tsv", "--features", c("predictors.tsv"),
        "--threshold-column", "SYN1", "--r1-column", "SYN1", "--r2-column", "SYN2", "--learner", "forest", "--seed",
        "2", "--sweep", dir / "sweep.tsv", "--choices", dir / "choices.tsv"},
       {dir / "sweep.tsv", dir / "choices.tsv"}},
      {{"report", "boxplot", "--input", dir / "corr1.tsv", "--input", dir / "corr2.tsv"}, {}},
      {{"report", "matrix", "--features", c("predictors.tsv"), "--eval", dir / "e1.tsv"}, {}},
      {{"report", "scatter", "--features", c("predictors.tsv"), "--eval", dir / "e1.tsv", "--column", "SYN1"}, {}},
      {{"report", "table", "--input", dir / "corr1.tsv", "--input", dir / "corr2.tsv", "--format", "markdown"}, {}},
      {{"synth", "--queries", "20", "--docs", "10", "--seed", "8", "--out", dir / "again"},
       {dir / "again/sys1.run", dir / "again/predictors.tsv", dir / "again/letor.tsv", dir / "again/manifest.json"}},
  };

  std::vector<std::string> failed;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    int codes = 0;
    for (const char* threads : {"1", "4", "1"}) {
      auto args = cmd.args;
      args.insert(args.end(), {"--threads", threads});
      const auto r = testutil::run_cli(args);
      codes |= r.code;
      std::string bytes = r.out;
      for (const auto& f : cmd.side_files) bytes += "\n--\n" + testutil::read_file(f);
      outputs.push_back(bytes);
    }
    const std::string name = cmd.args[0] + (cmd.args[1].starts_with("-") ? "" : " " + cmd.args[1]);
    if (codes != 0) failed.push_back(name + " (exit)");
    else if (outputs[0] != outputs[1] || outputs[0] != outputs[2]) failed.push_back(name);
  }
  std::string detail = std::to_string(commands.size() - failed.size()) + "/" + std::to_string(commands.size()) +
                       " commands byte-identical";
  for (const auto& f : failed) detail += "; differs: " + f;
  return outcome(failed.empty(), detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"significance thresholds at n=102", significance_anchor},
      {"ANOVA anchor", anova_anchor},
      {"oracle routing dominance", oracle_routing},
      {"effectiveness vs brute force", effectiveness_oracle},
      {"correlation vs brute force", correlation_oracle},
      {"predictor invariants", predictor_invariants},
      {"two-fold CV protocol", cv_protocol},
      {"end-to-end null pipeline", null_pipeline},
      {"threshold sweep boundaries", sweep_boundary},
      {"determinism across threads", determinism},
  };
  WarningCapture quiet;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = outcome(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
  }
  return failures == 0 ? 0 : 1;
}
