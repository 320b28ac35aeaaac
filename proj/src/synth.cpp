#include "qpplab/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qpplab/effectiveness.hpp"
#include "qpplab/error.hpp"
#include "qpplab/qpp_letor.hpp"
#include "qpplab/random.hpp"

namespace qpplab {

namespace {

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

int digits(int n) { return static_cast<int>(std::to_string(n).size()); }

Ranking rank_by_score(const std::vector<DocId>& docs, const std::vector<double>& scores) {
  Ranking ranking;
  ranking.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) ranking.push_back({docs[i], 0, scores[i]});
  std::sort(ranking.begin(), ranking.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i].rank = static_cast<int>(i) + 1;
  return ranking;
}

std::map<QueryId, double> z_scores(const std::map<QueryId, double>& values) {
  double mean = 0.0;
  for (const auto& [q, v] : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (const auto& [q, v] : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  std::map<QueryId, double> z;
  for (const auto& [q, v] : values) z.emplace(q, sd > 0.0 ? (v - mean) / sd : 0.0);
  return z;
}

}  // namespace

void SynthParams::validate() const {
  if (n_queries < 4) throw Error(ErrorKind::Config, "synth needs at least 4 queries");
  if (n_docs < 1) throw Error(ErrorKind::Config, "synth needs at least 1 document per query");
  if (!(informativeness >= 0.0 && informativeness <= 1.0))
    throw Error(ErrorKind::Config, "informativeness must lie in [0, 1]");
}

SynthCollection synthesize(const SynthParams& params) {
  params.validate();
  Rng rng(params.seed);
  SynthCollection c;
  c.params = params;
  c.run1.run_tag = "sys1";
  c.run2.run_tag = "sys2";
  c.feedback.run_tag = "sys1.fb";

  const auto letor_names = default_letor_features();
  const double letor_weight[] = {1.0, 0.8, 0.6, 0.4};
  c.letor.features.clear();
  for (const auto& name : letor_names) c.letor.features.push_back({name, {}});

  const int qwidth = std::max(3, digits(params.n_queries));
  const int dwidth = std::max(4, digits(params.n_docs));
  const auto n = static_cast<std::size_t>(params.n_docs);

  for (int qi = 1; qi <= params.n_queries; ++qi) {
    const QueryId q = "q" + padded(qi, qwidth);
    const double quality1 = rng.uniform(0.0, 3.0);
    const double quality2 = rng.uniform(0.0, 3.0);

    std::vector<DocId> docs(n);
    std::vector<int> grades(n);
    for (std::size_t i = 0; i < n; ++i) {
      docs[i] = q + "-d" + padded(static_cast<int>(i), dwidth);
      const double u = rng.uniform();
      grades[i] = u < 0.05 ? 2 : (u < 0.2 ? 1 : 0);
    }
    if (std::all_of(grades.begin(), grades.end(), [](int g) { return g == 0; })) grades[rng.below(n)] = 1;

    std::vector<double> s1(n), s2(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
      s1[i] = quality1 * grades[i] + rng.normal();
      s2[i] = quality2 * grades[i] + rng.normal();
      fb[i] = s1[i] + 0.5 * rng.normal();
    }

    auto& judgments = c.qrels.judgments[q];
    for (std::size_t i = 0; i < n; ++i) judgments.emplace(docs[i], grades[i]);
    c.run1.entries.emplace(q, rank_by_score(docs, s1));
    c.run2.entries.emplace(q, rank_by_score(docs, s2));
    c.feedback.entries.emplace(q, rank_by_score(docs, fb));

    c.corpus_scores.scores.emplace(q, rng.uniform(1.0, 10.0));

    const auto n_terms = 1 + static_cast<int>(rng.below(4));
    auto& terms = c.term_stats.terms[q];
    for (int t = 0; t < n_terms; ++t) {
      const bool present = t == 0 || rng.uniform() >= 0.2;
      const long long tcf = present ? 1 + static_cast<long long>(rng.below(100000)) : 0;
      terms.push_back({"t" + std::to_string(t + 1), tcf});
    }

    for (std::size_t f = 0; f < c.letor.features.size(); ++f) {
      auto& values = c.letor.features[f].values[q];
      for (std::size_t i = 0; i < n; ++i) values.emplace(docs[i], letor_weight[f] * s1[i] + 0.5 * rng.normal());
    }
  }

  std::map<QueryId, double> ndcg1, ndcg2;
  for (const auto& [q, judgments] : c.qrels.judgments) {
    ndcg1.emplace(q, ndcg(c.run1.entries.at(q), judgments));
    ndcg2.emplace(q, ndcg(c.run2.entries.at(q), judgments));
  }
  const auto z1 = z_scores(ndcg1);
  const auto z2 = z_scores(ndcg2);
  const double a = params.informativeness;
  const double b = std::sqrt(1.0 - a * a);
  std::map<QueryId, double> p1, p2;
  for (const auto& [q, z] : z1) {
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    p1.emplace(q, a * z + b * e1);
    p2.emplace(q, a * z2.at(q) + b * e2);
  }
  c.predictors.add_column("SYN1", Provenance::Computed, p1);
  c.predictors.add_column("SYN2", Provenance::Computed, p2);
  return c;
}

std::string synth_manifest(const SynthCollection& c) {
  nlohmann::json j;
  j["format"] = "qpplab-synth";
  j["version"] = 1;
  j["seed"] = c.params.seed;
  j["n_queries"] = c.params.n_queries;
  j["n_docs"] = c.params.n_docs;
  j["informativeness"] = c.params.informativeness;
  j["files"] = {
      {"run1", "sys1.run"},
      {"run2", "sys2.run"},
      {"feedback", "feedback.run"},
      {"qrels", "qrels.txt"},
      {"corpus_scores", "corpus_scores.tsv"},
      {"term_stats", "term_stats.tsv"},
      {"letor", "letor.tsv"},
      {"predictors", "predictors.tsv"},
  };
  j["predictor_columns"] = {{"SYN1", "sys1"}, {"SYN2", "sys2"}};
  j["letor_features"] = default_letor_features();
  return j.dump(2) + "\n";
}

}  // namespace qpplab
