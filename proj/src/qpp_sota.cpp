#include "qpplab/qpp_sota.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/parallel.hpp"

namespace qpplab {

namespace {

std::span<const double> top(std::span<const double> scores, int k) {
  if (scores.empty()) throw Error(ErrorKind::SampleSize, "predictor needs at least one retrieved score");
  if (k < 1) throw Error(ErrorKind::Config, "predictor depth must be positive");
  return scores.first(std::min<std::size_t>(scores.size(), static_cast<std::size_t>(k)));
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void PredictorConfig::validate() const {
  if (k_nqc < 1 || k_uqc < 1 || k_wig < 1 || qf_depth < 1)
    throw Error(ErrorKind::Config, "predictor depths must all be >= 1");
}

double uqc(std::span<const double> scores, int k) {
  const auto head = top(scores, k);
  const double m = mean(head);
  double ss = 0.0;
  for (double s : head) ss += (s - m) * (s - m);
  return std::sqrt(ss / static_cast<double>(head.size()));
}

double nqc(std::span<const double> scores, int k, double s_corpus) {
  if (s_corpus == 0.0) throw Error(ErrorKind::DivisionByZero, "NQC: corpus score is zero");
  return uqc(scores, k) / std::abs(s_corpus);
}

double wig(std::span<const double> scores, int k, WigVariant variant, std::optional<double> s_corpus,
           std::optional<int> n_terms) {
  const auto head = top(scores, k);
  if (variant == WigVariant::MeanDifference) return mean(head) - mean(scores);

  if (!s_corpus || !n_terms) throw Error(ErrorKind::Config, "classic WIG needs a corpus score and a term count");
  if (*n_terms < 1) throw Error(ErrorKind::Config, "classic WIG needs a positive term count");
  double sum = 0.0;
  for (double s : head) sum += s - *s_corpus;
  return sum / static_cast<double>(head.size()) / std::sqrt(static_cast<double>(*n_terms));
}

double qf(const RunSet& original, const RunSet& feedback, const QueryId& q, int depth) {
  if (depth < 1) throw Error(ErrorKind::Config, "QF depth must be positive");
  const auto& a = original.ranking(q);
  const auto& b = feedback.ranking(q);
  const auto d = static_cast<std::size_t>(depth);
  std::set<DocId> head;
  for (std::size_t i = 0; i < std::min(d, a.size()); ++i) head.insert(a[i].doc_id);
  std::size_t shared = 0;
  for (std::size_t i = 0; i < std::min(d, b.size()); ++i) shared += head.contains(b[i].doc_id) ? 1 : 0;
  return static_cast<double>(shared) / static_cast<double>(depth);
}

std::vector<double> scores_of(const RunSet& run, const QueryId& q) {
  const auto& ranking = run.ranking(q);
  std::vector<double> scores;
  scores.reserve(ranking.size());
  for (const auto& d : ranking) scores.push_back(d.score);
  return scores;
}

FeatureTable compute_sota(const RunSet& run, const PredictorConfig& config, const CorpusScoreTable& corpus_scores,
                          const QueryTermStats& term_stats, const RunSet* feedback_run, unsigned threads) {
  config.validate();
  std::vector<QueryId> queries;
  for (const auto& [q, _] : run.entries) queries.push_back(q);
  for (const auto& q : queries) {
    if (!corpus_scores.scores.contains(q))
      throw Error(ErrorKind::MissingQuery, "query '" + q + "' has no corpus score");
    if (feedback_run != nullptr && !feedback_run->contains(q))
      throw Error(ErrorKind::MissingQuery, "query '" + q + "' missing from the feedback run");
  }
  if (feedback_run == nullptr) warn("no feedback run given; QF column omitted");

  struct Row {
    double uqc, nqc, wig, qf;
  };
  std::vector<Row> rows(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const auto& q = queries[i];
    const auto scores = scores_of(run, q);
    const double s_corpus = corpus_scores.scores.at(q);
    Row& row = rows[i];
    row.uqc = uqc(scores, config.k_uqc);
    if (s_corpus == 0.0) throw Error(ErrorKind::DivisionByZero, "NQC: corpus score is zero for query '" + q + "'");
    row.nqc = nqc(scores, config.k_nqc, s_corpus);
    if (config.wig_variant == WigVariant::Classic) {
      auto it = term_stats.terms.find(q);
      if (it == term_stats.terms.end() || it->second.empty())
        throw Error(ErrorKind::Config, "classic WIG: query '" + q + "' has no term statistics");
      row.wig = wig(scores, config.k_wig, config.wig_variant, s_corpus, static_cast<int>(it->second.size()));
    } else {
      row.wig = wig(scores, config.k_wig, config.wig_variant);
    }
    row.qf = feedback_run != nullptr ? qf(run, *feedback_run, q, config.qf_depth) : 0.0;
  });

  auto column = [&](double Row::*member) {
    std::map<QueryId, double> values;
    for (std::size_t i = 0; i < queries.size(); ++i) values.emplace(queries[i], rows[i].*member);
    return values;
  };
  FeatureTable table;
  table.add_column("UQC", Provenance::Computed, column(&Row::uqc));
  table.add_column("NQC", Provenance::Computed, column(&Row::nqc));
  table.add_column("WIG", Provenance::Computed, column(&Row::wig));
  if (feedback_run != nullptr) table.add_column("QF", Provenance::Computed, column(&Row::qf));
  return table;
}

}  // namespace qpplab
