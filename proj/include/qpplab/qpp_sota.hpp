#pragma once

#include <optional>
#include <span>

#include "qpplab/corpus_io.hpp"

namespace qpplab {

enum class WigVariant {
  MeanDifference,  // mean(top-k) − mean(all retrieved scores)
  Classic,         // (1/k)·Σ(score_i − s_corpus)/sqrt(n_terms)
};

struct PredictorConfig {
  int k_nqc = 100;
  int k_uqc = 100;
  int k_wig = 5;
  int qf_depth = 50;
  WigVariant wig_variant = WigVariant::MeanDifference;

  void validate() const;
};

/// Population standard deviation of the top-min(k, n) scores.
double uqc(std::span<const double> scores, int k);

/// uqc / |s_corpus|; DivisionByZero when s_corpus is 0.
double nqc(std::span<const double> scores, int k, double s_corpus);

double wig(std::span<const double> scores, int k, WigVariant variant,
           std::optional<double> s_corpus = std::nullopt, std::optional<int> n_terms = std::nullopt);

/// |top-depth(original) ∩ top-depth(feedback)| / depth.
double qf(const RunSet& original, const RunSet& feedback, const QueryId& q, int depth);

/// Descending score vector for q.
std::vector<double> scores_of(const RunSet& run, const QueryId& q);

/// Columns UQC, NQC, WIG and, given a feedback run, QF. Rows cover every
/// query of `run`; a query missing from a required sidecar is an error.
FeatureTable compute_sota(const RunSet& run, const PredictorConfig& config, const CorpusScoreTable& corpus_scores,
                          const QueryTermStats& term_stats, const RunSet* feedback_run = nullptr,
                          unsigned threads = 1);

}  // namespace qpplab
