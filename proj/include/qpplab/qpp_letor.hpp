#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpplab/corpus_io.hpp"

namespace qpplab {

enum class Aggregator { Min, Max, Mean, Q1, Median, Q3, Std, Var, Sum };

std::string to_string(Aggregator agg);
Aggregator parse_aggregator(std::string_view text);

/// Type-7 quantile: linear interpolation between closest ranks,
/// h = (n−1)·p over the sorted values.
double quantile(std::span<const double> values, double p);

/// The named summary statistic; Std and Var use the population form.
double summarize(std::span<const double> values, Aggregator agg);

/// Summarized LETOR feature normalized by the query's effective term count.
double slf(std::span<const double> values, Aggregator agg, int n_effective);

/// Per-document scores of one LETOR feature, aligned with a run's top-k.
struct LetorScores {
  std::string feature_name;
  std::map<QueryId, std::vector<double>> values;
};

/// Looks up the top-k documents of every query of `run` in the sidecar
/// feature. A document without a value scores 0 (with a warning); a query
/// with no values at all is a MissingQuery error.
LetorScores align_letor(const RunSet& run, const LetorSidecar::Feature& feature, int k);

std::vector<std::string> default_letor_features();  // L.BM25, L.DFree, L.Lemur, L.InExpC2

/// One column `<feature>.<agg>` per LETOR feature, in the given order.
FeatureTable compute_letor(const RunSet& run, const std::vector<LetorScores>& scores, const QueryTermStats& term_stats,
                           Aggregator agg, int k);

}  // namespace qpplab
