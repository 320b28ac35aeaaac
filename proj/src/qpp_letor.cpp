#include "qpplab/qpp_letor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"

namespace qpplab {

namespace {

constexpr std::pair<Aggregator, const char*> kAggregatorNames[] = {
    {Aggregator::Min, "Min"},   {Aggregator::Max, "Max"},       {Aggregator::Mean, "Mean"},
    {Aggregator::Q1, "Q1"},     {Aggregator::Median, "Median"}, {Aggregator::Q3, "Q3"},
    {Aggregator::Std, "Std"},   {Aggregator::Var, "Var"},       {Aggregator::Sum, "Sum"},
};

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double population_variance(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double m = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / n;
}

// Order-independent sum: accumulate in sorted order so permutations of the
// same multiset give bitwise-equal results.
double sorted_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

}  // namespace

std::string to_string(Aggregator agg) {
  for (const auto& [a, name] : kAggregatorNames)
    if (a == agg) return name;
  return "?";
}

Aggregator parse_aggregator(std::string_view text) {
  for (const auto& [a, name] : kAggregatorNames) {
    const std::string_view n(name);
    if (n.size() == text.size() &&
        std::equal(n.begin(), n.end(), text.begin(), [](char x, char y) {
          return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
        }))
      return a;
  }
  throw Error(ErrorKind::Config, "unknown aggregator '" + std::string(text) + "'");
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::SampleSize, "quantile of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

double summarize(std::span<const double> values, Aggregator agg) {
  if (values.empty()) throw Error(ErrorKind::SampleSize, "cannot summarize an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  switch (agg) {
    case Aggregator::Min: return sorted.front();
    case Aggregator::Max: return sorted.back();
    case Aggregator::Mean: return sorted_sum(sorted) / static_cast<double>(sorted.size());
    case Aggregator::Q1: return quantile_sorted(sorted, 0.25);
    case Aggregator::Median: return quantile_sorted(sorted, 0.5);
    case Aggregator::Q3: return quantile_sorted(sorted, 0.75);
    case Aggregator::Std: return std::sqrt(population_variance(sorted));
    case Aggregator::Var: return population_variance(sorted);
    case Aggregator::Sum: return sorted_sum(sorted);
  }
  return 0.0;
}

double slf(std::span<const double> values, Aggregator agg, int n_effective) {
  if (n_effective < 1)
    throw Error(ErrorKind::DegenerateQuery, "LETOR normalization needs at least one effective query term");
  return summarize(values, agg) / static_cast<double>(n_effective);
}

LetorScores align_letor(const RunSet& run, const LetorSidecar::Feature& feature, int k) {
  if (k < 1) throw Error(ErrorKind::Config, "LETOR depth must be positive");
  LetorScores out{feature.name, {}};
  for (const auto& [q, ranking] : run.entries) {
    auto per_query = feature.values.find(q);
    if (per_query == feature.values.end())
      throw Error(ErrorKind::MissingQuery, "query '" + q + "' has no " + feature.name + " scores");
    const auto depth = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
    auto& values = out.values[q];
    values.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) {
      auto it = per_query->second.find(ranking[i].doc_id);
      if (it == per_query->second.end()) {
        warn(feature.name + ": no score for (" + q + ", " + ranking[i].doc_id + "); using 0");
        values.push_back(0.0);
      } else {
        values.push_back(it->second);
      }
    }
  }
  return out;
}

std::vector<std::string> default_letor_features() { return {"L.BM25", "L.DFree", "L.Lemur", "L.InExpC2"}; }

FeatureTable compute_letor(const RunSet& run, const std::vector<LetorScores>& scores, const QueryTermStats& term_stats,
                           Aggregator agg, int k) {
  if (k < 1) throw Error(ErrorKind::Config, "LETOR depth must be positive");
  std::map<QueryId, int> n_effective;
  for (const auto& [q, _] : run.entries) n_effective[q] = effective_term_count(term_stats, q);

  FeatureTable table;
  for (const auto& feature : scores) {
    std::map<QueryId, double> column;
    for (const auto& [q, n] : n_effective) {
      auto it = feature.values.find(q);
      if (it == feature.values.end() || it->second.empty())
        throw Error(ErrorKind::MissingQuery, "query '" + q + "' has no " + feature.feature_name + " scores");
      const auto depth = std::min<std::size_t>(it->second.size(), static_cast<std::size_t>(k));
      column.emplace(q, slf(std::span<const double>(it->second).first(depth), agg, n));
    }
    table.add_column(feature.feature_name + "." + to_string(agg), Provenance::Computed, column);
  }
  return table;
}

}  // namespace qpplab
