#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qpplab/corpus_io.hpp"
#include "qpplab/learners.hpp"

namespace qpplab {

enum class Ranker { R1, R2 };
std::string to_string(Ranker r);

using Choices = std::map<QueryId, Ranker>;
using PerQuery = std::map<QueryId, double>;

/// Outcome of a routing policy over two base rankers. Every tie (P = T,
/// P1 = P2, eval1 = eval2) resolves to R1.
struct RouteResult {
  std::string policy;
  Choices choices;
  PerQuery meta_scores;  // the chosen ranker's per-query measure
  double mean_meta = 0.0;
  double mean_r1 = 0.0;
  double mean_r2 = 0.0;
  double oracle_mean = 0.0;
  /// Strictly better than both individual rankers.
  bool beats_both = false;
  double fraction_r2 = 0.0;
  double oracle_fraction_r2 = 0.0;
};

/// R1 where P(q) <= T, R2 otherwise.
Choices route_threshold(const PerQuery& predicted, double threshold);

/// R2 where P2(q) > P1(q), R1 otherwise. Query sets must match.
Choices route_pairwise(const PerQuery& predicted_r1, const PerQuery& predicted_r2);

/// Per query, predicts each ranker's measure with a model that was not
/// trained on that query and picks the larger (tie → R1). A query for which
/// every supplied model saw it in training is a Protocol error.
Choices route_learned(const FeatureTable& features, const std::vector<TrainedModel>& models_r1,
                      const std::vector<TrainedModel>& models_r2);

/// Convenience: two-fold split by seed, per-ranker fold models, then
/// route_learned.
Choices route_learned_cv(const FeatureTable& features, const PerQuery& eval_r1, const PerQuery& eval_r2,
                         const LearnerSpec& learner, std::uint64_t seed);

RouteResult oracle_route(const PerQuery& eval_r1, const PerQuery& eval_r2);

RouteResult evaluate_policy(const Choices& choices, const PerQuery& eval_r1, const PerQuery& eval_r2,
                            std::string policy = "custom");

struct SweepPoint {
  double threshold = 0.0;
  double mean_meta = 0.0;
  double fraction_r2 = 0.0;
};

struct ThresholdSweep {
  std::vector<SweepPoint> points;  // strictly increasing thresholds
  std::size_t best = 0;            // first point with the largest mean_meta
};

/// Evaluates route_threshold over the grid {i·step} covering the predictor's
/// range: the first threshold lies strictly below min(P) (all queries R2)
/// and the last at or above max(P) (all queries R1).
ThresholdSweep threshold_sweep(const PerQuery& predicted, const PerQuery& eval_r1, const PerQuery& eval_r2,
                               double step = 0.01, unsigned threads = 1);

}  // namespace qpplab
