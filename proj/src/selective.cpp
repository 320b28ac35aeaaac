#include "qpplab/selective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpplab/error.hpp"
#include "qpplab/parallel.hpp"

namespace qpplab {

namespace {

template <typename A, typename B>
void require_same_queries(const std::map<QueryId, A>& a, const std::map<QueryId, B>& b, const char* what) {
  const bool same = a.size() == b.size() &&
                    std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; });
  if (!same) throw Error(ErrorKind::Alignment, std::string(what) + ": query sets differ");
}

double mean_of(const PerQuery& values) {
  double sum = 0.0;
  for (const auto& [q, v] : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

Choices oracle_choices(const PerQuery& eval_r1, const PerQuery& eval_r2) {
  Choices choices;
  for (const auto& [q, v1] : eval_r1) choices.emplace(q, eval_r2.at(q) > v1 ? Ranker::R2 : Ranker::R1);
  return choices;
}

// mean_meta and fraction routed to R2 for a choice set, without building the
// full result.
std::pair<double, double> meta_mean(const Choices& choices, const PerQuery& eval_r1, const PerQuery& eval_r2) {
  double sum = 0.0;
  std::size_t r2 = 0;
  for (const auto& [q, c] : choices) {
    if (c == Ranker::R2) ++r2;
    sum += c == Ranker::R1 ? eval_r1.at(q) : eval_r2.at(q);
  }
  const double n = static_cast<double>(choices.size());
  return {sum / n, static_cast<double>(r2) / n};
}

}  // namespace

std::string to_string(Ranker r) { return r == Ranker::R1 ? "R1" : "R2"; }

Choices route_threshold(const PerQuery& predicted, double threshold) {
  Choices choices;
  for (const auto& [q, p] : predicted) choices.emplace(q, p <= threshold ? Ranker::R1 : Ranker::R2);
  return choices;
}

Choices route_pairwise(const PerQuery& predicted_r1, const PerQuery& predicted_r2) {
  require_same_queries(predicted_r1, predicted_r2, "pairwise routing");
  Choices choices;
  for (const auto& [q, p1] : predicted_r1) choices.emplace(q, predicted_r2.at(q) > p1 ? Ranker::R2 : Ranker::R1);
  return choices;
}

Choices route_learned(const FeatureTable& features, const std::vector<TrainedModel>& models_r1,
                      const std::vector<TrainedModel>& models_r2) {
  auto predict_for = [&](const std::vector<TrainedModel>& models, const QueryId& q, const char* ranker) {
    for (const auto& m : models) {
      if (m.trained_on.contains(q)) continue;
      const auto& names = feature_names(m.model);
      return predict(m.model, design_matrix(features, {q}, names)).front();
    }
    throw Error(ErrorKind::Protocol,
                "query '" + q + "' was in the training set of every " + ranker + " model (in-fold routing)");
  };
  Choices choices;
  for (const auto& [q, _] : features.rows()) {
    const double p1 = predict_for(models_r1, q, "R1");
    const double p2 = predict_for(models_r2, q, "R2");
    choices.emplace(q, p2 > p1 ? Ranker::R2 : Ranker::R1);
  }
  return choices;
}

Choices route_learned_cv(const FeatureTable& features, const PerQuery& eval_r1, const PerQuery& eval_r2,
                         const LearnerSpec& learner, std::uint64_t seed) {
  require_same_queries(eval_r1, eval_r2, "learned routing");
  std::vector<QueryId> queries;
  for (const auto& [q, _] : eval_r1) queries.push_back(q);
  const FeatureTable table = features.restricted_to(queries);
  const CvSplit split = two_fold_split(queries, seed);
  const auto models_r1 = train_fold_models(table, eval_r1, learner, split, seed);
  const auto models_r2 = train_fold_models(table, eval_r2, learner, split, seed);
  return route_learned(table, models_r1, models_r2);
}

RouteResult oracle_route(const PerQuery& eval_r1, const PerQuery& eval_r2) {
  require_same_queries(eval_r1, eval_r2, "oracle routing");
  return evaluate_policy(oracle_choices(eval_r1, eval_r2), eval_r1, eval_r2, "oracle");
}

RouteResult evaluate_policy(const Choices& choices, const PerQuery& eval_r1, const PerQuery& eval_r2,
                            std::string policy) {
  require_same_queries(eval_r1, eval_r2, "policy evaluation");
  require_same_queries(choices, eval_r1, "policy evaluation");
  if (choices.empty()) throw Error(ErrorKind::SampleSize, "policy evaluation over an empty query set");

  RouteResult result;
  result.policy = std::move(policy);
  result.choices = choices;
  for (const auto& [q, c] : choices) result.meta_scores.emplace(q, c == Ranker::R1 ? eval_r1.at(q) : eval_r2.at(q));
  const auto [mean, fraction] = meta_mean(choices, eval_r1, eval_r2);
  result.mean_meta = mean;
  result.fraction_r2 = fraction;
  result.mean_r1 = mean_of(eval_r1);
  result.mean_r2 = mean_of(eval_r2);
  const auto [oracle_mean, oracle_fraction] = meta_mean(oracle_choices(eval_r1, eval_r2), eval_r1, eval_r2);
  result.oracle_mean = oracle_mean;
  result.oracle_fraction_r2 = oracle_fraction;
  result.beats_both = result.mean_meta > std::max(result.mean_r1, result.mean_r2);
  return result;
}

ThresholdSweep threshold_sweep(const PerQuery& predicted, const PerQuery& eval_r1, const PerQuery& eval_r2,
                               double step, unsigned threads) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::Config, "sweep step must be positive");
  require_same_queries(predicted, eval_r1, "threshold sweep");
  require_same_queries(eval_r1, eval_r2, "threshold sweep");
  if (predicted.empty()) throw Error(ErrorKind::SampleSize, "threshold sweep over an empty query set");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [q, p] : predicted) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  // Grid anchored at zero: thresholds i·step from the last one below min(P)
  // to the first one at or above max(P).
  auto first = static_cast<long long>(std::floor(lo / step));
  while (static_cast<double>(first) * step >= lo) --first;
  while (static_cast<double>(first + 1) * step < lo) ++first;
  auto last = static_cast<long long>(std::ceil(hi / step));
  while (static_cast<double>(last) * step < hi) ++last;
  while (last - 1 > first && static_cast<double>(last - 1) * step >= hi) --last;
  if (last - first > 10'000'000) throw Error(ErrorKind::Config, "sweep step too small for the predictor range");

  ThresholdSweep sweep;
  sweep.points.resize(static_cast<std::size_t>(last - first + 1));
  parallel_for(sweep.points.size(), threads, [&](std::size_t i) {
    const double t = static_cast<double>(first + static_cast<long long>(i)) * step;
    const auto [mean, fraction] = meta_mean(route_threshold(predicted, t), eval_r1, eval_r2);
    sweep.points[i] = SweepPoint{t, mean, fraction};
  });
  for (std::size_t i = 1; i < sweep.points.size(); ++i)
    if (sweep.points[i].mean_meta > sweep.points[sweep.best].mean_meta) sweep.best = i;
  return sweep;
}

}  // namespace qpplab
