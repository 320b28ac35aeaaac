#pragma once

#include <cstdint>
#include <string>

#include "qpplab/corpus_io.hpp"

namespace qpplab {

struct SynthParams {
  std::uint64_t seed = 0;
  int n_queries = 50;
  int n_docs = 100;  // retrieved documents per query and system
  /// Weight of the true NDCG in the predictor columns: 0 gives independent
  /// noise, 1 a predictor monotone in NDCG.
  double informativeness = 0.5;

  void validate() const;  // Config error on n_queries < 4, n_docs < 1, a outside [0, 1]
};

/// A toy collection with two systems of per-query varying quality.
///
/// Every draw comes from one Rng(seed) in a fixed order, so the collection
/// is a pure function of the parameters. Predictor columns SYN1 and SYN2
/// are a·z(NDCG) + sqrt(1 − a²)·N(0, 1) for system 1 and 2, with z the
/// population z-score of the system's NDCG over all queries.
struct SynthCollection {
  SynthParams params;
  RunSet run1;
  RunSet run2;
  RunSet feedback;  // perturbed rerun of system 1
  QrelsSet qrels;
  CorpusScoreTable corpus_scores;
  QueryTermStats term_stats;
  LetorSidecar letor;  // default LETOR features over system 1's documents
  FeatureTable predictors;
};

SynthCollection synthesize(const SynthParams& params);

/// Generating parameters and file list as a JSON object.
std::string synth_manifest(const SynthCollection& collection);

}  // namespace qpplab
