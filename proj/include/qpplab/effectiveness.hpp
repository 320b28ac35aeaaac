#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qpplab/corpus_io.hpp"

namespace qpplab {

// Graded gain is the raw grade with a 1/log2(rank+1) discount. Binary
// measures treat grade > 0 as relevant. A query without relevant documents
// scores 0 and raises a warning.
double ndcg(std::span<const ScoredDoc> ranking, const Judgments& judgments,
            std::optional<int> cutoff = std::nullopt);
double average_precision(std::span<const ScoredDoc> ranking, const Judgments& judgments);
double precision_at(std::span<const ScoredDoc> ranking, const Judgments& judgments, int k);
double mrr_at(std::span<const ScoredDoc> ranking, const Judgments& judgments, int k);

struct Measure {
  enum class Kind { Ndcg, AveragePrecision, Precision, ReciprocalRank };
  Kind kind = Kind::Ndcg;
  std::optional<int> cutoff;  // required for Precision and ReciprocalRank

  /// Canonical name: NDCG, NDCG@k, MAP, P@k, MRR@k.
  std::string name() const;
  double evaluate(std::span<const ScoredDoc> ranking, const Judgments& judgments) const;

  /// Parses a canonical name (case-insensitive); Config error otherwise.
  static Measure parse(std::string_view text);
};

std::vector<Measure> default_measures();  // NDCG, MAP, P@10, MRR@10

/// Query-indexed effectiveness values, one per measure.
struct EvalTable {
  std::vector<std::string> measures;
  std::map<QueryId, std::vector<double>> rows;

  std::size_t measure_index(std::string_view name) const;
  std::map<QueryId, double> column(std::string_view name) const;
  /// Means accumulated over rows in sorted query order.
  std::vector<double> means() const;
};

/// Evaluates every aligned query; `threads` workers, result independent of it.
EvalTable evaluate_run(const RunSet& run, const QrelsSet& qrels, const std::vector<Measure>& measures,
                       unsigned threads = 1);

/// TSV: header `qid` + measure names, one row per query, final `MEAN` row.
void write_eval_table(std::ostream& out, const EvalTable& table);
/// Reads the TSV written above; the MEAN row is skipped.
EvalTable parse_eval_table(std::istream& in, std::string_view source = "<eval>");
EvalTable load_eval_table(const std::string& path);

}  // namespace qpplab
