#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qpplab {

// Query identifiers are kept verbatim as they appear in the input files.
// Ordered containers keyed by QueryId give the sorted-query iteration order
// every module relies on for deterministic output.
using QueryId = std::string;
using DocId = std::string;

struct ScoredDoc {
  DocId doc_id;
  int rank = 0;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

using Ranking = std::vector<ScoredDoc>;

/// Per-query ranked lists from one TREC run file. After load every list is
/// ordered by descending score, ties by ascending doc id, and ranks are
/// renumbered 1..n.
struct RunSet {
  std::string run_tag;
  std::map<QueryId, Ranking> entries;

  bool contains(const QueryId& q) const { return entries.contains(q); }
  const Ranking& ranking(const QueryId& q) const;
  std::set<QueryId> query_ids() const;

  bool operator==(const RunSet&) const = default;
};

using Judgments = std::map<DocId, int>;

struct QrelsSet {
  std::map<QueryId, Judgments> judgments;

  /// Judgments for q, or an empty map when q has none.
  const Judgments& for_query(const QueryId& q) const;
  std::set<QueryId> query_ids() const;
};

enum class Provenance { Computed, Ingested };

/// Query-indexed matrix of named predictor values.
class FeatureTable {
 public:
  FeatureTable() = default;

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<Provenance>& provenance() const { return provenance_; }
  const std::map<QueryId, std::vector<double>>& rows() const { return rows_; }

  std::size_t column_index(std::string_view name) const;  // Config error if absent
  bool has_column(std::string_view name) const;
  std::map<QueryId, double> column(std::string_view name) const;
  std::set<QueryId> query_ids() const;
  double at(const QueryId& q, std::string_view column) const;

  /// Appends a column; throws ErrorKind::Merge on a duplicate name. Rows
  /// already present must all receive a value and no new rows may appear
  /// unless the table is still empty.
  void add_column(const std::string& name, Provenance prov, const std::map<QueryId, double>& values);

  /// Restricts rows to the given queries (all of which must be present).
  FeatureTable restricted_to(const std::vector<QueryId>& queries) const;

  /// Column-wise merge over the shared queries; duplicate column → Merge error.
  static FeatureTable merge(const std::vector<FeatureTable>& tables, const std::vector<QueryId>& queries);

 private:
  std::vector<std::string> columns_;
  std::vector<Provenance> provenance_;
  std::map<QueryId, std::vector<double>> rows_;
};

struct TermStat {
  std::string term;
  long long tcf = 0;
};

struct QueryTermStats {
  std::map<QueryId, std::vector<TermStat>> terms;
};

/// Query-vs-whole-corpus retrieval score per query.
struct CorpusScoreTable {
  std::map<QueryId, double> scores;
  std::set<QueryId> query_ids() const;
};

/// Raw per-document LETOR matching scores, one block per feature in the
/// order features first appear in the sidecar.
struct LetorSidecar {
  struct Feature {
    std::string name;
    std::map<QueryId, std::map<DocId, double>> values;
  };
  std::vector<Feature> features;

  const Feature& feature(std::string_view name) const;
};

// Parsers. `source` names the stream in error messages. Lines whose first
// non-blank character is '#' are comments; blank lines are skipped; CRLF is
// accepted.
RunSet parse_run(std::istream& in, std::string_view source = "<run>");
QrelsSet parse_qrels(std::istream& in, std::string_view source = "<qrels>");
FeatureTable parse_feature_table(std::istream& in, std::string_view source = "<features>");
QueryTermStats parse_query_term_stats(std::istream& in, std::string_view source = "<term-stats>");
CorpusScoreTable parse_corpus_scores(std::istream& in, std::string_view source = "<corpus-scores>");
LetorSidecar parse_letor_sidecar(std::istream& in, std::string_view source = "<letor>");

void write_run(std::ostream& out, const RunSet& run);
void write_feature_table(std::ostream& out, const FeatureTable& table);
void write_qrels(std::ostream& out, const QrelsSet& qrels);
void write_query_term_stats(std::ostream& out, const QueryTermStats& stats);
void write_corpus_scores(std::ostream& out, const CorpusScoreTable& table, const std::string& column = "corpus_score");
void write_letor_sidecar(std::ostream& out, const LetorSidecar& sidecar);

// Convenience wrappers that open a file and use its path as the source name.
RunSet load_run(const std::string& path);
QrelsSet load_qrels(const std::string& path);
FeatureTable load_feature_table(const std::string& path);
QueryTermStats load_query_term_stats(const std::string& path);
CorpusScoreTable load_corpus_scores(const std::string& path);
LetorSidecar load_letor_sidecar(const std::string& path);

/// Number of terms of q with corpus frequency > 0. Throws MissingQuery when
/// q has no entry and DegenerateQuery when the count is zero.
int effective_term_count(const QueryTermStats& stats, const QueryId& q);

/// A named query set taking part in alignment.
struct QuerySource {
  std::string name;
  std::set<QueryId> ids;
};

/// Intersection of all sources, sorted ascending. Emits one warning per
/// dropped query naming each source it is missing from; throws Alignment
/// when nothing survives.
std::vector<QueryId> align_queries(const std::vector<QuerySource>& sources);
std::vector<QueryId> align_queries(const RunSet& run, const QrelsSet& qrels,
                                   const std::vector<QuerySource>& extra = {});

}  // namespace qpplab
