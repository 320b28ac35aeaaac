#include "qpplab/effectiveness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/numeric_format.hpp"
#include "qpplab/parallel.hpp"

namespace qpplab {

namespace {

int grade_of(const Judgments& judgments, const DocId& doc) {
  auto it = judgments.find(doc);
  return it == judgments.end() ? 0 : it->second;
}

std::size_t relevant_count(const Judgments& judgments) {
  return static_cast<std::size_t>(
      std::count_if(judgments.begin(), judgments.end(), [](const auto& j) { return j.second > 0; }));
}

double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

// The *_quiet variants assume at least one relevant document exists.
double ndcg_quiet(std::span<const ScoredDoc> ranking, const Judgments& judgments, std::optional<int> cutoff) {
  const std::size_t depth = cutoff ? std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(*cutoff))
                                   : ranking.size();
  double dcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) dcg += grade_of(judgments, ranking[i].doc_id) * discount(i + 1);

  std::vector<int> ideal;
  for (const auto& [doc, grade] : judgments)
    if (grade > 0) ideal.push_back(grade);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  if (cutoff && ideal.size() > static_cast<std::size_t>(*cutoff)) ideal.resize(static_cast<std::size_t>(*cutoff));
  double idcg = 0.0;
  for (std::size_t i = 0; i < ideal.size(); ++i) idcg += ideal[i] * discount(i + 1);
  return dcg / idcg;
}

double ap_quiet(std::span<const ScoredDoc> ranking, const Judgments& judgments) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (grade_of(judgments, ranking[i].doc_id) > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant_count(judgments));
}

bool warn_if_no_relevant(const Judgments& judgments, const char* measure) {
  if (relevant_count(judgments) > 0) return false;
  warn(std::string(measure) + ": query has no relevant documents; scoring 0");
  return true;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

double ndcg(std::span<const ScoredDoc> ranking, const Judgments& judgments, std::optional<int> cutoff) {
  if (cutoff && *cutoff < 1) throw Error(ErrorKind::Config, "NDCG cutoff must be positive");
  if (warn_if_no_relevant(judgments, "NDCG")) return 0.0;
  return ndcg_quiet(ranking, judgments, cutoff);
}

double average_precision(std::span<const ScoredDoc> ranking, const Judgments& judgments) {
  if (warn_if_no_relevant(judgments, "MAP")) return 0.0;
  return ap_quiet(ranking, judgments);
}

double precision_at(std::span<const ScoredDoc> ranking, const Judgments& judgments, int k) {
  if (k < 1) throw Error(ErrorKind::Config, "precision cutoff must be positive");
  const std::size_t depth = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += grade_of(judgments, ranking[i].doc_id) > 0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double mrr_at(std::span<const ScoredDoc> ranking, const Judgments& judgments, int k) {
  if (k < 1) throw Error(ErrorKind::Config, "reciprocal-rank cutoff must be positive");
  const std::size_t depth = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < depth; ++i)
    if (grade_of(judgments, ranking[i].doc_id) > 0) return 1.0 / static_cast<double>(i + 1);
  return 0.0;
}

// ---------------------------------------------------------------------------

std::string Measure::name() const {
  switch (kind) {
    case Kind::Ndcg: return cutoff ? "NDCG@" + std::to_string(*cutoff) : "NDCG";
    case Kind::AveragePrecision: return "MAP";
    case Kind::Precision: return "P@" + std::to_string(cutoff.value_or(10));
    case Kind::ReciprocalRank: return "MRR@" + std::to_string(cutoff.value_or(10));
  }
  return {};
}

double Measure::evaluate(std::span<const ScoredDoc> ranking, const Judgments& judgments) const {
  switch (kind) {
    case Kind::Ndcg: return relevant_count(judgments) ? ndcg_quiet(ranking, judgments, cutoff) : 0.0;
    case Kind::AveragePrecision: return relevant_count(judgments) ? ap_quiet(ranking, judgments) : 0.0;
    case Kind::Precision: return precision_at(ranking, judgments, cutoff.value_or(10));
    case Kind::ReciprocalRank: return mrr_at(ranking, judgments, cutoff.value_or(10));
  }
  return 0.0;
}

Measure Measure::parse(std::string_view text) {
  const std::string u = upper(text);
  auto with_cutoff = [&](std::string_view prefix, Kind kind, bool required) -> std::optional<Measure> {
    if (!std::string_view(u).starts_with(prefix)) return std::nullopt;
    std::string_view rest = std::string_view(u).substr(prefix.size());
    if (rest.empty()) {
      if (required) return std::nullopt;
      return Measure{kind, std::nullopt};
    }
    if (rest.front() != '@') return std::nullopt;
    long long k = 0;
    if (!parse_integer(rest.substr(1), k) || k < 1) return std::nullopt;
    return Measure{kind, static_cast<int>(k)};
  };
  if (u == "MAP") return Measure{Kind::AveragePrecision, std::nullopt};
  if (auto m = with_cutoff("NDCG", Kind::Ndcg, false)) return *m;
  if (auto m = with_cutoff("MRR", Kind::ReciprocalRank, true)) return *m;
  if (auto m = with_cutoff("P", Kind::Precision, true)) return *m;
  throw Error(ErrorKind::Config, "unknown measure '" + std::string(text) + "'");
}

std::vector<Measure> default_measures() {
  return {Measure{Measure::Kind::Ndcg, std::nullopt}, Measure{Measure::Kind::AveragePrecision, std::nullopt},
          Measure{Measure::Kind::Precision, 10}, Measure{Measure::Kind::ReciprocalRank, 10}};
}

// ---------------------------------------------------------------------------

std::size_t EvalTable::measure_index(std::string_view name) const {
  auto it = std::find(measures.begin(), measures.end(), name);
  if (it == measures.end()) throw Error(ErrorKind::Config, "no measure named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - measures.begin());
}

std::map<QueryId, double> EvalTable::column(std::string_view name) const {
  const auto idx = measure_index(name);
  std::map<QueryId, double> out;
  for (const auto& [q, row] : rows) out.emplace(q, row[idx]);
  return out;
}

std::vector<double> EvalTable::means() const {
  std::vector<double> sums(measures.size(), 0.0);
  for (const auto& [q, row] : rows)
    for (std::size_t m = 0; m < row.size(); ++m) sums[m] += row[m];
  for (auto& s : sums) s = rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
  return sums;
}

EvalTable evaluate_run(const RunSet& run, const QrelsSet& qrels, const std::vector<Measure>& measures,
                       unsigned threads) {
  const auto queries = align_queries(run, qrels);
  EvalTable table;
  for (const auto& m : measures) table.measures.push_back(m.name());

  std::vector<std::vector<double>> values(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const auto& judgments = qrels.for_query(queries[i]);
    const auto& ranking = run.ranking(queries[i]);
    values[i].reserve(measures.size());
    for (const auto& m : measures) values[i].push_back(m.evaluate(ranking, judgments));
  });
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (relevant_count(qrels.for_query(queries[i])) == 0)
      warn("query '" + queries[i] + "' has no relevant documents; graded measures score 0");
    table.rows.emplace(queries[i], std::move(values[i]));
  }
  return table;
}

void write_eval_table(std::ostream& out, const EvalTable& table) {
  out << "qid";
  for (const auto& m : table.measures) out << '\t' << m;
  out << '\n';
  for (const auto& [q, row] : table.rows) {
    out << q;
    for (double v : row) out << '\t' << format_exact(v);
    out << '\n';
  }
  out << "MEAN";
  for (double v : table.means()) out << '\t' << format_exact(v);
  out << '\n';
}

EvalTable parse_eval_table(std::istream& in, std::string_view source) {
  FeatureTable raw = parse_feature_table(in, source);
  EvalTable table;
  table.measures = raw.columns();
  for (const auto& [q, row] : raw.rows()) {
    if (q == "MEAN") continue;
    for (double v : row)
      if (v < 0.0 || v > 1.0)
        throw Error(ErrorKind::Parse, std::string(source) + ": value outside [0,1] for query '" + q + "'");
    table.rows.emplace(q, row);
  }
  return table;
}

EvalTable load_eval_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_eval_table(in, path);
}

}  // namespace qpplab
