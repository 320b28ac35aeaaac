#include "qpplab/corpus_io.hpp"

#include <algorithm>
#include <fstream>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/numeric_format.hpp"

namespace qpplab {

namespace {

// Reads logical lines, tracking 1-based line numbers and dropping comments,
// blank lines and trailing CR.
class LineReader {
 public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  std::size_t line_no() const { return line_no_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    fields.push_back(trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool valid_token(std::string_view token) {
  return !token.empty() && token.find_first_of(" \t") == std::string_view::npos;
}

void require_token(const LineReader& reader, std::string_view token, const char* what) {
  if (!valid_token(token)) reader.fail(std::string("invalid ") + what + " '" + std::string(token) + "'");
}

template <typename Parser>
auto load_with(const std::string& path, Parser parser) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return parser(in, path);
}

}  // namespace

// ---------------------------------------------------------------------------

const Ranking& RunSet::ranking(const QueryId& q) const {
  auto it = entries.find(q);
  if (it == entries.end()) throw Error(ErrorKind::MissingQuery, "query '" + q + "' not in run '" + run_tag + "'");
  return it->second;
}

std::set<QueryId> RunSet::query_ids() const {
  std::set<QueryId> ids;
  for (const auto& [q, _] : entries) ids.insert(q);
  return ids;
}

const Judgments& QrelsSet::for_query(const QueryId& q) const {
  static const Judgments empty;
  auto it = judgments.find(q);
  return it == judgments.end() ? empty : it->second;
}

std::set<QueryId> QrelsSet::query_ids() const {
  std::set<QueryId> ids;
  for (const auto& [q, _] : judgments) ids.insert(q);
  return ids;
}

std::set<QueryId> CorpusScoreTable::query_ids() const {
  std::set<QueryId> ids;
  for (const auto& [q, _] : scores) ids.insert(q);
  return ids;
}

const LetorSidecar::Feature& LetorSidecar::feature(std::string_view name) const {
  for (const auto& f : features)
    if (f.name == name) return f;
  throw Error(ErrorKind::Config, "LETOR feature '" + std::string(name) + "' not present in sidecar");
}

// ---------------------------------------------------------------------------
// FeatureTable

std::size_t FeatureTable::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw Error(ErrorKind::Config, "no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

bool FeatureTable::has_column(std::string_view name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::map<QueryId, double> FeatureTable::column(std::string_view name) const {
  const auto idx = column_index(name);
  std::map<QueryId, double> out;
  for (const auto& [q, row] : rows_) out.emplace(q, row[idx]);
  return out;
}

std::set<QueryId> FeatureTable::query_ids() const {
  std::set<QueryId> ids;
  for (const auto& [q, _] : rows_) ids.insert(q);
  return ids;
}

double FeatureTable::at(const QueryId& q, std::string_view column) const {
  auto it = rows_.find(q);
  if (it == rows_.end()) throw Error(ErrorKind::MissingQuery, "query '" + q + "' not in feature table");
  return it->second[column_index(column)];
}

void FeatureTable::add_column(const std::string& name, Provenance prov,
                              const std::map<QueryId, double>& values) {
  if (has_column(name)) throw Error(ErrorKind::Merge, "duplicate feature column '" + name + "'");
  if (columns_.empty() && rows_.empty()) {
    for (const auto& [q, v] : values) rows_[q].push_back(v);
  } else {
    if (values.size() != rows_.size())
      throw Error(ErrorKind::Dimension, "column '" + name + "' does not cover the table's queries");
    for (auto& [q, row] : rows_) {
      auto it = values.find(q);
      if (it == values.end())
        throw Error(ErrorKind::MissingQuery, "column '" + name + "' has no value for query '" + q + "'");
      row.push_back(it->second);
    }
  }
  columns_.push_back(name);
  provenance_.push_back(prov);
}

FeatureTable FeatureTable::restricted_to(const std::vector<QueryId>& queries) const {
  FeatureTable out;
  out.columns_ = columns_;
  out.provenance_ = provenance_;
  for (const auto& q : queries) {
    auto it = rows_.find(q);
    if (it == rows_.end()) throw Error(ErrorKind::MissingQuery, "query '" + q + "' not in feature table");
    out.rows_.emplace(q, it->second);
  }
  return out;
}

FeatureTable FeatureTable::merge(const std::vector<FeatureTable>& tables, const std::vector<QueryId>& queries) {
  FeatureTable out;
  for (const auto& q : queries) out.rows_[q];
  for (const auto& table : tables) {
    for (std::size_t c = 0; c < table.columns_.size(); ++c) {
      if (out.has_column(table.columns_[c]))
        throw Error(ErrorKind::Merge, "duplicate feature column '" + table.columns_[c] + "'");
      out.columns_.push_back(table.columns_[c]);
      out.provenance_.push_back(table.provenance_[c]);
      for (const auto& q : queries) {
        auto it = table.rows_.find(q);
        if (it == table.rows_.end())
          throw Error(ErrorKind::MissingQuery, "query '" + q + "' missing from a merged table");
        out.rows_[q].push_back(it->second[c]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsers

RunSet parse_run(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  RunSet run;
  std::map<QueryId, std::set<DocId>> seen;
  std::string line;
  bool first = true;
  while (reader.next(line)) {
    const auto f = split_whitespace(line);
    if (f.size() != 6) reader.fail("expected 6 fields, found " + std::to_string(f.size()));
    long long rank = 0;
    double score = 0.0;
    if (!parse_integer(f[3], rank)) reader.fail("non-integer rank '" + std::string(f[3]) + "'");
    if (!parse_real(f[4], score)) reader.fail("non-numeric score '" + std::string(f[4]) + "'");
    QueryId q(f[0]);
    DocId d(f[2]);
    if (!seen[q].insert(d).second) {
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate document '" + d + "' for query '" + q + "'");
    }
    if (first) {
      run.run_tag = std::string(f[5]);
      first = false;
    }
    run.entries[q].push_back(ScoredDoc{std::move(d), static_cast<int>(rank), score});
  }
  for (auto& [q, ranking] : run.entries) {
    std::sort(ranking.begin(), ranking.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id < b.doc_id;
    });
    for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i].rank = static_cast<int>(i + 1);
  }
  return run;
}

QrelsSet parse_qrels(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  QrelsSet qrels;
  std::string line;
  while (reader.next(line)) {
    const auto f = split_whitespace(line);
    if (f.size() != 4) reader.fail("expected 4 fields, found " + std::to_string(f.size()));
    long long grade = 0;
    if (!parse_integer(f[3], grade)) reader.fail("non-integer grade '" + std::string(f[3]) + "'");
    QueryId q(f[0]);
    DocId d(f[2]);
    if (grade < 0) {
      warn(std::string(source) + ":" + std::to_string(reader.line_no()) + ": negative grade " +
           std::to_string(grade) + " for (" + q + ", " + d + ") clamped to 0");
      grade = 0;
    }
    if (!qrels.judgments[q].emplace(d, static_cast<int>(grade)).second) {
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate judgment for (" + q + ", " + d + ")");
    }
  }
  return qrels;
}

FeatureTable parse_feature_table(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("missing header line");
  const auto header = split_tabs(line);
  if (header.size() < 2) reader.fail("header needs a query-id column and at least one feature");
  std::vector<std::string> names;
  for (std::size_t i = 1; i < header.size(); ++i) {
    require_token(reader, header[i], "column name");
    if (std::find(names.begin(), names.end(), header[i]) != names.end())
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate column '" + std::string(header[i]) + "'");
    names.emplace_back(header[i]);
  }

  std::map<QueryId, std::vector<double>> rows;
  while (reader.next(line)) {
    const auto cells = split_tabs(line);
    if (cells.size() != header.size())
      reader.fail("ragged row: expected " + std::to_string(header.size()) + " cells, found " +
                  std::to_string(cells.size()));
    require_token(reader, cells[0], "query id");
    std::vector<double> values(names.size());
    for (std::size_t i = 1; i < cells.size(); ++i)
      if (!parse_real(cells[i], values[i - 1])) reader.fail("non-numeric cell '" + std::string(cells[i]) + "'");
    if (!rows.emplace(QueryId(cells[0]), std::move(values)).second)
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate query '" + std::string(cells[0]) + "'");
  }

  FeatureTable table;
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::map<QueryId, double> column;
    for (const auto& [q, row] : rows) column.emplace(q, row[c]);
    table.add_column(names[c], Provenance::Ingested, column);
  }
  return table;
}

QueryTermStats parse_query_term_stats(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  QueryTermStats stats;
  std::string line;
  while (reader.next(line)) {
    const auto f = split_tabs(line);
    if (f.size() != 3) reader.fail("expected 3 tab-separated fields, found " + std::to_string(f.size()));
    require_token(reader, f[0], "query id");
    require_token(reader, f[1], "term");
    long long tcf = 0;
    if (!parse_integer(f[2], tcf)) reader.fail("non-integer tcf '" + std::string(f[2]) + "'");
    if (tcf < 0) reader.fail("negative tcf " + std::to_string(tcf));
    auto& terms = stats.terms[QueryId(f[0])];
    if (std::any_of(terms.begin(), terms.end(), [&](const TermStat& t) { return t.term == f[1]; }))
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate term '" + std::string(f[1]) + "' for query '" +
                                            std::string(f[0]) + "'");
    terms.push_back(TermStat{std::string(f[1]), tcf});
  }
  return stats;
}

CorpusScoreTable parse_corpus_scores(std::istream& in, std::string_view source) {
  const FeatureTable table = parse_feature_table(in, source);
  if (table.columns().size() != 1)
    throw ParseError(std::string(source), 1, "corpus-score table must have exactly one value column");
  return CorpusScoreTable{table.column(table.columns().front())};
}

LetorSidecar parse_letor_sidecar(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  LetorSidecar sidecar;
  std::string line;
  while (reader.next(line)) {
    const auto f = split_tabs(line);
    if (f.size() != 4) reader.fail("expected 4 tab-separated fields, found " + std::to_string(f.size()));
    require_token(reader, f[0], "query id");
    require_token(reader, f[1], "document id");
    require_token(reader, f[2], "feature name");
    double value = 0.0;
    if (!parse_real(f[3], value)) reader.fail("non-numeric value '" + std::string(f[3]) + "'");
    auto it = std::find_if(sidecar.features.begin(), sidecar.features.end(),
                           [&](const LetorSidecar::Feature& x) { return x.name == f[2]; });
    if (it == sidecar.features.end()) {
      sidecar.features.push_back({std::string(f[2]), {}});
      it = std::prev(sidecar.features.end());
    }
    if (!it->values[QueryId(f[0])].emplace(DocId(f[1]), value).second)
      throw Error(ErrorKind::Duplicate, std::string(source) + ":" + std::to_string(reader.line_no()) +
                                            ": duplicate LETOR value for (" + std::string(f[0]) + ", " +
                                            std::string(f[1]) + ", " + std::string(f[2]) + ")");
  }
  return sidecar;
}

void write_run(std::ostream& out, const RunSet& run) {
  const std::string tag = run.run_tag.empty() ? "run" : run.run_tag;
  for (const auto& [q, ranking] : run.entries)
    for (const auto& doc : ranking)
      out << q << " Q0 " << doc.doc_id << ' ' << doc.rank << ' ' << format_exact(doc.score) << ' ' << tag << '\n';
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
  out << "qid";
  for (const auto& c : table.columns()) out << '\t' << c;
  out << '\n';
  for (const auto& [q, row] : table.rows()) {
    out << q;
    for (double v : row) out << '\t' << format_exact(v);
    out << '\n';
  }
}

void write_qrels(std::ostream& out, const QrelsSet& qrels) {
  for (const auto& [q, judgments] : qrels.judgments)
    for (const auto& [doc, grade] : judgments) out << q << " 0 " << doc << ' ' << grade << '\n';
}

void write_query_term_stats(std::ostream& out, const QueryTermStats& stats) {
  for (const auto& [q, terms] : stats.terms)
    for (const auto& t : terms) out << q << '\t' << t.term << '\t' << t.tcf << '\n';
}

void write_corpus_scores(std::ostream& out, const CorpusScoreTable& table, const std::string& column) {
  out << "qid\t" << column << '\n';
  for (const auto& [q, v] : table.scores) out << q << '\t' << format_exact(v) << '\n';
}

void write_letor_sidecar(std::ostream& out, const LetorSidecar& sidecar) {
  for (const auto& f : sidecar.features)
    for (const auto& [q, docs] : f.values)
      for (const auto& [doc, v] : docs) out << q << '\t' << doc << '\t' << f.name << '\t' << format_exact(v) << '\n';
}

RunSet load_run(const std::string& path) { return load_with(path, parse_run); }
QrelsSet load_qrels(const std::string& path) { return load_with(path, parse_qrels); }
FeatureTable load_feature_table(const std::string& path) { return load_with(path, parse_feature_table); }
QueryTermStats load_query_term_stats(const std::string& path) { return load_with(path, parse_query_term_stats); }
CorpusScoreTable load_corpus_scores(const std::string& path) { return load_with(path, parse_corpus_scores); }
LetorSidecar load_letor_sidecar(const std::string& path) { return load_with(path, parse_letor_sidecar); }

// ---------------------------------------------------------------------------

int effective_term_count(const QueryTermStats& stats, const QueryId& q) {
  auto it = stats.terms.find(q);
  if (it == stats.terms.end()) throw Error(ErrorKind::MissingQuery, "query '" + q + "' has no term statistics");
  const auto count = std::count_if(it->second.begin(), it->second.end(), [](const TermStat& t) { return t.tcf > 0; });
  if (count == 0)
    throw Error(ErrorKind::DegenerateQuery, "query '" + q + "' has no effective terms (all tcf = 0)");
  return static_cast<int>(count);
}

std::vector<QueryId> align_queries(const std::vector<QuerySource>& sources) {
  std::set<QueryId> all;
  for (const auto& s : sources) all.insert(s.ids.begin(), s.ids.end());
  std::vector<QueryId> kept;
  for (const auto& q : all) {
    std::string missing;
    for (const auto& s : sources) {
      if (s.ids.contains(q)) continue;
      if (!missing.empty()) missing += ", ";
      missing += s.name;
    }
    if (missing.empty())
      kept.push_back(q);
    else
      warn("dropping query '" + q + "': missing from " + missing);
  }
  if (kept.empty()) throw Error(ErrorKind::Alignment, "no query is present in every input");
  return kept;
}

std::vector<QueryId> align_queries(const RunSet& run, const QrelsSet& qrels, const std::vector<QuerySource>& extra) {
  std::vector<QuerySource> sources{{run.run_tag.empty() ? "run" : "run '" + run.run_tag + "'", run.query_ids()},
                                   {"qrels", qrels.query_ids()}};
  sources.insert(sources.end(), extra.begin(), extra.end());
  return align_queries(sources);
}

}  // namespace qpplab
