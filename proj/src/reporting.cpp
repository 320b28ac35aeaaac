#include "qpplab/reporting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/numeric_format.hpp"
#include "qpplab/parallel.hpp"
#include "qpplab/qpp_letor.hpp"

namespace qpplab {

namespace {

constexpr const char* kUndefined = "n/a";

std::vector<std::string> split_tab_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, '\t')) out.push_back(cell);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

std::string render_cell(const Cell& cell) {
  if (!cell) return kUndefined;
  return format_fixed(cell->coefficient, 3) + marker_symbol(cell->marker);
}

Cell safe_correlate(Coefficient c, const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& what) {
  try {
    return correlate(c, x, y);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Undefined) throw;
    warn(what + ": correlation undefined (" + e.what() + ")");
    return std::nullopt;
  }
}

void markdown_row(std::ostream& out, const std::vector<std::string>& cells) {
  out << '|';
  for (const auto& c : cells) out << ' ' << c << " |";
  out << '\n';
}

void markdown_rule(std::ostream& out, std::size_t columns) {
  out << '|';
  for (std::size_t i = 0; i < columns; ++i) out << (i == 0 ? ":---|" : "---:|");
  out << '\n';
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "tsv") return ReportFormat::Tsv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  throw Error(ErrorKind::Config, "unknown format '" + std::string(text) + "' (tsv or markdown)");
}

std::string ColumnKey::label() const {
  std::string out;
  for (const auto* part : {&ranker, &collection, &measure}) {
    if (part->empty()) continue;
    if (!out.empty()) out += " / ";
    out += *part;
  }
  return out;
}

const Cell& CorrelationReport::cell(std::string_view row, const ColumnKey& column) const {
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (r == rows.end() || c == columns.end())
    throw Error(ErrorKind::Config, "no report cell for (" + std::string(row) + ", " + column.label() + ")");
  return cells[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(c - columns.begin())];
}

// ---------------------------------------------------------------------------

CorrelationReport correlation_table(const FeatureTable& features, const EvalTable& evals, Coefficient coefficient,
                                    const std::string& ranker, const std::string& collection, unsigned threads) {
  std::set<QueryId> eval_ids;
  for (const auto& [q, _] : evals.rows) eval_ids.insert(q);
  const auto queries = align_queries({{"features", features.query_ids()}, {"evaluation", eval_ids}});
  if (queries.size() < 3) throw Error(ErrorKind::SampleSize, "correlation table needs at least 3 shared queries");

  CorrelationReport report;
  report.coefficient = coefficient;
  report.rows = features.columns();
  for (const auto& m : evals.measures) report.columns.push_back({ranker, collection, m});
  report.cells.assign(report.rows.size(), std::vector<Cell>(report.columns.size()));

  const std::size_t n_cells = report.rows.size() * report.columns.size();
  parallel_for(n_cells, threads, [&](std::size_t i) {
    const std::size_t r = i / report.columns.size(), c = i % report.columns.size();
    std::vector<double> x, y;
    for (const auto& q : queries) {
      x.push_back(features.rows().at(q)[r]);
      y.push_back(evals.rows.at(q)[c]);
    }
    report.cells[r][c] = safe_correlate(coefficient, x, y, report.rows[r] + " vs " + report.columns[c].label());
  });
  return report;
}

CorrelationReport combine_reports(const std::vector<CorrelationReport>& reports) {
  CorrelationReport out;
  if (reports.empty()) return out;
  out.coefficient = reports.front().coefficient;
  for (const auto& r : reports) {
    if (r.coefficient != out.coefficient) throw Error(ErrorKind::Merge, "cannot combine pearson and kendall reports");
    for (const auto& row : r.rows)
      if (std::find(out.rows.begin(), out.rows.end(), row) == out.rows.end()) out.rows.push_back(row);
    for (const auto& col : r.columns) {
      if (std::find(out.columns.begin(), out.columns.end(), col) != out.columns.end())
        throw Error(ErrorKind::Merge, "duplicate report column '" + col.label() + "'");
      out.columns.push_back(col);
    }
  }
  out.cells.assign(out.rows.size(), std::vector<Cell>(out.columns.size()));
  std::size_t offset = 0;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto row = static_cast<std::size_t>(std::find(out.rows.begin(), out.rows.end(), r.rows[i]) - out.rows.begin());
      for (std::size_t c = 0; c < r.columns.size(); ++c) out.cells[row][offset + c] = r.cells[i][c];
    }
    offset += r.columns.size();
  }
  return out;
}

void write_report_tsv(std::ostream& out, const CorrelationReport& report) {
  out << "ranker\tcollection\tfeature\tmeasure\tkind\tcoefficient\tp_value\tn\tmarker\n";
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    const auto& key = report.columns[c];
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const auto& cell = report.cells[r][c];
      out << (key.ranker.empty() ? "-" : key.ranker) << '\t' << (key.collection.empty() ? "-" : key.collection)
          << '\t' << report.rows[r] << '\t' << key.measure << '\t' << to_string(report.coefficient) << '\t';
      if (cell)
        out << format_exact(cell->coefficient) << '\t' << format_exact(cell->p_value) << '\t' << cell->n << '\t'
            << marker_name(cell->marker) << '\n';
      else
        out << kUndefined << '\t' << kUndefined << '\t' << kUndefined << '\t' << marker_name(Marker::None) << '\n';
    }
  }
}

CorrelationReport parse_report_tsv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> void { throw ParseError(std::string(source), line_no, what); };
  if (!next_data_line(in, line, line_no)) fail("missing header");
  if (split_tab_line(line).size() != 9) fail("unexpected report header");

  CorrelationReport report;
  bool first = true;
  while (next_data_line(in, line, line_no)) {
    const auto f = split_tab_line(line);
    if (f.size() != 9) fail("expected 9 fields");
    const Coefficient kind = parse_coefficient(f[4]);
    if (first) report.coefficient = kind;
    else if (kind != report.coefficient) fail("mixed coefficient kinds");
    first = false;
    ColumnKey key{f[0] == "-" ? "" : f[0], f[1] == "-" ? "" : f[1], f[3]};
    auto col = std::find(report.columns.begin(), report.columns.end(), key);
    if (col == report.columns.end()) {
      report.columns.push_back(key);
      for (auto& row : report.cells) row.emplace_back();
      col = std::prev(report.columns.end());
    }
    auto row = std::find(report.rows.begin(), report.rows.end(), f[2]);
    if (row == report.rows.end()) {
      report.rows.push_back(f[2]);
      report.cells.emplace_back(report.columns.size());
      row = std::prev(report.rows.end());
    }
    Cell cell;
    if (f[5] != kUndefined) {
      CorrelationResult result;
      long long n = 0;
      if (!parse_real(f[5], result.coefficient) || !parse_real(f[6], result.p_value) || !parse_integer(f[7], n))
        fail("malformed numeric field");
      result.n = static_cast<std::size_t>(n);
      result.marker = parse_marker(f[8]);
      cell = result;
    }
    report.cells[static_cast<std::size_t>(row - report.rows.begin())]
                [static_cast<std::size_t>(col - report.columns.begin())] = cell;
  }
  return report;
}

void write_report_markdown(std::ostream& out, const CorrelationReport& report) {
  std::vector<std::string> header{"Predictor (" + to_string(report.coefficient) + ")"};
  for (const auto& c : report.columns) header.push_back(c.label());
  markdown_row(out, header);
  markdown_rule(out, header.size());
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    std::vector<std::string> cells{report.rows[r]};
    for (const auto& cell : report.cells[r]) cells.push_back(render_cell(cell));
    markdown_row(out, cells);
  }
}

// ---------------------------------------------------------------------------

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns, Coefficient coefficient,
                                     unsigned threads) {
  if (names.size() < 2 || names.size() != columns.size())
    throw Error(ErrorKind::SampleSize, "correlation matrix needs at least two named columns");
  CorrelationMatrix matrix;
  matrix.coefficient = coefficient;
  matrix.names = names;
  const std::size_t k = names.size();
  matrix.cells.assign(k, std::vector<Cell>(k));
  const std::size_t n = columns.front().size();
  for (std::size_t i = 0; i < k; ++i) matrix.cells[i][i] = CorrelationResult{1.0, 0.0, n, Marker::DoubleDagger};

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    matrix.cells[i][j] = safe_correlate(coefficient, columns[i], columns[j], names[i] + " vs " + names[j]);
  });
  for (const auto& [i, j] : pairs) matrix.cells[j][i] = matrix.cells[i][j];
  return matrix;
}

CorrelationMatrix correlation_matrix(const FeatureTable& features, const EvalTable& evals, Coefficient coefficient,
                                     unsigned threads) {
  std::set<QueryId> eval_ids;
  for (const auto& [q, _] : evals.rows) eval_ids.insert(q);
  const auto queries = align_queries({{"features", features.query_ids()}, {"evaluation", eval_ids}});
  std::vector<std::string> names = features.columns();
  names.insert(names.end(), evals.measures.begin(), evals.measures.end());
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& q : queries) {
    const auto& f = features.rows().at(q);
    const auto& e = evals.rows.at(q);
    for (std::size_t i = 0; i < f.size(); ++i) columns[i].push_back(f[i]);
    for (std::size_t i = 0; i < e.size(); ++i) columns[f.size() + i].push_back(e[i]);
  }
  return correlation_matrix(names, columns, coefficient, threads);
}

void write_matrix(std::ostream& out, const CorrelationMatrix& matrix, ReportFormat format) {
  if (format == ReportFormat::Tsv) {
    out << "row\tcolumn\tkind\tcoefficient\tp_value\tn\tmarker\n";
    for (std::size_t i = 0; i < matrix.names.size(); ++i)
      for (std::size_t j = 0; j < matrix.names.size(); ++j) {
        const auto& cell = matrix.cells[i][j];
        out << matrix.names[i] << '\t' << matrix.names[j] << '\t' << to_string(matrix.coefficient) << '\t';
        if (cell)
          out << format_exact(cell->coefficient) << '\t' << format_exact(cell->p_value) << '\t' << cell->n << '\t'
              << marker_name(cell->marker) << '\n';
        else
          out << kUndefined << '\t' << kUndefined << '\t' << kUndefined << "\tnone\n";
      }
    return;
  }
  std::vector<std::string> header{""};
  header.insert(header.end(), matrix.names.begin(), matrix.names.end());
  markdown_row(out, header);
  markdown_rule(out, header.size());
  for (std::size_t i = 0; i < matrix.names.size(); ++i) {
    std::vector<std::string> cells{matrix.names[i]};
    for (const auto& cell : matrix.cells[i]) cells.push_back(render_cell(cell));
    markdown_row(out, cells);
  }
}

// ---------------------------------------------------------------------------

std::vector<BoxplotGroup> boxplot_groups(const std::map<std::string, std::vector<double>>& groups) {
  if (groups.empty()) throw Error(ErrorKind::SampleSize, "boxplot needs at least one group");
  std::vector<BoxplotGroup> out;
  for (const auto& [label, values] : groups) {
    if (values.empty()) throw Error(ErrorKind::SampleSize, "boxplot group '" + label + "' is empty");
    BoxplotGroup g{label, values, {}};
    g.summary = {quantile(values, 0.0), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
                 quantile(values, 1.0)};
    out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BoxplotGroup& a, const BoxplotGroup& b) { return a.summary.median > b.summary.median; });
  return out;
}

std::vector<BoxplotGroup> boxplot_data(const std::vector<CorrelationRecord>& records, GroupBy group_by) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records) groups[group_by == GroupBy::Ranker ? r.ranker : r.collection].push_back(r.value);
  return boxplot_groups(groups);
}

void write_boxplot(std::ostream& out, const std::vector<BoxplotGroup>& groups, ReportFormat format) {
  if (format == ReportFormat::Tsv) {
    out << "group\tn\tmin\tq1\tmedian\tq3\tmax\n";
    for (const auto& g : groups)
      out << g.label << '\t' << g.values.size() << '\t' << format_exact(g.summary.min) << '\t'
          << format_exact(g.summary.q1) << '\t' << format_exact(g.summary.median) << '\t'
          << format_exact(g.summary.q3) << '\t' << format_exact(g.summary.max) << '\n';
    return;
  }
  markdown_row(out, {"Group", "n", "Min", "Q1", "Median", "Q3", "Max"});
  markdown_rule(out, 7);
  for (const auto& g : groups)
    markdown_row(out, {g.label, std::to_string(g.values.size()), format_fixed(g.summary.min),
                       format_fixed(g.summary.q1), format_fixed(g.summary.median), format_fixed(g.summary.q3),
                       format_fixed(g.summary.max)});
}

std::map<std::string, std::vector<double>> read_grouped_values(std::istream& in, const std::string& group_column,
                                                               const std::string& value_column,
                                                               std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_data_line(in, line, line_no)) throw ParseError(std::string(source), line_no, "missing header");
  const auto header = split_tab_line(line);
  auto index_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(std::string(source), line_no, "no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto g = index_of(group_column), v = index_of(value_column);
  std::map<std::string, std::vector<double>> groups;
  while (next_data_line(in, line, line_no)) {
    const auto f = split_tab_line(line);
    if (f == header) continue;  // concatenated files repeat their header
    if (f.size() != header.size()) throw ParseError(std::string(source), line_no, "ragged row");
    if (f[v] == kUndefined) {
      warn(std::string(source) + ":" + std::to_string(line_no) + ": skipping undefined value");
      continue;
    }
    double value = 0.0;
    if (!parse_real(f[v], value)) throw ParseError(std::string(source), line_no, "non-numeric value '" + f[v] + "'");
    groups[f[g]].push_back(value);
  }
  return groups;
}

// ---------------------------------------------------------------------------

std::string scatter_export(const std::map<QueryId, double>& predicted, const std::map<QueryId, double>& actual,
                           const std::string& feature_name, const std::string& measure_name) {
  std::vector<double> x, y;
  for (const auto& [q, p] : predicted) {
    auto it = actual.find(q);
    if (it == actual.end()) continue;
    x.push_back(p);
    y.push_back(it->second);
  }
  if (x.empty()) throw Error(ErrorKind::Alignment, "scatter export: no shared queries");
  std::ostringstream out;
  out << "# scatter " << feature_name << " vs " << measure_name << ": ";
  Cell r;
  if (x.size() >= 3) r = safe_correlate(Coefficient::Pearson, x, y, feature_name + " vs " + measure_name);
  if (r)
    out << "r=" << format_fixed(r->coefficient, 3) << " p=" << format_exact(r->p_value) << " n=" << x.size() << '\n';
  else
    out << "r=" << kUndefined << " p=" << kUndefined << " n=" << x.size() << '\n';
  out << "predicted\tactual\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << format_exact(x[i]) << '\t' << format_exact(y[i]) << '\n';
  return out.str();
}

void write_error_table(std::ostream& out, const std::vector<ErrorTableRow>& rows, ReportFormat format) {
  auto r2 = [&](const ErrorReport& e, bool exact) {
    if (!e.r_squared) return std::string(kUndefined);
    return exact ? format_exact(*e.r_squared) : format_fixed(*e.r_squared);
  };
  if (format == ReportFormat::Tsv) {
    out << "model\tMAE\tRMSE\tMedAE\tR2\n";
    for (const auto& row : rows)
      out << row.label << '\t' << format_exact(row.errors.mae) << '\t' << format_exact(row.errors.rmse) << '\t'
          << format_exact(row.errors.medae) << '\t' << r2(row.errors, true) << '\n';
    return;
  }
  markdown_row(out, {"Model", "MAE", "RMSE", "MedAE", "R²"});
  markdown_rule(out, 5);
  for (const auto& row : rows)
    markdown_row(out, {row.label, format_fixed(row.errors.mae), format_fixed(row.errors.rmse),
                       format_fixed(row.errors.medae), r2(row.errors, false)});
}

void write_anova(std::ostream& out, const AnovaTable& table, ReportFormat format) {
  if (format == ReportFormat::Tsv) {
    out << "source\tdf\tsum_sq\tmean_sq\tf_value\tp_value\n";
    out << table.factor.source << '\t' << table.factor.df << '\t' << format_exact(table.factor.sum_sq) << '\t'
        << format_exact(table.factor.mean_sq) << '\t' << format_exact(table.f_value) << '\t'
        << format_exact(table.p_value) << '\n';
    out << table.residuals.source << '\t' << table.residuals.df << '\t' << format_exact(table.residuals.sum_sq)
        << '\t' << format_exact(table.residuals.mean_sq) << "\t\t\n";
    return;
  }
  markdown_row(out, {"Source", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"});
  markdown_rule(out, 6);
  std::ostringstream p;
  p.precision(3);
  p << table.p_value;
  markdown_row(out, {table.factor.source, std::to_string(table.factor.df), format_fixed(table.factor.sum_sq),
                     format_fixed(table.factor.mean_sq), format_fixed(table.f_value, 1),
                     p.str() + marker_symbol(significance_marker(table.p_value))});
  markdown_row(out, {table.residuals.source, std::to_string(table.residuals.df),
                     format_fixed(table.residuals.sum_sq), format_fixed(table.residuals.mean_sq), "", ""});
}

void write_route_summary(std::ostream& out, const std::vector<RouteResult>& policies, ReportFormat format) {
  if (policies.empty()) throw Error(ErrorKind::Config, "no routing policies to summarize");
  const auto& ref = policies.front();
  struct Line {
    std::string label;
    double mean;
    double fraction_r2;
    bool beats;
  };
  std::vector<Line> lines{{"R1", ref.mean_r1, 0.0, false}, {"R2", ref.mean_r2, 1.0, false}};
  for (const auto& p : policies)
    if (p.policy != "oracle") lines.push_back({p.policy, p.mean_meta, p.fraction_r2, p.beats_both});
  lines.push_back({"oracle", ref.oracle_mean, ref.oracle_fraction_r2, false});

  if (format == ReportFormat::Tsv) {
    out << "policy\tmean\tfraction_r2\tbeats_both\n";
    for (const auto& l : lines)
      out << l.label << '\t' << format_exact(l.mean) << '\t' << format_exact(l.fraction_r2) << '\t'
          << (l.beats ? "yes" : "no") << '\n';
    return;
  }
  markdown_row(out, {"Policy", "Mean", "Routed to R2"});
  markdown_rule(out, 3);
  for (const auto& l : lines)
    markdown_row(out, {l.label, format_fixed(l.mean) + (l.beats ? " ▲" : ""), format_fixed(l.fraction_r2)});
}

void write_sweep(std::ostream& out, const ThresholdSweep& sweep) {
  out << "threshold\tmean_meta\tfraction_r2\n";
  for (const auto& p : sweep.points)
    out << format_exact(p.threshold) << '\t' << format_exact(p.mean_meta) << '\t' << format_exact(p.fraction_r2)
        << '\n';
  if (!sweep.points.empty()) {
    const auto& b = sweep.points[sweep.best];
    out << "# best threshold=" << format_exact(b.threshold) << " mean_meta=" << format_exact(b.mean_meta) << '\n';
  }
}

void write_route_choices(std::ostream& out, const std::vector<RouteResult>& policies) {
  out << "qid";
  for (const auto& p : policies) out << '\t' << p.policy;
  out << '\n';
  if (policies.empty()) return;
  for (const auto& [q, _] : policies.front().choices) {
    out << q;
    for (const auto& p : policies) {
      const auto it = p.choices.find(q);
      out << '\t' << (it == p.choices.end() ? std::string("-") : to_string(it->second));
    }
    out << '\n';
  }
}

}  // namespace qpplab
