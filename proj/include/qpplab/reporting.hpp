#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qpplab/corpus_io.hpp"
#include "qpplab/effectiveness.hpp"
#include "qpplab/learners.hpp"
#include "qpplab/selective.hpp"
#include "qpplab/statlab.hpp"

namespace qpplab {

enum class ReportFormat { Tsv, Markdown };
ReportFormat parse_report_format(std::string_view text);

// ---------------------------------------------------------------------------
// Correlation tables (predictor rows × ranker/collection/measure columns)

struct ColumnKey {
  std::string ranker;
  std::string collection;
  std::string measure;

  std::string label() const;
  bool operator==(const ColumnKey&) const = default;
};

/// Undefined cells (constant column, all ties) hold std::nullopt and render
/// as "n/a".
using Cell = std::optional<CorrelationResult>;

struct CorrelationReport {
  Coefficient coefficient = Coefficient::Pearson;
  std::vector<std::string> rows;
  std::vector<ColumnKey> columns;
  std::vector<std::vector<Cell>> cells;  // [row][column]

  const Cell& cell(std::string_view row, const ColumnKey& column) const;
};

/// One cell per (feature, measure) over the queries both tables share.
CorrelationReport correlation_table(const FeatureTable& features, const EvalTable& evals, Coefficient coefficient,
                                    const std::string& ranker = "", const std::string& collection = "",
                                    unsigned threads = 1);

/// Concatenates column groups; rows are the union in first-seen order and
/// cells missing from a report stay undefined.
CorrelationReport combine_reports(const std::vector<CorrelationReport>& reports);

/// Long format, one line per cell: ranker, collection, feature, measure,
/// coefficient kind, value, p-value, n, marker. Values are written exactly.
void write_report_tsv(std::ostream& out, const CorrelationReport& report);
CorrelationReport parse_report_tsv(std::istream& in, std::string_view source = "<report>");
/// Predictor rows, one column per group, 3 decimals plus marker.
void write_report_markdown(std::ostream& out, const CorrelationReport& report);

// ---------------------------------------------------------------------------
// Correlation matrix

struct CorrelationMatrix {
  Coefficient coefficient = Coefficient::Pearson;
  std::vector<std::string> names;
  std::vector<std::vector<Cell>> cells;  // symmetric, unit diagonal
};

/// All columns of `features` followed by all measures of `evals`.
CorrelationMatrix correlation_matrix(const FeatureTable& features, const EvalTable& evals, Coefficient coefficient,
                                     unsigned threads = 1);
CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns, Coefficient coefficient,
                                     unsigned threads = 1);
void write_matrix(std::ostream& out, const CorrelationMatrix& matrix, ReportFormat format);

// ---------------------------------------------------------------------------
// Boxplots

struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct BoxplotGroup {
  std::string label;
  std::vector<double> values;
  FiveNumber summary;
};

enum class GroupBy { Ranker, Collection };

struct CorrelationRecord {
  std::string ranker;
  std::string collection;
  double value = 0.0;
};

/// Groups sorted by descending median (ties by label).
std::vector<BoxplotGroup> boxplot_data(const std::vector<CorrelationRecord>& records, GroupBy group_by);
std::vector<BoxplotGroup> boxplot_groups(const std::map<std::string, std::vector<double>>& groups);
void write_boxplot(std::ostream& out, const std::vector<BoxplotGroup>& groups, ReportFormat format);

/// Reads a headed TSV and groups the `value_column` by `group_column`.
/// Rows whose value is "n/a" are skipped with a warning.
std::map<std::string, std::vector<double>> read_grouped_values(std::istream& in, const std::string& group_column,
                                                               const std::string& value_column,
                                                               std::string_view source = "<records>");

// ---------------------------------------------------------------------------
// Scatter, error tables, routing summaries

/// Header comment with r and p, a `predicted\tactual` line, then one line
/// per shared query.
std::string scatter_export(const std::map<QueryId, double>& predicted, const std::map<QueryId, double>& actual,
                           const std::string& feature_name = "predicted", const std::string& measure_name = "actual");

struct ErrorTableRow {
  std::string label;
  ErrorReport errors;
};
void write_error_table(std::ostream& out, const std::vector<ErrorTableRow>& rows, ReportFormat format);

void write_anova(std::ostream& out, const AnovaTable& table, ReportFormat format);

/// Rows: both rankers, each policy (▲ when it beats both), and the oracle.
/// A policy named "oracle" is not repeated.
void write_route_summary(std::ostream& out, const std::vector<RouteResult>& policies, ReportFormat format);
void write_sweep(std::ostream& out, const ThresholdSweep& sweep);
/// Per-query choice table, one column per policy.
void write_route_choices(std::ostream& out, const std::vector<RouteResult>& policies);

}  // namespace qpplab
