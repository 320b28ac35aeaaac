#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qpplab/corpus_io.hpp"
#include "qpplab/statlab.hpp"

namespace qpplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;
  double intercept = 0.0;

  bool operator==(const LinearModel&) const = default;
};

/// Flat binary regression tree. Internal nodes send x[feature] <= threshold
/// to `left`; leaves have feature == -1 and carry the mean training target.
struct RegressionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;

  double predict(const double* row, Eigen::Index stride) const;
  bool operator==(const RegressionTree&) const = default;
};

struct ForestParams {
  int n_trees = 10;
  int max_depth = 8;
  int min_leaf = 2;

  bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
  std::vector<std::string> feature_names;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<RegressionTree> trees;

  bool operator==(const ForestModel&) const = default;
};

using Model = std::variant<LinearModel, ForestModel>;

/// Least squares with an intercept, via Cholesky on the normal equations.
/// When the Gram matrix is not positive definite a ridge term of
/// 1e-8·trace is added and the solve retried.
LinearModel fit_ols(const Matrix& X, const Vector& y, std::vector<std::string> feature_names = {});

/// Bagged regression trees. Tree t draws its bootstrap sample and candidate
/// features from Rng(seed + t); each split considers ceil(sqrt(#features))
/// features and maximizes the reduction in squared error. Trees are fitted
/// on up to `threads` workers; the model does not depend on that count.
ForestModel fit_rf(const Matrix& X, const Vector& y, const ForestParams& params, std::uint64_t seed,
                   std::vector<std::string> feature_names = {}, unsigned threads = 1);

std::vector<double> predict(const Model& model, const Matrix& X);
std::vector<double> predict(const LinearModel& model, const Matrix& X);
std::vector<double> predict(const ForestModel& model, const Matrix& X);

std::size_t feature_count(const Model& model);
const std::vector<std::string>& feature_names(const Model& model);

// Versioned JSON dump of a fitted model.
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);

/// Rows of `table` for `queries` (in that order), restricted to `columns`.
Matrix design_matrix(const FeatureTable& table, const std::vector<QueryId>& queries,
                     const std::vector<std::string>& columns);

// ---------------------------------------------------------------------------
// Two-fold cross-validation

struct CvSplit {
  std::set<QueryId> fold_a;
  std::set<QueryId> fold_b;
};

/// Fisher-Yates shuffle of `qids` with Rng(seed); the first floor(n/2)
/// queries form fold A, the rest fold B.
CvSplit two_fold_split(const std::vector<QueryId>& qids, std::uint64_t seed);

struct LearnerSpec {
  enum class Kind {
    Single,  // the feature itself is the prediction; no training
    Linear,
    Forest,
  };
  Kind kind = Kind::Linear;
  std::vector<std::string> columns;  // empty: every column of the table
  ForestParams forest;
  unsigned threads = 1;

  std::string name() const;
  static Kind parse_kind(std::string_view text);
};

enum class FoldAggregation {
  MeanOfFolds,  // arithmetic mean of the two test-fold coefficients
  Pooled,       // one coefficient over all out-of-fold predictions
};

/// A model together with the queries it was trained on.
struct TrainedModel {
  std::set<QueryId> trained_on;
  Model model;
};

struct CvResult {
  CvSplit split;
  std::vector<QueryId> queries;
  std::map<QueryId, double> out_of_fold;
  /// Index 0: trained on fold A, tested on fold B; index 1 the reverse.
  std::array<CorrelationResult, 2> fold_pearson;
  std::array<CorrelationResult, 2> fold_kendall;
  CorrelationResult pearson;
  CorrelationResult kendall;
  ErrorReport errors;
  /// Empty for the Single learner.
  std::vector<TrainedModel> fold_models;
};

Model fit_model(const LearnerSpec& spec, const Matrix& X, const Vector& y, std::uint64_t seed,
                const std::vector<std::string>& names);

CvResult cross_validate(const FeatureTable& features, const std::map<QueryId, double>& target,
                        const LearnerSpec& spec, std::uint64_t seed,
                        FoldAggregation aggregation = FoldAggregation::MeanOfFolds);

/// Trains one model per fold of `split` (model i is trained on the
/// complement of the fold it will predict).
std::vector<TrainedModel> train_fold_models(const FeatureTable& features, const std::map<QueryId, double>& target,
                                            const LearnerSpec& spec, const CvSplit& split, std::uint64_t seed);

}  // namespace qpplab
