#include "qpplab/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"
#include "qpplab/parallel.hpp"
#include "qpplab/random.hpp"

namespace qpplab {

namespace {

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index cols) {
  if (names.empty()) {
    for (Eigen::Index c = 0; c < cols; ++c) names.push_back("x" + std::to_string(c));
  }
  if (static_cast<Eigen::Index>(names.size()) != cols)
    throw Error(ErrorKind::Dimension, "feature name count does not match the design matrix");
  return names;
}

// --- tree growing -----------------------------------------------------------

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Vector& y, const ForestParams& params, Rng& rng)
      : X_(X), y_(y), params_(params), rng_(rng) {
    const auto p = static_cast<std::size_t>(X.cols());
    candidates_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
    features_.resize(p);
  }

  RegressionTree build(std::vector<int> sample) {
    RegressionTree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
  };

  int grow(RegressionTree& tree, std::vector<int>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0;
    for (int r : rows) sum += y_[r];
    tree.nodes[id].value = sum / static_cast<double>(rows.size());

    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    if (depth >= params_.max_depth || rows.size() < 2 * min_leaf) return id;

    const Split split = best_split(rows, sum, min_leaf);
    if (split.feature < 0) return id;

    std::vector<int> left, right;
    left.reserve(split.left_count);
    right.reserve(rows.size() - split.left_count);
    for (int r : rows) (X_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[id].feature = split.feature;
    tree.nodes[id].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  Split best_split(const std::vector<int>& rows, double total, std::size_t min_leaf) {
    // Partial Fisher-Yates picks `candidates_` distinct features.
    std::iota(features_.begin(), features_.end(), 0);
    const std::size_t k = std::min(candidates_, features_.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.below(features_.size() - i));
      std::swap(features_[i], features_[j]);
    }

    const double n = static_cast<double>(rows.size());
    const double parent = total * total / n;
    Split best;
    std::vector<std::pair<double, double>> column(rows.size());
    for (std::size_t c = 0; c < k; ++c) {
      const int f = features_[c];
      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {X_(rows[i], f), y_[rows[i]]};
      std::sort(column.begin(), column.end());
      double left_sum = 0.0;
      for (std::size_t i = 1; i < column.size(); ++i) {
        left_sum += column[i - 1].second;
        if (i < min_leaf || column.size() - i < min_leaf) continue;
        if (column[i - 1].first == column[i].first) continue;
        const double nl = static_cast<double>(i), nr = n - nl;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
        if (gain > best.gain + 1e-12 * std::abs(parent) + 1e-300) {
          double threshold = 0.5 * (column[i - 1].first + column[i].first);
          if (!(threshold < column[i].first)) threshold = column[i - 1].first;
          best = Split{f, threshold, gain, i};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const Vector& y_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t candidates_ = 1;
  std::vector<int> features_;
};

}  // namespace

double RegressionTree::predict(const double* row, Eigen::Index stride) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const Node& node = nodes[id];
    id = row[node.feature * stride] <= node.threshold ? node.left : node.right;
  }
  return nodes[id].value;
}

LinearModel fit_ols(const Matrix& X, const Vector& y, std::vector<std::string> feature_names) {
  if (X.rows() != y.size()) throw Error(ErrorKind::Dimension, "OLS: X and y differ in row count");
  if (X.rows() <= X.cols() + 1)
    throw Error(ErrorKind::SampleSize, "OLS underdetermined: " + std::to_string(X.rows()) + " rows for " +
                                           std::to_string(X.cols()) + " features plus intercept");
  LinearModel model;
  model.feature_names = default_names(std::move(feature_names), X.cols());

  // Centering eliminates the intercept column from the normal equations;
  // the intercept is recovered from the means afterwards.
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Matrix Xc = X.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;
  Matrix gram = Xc.transpose() * Xc;
  const Vector rhs = Xc.transpose() * yc;

  Vector beta;
  Eigen::LLT<Matrix> llt(gram);
  bool ok = llt.info() == Eigen::Success;
  if (ok && gram.rows() > 0) {
    const Vector pivots = Matrix(llt.matrixL()).diagonal().array().square();
    ok = pivots.minCoeff() > 1e-12 * std::max(gram.diagonal().maxCoeff(), 1e-300);
  }
  if (ok) {
    beta = llt.solve(rhs);
  } else {
    const double lambda = 1e-8 * std::max(gram.trace(), 1e-300);
    gram.diagonal().array() += lambda;
    beta = gram.llt().solve(rhs);
  }
  model.coefficients.assign(beta.data(), beta.data() + beta.size());
  model.intercept = y_mean - x_mean.dot(beta);
  return model;
}

ForestModel fit_rf(const Matrix& X, const Vector& y, const ForestParams& params, std::uint64_t seed,
                   std::vector<std::string> feature_names, unsigned threads) {
  if (X.rows() != y.size()) throw Error(ErrorKind::Dimension, "forest: X and y differ in row count");
  if (X.rows() < 2) throw Error(ErrorKind::SampleSize, "forest needs at least 2 training rows");
  if (X.cols() < 1) throw Error(ErrorKind::Dimension, "forest needs at least one feature");
  if (params.n_trees < 1 || params.max_depth < 0 || params.min_leaf < 1)
    throw Error(ErrorKind::Config, "forest parameters must satisfy n_trees>=1, max_depth>=0, min_leaf>=1");

  ForestModel model;
  model.feature_names = default_names(std::move(feature_names), X.cols());
  model.params = params;
  model.seed = seed;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  const auto n = static_cast<std::uint64_t>(X.rows());
  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    Rng rng(seed + t);
    std::vector<int> sample(static_cast<std::size_t>(n));
    for (auto& s : sample) s = static_cast<int>(rng.below(n));
    TreeBuilder builder(X, y, params, rng);
    model.trees[t] = builder.build(std::move(sample));
  });
  return model;
}

std::vector<double> predict(const LinearModel& model, const Matrix& X) {
  if (X.rows() == 0) return {};
  if (static_cast<std::size_t>(X.cols()) != model.coefficients.size())
    throw Error(ErrorKind::Dimension, "linear model expects " + std::to_string(model.coefficients.size()) +
                                          " features, got " + std::to_string(X.cols()));
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double v = model.intercept;
    for (Eigen::Index c = 0; c < X.cols(); ++c) v += model.coefficients[static_cast<std::size_t>(c)] * X(r, c);
    out[static_cast<std::size_t>(r)] = v;
  }
  return out;
}

std::vector<double> predict(const ForestModel& model, const Matrix& X) {
  if (X.rows() == 0) return {};
  if (static_cast<std::size_t>(X.cols()) != model.feature_names.size())
    throw Error(ErrorKind::Dimension, "forest expects " + std::to_string(model.feature_names.size()) +
                                          " features, got " + std::to_string(X.cols()));
  std::vector<double> out(static_cast<std::size_t>(X.rows()), 0.0);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(&X(r, 0), X.outerStride());
    out[static_cast<std::size_t>(r)] = sum / static_cast<double>(model.trees.size());
  }
  return out;
}

std::vector<double> predict(const Model& model, const Matrix& X) {
  return std::visit([&](const auto& m) { return predict(m, X); }, model);
}

std::size_t feature_count(const Model& model) { return feature_names(model).size(); }

const std::vector<std::string>& feature_names(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names; }, model);
}

Matrix design_matrix(const FeatureTable& table, const std::vector<QueryId>& queries,
                     const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(table.column_index(c));
  Matrix X(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < queries.size(); ++r) {
    auto it = table.rows().find(queries[r]);
    if (it == table.rows().end())
      throw Error(ErrorKind::MissingQuery, "query '" + queries[r] + "' not in feature table");
    for (std::size_t c = 0; c < idx.size(); ++c)
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = it->second[idx[c]];
  }
  return X;
}

// ---------------------------------------------------------------------------

CvSplit two_fold_split(const std::vector<QueryId>& qids, std::uint64_t seed) {
  if (qids.size() < 2) throw Error(ErrorKind::SampleSize, "two-fold split needs at least 2 queries");
  std::vector<QueryId> order(qids);
  Rng rng(seed);
  rng.shuffle(order);
  CvSplit split;
  const std::size_t half = order.size() / 2;
  split.fold_a.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  split.fold_b.insert(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
  if (split.fold_a.size() + split.fold_b.size() != qids.size())
    throw Error(ErrorKind::Duplicate, "two-fold split: duplicate query ids");
  return split;
}

std::string LearnerSpec::name() const {
  switch (kind) {
    case Kind::Single: return "single";
    case Kind::Linear: return "LR";
    case Kind::Forest: return "RF";
  }
  return "?";
}

LearnerSpec::Kind LearnerSpec::parse_kind(std::string_view text) {
  std::string lower(text);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "single") return Kind::Single;
  if (lower == "lr" || lower == "linear" || lower == "ols") return Kind::Linear;
  if (lower == "rf" || lower == "forest") return Kind::Forest;
  throw Error(ErrorKind::Config, "unknown learner '" + std::string(text) + "'");
}

Model fit_model(const LearnerSpec& spec, const Matrix& X, const Vector& y, std::uint64_t seed,
                const std::vector<std::string>& names) {
  switch (spec.kind) {
    case LearnerSpec::Kind::Linear: return fit_ols(X, y, names);
    case LearnerSpec::Kind::Forest: return fit_rf(X, y, spec.forest, seed, names, spec.threads);
    case LearnerSpec::Kind::Single: break;
  }
  throw Error(ErrorKind::Config, "the single-feature learner has no trainable model");
}

namespace {

std::vector<std::string> resolve_columns(const FeatureTable& features, const LearnerSpec& spec) {
  std::vector<std::string> columns = spec.columns.empty() ? features.columns() : spec.columns;
  for (const auto& c : columns) features.column_index(c);
  if (columns.empty()) throw Error(ErrorKind::Config, "learner has no feature columns");
  if (spec.kind == LearnerSpec::Kind::Single && columns.size() != 1)
    throw Error(ErrorKind::Config, "the single-feature learner takes exactly one column");
  return columns;
}

Vector target_vector(const std::map<QueryId, double>& target, const std::vector<QueryId>& queries) {
  Vector y(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t i = 0; i < queries.size(); ++i) y[static_cast<Eigen::Index>(i)] = target.at(queries[i]);
  return y;
}

}  // namespace

std::vector<TrainedModel> train_fold_models(const FeatureTable& features, const std::map<QueryId, double>& target,
                                            const LearnerSpec& spec, const CvSplit& split, std::uint64_t seed) {
  const auto columns = resolve_columns(features, spec);
  std::vector<TrainedModel> models;
  const std::set<QueryId>* train_sets[2] = {&split.fold_a, &split.fold_b};
  for (int fold = 0; fold < 2; ++fold) {
    const std::vector<QueryId> train(train_sets[fold]->begin(), train_sets[fold]->end());
    const Matrix X = design_matrix(features, train, columns);
    const Vector y = target_vector(target, train);
    // Distinct seed streams per fold so the two forests are not clones.
    models.push_back(TrainedModel{*train_sets[fold],
                                  fit_model(spec, X, y, seed + static_cast<std::uint64_t>(fold) * 0x10000ULL, columns)});
  }
  return models;
}

CvResult cross_validate(const FeatureTable& features, const std::map<QueryId, double>& target,
                        const LearnerSpec& spec, std::uint64_t seed, FoldAggregation aggregation) {
  std::set<QueryId> target_ids;
  for (const auto& [q, _] : target) target_ids.insert(q);
  CvResult result;
  result.queries = align_queries({{"features", features.query_ids()}, {"target", target_ids}});
  if (result.queries.size() < 4) throw Error(ErrorKind::SampleSize, "cross-validation needs at least 4 queries");
  const auto columns = resolve_columns(features, spec);

  result.split = two_fold_split(result.queries, seed);
  if (spec.kind == LearnerSpec::Kind::Single) {
    for (const auto& q : result.queries) result.out_of_fold[q] = features.at(q, columns.front());
  } else {
    result.fold_models = train_fold_models(features, target, spec, result.split, seed);
    const std::set<QueryId>* test_sets[2] = {&result.split.fold_b, &result.split.fold_a};
    for (int fold = 0; fold < 2; ++fold) {
      const std::vector<QueryId> test(test_sets[fold]->begin(), test_sets[fold]->end());
      const auto predictions = predict(result.fold_models[fold].model, design_matrix(features, test, columns));
      for (std::size_t i = 0; i < test.size(); ++i) result.out_of_fold[test[i]] = predictions[i];
    }
  }

  const std::set<QueryId>* test_sets[2] = {&result.split.fold_b, &result.split.fold_a};
  for (int fold = 0; fold < 2; ++fold) {
    std::vector<double> predicted, actual;
    for (const auto& q : *test_sets[fold]) {
      predicted.push_back(result.out_of_fold.at(q));
      actual.push_back(target.at(q));
    }
    result.fold_pearson[fold] = pearson(predicted, actual);
    result.fold_kendall[fold] = kendall_tau_b(predicted, actual);
  }

  std::vector<double> predicted, actual;
  for (const auto& q : result.queries) {
    predicted.push_back(result.out_of_fold.at(q));
    actual.push_back(target.at(q));
  }
  const std::size_t n = result.queries.size();
  if (aggregation == FoldAggregation::MeanOfFolds) {
    result.pearson = correlation_at(Coefficient::Pearson,
                                    (result.fold_pearson[0].coefficient + result.fold_pearson[1].coefficient) / 2.0, n);
    result.kendall = correlation_at(Coefficient::Kendall,
                                    (result.fold_kendall[0].coefficient + result.fold_kendall[1].coefficient) / 2.0, n);
  } else {
    result.pearson = pearson(predicted, actual);
    result.kendall = kendall_tau_b(predicted, actual);
  }
  result.errors = regression_errors(predicted, actual);
  return result;
}

}  // namespace qpplab
