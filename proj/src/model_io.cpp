#include <json.hpp>

#include "qpplab/error.hpp"
#include "qpplab/learners.hpp"

namespace qpplab {

namespace {

constexpr int kModelFormatVersion = 1;

using nlohmann::json;

json tree_to_json(const RegressionTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  const auto& feature = j.at("feature");
  const std::size_t n = feature.size();
  for (const char* key : {"threshold", "left", "right", "value"})
    if (j.at(key).size() != n) throw Error(ErrorKind::Parse, "model: tree arrays differ in length");
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = feature[i].get<int>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<int>();
    node.right = j["right"][i].get<int>();
    node.value = j["value"][i].get<double>();
    if (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                              node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n)))
      throw Error(ErrorKind::Parse, "model: tree node " + std::to_string(i) + " has invalid children");
  }
  if (n == 0) throw Error(ErrorKind::Parse, "model: empty tree");
  return tree;
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  json j;
  j["format"] = "qpplab-model";
  j["version"] = kModelFormatVersion;
  j["feature_names"] = feature_names(model);
  if (const auto* lm = std::get_if<LinearModel>(&model)) {
    j["kind"] = "linear";
    j["coefficients"] = lm->coefficients;
    j["intercept"] = lm->intercept;
  } else {
    const auto& fm = std::get<ForestModel>(model);
    j["kind"] = "forest";
    j["params"] = {{"n_trees", fm.params.n_trees}, {"max_depth", fm.params.max_depth}, {"min_leaf", fm.params.min_leaf}};
    j["seed"] = fm.seed;
    json trees = json::array();
    for (const auto& t : fm.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  }
  out << j.dump(1) << '\n';
}

Model read_model(std::istream& in) {
  json j;
  try {
    in >> j;
    if (j.at("format") != "qpplab-model") throw Error(ErrorKind::Parse, "model: not a qpplab model");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw Error(ErrorKind::Parse, "model: unsupported version " + j.at("version").dump());
    const auto names = j.at("feature_names").get<std::vector<std::string>>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
      LinearModel lm{names, j.at("coefficients").get<std::vector<double>>(), j.at("intercept").get<double>()};
      if (lm.coefficients.size() != names.size())
        throw Error(ErrorKind::Parse, "model: coefficient count does not match feature count");
      return lm;
    }
    if (kind == "forest") {
      ForestModel fm;
      fm.feature_names = names;
      const auto& p = j.at("params");
      fm.params = {p.at("n_trees").get<int>(), p.at("max_depth").get<int>(), p.at("min_leaf").get<int>()};
      fm.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& t : j.at("trees")) fm.trees.push_back(tree_from_json(t));
      for (const auto& t : fm.trees)
        for (const auto& node : t.nodes)
          if (node.feature >= static_cast<int>(names.size()))
            throw Error(ErrorKind::Parse, "model: split feature index out of range");
      return fm;
    }
    throw Error(ErrorKind::Parse, "model: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model: ") + e.what());
  }
}

}  // namespace qpplab
