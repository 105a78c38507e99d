// Copyright 2026 The atrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "atrisk/classifiers.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"
#include "atrisk/neighbors.hpp"

namespace atrisk {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

const std::vector<std::pair<ModelKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ModelKind, std::string>> names = {
      {ModelKind::logreg, "logreg"},         {ModelKind::naive_bayes, "naive_bayes"},
      {ModelKind::decision_tree, "decision_tree"}, {ModelKind::random_forest, "random_forest"},
      {ModelKind::knn, "knn"},               {ModelKind::svm_linear, "svm_linear"},
      {ModelKind::svm_rbf, "svm_rbf"}};
  return names;
}

double as_double(const std::string& key, const std::string& value) {
  try {
    return csv::parse_double(value);
  } catch (const ParseError&) {
    throw InvalidArgument(fmt::format("parameter '{}': expected a number, got '{}'", key, value));
  }
}

int as_int(const std::string& key, const std::string& value) {
  try {
    return static_cast<int>(csv::parse_int(value));
  } catch (const ParseError&) {
    throw InvalidArgument(fmt::format("parameter '{}': expected an integer, got '{}'", key, value));
  }
}

bool as_bool(const std::string& key, const std::string& value) {
  try {
    return csv::parse_bool(value);
  } catch (const ParseError&) {
    throw InvalidArgument(fmt::format("parameter '{}': expected true or false, got '{}'", key, value));
  }
}

std::set<std::string> allowed_keys(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg: return {"penalty", "C", "l1_ratio", "tolerance", "max_iterations", "seed"};
    case ModelKind::naive_bayes: return {"alpha", "binarize", "seed"};
    case ModelKind::decision_tree: return {"max_depth", "min_samples_split", "max_features", "seed"};
    case ModelKind::random_forest:
      return {"n_trees", "max_depth", "min_samples_split", "max_features", "bootstrap", "seed"};
    case ModelKind::knn: return {"k", "seed"};
    case ModelKind::svm_linear: return {"C", "tolerance", "max_iterations", "seed"};
    case ModelKind::svm_rbf: return {"C", "gamma", "tolerance", "max_iterations", "seed"};
  }
  return {};
}

void validate_spec(const ModelSpec& spec) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogRegParams>) {
          if (!(p.C > 0.0)) throw InvalidArgument("logreg: C must be > 0");
          if (!(p.l1_ratio >= 0.0 && p.l1_ratio <= 1.0)) throw InvalidArgument("logreg: l1_ratio must lie in [0,1]");
          if (p.max_iterations < 1) throw InvalidArgument("logreg: max_iterations must be >= 1");
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          if (!(p.alpha > 0.0)) throw InvalidArgument("naive_bayes: alpha must be > 0");
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          if (p.max_depth < 0 || p.min_samples_split < 2 || p.max_features < 0) {
            throw InvalidArgument("decision_tree: invalid depth/split/feature limits");
          }
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          if (p.n_trees < 1) throw InvalidArgument("random_forest: n_trees must be >= 1");
          if (p.max_depth < 0 || p.min_samples_split < 2 || p.max_features < 0) {
            throw InvalidArgument("random_forest: invalid depth/split/feature limits");
          }
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          if (p.k < 1) throw InvalidArgument("knn: k must be >= 1");
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          if (!(p.C > 0.0)) throw InvalidArgument("svm: C must be > 0");
          if (p.gamma_mode == GammaMode::value && !(p.gamma > 0.0)) throw InvalidArgument("svm: gamma must be > 0");
        }
      },
      spec.params);
}

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ModelKind parse_model_kind(const std::string& text) {
  for (const auto& [k, name] : kind_names())
    if (name == text) return k;
  throw InvalidArgument(fmt::format("unknown model kind '{}'", text));
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ModelKind::logreg: spec.params = LogRegParams{}; break;
    case ModelKind::naive_bayes: spec.params = NaiveBayesParams{}; break;
    case ModelKind::decision_tree: spec.params = TreeParams{}; break;
    case ModelKind::random_forest: spec.params = ForestParams{}; break;
    case ModelKind::knn: spec.params = KnnParams{}; break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf: spec.params = SvmParams{}; break;
  }
  return spec;
}

ModelSpec ModelSpec::from_parameters(ModelKind kind, const std::map<std::string, std::string>& parameters) {
  ModelSpec spec = defaults(kind);
  const auto allowed = allowed_keys(kind);
  for (const auto& [key, value] : parameters) {
    if (!allowed.count(key)) {
      throw InvalidArgument(fmt::format("unknown parameter '{}' for model kind '{}'", key, to_string(kind)));
    }
    if (key == "seed") {
      try {
        spec.seed = static_cast<std::uint64_t>(csv::parse_int(value));
      } catch (const ParseError&) {
        throw InvalidArgument(fmt::format("parameter 'seed': expected an integer, got '{}'", value));
      }
      continue;
    }
    std::visit(
        [&](auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, LogRegParams>) {
            if (key == "penalty") {
              if (value == "l2") p.penalty = Penalty::l2;
              else if (value == "elasticnet") p.penalty = Penalty::elasticnet;
              else throw InvalidArgument(fmt::format("penalty must be l2 or elasticnet, got '{}'", value));
            } else if (key == "C") p.C = as_double(key, value);
            else if (key == "l1_ratio") p.l1_ratio = as_double(key, value);
            else if (key == "tolerance") p.tolerance = as_double(key, value);
            else if (key == "max_iterations") p.max_iterations = as_int(key, value);
          } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
            if (key == "alpha") p.alpha = as_double(key, value);
            else if (key == "binarize") p.binarize = as_double(key, value);
          } else if constexpr (std::is_same_v<T, TreeParams>) {
            if (key == "max_depth") p.max_depth = as_int(key, value);
            else if (key == "min_samples_split") p.min_samples_split = as_int(key, value);
            else if (key == "max_features") p.max_features = as_int(key, value);
          } else if constexpr (std::is_same_v<T, ForestParams>) {
            if (key == "n_trees") p.n_trees = as_int(key, value);
            else if (key == "max_depth") p.max_depth = as_int(key, value);
            else if (key == "min_samples_split") p.min_samples_split = as_int(key, value);
            else if (key == "max_features") p.max_features = as_int(key, value);
            else if (key == "bootstrap") p.bootstrap = as_bool(key, value);
          } else if constexpr (std::is_same_v<T, KnnParams>) {
            if (key == "k") p.k = as_int(key, value);
          } else if constexpr (std::is_same_v<T, SvmParams>) {
            if (key == "C") p.C = as_double(key, value);
            else if (key == "tolerance") p.tolerance = as_double(key, value);
            else if (key == "max_iterations") p.max_iterations = as_int(key, value);
            else if (key == "gamma") {
              if (value == "scale") {
                p.gamma_mode = GammaMode::scale;
              } else {
                p.gamma_mode = GammaMode::value;
                p.gamma = as_double(key, value);
              }
            }
          }
        },
        spec.params);
  }
  validate_spec(spec);
  return spec;
}

std::map<std::string, std::string> ModelSpec::parameters() const {
  std::map<std::string, std::string> out;
  auto num = [](double v) { return csv::format_double(v); };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogRegParams>) {
          out["penalty"] = p.penalty == Penalty::l2 ? "l2" : "elasticnet";
          out["C"] = num(p.C);
          out["l1_ratio"] = num(p.l1_ratio);
          out["tolerance"] = num(p.tolerance);
          out["max_iterations"] = std::to_string(p.max_iterations);
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          out["alpha"] = num(p.alpha);
          out["binarize"] = num(p.binarize);
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          out["max_depth"] = std::to_string(p.max_depth);
          out["min_samples_split"] = std::to_string(p.min_samples_split);
          out["max_features"] = std::to_string(p.max_features);
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          out["n_trees"] = std::to_string(p.n_trees);
          out["max_depth"] = std::to_string(p.max_depth);
          out["min_samples_split"] = std::to_string(p.min_samples_split);
          out["max_features"] = std::to_string(p.max_features);
          out["bootstrap"] = p.bootstrap ? "true" : "false";
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          out["k"] = std::to_string(p.k);
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          out["C"] = num(p.C);
          out["tolerance"] = num(p.tolerance);
          out["max_iterations"] = std::to_string(p.max_iterations);
          if (kind == ModelKind::svm_rbf) out["gamma"] = p.gamma_mode == GammaMode::scale ? "scale" : num(p.gamma);
        }
      },
      params);
  out["seed"] = std::to_string(seed);
  return out;
}

double ModelSpec::regularization_c() const {
  if (const auto* p = std::get_if<LogRegParams>(&params)) return p->C;
  if (const auto* p = std::get_if<SvmParams>(&params)) return p->C;
  return 0.0;
}

namespace {

std::vector<double> signed_labels(const std::vector<bool>& labels) {
  std::vector<double> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] ? 1.0 : -1.0;
  return y;
}

}  // namespace

TrainedModel fit(const ModelSpec& spec, const LabeledDataset& train) {
  validate_spec(spec);
  const Matrix& x = train.features();
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("training features must be finite");
  }
  const bool tree_kind = spec.kind == ModelKind::decision_tree || spec.kind == ModelKind::random_forest;
  if (tree_kind) {
    if (train.n_rows() == 0) throw InvalidArgument("cannot fit on an empty training set");
  } else {
    for (bool label : {false, true}) {
      if (train.count(label) < 2) {
        throw InvalidArgument(fmt::format("{} needs at least 2 training rows of class '{}', found {}",
                                          to_string(spec.kind), label ? "true" : "false", train.count(label)));
      }
    }
  }

  TrainedModel model;
  model.spec = spec;
  model.n_features = train.n_features();
  switch (spec.kind) {
    case ModelKind::logreg: {
      const auto& p = std::get<LogRegParams>(spec.params);
      auto y = signed_labels(train.labels());
      LogisticProblem problem{x, y, p.C, p.penalty == Penalty::elasticnet ? p.l1_ratio : 0.0};
      auto result = solve_logistic(problem, {p.tolerance, p.max_iterations, false});
      model.converged = result.converged;
      model.state = std::move(result.state);
      break;
    }
    case ModelKind::naive_bayes: {
      const auto& p = std::get<NaiveBayesParams>(spec.params);
      model.state = fit_naive_bayes(x, train.labels(), p.alpha, p.binarize);
      break;
    }
    case ModelKind::decision_tree: {
      const auto& p = std::get<TreeParams>(spec.params);
      std::vector<std::size_t> rows(train.n_rows());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      model.state = fit_tree(x, train.labels(), rows, {p.max_depth, p.min_samples_split, p.max_features, spec.seed});
      break;
    }
    case ModelKind::random_forest: {
      const auto& p = std::get<ForestParams>(spec.params);
      ForestOptions options;
      options.n_trees = p.n_trees;
      options.bootstrap = p.bootstrap;
      options.tree = {p.max_depth, p.min_samples_split, p.max_features, spec.seed};
      model.state = fit_forest(x, train.labels(), options);
      break;
    }
    case ModelKind::knn: {
      const auto& p = std::get<KnnParams>(spec.params);
      if (static_cast<std::size_t>(p.k) > train.n_rows()) {
        throw InvalidArgument(fmt::format("knn: k = {} exceeds the {} training rows", p.k, train.n_rows()));
      }
      model.state = KnnState{x, train.labels(), static_cast<std::size_t>(p.k)};
      break;
    }
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf: {
      const auto& p = std::get<SvmParams>(spec.params);
      Kernel kernel;
      if (spec.kind == ModelKind::svm_rbf) {
        kernel.kind = KernelKind::rbf;
        kernel.gamma = p.gamma_mode == GammaMode::scale ? default_gamma(x) : p.gamma;
      }
      auto y = signed_labels(train.labels());
      auto solution = solve_smo(x, y, kernel, {p.C, p.tolerance, p.max_iterations});
      SvmState state;
      state.kernel = kernel;
      state.bias = solution.bias;
      state.support = Matrix(0, x.cols());
      for (std::size_t i = 0; i < x.rows(); ++i) {
        if (solution.alpha[i] > 0.0) {
          state.support.append_row(x.row(i));
          state.coefficients.push_back(solution.alpha[i] * y[i]);
        }
      }
      std::vector<double> decision(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) decision[i] = svm_decision(state, x.row(i));
      state.link = fit_platt(decision, y);
      model.converged = solution.converged;
      model.state = std::move(state);
      break;
    }
  }
  return model;
}

std::vector<ClassProbabilities> predict_proba(const TrainedModel& model, const Matrix& rows) {
  if (rows.cols() != model.n_features && !(rows.rows() == 0)) {
    throw InvalidArgument(
        fmt::format("model expects {} feature columns, got {}", model.n_features, rows.cols()));
  }
  std::vector<double> p_true(rows.rows());
  std::visit(
      [&](const auto& state) {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, LogisticState>) {
          for (std::size_t i = 0; i < rows.rows(); ++i) {
            p_true[i] = sigmoid(dot(rows.row(i), state.weights) + state.intercept);
          }
        } else if constexpr (std::is_same_v<T, NaiveBayesState>) {
          for (std::size_t i = 0; i < rows.rows(); ++i) p_true[i] = naive_bayes_p_true(state, rows.row(i));
        } else if constexpr (std::is_same_v<T, TreeState>) {
          for (std::size_t i = 0; i < rows.rows(); ++i) p_true[i] = tree_p_true(state, rows.row(i));
        } else if constexpr (std::is_same_v<T, ForestState>) {
          for (std::size_t i = 0; i < rows.rows(); ++i) p_true[i] = forest_p_true(state, rows.row(i));
        } else if constexpr (std::is_same_v<T, KnnState>) {
          auto neighbors = knn_external(state.rows, rows, state.k);
          for (std::size_t i = 0; i < rows.rows(); ++i) {
            std::size_t votes = 0;
            for (auto j : neighbors[i]) votes += state.labels[j];
            p_true[i] = static_cast<double>(votes) / static_cast<double>(state.k);
          }
        } else if constexpr (std::is_same_v<T, SvmState>) {
          for (std::size_t i = 0; i < rows.rows(); ++i) {
            p_true[i] = platt_probability(state.link, svm_decision(state, rows.row(i)));
          }
        }
      },
      model.state);
  std::vector<ClassProbabilities> out(rows.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {1.0 - p_true[i], p_true[i]};
  return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return json{{"cols", m.cols()}, {"rows", rows}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(0, j.at("cols").get<std::size_t>());
  for (const auto& r : j.at("rows")) m.append_row(r.get<std::vector<double>>());
  return m;
}

json tree_to_json(const TreeState& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p_true, n.samples});
  }
  return nodes;
}

TreeState tree_from_json(const json& j) {
  TreeState tree;
  for (const auto& n : j) {
    tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                          n.at(4).get<double>(), n.at(5).get<std::size_t>()});
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw ParseError("tree has no nodes");
  for (const auto& n : tree.nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
      throw ParseError("tree node references a missing child");
    }
  }
  return tree;
}

std::vector<bool> bools_from_json(const json& j) {
  std::vector<bool> out;
  for (const auto& v : j) out.push_back(v.get<bool>());
  return out;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json spec_params = json::object();
  for (const auto& [k, v] : model.spec.parameters()) spec_params[k] = v;
  json doc = {{"format", "atrisk-model"},
              {"version", kModelFormatVersion},
              {"kind", to_string(model.spec.kind)},
              {"parameters", spec_params},
              {"class_order", {"false", "true"}},
              {"n_features", model.n_features},
              {"converged", model.converged}};
  json state;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LogisticState>) {
          state = {{"weights", s.weights}, {"intercept", s.intercept}, {"iterations", s.iterations}};
        } else if constexpr (std::is_same_v<T, NaiveBayesState>) {
          state = {{"log_prior", s.log_prior},
                   {"log_p", {s.log_p[0], s.log_p[1]}},
                   {"log_not_p", {s.log_not_p[0], s.log_not_p[1]}},
                   {"binarize", s.binarize}};
        } else if constexpr (std::is_same_v<T, TreeState>) {
          state = {{"nodes", tree_to_json(s)}};
        } else if constexpr (std::is_same_v<T, ForestState>) {
          json trees = json::array();
          for (const auto& t : s.trees) trees.push_back(tree_to_json(t));
          state = {{"trees", trees}};
        } else if constexpr (std::is_same_v<T, KnnState>) {
          json labels = json::array();
          for (bool b : s.labels) labels.push_back(static_cast<bool>(b));
          state = {{"rows", matrix_to_json(s.rows)}, {"labels", labels}, {"k", s.k}};
        } else if constexpr (std::is_same_v<T, SvmState>) {
          state = {{"kernel", s.kernel.kind == KernelKind::rbf ? "rbf" : "linear"},
                   {"gamma", s.kernel.gamma},
                   {"support", matrix_to_json(s.support)},
                   {"coefficients", s.coefficients},
                   {"bias", s.bias},
                   {"platt_a", s.link.a},
                   {"platt_b", s.link.b}};
        }
      },
      model.state);
  doc["state"] = state;
  return doc.dump(1) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("model JSON: {}", e.what()));
  }
  try {
    if (doc.at("format").get<std::string>() != "atrisk-model") throw ParseError("not an atrisk model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw ParseError(fmt::format("unsupported model format version {}", version));
    if (doc.at("class_order") != json({"false", "true"})) throw ParseError("unexpected class order");

    const ModelKind kind = parse_model_kind(doc.at("kind").get<std::string>());
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : doc.at("parameters").items()) params[k] = v.get<std::string>();

    TrainedModel model;
    model.spec = ModelSpec::from_parameters(kind, params);
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.converged = doc.at("converged").get<bool>();
    const json& s = doc.at("state");
    switch (kind) {
      case ModelKind::logreg: {
        LogisticState st;
        st.weights = s.at("weights").get<std::vector<double>>();
        st.intercept = s.at("intercept").get<double>();
        st.iterations = s.at("iterations").get<int>();
        if (st.weights.size() != model.n_features) throw ParseError("weight count does not match n_features");
        model.state = std::move(st);
        break;
      }
      case ModelKind::naive_bayes: {
        NaiveBayesState st;
        st.log_prior = s.at("log_prior").get<std::array<double, 2>>();
        for (int c = 0; c < 2; ++c) {
          st.log_p[c] = s.at("log_p").at(c).get<std::vector<double>>();
          st.log_not_p[c] = s.at("log_not_p").at(c).get<std::vector<double>>();
          if (st.log_p[c].size() != model.n_features || st.log_not_p[c].size() != model.n_features) {
            throw ParseError("naive Bayes table size does not match n_features");
          }
        }
        st.binarize = s.at("binarize").get<double>();
        model.state = std::move(st);
        break;
      }
      case ModelKind::decision_tree: model.state = tree_from_json(s.at("nodes")); break;
      case ModelKind::random_forest: {
        ForestState st;
        for (const auto& t : s.at("trees")) st.trees.push_back(tree_from_json(t));
        if (st.trees.empty()) throw ParseError("forest has no trees");
        model.state = std::move(st);
        break;
      }
      case ModelKind::knn: {
        KnnState st{matrix_from_json(s.at("rows")), bools_from_json(s.at("labels")), s.at("k").get<std::size_t>()};
        if (st.labels.size() != st.rows.rows()) throw ParseError("knn label count does not match stored rows");
        model.state = std::move(st);
        break;
      }
      case ModelKind::svm_linear:
      case ModelKind::svm_rbf: {
        SvmState st;
        st.kernel.kind = s.at("kernel").get<std::string>() == "rbf" ? KernelKind::rbf : KernelKind::linear;
        st.kernel.gamma = s.at("gamma").get<double>();
        st.support = matrix_from_json(s.at("support"));
        st.coefficients = s.at("coefficients").get<std::vector<double>>();
        st.bias = s.at("bias").get<double>();
        st.link = {s.at("platt_a").get<double>(), s.at("platt_b").get<double>()};
        if (st.coefficients.size() != st.support.rows()) throw ParseError("svm coefficient count mismatch");
        model.state = std::move(st);
        break;
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("model JSON: {}", e.what()));
  } catch (const InvalidArgument& e) {
    throw ParseError(fmt::format("model JSON: {}", e.what()));
  }
}

}  // namespace atrisk
