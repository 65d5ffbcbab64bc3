#include "viewsnip/viewpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "viewsnip/errors.hpp"
#include "viewsnip/rng.hpp"

namespace viewsnip {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kModelKind = "tfidf-logistic-regression";

std::array<double, 3> softmax(const std::array<double, 3>& logits) {
  const double peak = std::max({logits[0], logits[1], logits[2]});
  std::array<double, 3> out{};
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    out[k] = std::exp(logits[k] - peak);
    sum += out[k];
  }
  for (int k = 0; k < 3; ++k) out[k] /= sum;
  return out;
}

}  // namespace

ViewpointDistribution ViewpointDistribution::validated(const std::array<double, 3>& scores) {
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw DataError("viewpoint score outside [0, 1]");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("viewpoint scores do not sum to 1");
  }
  return ViewpointDistribution(scores);
}

ViewpointDistribution ViewpointDistribution::normalized(const std::array<double, 3>& scores) {
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0) {
      throw DataError("viewpoint scores must be finite and nonnegative");
    }
    sum += s;
  }
  if (sum <= 0.0) throw DataError("viewpoint scores sum to zero");
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) out[k] = scores[k] / sum;
  return ViewpointDistribution(out);
}

double ViewpointDistribution::score(ViewpointClass cls) const {
  return scores_[static_cast<std::size_t>(class_index(cls))];
}

ViewpointClass ViewpointDistribution::predicted() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (scores_[k] > scores_[best]) best = k;
  }
  return kClassifierClasses[best];
}

BaselineModel BaselineModel::train(const std::vector<TrainingExample>& examples,
                                   const TrainOptions& options) {
  if (options.epochs < 0) throw DataError("epochs must be nonnegative");
  if (!(options.learning_rate > 0.0)) throw DataError("learning rate must be positive");
  if (options.l2 < 0.0) throw DataError("l2 penalty must be nonnegative");

  std::array<long, 3> per_class{};
  for (const TrainingExample& ex : examples) {
    ++per_class[static_cast<std::size_t>(class_index(ex.label))];
  }
  for (ViewpointClass cls : kClassifierClasses) {
    if (per_class[static_cast<std::size_t>(class_index(cls))] == 0) {
      throw DataError("no training examples for class '" + std::string(to_token(cls)) + "'");
    }
  }

  BaselineModel model;
  model.seed_ = options.seed;

  // Vocabulary in first-appearance order keeps training reproducible.
  std::vector<std::vector<int>> token_ids(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    for (const std::string& token : tokenize(examples[e].text)) {
      auto [it, inserted] =
          model.vocabulary_.emplace(token, static_cast<int>(model.tokens_.size()));
      if (inserted) model.tokens_.push_back(token);
      token_ids[e].push_back(it->second);
    }
  }
  const std::size_t vocab = model.tokens_.size();

  std::vector<int> doc_freq(vocab, 0);
  std::vector<std::vector<std::pair<int, double>>> rows(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    std::vector<int> counts;
    std::vector<int> touched;
    counts.assign(vocab, 0);
    for (int id : token_ids[e]) {
      if (counts[id]++ == 0) touched.push_back(id);
    }
    std::sort(touched.begin(), touched.end());
    for (int id : touched) {
      ++doc_freq[id];
      rows[e].emplace_back(id, static_cast<double>(counts[id]));
    }
  }
  model.idf_.resize(vocab);
  const double n = static_cast<double>(examples.size());
  for (std::size_t j = 0; j < vocab; ++j) {
    model.idf_[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(doc_freq[j]))) + 1.0;
  }
  for (auto& row : rows) {
    double norm_sq = 0.0;
    for (auto& [id, value] : row) {
      value *= model.idf_[static_cast<std::size_t>(id)];
      norm_sq += value * value;
    }
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [id, value] : row) value *= inv;
    }
  }

  SplitMix64 rng(options.seed);
  for (auto& w : model.weights_) {
    w.resize(vocab);
    for (double& v : w) {
      const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
      v = (u - 0.5) * 0.02;
    }
  }

  std::array<std::vector<double>, 3> grad;
  for (auto& g : grad) g.resize(vocab);
  std::array<double, 3> grad_bias{};
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
    grad_bias.fill(0.0);
    for (std::size_t e = 0; e < examples.size(); ++e) {
      std::array<double, 3> logits = model.bias_;
      for (const auto& [id, value] : rows[e]) {
        for (int k = 0; k < 3; ++k) logits[k] += model.weights_[k][id] * value;
      }
      std::array<double, 3> p = softmax(logits);
      const int truth = class_index(examples[e].label);
      for (int k = 0; k < 3; ++k) {
        const double delta = p[k] - (k == truth ? 1.0 : 0.0);
        grad_bias[k] += delta;
        for (const auto& [id, value] : rows[e]) {
          grad[k][id] += delta * value;
        }
      }
    }
    const double step = options.learning_rate / n;
    for (int k = 0; k < 3; ++k) {
      model.bias_[k] -= step * grad_bias[k];
      for (std::size_t j = 0; j < vocab; ++j) {
        model.weights_[k][j] -=
            step * grad[k][j] + options.learning_rate * options.l2 * model.weights_[k][j];
      }
    }
  }
  return model;
}

std::vector<std::pair<int, double>> BaselineModel::features(std::string_view text) const {
  std::vector<std::pair<int, double>> row;
  std::unordered_map<int, int> counts;
  for (const std::string& token : tokenize(text)) {
    auto it = vocabulary_.find(token);
    if (it != vocabulary_.end()) ++counts[it->second];
  }
  row.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    row.emplace_back(id, static_cast<double>(count) * idf_[static_cast<std::size_t>(id)]);
  }
  std::sort(row.begin(), row.end());
  double norm_sq = 0.0;
  for (const auto& [id, value] : row) norm_sq += value * value;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [id, value] : row) value *= inv;
  }
  return row;
}

ViewpointDistribution BaselineModel::classify(std::string_view text,
                                              const InterventionCondition&) const {
  if (trim_view(text).empty()) throw DataError("empty classifier input");
  std::array<double, 3> logits = bias_;
  for (const auto& [id, value] : features(text)) {
    for (int k = 0; k < 3; ++k) logits[k] += weights_[k][id] * value;
  }
  return ViewpointDistribution::validated(softmax(logits));
}

std::string BaselineModel::id() const {
  return std::string(kModelKind) + "-seed" + std::to_string(seed_);
}

nlohmann::ordered_json BaselineModel::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = kModelKind;
  j["seed"] = seed_;
  j["classes"] = {"effective", "inconclusive", "ineffective"};
  j["vocabulary"] = tokens_;
  j["idf"] = idf_;
  j["bias"] = bias_;
  j["weights"] = weights_;
  return j;
}

BaselineModel BaselineModel::from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> DataError {
    return DataError("invalid model file: " + what);
  };
  if (!j.is_object()) throw fail("not a JSON object");
  if (!j.contains("format_version") || !j.at("format_version").is_number_integer() ||
      j.at("format_version").get<int>() != kFormatVersion) {
    throw fail("unsupported format_version");
  }
  if (!j.contains("kind") || j.at("kind") != kModelKind) throw fail("unknown kind");
  for (const char* field : {"seed", "vocabulary", "idf", "bias", "weights"}) {
    if (!j.contains(field)) throw fail(std::string("missing field '") + field + "'");
  }

  BaselineModel model;
  try {
    model.seed_ = j.at("seed").get<std::uint64_t>();
    model.tokens_ = j.at("vocabulary").get<std::vector<std::string>>();
    model.idf_ = j.at("idf").get<std::vector<double>>();
    model.bias_ = j.at("bias").get<std::array<double, 3>>();
    auto weights = j.at("weights").get<std::array<std::vector<double>, 3>>();
    model.weights_ = std::move(weights);
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  const std::size_t vocab = model.tokens_.size();
  if (model.idf_.size() != vocab) throw fail("idf length != vocabulary size");
  for (const auto& w : model.weights_) {
    if (w.size() != vocab) throw fail("weight vector length != vocabulary size");
  }
  for (std::size_t i = 0; i < vocab; ++i) {
    if (!model.vocabulary_.emplace(model.tokens_[i], static_cast<int>(i)).second) {
      throw fail("duplicate vocabulary token '" + model.tokens_[i] + "'");
    }
  }
  return model;
}

void BaselineModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open model file for writing: " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw DataError("failed writing model file: " + path.string());
}

BaselineModel BaselineModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("invalid model file: " + std::string(e.what()));
  }
  return from_json(j);
}

}  // namespace viewsnip
