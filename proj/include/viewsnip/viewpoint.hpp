#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "viewsnip/corpus.hpp"

namespace viewsnip {

// Classifier scores over {effective, inconclusive, ineffective}, a probability
// distribution: every score in [0, 1], summing to 1 within 1e-9.
class ViewpointDistribution {
 public:
  // Validates the distribution invariant; throws DataError when violated.
  static ViewpointDistribution validated(const std::array<double, 3>& scores);

  // Rescales raw non-negative finite scores with a positive sum.
  static ViewpointDistribution normalized(const std::array<double, 3>& raw);

  double score(ViewpointClass c) const;
  const std::array<double, 3>& scores() const { return scores_; }

  // Argmax with ties broken by the fixed kClassifierClasses order.
  ViewpointClass predicted() const;

 private:
  explicit ViewpointDistribution(const std::array<double, 3>& s) : scores_(s) {}
  std::array<double, 3> scores_;
};

// The classifier contract. Implementations must be deterministic for fixed
// model state and input, defined for any nonempty text, and safe to call
// concurrently. The intervention-condition pair is part of the contract so
// richer models can condition on it; the baseline ignores it.
class ViewpointClassifier {
 public:
  virtual ~ViewpointClassifier() = default;

  // Throws DataError("empty classifier input") on empty text.
  virtual ViewpointDistribution classify(std::string_view text,
                                         const InterventionCondition& ic) const = 0;

  // Identity string for report provenance.
  virtual std::string id() const = 0;
};

struct TrainingExample {
  std::string text;
  ViewpointClass label;  // restricted to the three classifier classes
};

struct TrainOptions {
  int epochs = 300;
  double learning_rate = 1.0;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

// Multinomial logistic regression over L2-normalized tf-idf bags of words.
// Training is fully deterministic for a given seed; models serialize to a
// versioned JSON artifact that round-trips exactly.
class BaselineModel final : public ViewpointClassifier {
 public:
  // Requires at least one example per classifier class; otherwise throws
  // DataError naming the missing class.
  static BaselineModel train(const std::vector<TrainingExample>& corpus,
                             const TrainOptions& options = {});

  static BaselineModel load(const std::filesystem::path& path);
  static BaselineModel from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void save(const std::filesystem::path& path) const;

  ViewpointDistribution classify(std::string_view text,
                                 const InterventionCondition& ic) const override;
  std::string id() const override;

  std::size_t vocabulary_size() const { return tokens_.size(); }
  std::uint64_t seed() const { return seed_; }

 private:
  BaselineModel() = default;

  // Sparse L2-normalized tf-idf vector of the known tokens in a text.
  std::vector<std::pair<int, double>> features(std::string_view text) const;

  std::vector<std::string> tokens_;                 // feature index -> token
  std::unordered_map<std::string, int> vocabulary_;  // token -> feature index
  std::vector<double> idf_;
  std::array<std::vector<double>, 3> weights_;  // per class, vocabulary-sized
  std::array<double, 3> bias_{};
  std::uint64_t seed_ = 0;
};

}  // namespace viewsnip
