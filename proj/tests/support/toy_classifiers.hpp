#pragma once

#include <atomic>
#include <string>
#include <string_view>

#include "viewsnip/corpus.hpp"
#include "viewsnip/errors.hpp"
#include "viewsnip/viewpoint.hpp"

namespace viewsnip::testing {

// Uniform scores regardless of input; every erasure contribution collapses to
// zero and the tie-break picks "effective".
class ConstantClassifier final : public ViewpointClassifier {
 public:
  ViewpointDistribution classify(std::string_view,
                                 const InterventionCondition&) const override {
    return ViewpointDistribution::validated({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  }
  std::string id() const override { return "constant"; }
};

// Laplace-smoothed marker counting: "good" feeds effective, "unclear" feeds
// inconclusive, "bad" feeds ineffective. The scale factor multiplies the
// unnormalized counts before normalization, which must never change a score.
class KeywordClassifier final : public ViewpointClassifier {
 public:
  explicit KeywordClassifier(double scale = 1.0) : scale_(scale) {}

  ViewpointDistribution classify(std::string_view text,
                                 const InterventionCondition&) const override {
    double good = 1.0;
    double unclear = 1.0;
    double bad = 1.0;
    for (const std::string& token : tokenize(text)) {
      if (token == "good") {
        good += 1.0;
      } else if (token == "unclear") {
        unclear += 1.0;
      } else if (token == "bad") {
        bad += 1.0;
      }
    }
    return ViewpointDistribution::normalized(
        {good * scale_, unclear * scale_, bad * scale_});
  }
  std::string id() const override { return "keyword"; }

 private:
  double scale_;
};

// Forwards to another classifier while counting calls; verifies the 1 + n
// erasure call identity.
class CountingClassifier final : public ViewpointClassifier {
 public:
  explicit CountingClassifier(const ViewpointClassifier& inner) : inner_(inner) {}

  ViewpointDistribution classify(std::string_view text,
                                 const InterventionCondition& ic) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.classify(text, ic);
  }
  std::string id() const override { return "counting(" + inner_.id() + ")"; }

  int calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset() { calls_.store(0, std::memory_order_relaxed); }

 private:
  const ViewpointClassifier& inner_;
  mutable std::atomic<int> calls_{0};
};

// Succeeds only while the needle substring is present; erasing the sentence
// that carries it makes the classifier throw, exercising error context.
class NeedleClassifier final : public ViewpointClassifier {
 public:
  explicit NeedleClassifier(std::string needle, bool remote = false)
      : needle_(std::move(needle)), remote_(remote) {}

  ViewpointDistribution classify(std::string_view text,
                                 const InterventionCondition&) const override {
    if (text.find(needle_) == std::string_view::npos) {
      if (remote_) {
        throw RemoteError(RemoteError::Kind::connect, "needle endpoint unreachable");
      }
      throw DataError("needle absent");
    }
    return ViewpointDistribution::validated({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  }
  std::string id() const override { return "needle"; }

 private:
  std::string needle_;
  bool remote_;
};

}  // namespace viewsnip::testing
