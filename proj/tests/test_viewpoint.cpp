#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "support/run_cli.hpp"
#include "support/synthetic.hpp"
#include "support/toy_classifiers.hpp"
#include "viewsnip/errors.hpp"
#include "viewsnip/viewpoint.hpp"

using namespace viewsnip;

namespace {

const InterventionCondition kIc{"roselle", "hypertension"};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("viewpoint") {

TEST_CASE("normalized rescales raw scores") {
  const auto d = ViewpointDistribution::normalized({2.0, 1.0, 1.0});
  CHECK(d.score(ViewpointClass::effective) == 0.5);
  CHECK(d.score(ViewpointClass::inconclusive) == 0.25);
  CHECK(d.score(ViewpointClass::ineffective) == 0.25);
  CHECK(d.scores() == std::array<double, 3>{0.5, 0.25, 0.25});
}

TEST_CASE("normalized rejects unusable raw scores") {
  CHECK_THROWS_AS(ViewpointDistribution::normalized({0.0, 0.0, 0.0}), DataError);
  CHECK_THROWS_AS(ViewpointDistribution::normalized({1.0, -0.1, 0.5}), DataError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ViewpointDistribution::normalized({nan, 1.0, 1.0}), DataError);
  CHECK_THROWS_AS(ViewpointDistribution::normalized({inf, 1.0, 1.0}), DataError);
}

TEST_CASE("validated enforces the distribution invariant") {
  CHECK_NOTHROW(ViewpointDistribution::validated({0.5, 0.25, 0.25}));
  CHECK_NOTHROW(ViewpointDistribution::validated({1.0, 0.0, 0.0}));
  CHECK_THROWS_AS(ViewpointDistribution::validated({0.5, 0.25, 0.30}), DataError);
  CHECK_THROWS_AS(ViewpointDistribution::validated({1.2, -0.1, -0.1}), DataError);
}

TEST_CASE("argmax ties resolve in fixed class order") {
  const auto uniform = ViewpointDistribution::normalized({1.0, 1.0, 1.0});
  CHECK(uniform.predicted() == ViewpointClass::effective);
  const auto pair_tie = ViewpointDistribution::validated({0.2, 0.4, 0.4});
  CHECK(pair_tie.predicted() == ViewpointClass::inconclusive);
  const auto plain = ViewpointDistribution::validated({0.1, 0.2, 0.7});
  CHECK(plain.predicted() == ViewpointClass::ineffective);
}

TEST_CASE("keyword toy classifier matches its closed-form counts") {
  const viewsnip::testing::KeywordClassifier classifier;
  const auto d = classifier.classify("good good. bad. unclear.", kIc);
  CHECK(d.score(ViewpointClass::effective) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(d.score(ViewpointClass::inconclusive) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(d.score(ViewpointClass::ineffective) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(d.predicted() == ViewpointClass::effective);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto corpus = viewsnip::testing::separable_corpus(12, 5);
  TrainOptions options;
  options.seed = 99;
  const BaselineModel a = BaselineModel::train(corpus, options);
  const BaselineModel b = BaselineModel::train(corpus, options);
  CHECK(a.to_json().dump() == b.to_json().dump());

  viewsnip::testing::TempDir dir("train_det");
  a.save(dir.path() / "a.json");
  b.save(dir.path() / "b.json");
  CHECK(slurp(dir.path() / "a.json") == slurp(dir.path() / "b.json"));

  options.seed = 100;
  const BaselineModel c = BaselineModel::train(corpus, options);
  CHECK(a.to_json().dump() != c.to_json().dump());
}

TEST_CASE("separable corpus trains to high accuracy") {
  const auto corpus = viewsnip::testing::separable_corpus(30, 7);
  const BaselineModel model = BaselineModel::train(corpus);
  int correct = 0;
  for (const TrainingExample& ex : corpus) {
    const auto d = model.classify(ex.text, kIc);
    const auto& s = d.scores();
    CHECK(std::abs(s[0] + s[1] + s[2] - 1.0) <= 1e-9);
    if (d.predicted() == ex.label) ++correct;
  }
  CHECK(correct >= static_cast<int>(corpus.size() * 95) / 100);
}

TEST_CASE("class-specific markers pull scores toward that class") {
  const auto corpus = viewsnip::testing::separable_corpus(30, 11);
  const BaselineModel model = BaselineModel::train(corpus);
  const auto& families = viewsnip::testing::marker_families();
  const std::string base = "patients daily group weeks study";
  for (int k = 0; k < 3; ++k) {
    const ViewpointClass cls = kClassifierClasses[static_cast<std::size_t>(k)];
    std::string text = base;
    double previous = model.classify(text, kIc).score(cls);
    for (int step = 0; step < 4; ++step) {
      text += " " + families[static_cast<std::size_t>(k)][static_cast<std::size_t>(step)];
      const double current = model.classify(text, kIc).score(cls);
      CHECK(current > previous);
      previous = current;
    }
  }
}

TEST_CASE("a missing class aborts training with a named error") {
  std::vector<TrainingExample> corpus = {
      {"improved benefit relief", ViewpointClass::effective},
      {"unclear mixed limited", ViewpointClass::inconclusive},
  };
  CHECK_THROWS_WITH_AS(BaselineModel::train(corpus),
                       "no training examples for class 'ineffective'", DataError);
  corpus.push_back({"failed worse harm", ViewpointClass::ineffective});
  CHECK_NOTHROW(BaselineModel::train(corpus));
}

TEST_CASE("training option bounds") {
  const auto corpus = viewsnip::testing::separable_corpus(3, 1);
  TrainOptions options;
  options.epochs = -1;
  CHECK_THROWS_AS(BaselineModel::train(corpus, options), DataError);
  options = {};
  options.learning_rate = 0.0;
  CHECK_THROWS_AS(BaselineModel::train(corpus, options), DataError);
  options = {};
  options.l2 = -1e-6;
  CHECK_THROWS_AS(BaselineModel::train(corpus, options), DataError);
  options = {};
  options.epochs = 0;  // legal: returns the seeded initial model
  CHECK_NOTHROW(BaselineModel::train(corpus, options));
}

TEST_CASE("empty input is rejected before scoring") {
  const auto corpus = viewsnip::testing::separable_corpus(3, 2);
  const BaselineModel model = BaselineModel::train(corpus);
  CHECK_THROWS_WITH_AS(model.classify("", kIc), "empty classifier input", DataError);
  CHECK_THROWS_WITH_AS(model.classify("   \t\n", kIc), "empty classifier input", DataError);
}

TEST_CASE("text with only unknown tokens still yields a distribution") {
  const auto corpus = viewsnip::testing::separable_corpus(5, 3);
  const BaselineModel model = BaselineModel::train(corpus);
  const auto d = model.classify("zzz qqq xxyy", kIc);
  const auto& s = d.scores();
  CHECK(std::abs(s[0] + s[1] + s[2] - 1.0) <= 1e-9);
  // All-unknown texts share the bias-only distribution.
  CHECK(model.classify("unrelated gibberish", kIc).scores() == s);
}

TEST_CASE("saved models reload to bitwise-identical behavior") {
  const auto corpus = viewsnip::testing::separable_corpus(10, 4);
  TrainOptions options;
  options.seed = 123;
  const BaselineModel model = BaselineModel::train(corpus, options);
  CHECK(model.seed() == 123);
  CHECK(model.id() == "tfidf-logistic-regression-seed123");
  CHECK(model.vocabulary_size() > 0);

  viewsnip::testing::TempDir dir("model_rt");
  const auto path = dir.path() / "model.json";
  model.save(path);
  const BaselineModel reloaded = BaselineModel::load(path);
  CHECK(reloaded.to_json().dump() == model.to_json().dump());
  CHECK(reloaded.seed() == 123);
  CHECK(reloaded.id() == model.id());

  const std::string probe = "improved unclear failed benefit patients";
  CHECK(reloaded.classify(probe, kIc).scores() == model.classify(probe, kIc).scores());

  // A second save of the reloaded model reproduces the file byte for byte.
  const auto copy = dir.path() / "copy.json";
  reloaded.save(copy);
  CHECK(slurp(copy) == slurp(path));
}

TEST_CASE("model files are validated on load") {
  const auto corpus = viewsnip::testing::separable_corpus(3, 6);
  const BaselineModel model = BaselineModel::train(corpus);
  nlohmann::json good = model.to_json();

  auto expect_reject = [&](nlohmann::json j) {
    CHECK_THROWS_AS(BaselineModel::from_json(j), DataError);
  };

  nlohmann::json j = good;
  j["format_version"] = 2;
  expect_reject(j);

  j = good;
  j["kind"] = "something-else";
  expect_reject(j);

  j = good;
  j.erase("idf");
  expect_reject(j);

  j = good;
  j["weights"][0] = std::vector<double>{1.0};  // wrong width
  expect_reject(j);

  j = good;
  j["vocabulary"].push_back("extra");  // now longer than idf
  expect_reject(j);

  j = good;
  j["bias"] = std::vector<double>{0.0, 0.0};  // wrong arity
  expect_reject(j);

  expect_reject(nlohmann::json::array());
  CHECK_NOTHROW(BaselineModel::from_json(good));
}

}  // TEST_SUITE
