#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "support.hpp"
#include "tactile/errors.hpp"
#include "tactile/learn/ablation.hpp"
#include "tactile/learn/evaluate.hpp"
#include "tactile/learn/forest.hpp"
#include "tactile/learn/model_io.hpp"
#include "tactile/learn/trainer.hpp"

using namespace tactile;
using namespace tactile::learn;

namespace {

struct Toy {
  std::vector<FeatureVector> x;
  std::vector<GestureClass> y;
};

Toy two_blobs(std::uint64_t seed, std::size_t per_class, std::size_t dim) {
  Rng rng(seed);
  Toy t;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool second = i % 2 == 1;
    FeatureVector f{FeatureKind::TaxelMean, std::vector<double>(dim)};
    for (auto& v : f.values) v = rng.normal(second ? 2.0 : -2.0, 0.7);
    t.x.push_back(f);
    t.y.push_back(second ? GestureClass::Grab : GestureClass::Hit);
  }
  return t;
}

// Constant level vs. a sinusoid around the same level.
Toy sequences(std::uint64_t seed, std::size_t per_class, std::size_t length) {
  Rng rng(seed);
  Toy t;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool osc = i % 2 == 1;
    FeatureVector f{FeatureKind::ActivatedCount, std::vector<double>(length)};
    const double level = rng.uniform(5, 15);
    const double freq = rng.uniform(0.15, 0.3);
    const double phase = rng.uniform(0, 2 * std::numbers::pi);
    for (std::size_t s = 0; s < length; ++s) {
      f.values[s] = level + rng.normal(0, 0.3) +
                    (osc ? 6.0 * std::sin(2 * std::numbers::pi * freq * s + phase) : 0.0);
    }
    t.x.push_back(f);
    t.y.push_back(osc ? GestureClass::Shake : GestureClass::Grab);
  }
  return t;
}

double accuracy_on(const TrainedModel& m, const Toy& t) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < t.x.size(); ++i) ok += m.predict(t.x[i]) == t.y[i];
  return static_cast<double>(ok) / static_cast<double>(t.x.size());
}

}  // namespace

TEST_CASE("mlp separates two blobs within 50 epochs") {
  const auto toy = two_blobs(1, 40, 6);
  DenseNetConfig c;
  c.train.max_epochs = 50;
  c.train.patience = 50;
  const auto m = train_mlp(toy.x, toy.y, c);
  CHECK(accuracy_on(m, toy) == 1.0);
  CHECK(m.history.epochs.size() == 50);
  CHECK(m.kind == ModelKind::MLP);
  CHECK(m.input_dim == 6);
}

TEST_CASE("mlp training is deterministic for a fixed seed") {
  const auto toy = two_blobs(2, 20, 5);
  DenseNetConfig c;
  c.train.max_epochs = 5;
  c.train.seed = 9;
  const auto a = model_to_json(train_mlp(toy.x, toy.y, c)).dump();
  const auto b = model_to_json(train_mlp(toy.x, toy.y, c)).dump();
  CHECK(a == b);
  c.train.seed = 10;
  CHECK(model_to_json(train_mlp(toy.x, toy.y, c)).dump() != a);
}

TEST_CASE("mlp config enforces the 256-128-64-6 shape family") {
  DenseNetConfig c;
  CHECK(c.hidden_dims == std::vector<std::size_t>{256, 128, 64});
  CHECK(c.train.learning_rate == 0.00025);
  c.hidden_dims = {32, 16};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.output_dim = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("lstm tells constant from oscillating sequences") {
  const auto train = sequences(3, 80, 12);
  const auto test = sequences(4, 40, 12);
  LstmConfig c;
  c.hidden = 8;
  c.train.learning_rate = 0.01;
  c.train.max_epochs = 80;
  const auto m = train_lstm(train.x, train.y, c);
  CHECK(accuracy_on(m, test) >= 0.95);
}

TEST_CASE("cnn tells constant from oscillating sequences") {
  const auto train = sequences(5, 40, 30);
  const auto test = sequences(6, 40, 30);
  CnnConfig c;
  c.train.max_epochs = 40;
  const auto m = train_cnn1d(train.x, train.y, c);
  CHECK(accuracy_on(m, test) >= 0.95);
}

TEST_CASE("training diverges loudly") {
  const auto toy = two_blobs(7, 20, 4);
  DenseNetConfig c;
  c.train.learning_rate = 1e300;
  c.train.max_epochs = 20;
  try {
    train_mlp(toy.x, toy.y, c);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() >= 1);
  }
}

TEST_CASE("training input validation") {
  auto toy = two_blobs(8, 5, 3);
  DenseNetConfig c;
  CHECK_THROWS_AS(train_mlp({}, {}, c), ConfigError);
  auto mixed = toy;
  mixed.x[1].kind = FeatureKind::TaxelStd;
  CHECK_THROWS_AS(train_mlp(mixed.x, mixed.y, c), KindMismatchError);
  auto ragged = toy;
  ragged.x[2].values.push_back(1.0);
  CHECK_THROWS_AS(train_mlp(ragged.x, ragged.y, c), ConfigError);
  CHECK_THROWS_AS(train_rf({}, {}, ForestConfig{}), ConfigError);
}

TEST_CASE("forest on threshold-separable data is shallow and perfect") {
  Rng rng(2);
  std::vector<FeatureVector> x;
  std::vector<GestureClass> y;
  for (int i = 0; i < 60; ++i) {
    const double v = rng.uniform(-1, 1);
    x.push_back({FeatureKind::TaxelMean, {v}});
    y.push_back(v > 0.1 ? GestureClass::Tap : GestureClass::Poke);
  }
  const auto m = train_rf(x, y, ForestConfig{});
  REQUIRE(m.forest);
  CHECK(m.forest->trees().size() == 60);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ok += m.predict(x[i]) == y[i];
  CHECK(ok == x.size());
  for (const auto& t : m.forest->trees()) {
    CHECK(t.depth() >= 1);
    CHECK(t.depth() <= 2);
  }
}

TEST_CASE("single tree matches the exhaustive CART oracle") {
  const std::vector<std::vector<double>> x = {{1.0, 7.0}, {2.0, 3.0}, {3.0, 8.0},
                                              {4.0, 1.0}, {5.0, 6.0}, {6.0, 2.0},
                                              {7.0, 9.0}, {8.0, 4.0}};
  const std::vector<int> y = {0, 1, 0, 1, 2, 1, 2, 2};
  std::vector<GestureClass> labels;
  for (int v : y) labels.push_back(gesture_from_index(static_cast<std::size_t>(v)));

  const oracle::Cart cart(x, y, kNumClasses);
  RandomForest forest;
  forest.fit(x, labels, ForestConfig{.n_estimators = 1, .bootstrap = false,
                                     .max_features = 2, .seed = 3});
  const auto& tree = forest.trees().front();
  CHECK(tree.nodes().size() == cart.node_count());
  Rng rng(1);
  for (int probe = 0; probe < 2000; ++probe) {
    const std::vector<double> p{rng.uniform(0, 9), rng.uniform(0, 10)};
    REQUIRE(tree.predict(p) == static_cast<std::size_t>(cart.predict(p)));
    REQUIRE(forest.predict(p) == tree.predict(p));
  }
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(tree.predict(x[i]) == static_cast<std::size_t>(y[i]));
}

TEST_CASE("CART oracle agreement on random small datasets") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const std::size_t d = 1 + rng.index(3);
    std::vector<std::vector<double>> x(12, std::vector<double>(d));
    std::vector<int> y(12);
    std::vector<GestureClass> labels;
    for (std::size_t i = 0; i < 12; ++i) {
      for (auto& v : x[i]) v = static_cast<double>(rng.index(6));
      y[i] = static_cast<int>(rng.index(3));
      labels.push_back(gesture_from_index(static_cast<std::size_t>(y[i])));
    }
    const oracle::Cart cart(x, y, kNumClasses);
    RandomForest forest;
    forest.fit(x, labels, {.n_estimators = 1, .bootstrap = false, .max_features = d, .seed = seed});
    for (int probe = 0; probe < 200; ++probe) {
      std::vector<double> p(d);
      for (auto& v : p) v = rng.uniform(-0.5, 5.5);
      REQUIRE(forest.predict(p) == static_cast<std::size_t>(cart.predict(p)));
    }
  }
}

TEST_CASE("evaluate_predictions invariants") {
  std::vector<GestureClass> truth;
  for (auto g : kAllGestures) truth.insert(truth.end(), 30, g);
  const auto perfect = evaluate_predictions(truth, truth);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.total == 180);
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      CHECK(perfect.confusion[i][j] == (i == j ? 30u : 0u));
    }
  }

  Rng rng(6);
  std::vector<GestureClass> t2, p2;
  for (int i = 0; i < 6000; ++i) {
    t2.push_back(gesture_from_index(rng.index(6)));
    p2.push_back(gesture_from_index(rng.index(6)));
  }
  const auto chance = evaluate_predictions(t2, p2);
  CHECK(std::abs(chance.accuracy - 1.0 / 6.0) <= 0.02);
  CHECK(chance.accuracy == static_cast<double>(chance.trace()) / chance.total);
  std::size_t sum = 0;
  for (const auto& row : chance.confusion) for (auto v : row) sum += v;
  CHECK(sum == 6000);
  const auto j = chance.to_json();
  CHECK(j.at("confusion").size() == 6);
  CHECK(chance.render_table().find("accuracy") != std::string::npos);
}

TEST_CASE("evaluate rejects features of another kind") {
  const auto toy = two_blobs(11, 10, 4);
  DenseNetConfig c;
  c.train.max_epochs = 3;
  const auto m = train_mlp(toy.x, toy.y, c);
  auto wrong = toy.x;
  for (auto& f : wrong) f.kind = FeatureKind::TaxelStd;
  CHECK_THROWS_AS(evaluate(m, wrong, toy.y), KindMismatchError);
  auto short_x = toy.x;
  short_x[0].values.pop_back();
  CHECK_THROWS_AS(m.predict(short_x[0]), KindMismatchError);
}

TEST_CASE("model files reload to bit-identical predictions") {
  const auto toy = sequences(12, 12, 20);
  DenseNetConfig mc;
  mc.train.max_epochs = 3;
  LstmConfig lc;
  lc.hidden = 8;
  lc.train.max_epochs = 2;
  CnnConfig cc;
  cc.train.max_epochs = 2;
  const TrainedModel models[] = {train_mlp(toy.x, toy.y, mc), train_lstm(toy.x, toy.y, lc),
                                 train_cnn1d(toy.x, toy.y, cc),
                                 train_rf(toy.x, toy.y, ForestConfig{.n_estimators = 5})};
  testing::TempDir dir("model_io");
  for (const auto& m : models) {
    const auto path = dir.path() / (std::string(to_string(m.kind)) + ".json");
    save_model(path, m);
    const auto back = load_model(path);
    CHECK(back.kind == m.kind);
    CHECK(back.feature_kind == m.feature_kind);
    CHECK(back.history.epochs.size() == m.history.epochs.size());
    for (const auto& f : toy.x) CHECK(back.predict_proba(f) == m.predict_proba(f));
    CHECK(model_to_json(back).dump() == model_to_json(m).dump());
  }
  CHECK_THROWS_AS(model_from_json({{"format", "something-else"}}), ConfigError);
  CHECK_THROWS_AS(load_model(dir.path() / "missing.json"), IoError);
}

TEST_CASE("ablation on a single-class dataset") {
  Rng rng(13);
  Dataset ds;
  for (int p = 0; p < 4; ++p) {
    const std::string id = "P" + std::to_string(p);
    ds.split_assignment[id] = p < 3 ? Split::Train : Split::Test;
    for (int t = 0; t < 6; ++t) {
      auto rec = testing::random_recording(rng, 20, 60);
      rec.participant_id = id;
      rec.label = GestureClass::Rub;
      ds.recordings.push_back(rec);
    }
  }
  DenseNetConfig c;
  c.train.max_epochs = 30;
  const auto result = ablation_run(ds, kAllFeatureKinds, PipelineConfig{}, c);
  REQUIRE(result.rows.size() == 5);
  const char* labels[] = {"Ours", "F1", "F2", "F3", "F4"};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(result.rows[i].label == labels[i]);
    CHECK(result.rows[i].report.accuracy == 1.0);
    CHECK(result.rows[i].train_samples == 18);
    CHECK(result.rows[i].test_samples == 6);
  }
  CHECK(result.render_table().find("F4") != std::string::npos);
}
