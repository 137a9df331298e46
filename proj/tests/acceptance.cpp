// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "tactile/app/commands.hpp"
#include "tactile/dataset_io.hpp"
#include "tactile/learn/ablation.hpp"
#include "tactile/learn/forest.hpp"
#include "tactile/learn/gradient_check.hpp"
#include "tactile/learn/layers.hpp"
#include "tactile/learn/lstm.hpp"
#include "tactile/learn/model_io.hpp"
#include "tactile/learn/network.hpp"
#include "tactile/sensorsim/characterization.hpp"
#include "tactile/sensorsim/gestures.hpp"
#include "tactile/stream/client.hpp"
#include "tactile/stream/protocol.hpp"
#include "tactile/stream/server.hpp"

using namespace tactile;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientBudgetS = 30.0;
constexpr double kShapeBudgetS = 60.0;
constexpr double kPinnedAccuracy = 1.0;
constexpr double kMinAccuracy = 0.90;
constexpr double kEndToEndBudgetS = 300.0;
constexpr double kMinDetectToleranceN = 0.1;
constexpr double kSaturationToleranceN = 0.5;
constexpr double kCharacterizationBudgetS = 10.0;
constexpr std::size_t kRoundTripFrames = 1000;
constexpr double kPacingRateHz = 50.0;
constexpr double kPacingSeconds = 10.0;
constexpr double kPacingTolerance = 0.01;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

learn::Vec random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  learn::Vec v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

Outcome gradients() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    learn::Dense dense(6, 5);
    dense.initialize(rng);
    worst = std::max(worst, learn::gradient_check(dense, random_vec(rng, 6, -1, 1), seed));
    learn::Conv1d conv(12, 3, 4, 5);
    conv.initialize(rng);
    worst = std::max(worst, learn::gradient_check(conv, random_vec(rng, 36, -1, 1), seed));
    learn::Lstm lstm(7, 2, 5);
    lstm.initialize(rng);
    worst = std::max(worst, learn::gradient_check(lstm, random_vec(rng, 14, -2, 2), seed));
    worst = std::max(worst, learn::gradient_check_softmax_ce(random_vec(rng, 6, -3, 3),
                                                             rng.index(6)));
    const std::vector<std::size_t> hidden{7, 6, 5};
    auto mlp = learn::make_mlp(8, hidden, kNumClasses, rng);
    worst = std::max(worst, learn::gradient_check(mlp, random_vec(rng, 8, -1, 1), seed % 6));
    auto cnn = learn::make_cnn1d(20, kNumClasses, rng);
    worst = std::max(worst, learn::gradient_check(cnn, random_vec(rng, 20, -1, 1), seed % 6));
    auto lstm_net = learn::make_lstm_classifier(6, 4, kNumClasses, rng);
    worst = std::max(worst, learn::gradient_check(lstm_net, random_vec(rng, 6, -1, 1), seed % 6));
  }
  const double elapsed = seconds_since(t0);
  return {worst < kGradientTolerance && elapsed < kGradientBudgetS,
          "max relative error " + fmt("%.3g", worst) + " over 10 seeds in " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome oracles() {
  const PipelineConfig pipe;
  Rng rng(2024);
  std::size_t count_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const auto rec = testing::random_recording(rng, 20, 260);
    const auto f = feature_activated_count(rec, pipe);
    if (f.values != oracle::activated_count(rec, 10, 150)) ++count_mismatch;
  }
  std::size_t dft_mismatch = 0;
  for (int i = 0; i < 20; ++i) {
    const auto rec = testing::random_recording(rng, 40, 220);
    const auto f = feature_principal_frequency(rec, pipe);
    for (std::size_t t = 0; t < kNumTaxels; ++t) {
      const auto bin = oracle::dft_argmax(oracle::spectral_series(rec, t, 10, 150));
      if (f.values[t] != static_cast<double>(bin) * 50.0 / 150.0) ++dft_mismatch;
    }
  }
  const std::vector<std::vector<double>> x = {{1.0, 7.0}, {2.0, 3.0}, {3.0, 8.0},
                                              {4.0, 1.0}, {5.0, 6.0}, {6.0, 2.0},
                                              {7.0, 9.0}, {8.0, 4.0}};
  const std::vector<int> y = {0, 1, 0, 1, 2, 1, 2, 2};
  std::vector<GestureClass> labels;
  for (int v : y) labels.push_back(gesture_from_index(static_cast<std::size_t>(v)));
  const oracle::Cart cart(x, y, kNumClasses);
  learn::RandomForest forest;
  forest.fit(x, labels, {.n_estimators = 1, .bootstrap = false, .max_features = 2, .seed = 0});
  std::size_t cart_mismatch = 0;
  for (int p = 0; p < 5000; ++p) {
    const std::vector<double> q{rng.uniform(0, 9), rng.uniform(0, 10)};
    if (forest.predict(q) != static_cast<std::size_t>(cart.predict(q))) ++cart_mismatch;
  }
  const bool same_shape = forest.trees().front().nodes().size() == cart.node_count();
  return {count_mismatch == 0 && dft_mismatch == 0 && cart_mismatch == 0 && same_shape,
          "activated-count mismatches " + std::to_string(count_mismatch) + "/200, DFT " +
              std::to_string(dft_mismatch) + "/1260 taxels, CART " +
              std::to_string(cart_mismatch) + "/5000 probes" +
              (same_shape ? "" : ", node count differs")};
}

Outcome dataset_shape() {
  const auto t0 = Clock::now();
  const auto ds = sim::synthesize_dataset(SensorLayout::standard(),
                                          sim::GestureParams::defaults(), 0);
  const auto counts = split_counts(ds);
  bool per_class = true;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    per_class = per_class && counts.train[c] == 150 && counts.test[c] == 30;
  }
  std::set<std::string> train_ids, test_ids;
  for (const auto& r : ds.subset(Split::Train)) train_ids.insert(r.participant_id);
  for (const auto& r : ds.subset(Split::Test)) test_ids.insert(r.participant_id);
  bool disjoint = true;
  for (const auto& id : test_ids) disjoint = disjoint && !train_ids.count(id);
  const double elapsed = seconds_since(t0);
  return {counts.train_total() == 900 && counts.test_total() == 180 && per_class &&
              disjoint && elapsed < kShapeBudgetS,
          std::to_string(counts.train_total()) + " train / " +
              std::to_string(counts.test_total()) + " test, " +
              std::to_string(train_ids.size()) + "+" + std::to_string(test_ids.size()) +
              " participants" + (disjoint ? " disjoint" : " OVERLAPPING") +
              (per_class ? ", 150/30 per class" : ", per-class counts off") + ", " +
              fmt("%.1f", elapsed) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared by the end-to-end, streaming and confusion checks.
struct EndToEnd {
  fs::path data, model;
  learn::EvalReport report;
};

Outcome end_to_end(const fs::path& work, EndToEnd& state) {
  const auto t0 = Clock::now();
  app::SynthOptions so;
  so.out = (work / "data").string();
  so.seed = 0;
  app::cmd_synth(so);

  app::TrainOptions to;
  to.data = so.out;
  to.seed = 0;
  to.out = (work / "model_a").string();
  app::cmd_train(to);
  to.out = (work / "model_b").string();
  app::cmd_train(to);
  const bool identical = slurp(work / "model_a" / "model.json") ==
                         slurp(work / "model_b" / "model.json");

  app::EvalOptions eo;
  eo.data = so.out;
  eo.model = (work / "model_a" / "model.json").string();
  eo.out = (work / "eval").string();
  const auto summary = app::cmd_eval(eo).summary;
  const double accuracy = summary.at("accuracy").get<double>();

  state.data = so.out;
  state.model = eo.model;
  const auto ds = load_dataset(state.data);
  const auto model = learn::load_model(state.model);
  const auto test = ds.subset(Split::Test);
  std::vector<FeatureVector> x;
  std::vector<GestureClass> y;
  for (const auto& r : test) {
    x.push_back(extract_feature(r, model.feature_kind, PipelineConfig{}));
    y.push_back(*r.label);
  }
  state.report = learn::evaluate(model, x, y);

  const double elapsed = seconds_since(t0);
  return {identical && accuracy == kPinnedAccuracy && accuracy >= kMinAccuracy &&
              elapsed < kEndToEndBudgetS,
          std::string("model ") + (identical ? "byte-identical" : "DIFFERS") +
              " across runs, accuracy " + fmt("%.17g", accuracy) + " (pinned " +
              fmt("%.17g", kPinnedAccuracy) + "), " + fmt("%.1f", elapsed) + " s"};
}

Outcome ablation_order() {
  std::string detail;
  bool pass = true;
  const FeatureKind kinds[] = {FeatureKind::ActivatedCount, FeatureKind::PrincipalFrequency};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto ds = sim::synthesize_dataset(SensorLayout::standard(),
                                            sim::GestureParams::defaults(), seed);
    learn::DenseNetConfig cfg;
    cfg.train.seed = seed;
    const auto result = learn::ablation_run(ds, kinds, PipelineConfig{}, cfg);
    const double ours = result.row(FeatureKind::ActivatedCount).report.accuracy;
    const double freq = result.row(FeatureKind::PrincipalFrequency).report.accuracy;
    pass = pass && ours >= freq;
    if (!detail.empty()) detail += "; ";
    detail += "seed " + std::to_string(seed) + ": " + fmt("%.4f", ours) + " vs " +
              fmt("%.4f", freq);
  }
  return {pass, "activated-count vs principal-frequency, " + detail};
}

Outcome characterization() {
  const auto t0 = Clock::now();
  const auto sensor = sim::SensorModel::nominal();
  const auto report = sim::run_characterization(sensor, sim::IndentationProtocol{}, 0);
  double worst_min = 0.0, worst_sat = 0.0;
  bool complete = report.taxels.size() == 8;
  for (const auto& t : report.taxels) {
    if (!t.min_detect || !t.max_sat) {
      complete = false;
      continue;
    }
    worst_min = std::max(worst_min, std::abs(t.min_detect->mean - t.model.min_force));
    worst_sat = std::max(worst_sat, std::abs(t.max_sat->mean - t.model.sat_force));
  }
  const double elapsed = seconds_since(t0);
  return {complete && worst_min <= kMinDetectToleranceN &&
              worst_sat <= kSaturationToleranceN && elapsed < kCharacterizationBudgetS,
          "8 taxels, worst min-detect error " + fmt("%.4f", worst_min) +
              " N, worst saturation error " + fmt("%.4f", worst_sat) + " N, " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome streaming(const EndToEnd& state) {
  using namespace tactile::stream;
  // Live vs offline on every test recording.
  const auto ds = load_dataset(state.data);
  const auto model = learn::load_model(state.model);
  const auto test = ds.subset(Split::Test);
  const PipelineConfig pipe;
  std::vector<LiveEvent> events;
  {
    ReplaySource source(test, 30);
    StreamServer server({.rate_hz = 20000.0});
    std::thread t([&] { server.serve(source); });
    ClientConfig cc;
    cc.port = server.port();
    classify_live(cc, model, pipe, {}, [&](const LiveEvent& e) { events.push_back(e); });
    t.join();
  }
  std::size_t equal = 0;
  if (events.size() == test.size()) {
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto f = extract_feature(test[i], model.feature_kind, pipe);
      equal += events[i].probabilities == model.predict_proba(f) &&
               events[i].predicted == model.predict(f);
    }
  }
  const bool live_ok = equal == test.size();

  // Protocol round trip.
  Rng rng(77);
  FrameDecoder decoder;
  FrameAssembler assembler;
  std::size_t round_trips = 0;
  for (std::size_t i = 0; i < kRoundTripFrames; ++i) {
    TaxelFrame f{static_cast<double>(i) / 50.0, {}};
    for (auto& r : f.readings) r = static_cast<Reading>(rng.index(kMaxReading + 1));
    std::vector<std::uint8_t> wire;
    for (const auto& m : split_frame(f, SensorLayout::standard())) append_encoded(m, wire);
    decoder.feed(wire);
    std::optional<TaxelFrame> back;
    while (auto m = decoder.next()) {
      if (auto g = assembler.add(*m)) back = g;
    }
    round_trips += back && back->readings == f.readings &&
                   to_microseconds(back->timestamp) == to_microseconds(f.timestamp);
  }
  const bool protocol_ok = round_trips == kRoundTripFrames;

  // Pacing: arrival rate at the client over ten seconds.
  const auto frames = static_cast<std::size_t>(kPacingRateHz * kPacingSeconds) + 1;
  ReplaySource idle({}, frames);
  StreamServer server({.rate_hz = kPacingRateHz});
  std::thread t([&] { server.serve(idle); });
  ClientConfig cc;
  cc.port = server.port();
  FrameClient client(cc);
  client.connect();
  std::vector<Clock::time_point> arrivals;
  bool stamps_ok = true;
  while (auto f = client.next()) {
    stamps_ok = stamps_ok &&
                f->timestamp == static_cast<double>(arrivals.size()) / kPacingRateHz;
    arrivals.push_back(Clock::now());
  }
  t.join();
  double rate = 0.0;
  if (arrivals.size() > 1) {
    rate = static_cast<double>(arrivals.size() - 1) /
           std::chrono::duration<double>(arrivals.back() - arrivals.front()).count();
  }
  const bool pacing_ok = arrivals.size() == frames && stamps_ok &&
                         std::abs(rate - kPacingRateHz) <= kPacingTolerance * kPacingRateHz;

  return {live_ok && protocol_ok && pacing_ok,
          "live==offline " + std::to_string(equal) + "/" + std::to_string(test.size()) +
              ", round trips " + std::to_string(round_trips) + "/" +
              std::to_string(kRoundTripFrames) + ", paced " + fmt("%.3f", rate) + " Hz over " +
              std::to_string(arrivals.size()) + " frames"};
}

Outcome confusion(const EndToEnd& state) {
  const auto& r = state.report;
  bool rows_ok = true;
  std::size_t sum = 0;
  for (const auto& row : r.confusion) {
    std::size_t n = 0;
    for (auto v : row) n += v;
    rows_ok = rows_ok && n == 30;
    sum += n;
  }
  const bool trace_ok =
      r.accuracy == static_cast<double>(r.trace()) / static_cast<double>(r.total);
  return {rows_ok && trace_ok && sum == r.total,
          "trace " + std::to_string(r.trace()) + " / total " + std::to_string(r.total) +
              (trace_ok ? " == accuracy" : " != accuracy") +
              (rows_ok ? ", every row sums to 30" : ", row sums off")};
}

}  // namespace

int main() {
  testing::TempDir work("acceptance");
  EndToEnd state;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradients},
      {"oracle equivalence", oracles},
      {"dataset shape", dataset_shape},
      {"pinned end-to-end regression", [&] { return end_to_end(work.path(), state); }},
      {"ablation ordering", ablation_order},
      {"characterization recovery", characterization},
      {"streaming equivalence", [&] { return streaming(state); }},
      {"confusion-matrix integrity", [&] { return confusion(state); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
