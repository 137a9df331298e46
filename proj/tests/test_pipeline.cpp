#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "tactile/errors.hpp"
#include "tactile/pipeline.hpp"

using namespace tactile;

namespace {

const PipelineConfig kDefault{};

}  // namespace

TEST_CASE("trim drops frames before first contact") {
  Readings touch{};
  touch[17] = 11;
  auto rec = testing::recording_from(
      {testing::filled(0), testing::filled(0), touch, testing::filled(0)});
  const auto out = trim_precontact(rec, kDefault);
  REQUIRE(out.frames.size() == 2);
  CHECK(out.frames[0] == rec.frames[2]);
  CHECK(out.frames[1] == rec.frames[3]);

  Readings strong{};
  strong[0] = 200;
  auto already = testing::recording_from({strong, testing::filled(0)});
  CHECK(trim_precontact(already, kDefault) == already);

  auto idle = testing::recording_from({testing::filled(0), testing::filled(10)});
  CHECK_THROWS_AS(trim_precontact(idle, kDefault), NoContactError);
}

TEST_CASE("smooth_taxel examples") {
  const std::vector<double> constant{5, 5, 5, 5};
  CHECK(smooth_taxel(constant, 3) == constant);
  const auto s = smooth_taxel(std::vector<double>{0, 3, 6}, 3);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(1.5));
  CHECK(s[1] == doctest::Approx(3.0));
  CHECK(s[2] == doctest::Approx(4.5));
  const std::vector<double> x{1, 9, 2, 7};
  CHECK(smooth_taxel(x, 1) == x);
  CHECK(smooth_taxel(std::vector<double>{}, 3).empty());
}

TEST_CASE("smooth_taxel matches a naive windowed sum and stays in the envelope") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + rng.index(40));
    for (auto& v : x) v = rng.uniform(-50, 50);
    const std::size_t w = 1 + 2 * rng.index(4);
    const auto s = smooth_taxel(x, w);
    REQUIRE(s.size() == x.size());
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    const auto half = static_cast<long>(w / 2);
    for (std::size_t t = 0; t < x.size(); ++t) {
      double sum = 0.0;
      int n = 0;
      for (long u = static_cast<long>(t) - half; u <= static_cast<long>(t) + half; ++u) {
        if (u >= 0 && u < static_cast<long>(x.size())) {
          sum += x[static_cast<std::size_t>(u)];
          ++n;
        }
      }
      CHECK(s[t] == doctest::Approx(sum / n).epsilon(1e-12));
      CHECK(s[t] >= *mn - 1e-9);
      CHECK(s[t] <= *mx + 1e-9);
    }
  }
}

TEST_CASE("fix_length keeps the first frames or pads with zeros") {
  Rng rng(1);
  auto long_rec = testing::random_recording(rng, 200, 200);
  auto out = fix_length(long_rec.frames, 150, 0.02);
  REQUIRE(out.size() == 150);
  for (std::size_t i = 0; i < 150; ++i) CHECK(out[i] == long_rec.frames[i]);

  auto exact = testing::random_recording(rng, 150, 150);
  CHECK(fix_length(exact.frames, 150, 0.02) == exact.frames);

  auto short_rec = testing::random_recording(rng, 7, 7);
  out = fix_length(short_rec.frames, 150, 0.02);
  REQUIRE(out.size() == 150);
  for (std::size_t i = 0; i < 7; ++i) CHECK(out[i] == short_rec.frames[i]);
  for (std::size_t i = 7; i < 150; ++i) {
    CHECK(out[i].readings == Readings{});
    CHECK(out[i].timestamp == doctest::Approx(short_rec.frames[6].timestamp +
                                               0.02 * static_cast<double>(i - 6)));
  }
  CHECK(fix_length(out, 150, 0.02) == out);
}

TEST_CASE("activated count boundary cases") {
  Readings three{};
  three[0] = three[30] = three[62] = 11;
  CHECK(activated_taxels(TaxelFrame{0.0, three}, 10) == 3);
  CHECK(activated_taxels(TaxelFrame{0.0, testing::filled(10)}, 10) == 0);

  auto rec = testing::recording_from({three, testing::filled(10)});
  const auto f = feature_activated_count(rec, kDefault);
  REQUIRE(f.values.size() == 150);
  CHECK(f.values[0] == 3.0);
  for (std::size_t i = 1; i < 150; ++i) CHECK(f.values[i] == 0.0);
}

TEST_CASE("activated count equals a brute-force recount on random recordings") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rec = testing::random_recording(rng, 1, 260);
    const auto f = feature_activated_count(rec, kDefault);
    std::size_t start = 0;
    while (oracle::count_active(rec.frames[start].readings, 10) == 0) ++start;
    for (std::size_t t = 0; t < 150; ++t) {
      const double expected =
          start + t < rec.frames.size()
              ? static_cast<double>(oracle::count_active(rec.frames[start + t].readings, 10))
              : 0.0;
      REQUIRE(f.values[t] == expected);
    }
  }
}

TEST_CASE("max taxel trace") {
  SUBCASE("constant taxel then zero padding") {
    std::vector<Readings> frames(100, Readings{});
    for (auto& f : frames) f[12] = 100;
    const auto f = feature_max_taxel_trace(testing::recording_from(frames), kDefault);
    REQUIRE(f.values.size() == 150);
    for (std::size_t t = 0; t < 99; ++t) CHECK(f.values[t] == doctest::Approx(100.0));
    // Smoothing blends the last real frame with the first padded one.
    CHECK(f.values[99] == doctest::Approx(200.0 / 3.0));
    CHECK(f.values[100] == doctest::Approx(100.0 / 3.0));
    for (std::size_t t = 101; t < 150; ++t) CHECK(f.values[t] == 0.0);
  }
  SUBCASE("ties go to the lower index") {
    std::vector<Readings> frames(20, Readings{});
    for (auto& f : frames) f[40] = f[7] = 55;
    CHECK(max_mean_taxel(testing::recording_from(frames)) == 7);
  }
  SUBCASE("argmax oracle on random recordings") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      const auto rec = trim_precontact(testing::random_recording(rng, 5, 200), kDefault);
      std::size_t best = 0;
      double best_sum = -1.0;
      for (std::size_t i = 0; i < kNumTaxels; ++i) {
        double sum = 0.0;
        for (const auto& fr : rec.frames) sum += fr.readings[i];
        if (sum > best_sum) {
          best_sum = sum;
          best = i;
        }
      }
      CHECK(max_mean_taxel(rec) == best);
    }
  }
}

TEST_CASE("principal frequency of a 5 Hz sinusoid") {
  std::vector<Readings> frames(150, Readings{});
  for (std::size_t t = 0; t < 150; ++t) {
    frames[t][3] = static_cast<Reading>(
        std::lround(500 + 400 * std::sin(2 * std::numbers::pi * 5.0 * t / 50.0)));
    frames[t][9] = 300;  // constant taxel
  }
  const auto f = feature_principal_frequency(testing::recording_from(frames), kDefault);
  REQUIRE(f.values.size() == 63);
  CHECK(std::abs(f.values[3] - 5.0) <= 1.0 / 3.0 + 1e-9);
  CHECK(f.values[9] == 0.0);
  CHECK(f.values[0] == 0.0);
}

TEST_CASE("principal_bin matches a naive DFT on random series") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(150);
    for (auto& v : x) v = std::round(rng.uniform(0, 60));
    CHECK(principal_bin(x) == oracle::dft_argmax(x));
  }
  CHECK(principal_bin(std::vector<double>(150, 4.0)) == 0);
}

TEST_CASE("principal frequency matches the naive DFT oracle per taxel") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rec = testing::random_recording(rng, 40, 220);
    const auto f = feature_principal_frequency(rec, kDefault);
    for (std::size_t i = 0; i < kNumTaxels; ++i) {
      const auto bin = oracle::dft_argmax(oracle::spectral_series(rec, i, 10, 150));
      CHECK(f.values[i] == doctest::Approx(bin * 50.0 / 150.0).epsilon(1e-12));
      CHECK(f.values[i] >= 0.0);
      CHECK(f.values[i] <= 25.0);
    }
  }
}

TEST_CASE("taxel mean and std") {
  std::vector<Readings> frames(150, Readings{});
  for (std::size_t t = 0; t < 150; ++t) {
    frames[t][0] = 200;  // contact on every frame
    frames[t][1] = 7;
  }
  auto rec = testing::recording_from(frames);
  auto mean = feature_taxel_mean(rec, kDefault);
  auto sd = feature_taxel_std(rec, kDefault);
  CHECK(mean.values[1] == doctest::Approx(7.0));
  CHECK(sd.values[1] == doctest::Approx(0.0));
  CHECK(mean.values[62] == 0.0);
  CHECK(sd.values[62] == 0.0);

  // Alternating 0/10 without smoothing: population mean 5 and std 5.
  PipelineConfig raw = kDefault;
  raw.smoothing_window = 1;
  for (std::size_t t = 0; t < 150; ++t) frames[t][2] = t % 2 ? 10 : 0;
  rec = testing::recording_from(frames);
  mean = feature_taxel_mean(rec, raw);
  sd = feature_taxel_std(rec, raw);
  double sum = 0.0, ss = 0.0;
  for (std::size_t t = 0; t < 150; ++t) sum += frames[t][2];
  for (std::size_t t = 0; t < 150; ++t) ss += (frames[t][2] - sum / 150) * (frames[t][2] - sum / 150);
  CHECK(mean.values[2] == doctest::Approx(sum / 150));
  CHECK(mean.values[2] == doctest::Approx(5.0));
  CHECK(sd.values[2] == doctest::Approx(std::sqrt(ss / 150)));
  CHECK(sd.values[2] == doctest::Approx(5.0));
}

TEST_CASE("extractors are pure and produce valid lengths") {
  Rng rng(10);
  const auto rec = testing::random_recording(rng, 30, 180);
  for (auto kind : kAllFeatureKinds) {
    const auto a = extract_feature(rec, kind, kDefault);
    const auto b = extract_feature(rec, kind, kDefault);
    CHECK(a == b);
    CHECK(a.kind == kind);
    CHECK(a.values.size() == feature_length(kind, kDefault));
    CHECK_NOTHROW(a.validate(kDefault));
  }
  CHECK(feature_length(FeatureKind::ActivatedCount, kDefault) == 150);
  CHECK(feature_length(FeatureKind::TaxelStd, kDefault) == 63);
}

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  c.smoothing_window = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.target_frames = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.activation_threshold = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("feature table skips recordings without contact") {
  Rng rng(4);
  std::vector<GestureRecording> recs;
  for (int i = 0; i < 4; ++i) {
    auto r = testing::random_recording(rng, 10, 30);
    r.label = GestureClass::Poke;
    recs.push_back(r);
  }
  recs.push_back(testing::recording_from({testing::filled(3)}));
  const auto table = build_feature_table(recs, FeatureKind::TaxelMean, kDefault);
  CHECK(table.features.size() == 4);
  CHECK(table.dropped == 1);
  std::ostringstream csv;
  write_feature_csv(csv, table);
  const auto text = csv.str();
  CHECK(text.rfind("participant,label,kind,v0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
