#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tactile/dataset_io.hpp"
#include "tactile/errors.hpp"

using namespace tactile;

TEST_CASE("flatten_index examples") {
  const auto& layout = SensorLayout::standard();
  CHECK(layout.flatten_index(ArmSection::Upper, 0, 0) == 0);
  CHECK(layout.flatten_index(ArmSection::Upper, 6, 4) == 34);
  CHECK(layout.flatten_index(ArmSection::Lower, 0, 0) == 35);
  CHECK(layout.flatten_index(ArmSection::Lower, 6, 3) == 62);
}

TEST_CASE("flatten_index is a bijection onto 0..62 and locate inverts it") {
  const auto& layout = SensorLayout::standard();
  std::set<std::size_t> seen;
  const std::pair<ArmSection, std::pair<std::size_t, std::size_t>> dims[] = {
      {ArmSection::Upper, {7, 5}}, {ArmSection::Lower, {7, 4}}};
  for (const auto& [section, rc] : dims) {
    for (std::size_t r = 0; r < rc.first; ++r) {
      for (std::size_t c = 0; c < rc.second; ++c) {
        const auto idx = layout.flatten_index(section, r, c);
        seen.insert(idx);
        const auto pos = layout.locate(idx);
        CHECK(pos.section == section);
        CHECK(pos.row == r);
        CHECK(pos.col == c);
      }
    }
  }
  CHECK(seen.size() == 63);
  CHECK(*seen.rbegin() == 62);
}

TEST_CASE("flatten_index out of range names the section") {
  const auto& layout = SensorLayout::standard();
  try {
    layout.flatten_index(ArmSection::Lower, 0, 4);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(std::string(e.what()).find("lower") != std::string::npos);
  }
  CHECK_THROWS_AS(layout.flatten_index(ArmSection::Upper, 7, 0), BoundsError);
}

TEST_CASE("gesture names round trip") {
  for (auto g : kAllGestures) {
    auto parsed = parse_gesture(to_string(g));
    REQUIRE(parsed);
    CHECK(*parsed == g);
    CHECK(gesture_from_index(index_of(g)) == g);
  }
  CHECK_FALSE(parse_gesture("wave"));
}

TEST_CASE("rng is deterministic and shuffle is a permutation") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  Rng r(7);
  r.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}

namespace {

Dataset roster_dataset(std::size_t participants, std::size_t per_participant) {
  Dataset ds;
  for (std::size_t p = 0; p < participants; ++p) {
    for (auto g : kAllGestures) {
      for (std::size_t t = 0; t < per_participant; ++t) {
        auto rec = testing::recording_from({testing::filled(0), testing::filled(20)});
        rec.participant_id = "P" + std::to_string(p);
        rec.label = g;
        rec.trial_index = t;
        ds.recordings.push_back(rec);
      }
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("split_by_participant partitions the roster") {
  // 10 train participants x 15 trials and 6 test participants x 5 trials.
  Dataset ds;
  for (std::size_t p = 0; p < 16; ++p) {
    for (auto g : kAllGestures) {
      for (std::size_t t = 0; t < 15; ++t) {
        auto rec = testing::recording_from({testing::filled(20)});
        rec.participant_id = "P" + std::to_string(p);
        rec.label = g;
        rec.trial_index = t;
        ds.recordings.push_back(rec);
      }
    }
  }
  auto split = split_by_participant(ds, 10, 6, 3);
  // Keep five trials per test participant, as in the collected data.
  std::erase_if(split.recordings, [&](const GestureRecording& r) {
    return split.split_assignment.at(r.participant_id) == Split::Test &&
           r.trial_index >= 5;
  });
  const auto counts = split_counts(split);
  CHECK(counts.train_total() == 900);
  CHECK(counts.test_total() == 180);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    CHECK(counts.train[c] == 150);
    CHECK(counts.test[c] == 30);
  }
}

TEST_CASE("two participants land on opposite sides for any seed") {
  const auto ds = roster_dataset(2, 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto split = split_by_participant(ds, 1, 1, seed);
    CHECK(split.split_assignment.size() == 2);
    CHECK(split.split_assignment.at("P0") != split.split_assignment.at("P1"));
  }
}

TEST_CASE("participant split is deterministic and disjoint over 100 seeds") {
  const auto ds = roster_dataset(16, 1);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = split_by_participant(ds, 10, 6, seed);
    const auto b = split_by_participant(ds, 10, 6, seed);
    CHECK(a.split_assignment == b.split_assignment);
    std::set<std::string> train, test;
    for (const auto& r : a.recordings) {
      (a.split_assignment.at(r.participant_id) == Split::Train ? train : test)
          .insert(r.participant_id);
    }
    std::vector<std::string> both;
    std::set_intersection(train.begin(), train.end(), test.begin(), test.end(),
                          std::back_inserter(both));
    CHECK(both.empty());
    CHECK(train.size() == 10);
    CHECK(test.size() == 6);
  }
}

TEST_CASE("too few participants is a configuration error") {
  CHECK_THROWS_AS(split_by_participant(roster_dataset(3, 1), 2, 2, 0), ConfigError);
}

TEST_CASE("stratified split: 900 samples at 0.8 gives 720/180 with 120/30 per class") {
  std::vector<GestureClass> labels;
  for (auto g : kAllGestures) labels.insert(labels.end(), 150, g);
  Rng rng(5);
  rng.shuffle(labels);
  const auto s = stratified_split(labels, 0.8, 11);
  CHECK(s.first.size() == 720);
  CHECK(s.second.size() == 180);
  std::array<int, kNumClasses> first{}, second{};
  for (auto i : s.first) ++first[index_of(labels[i])];
  for (auto i : s.second) ++second[index_of(labels[i])];
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    CHECK(first[c] == 120);
    CHECK(second[c] == 30);
  }
  // Disjoint and covering: brute-force set comparison.
  std::set<std::size_t> all(s.first.begin(), s.first.end());
  for (auto i : s.second) CHECK(all.insert(i).second);
  CHECK(all.size() == labels.size());
  CHECK(std::is_sorted(s.first.begin(), s.first.end()));
  CHECK(std::is_sorted(s.second.begin(), s.second.end()));
  const auto again = stratified_split(labels, 0.8, 11);
  CHECK(again.first == s.first);
}

TEST_CASE("stratified split edge cases") {
  const std::vector<GestureClass> ten(10, GestureClass::Rub);
  const auto s = stratified_split(ten, 0.8, 0);
  CHECK(s.first.size() == 8);
  CHECK(s.second.size() == 2);
  const std::vector<GestureClass> lonely = {GestureClass::Hit, GestureClass::Hit,
                                            GestureClass::Tap};
  CHECK_THROWS_AS(stratified_split(lonely, 0.8, 0), StratificationError);
}

TEST_CASE("train_val_split keeps every recording exactly once") {
  const auto ds = roster_dataset(1, 10);
  const auto [train, val] = train_val_split(ds.recordings, 0.8, 4);
  CHECK(train.size() == 48);
  CHECK(val.size() == 12);
}

TEST_CASE("recording validation") {
  auto rec = testing::recording_from({testing::filled(0), testing::filled(5)});
  CHECK_NOTHROW(rec.validate());
  rec.frames[1].timestamp = rec.frames[0].timestamp;
  CHECK_THROWS_AS(rec.validate(), ConfigError);
  rec = testing::recording_from({testing::filled(1024)});
  CHECK_THROWS(rec.validate());
  GestureRecording empty;
  CHECK_THROWS(empty.validate());
}

TEST_CASE("dataset serialization round trip is exact") {
  Rng rng(9);
  Dataset ds;
  for (int i = 0; i < 12; ++i) {
    auto rec = testing::random_recording(rng, 3, 40);
    rec.participant_id = i % 2 ? "A" : "B";
    rec.label = gesture_from_index(static_cast<std::size_t>(i) % kNumClasses);
    rec.arm_section = i % 3 ? ArmSection::Upper : ArmSection::Lower;
    rec.trial_index = static_cast<std::size_t>(i);
    // Timestamps that are not exact in decimal.
    for (auto& f : rec.frames) f.timestamp = f.timestamp * 1.0000001 + 1e-7;
    ds.recordings.push_back(rec);
  }
  ds.recordings[3].label.reset();
  ds.split_assignment = {{"A", Split::Train}, {"B", Split::Test}};

  testing::TempDir dir("core_io");
  save_dataset(dir.path(), ds);
  const auto back = load_dataset(dir.path());
  CHECK(back == ds);

  std::stringstream ss;
  write_recordings(ss, ds.recordings);
  CHECK(read_recordings(ss) == ds.recordings);
}

TEST_CASE("malformed dataset input is rejected") {
  std::stringstream bad("{\"frames\": 3}\n");
  CHECK_THROWS_AS(read_recordings(bad), ConfigError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/tactile"), IoError);
}
