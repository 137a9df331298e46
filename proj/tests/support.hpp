#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "tactile/core.hpp"
#include "tactile/random.hpp"

namespace testing {

inline tactile::GestureRecording recording_from(
    const std::vector<tactile::Readings>& frames, double rate = 50.0) {
  tactile::GestureRecording rec;
  rec.participant_id = "T";
  rec.sample_rate_hz = rate;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    rec.frames.push_back({static_cast<double>(i) / rate, frames[i]});
  }
  return rec;
}

inline tactile::Readings filled(tactile::Reading value) {
  tactile::Readings r{};
  r.fill(value);
  return r;
}

// Sparse random frames: most taxels idle, a few anywhere in the ADC range,
// some right at the activation boundary.
inline tactile::GestureRecording random_recording(tactile::Rng& rng,
                                                  std::size_t min_frames,
                                                  std::size_t max_frames) {
  const std::size_t n = min_frames + rng.index(max_frames - min_frames + 1);
  std::vector<tactile::Readings> frames(n);
  for (auto& f : frames) {
    for (auto& r : f) {
      const double u = rng.uniform();
      if (u < 0.6) {
        r = static_cast<tactile::Reading>(rng.index(8));
      } else if (u < 0.7) {
        r = static_cast<tactile::Reading>(9 + rng.index(4));  // 9..12
      } else {
        r = static_cast<tactile::Reading>(rng.index(1024));
      }
    }
  }
  // Guarantee contact somewhere.
  frames[rng.index(n)][rng.index(tactile::kNumTaxels)] = 500;
  return recording_from(frames);
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("tactile_test_" + name + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
