#include "tactile/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "tactile/errors.hpp"

namespace tactile {

using nlohmann::json;

json recording_to_json(const GestureRecording& rec) {
  json frames = json::array();
  for (const auto& f : rec.frames) {
    frames.push_back({{"timestamp", f.timestamp},
                      {"readings", json(std::vector<int>(f.readings.begin(),
                                                         f.readings.end()))}});
  }
  return {{"frames", std::move(frames)},
          {"label", rec.label ? json(std::string(to_string(*rec.label)))
                              : json(nullptr)},
          {"participant_id", rec.participant_id},
          {"arm_section", std::string(to_string(rec.arm_section))},
          {"trial_index", rec.trial_index},
          {"sample_rate_hz", rec.sample_rate_hz}};
}

GestureRecording recording_from_json(const json& j) {
  GestureRecording rec;
  try {
    for (const auto& jf : j.at("frames")) {
      TaxelFrame f;
      f.timestamp = jf.at("timestamp").get<double>();
      const auto& jr = jf.at("readings");
      if (jr.size() != kNumTaxels) {
        throw ConfigError("frame has " + std::to_string(jr.size()) +
                          " readings, expected 63");
      }
      for (std::size_t i = 0; i < kNumTaxels; ++i) {
        const int v = jr[i].get<int>();
        if (v < 0 || v > kMaxReading) {
          throw BoundsError("reading " + std::to_string(v) +
                            " outside [0, 1023]");
        }
        f.readings[i] = static_cast<Reading>(v);
      }
      rec.frames.push_back(f);
    }
    const auto& jl = j.at("label");
    if (!jl.is_null()) {
      auto g = parse_gesture(jl.get<std::string>());
      if (!g) throw ConfigError("unknown gesture label " + jl.dump());
      rec.label = *g;
    }
    rec.participant_id = j.at("participant_id").get<std::string>();
    auto s = parse_section(j.at("arm_section").get<std::string>());
    if (!s) throw ConfigError("unknown arm section");
    rec.arm_section = *s;
    rec.trial_index = j.at("trial_index").get<std::size_t>();
    rec.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed recording: ") + e.what());
  }
  rec.validate();
  return rec;
}

void write_recordings(std::ostream& out,
                      std::span<const GestureRecording> recordings) {
  for (const auto& rec : recordings) {
    out << recording_to_json(rec).dump() << '\n';
  }
}

std::vector<GestureRecording> read_recordings(std::istream& in) {
  std::vector<GestureRecording> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(recording_from_json(j));
  }
  return out;
}

json split_to_json(const SplitAssignment& split) {
  json participants = json::object();
  for (const auto& [id, side] : split) {
    participants[id] = std::string(to_string(side));
  }
  return {{"participants", std::move(participants)}};
}

SplitAssignment split_from_json(const json& j) {
  SplitAssignment out;
  try {
    for (const auto& [id, side] : j.at("participants").items()) {
      auto s = parse_split(side.get<std::string>());
      if (!s) throw ConfigError("participant '" + id + "' has unknown split");
      out.emplace(id, *s);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed split manifest: ") + e.what());
  }
  return out;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  std::ofstream rec_out(dir / kRecordingsFile, std::ios::binary);
  if (!rec_out) throw IoError("cannot write " + (dir / kRecordingsFile).string());
  write_recordings(rec_out, dataset.recordings);
  std::ofstream split_out(dir / kSplitFile, std::ios::binary);
  if (!split_out) throw IoError("cannot write " + (dir / kSplitFile).string());
  split_out << split_to_json(dataset.split_assignment).dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream rec_in(dir / kRecordingsFile, std::ios::binary);
  if (!rec_in) throw IoError("cannot read " + (dir / kRecordingsFile).string());
  Dataset ds;
  ds.recordings = read_recordings(rec_in);
  std::ifstream split_in(dir / kSplitFile, std::ios::binary);
  if (!split_in) throw IoError("cannot read " + (dir / kSplitFile).string());
  try {
    ds.split_assignment = split_from_json(json::parse(split_in));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed split manifest: ") + e.what());
  }
  ds.validate();
  return ds;
}

}  // namespace tactile
