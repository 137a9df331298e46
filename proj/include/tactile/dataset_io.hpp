#pragma once

// Line-delimited JSON storage for recordings plus a participant manifest.
//
// A dataset directory holds:
//   recordings.jsonl   one GestureRecording per line
//   split.json         {"participants": {"<id>": "train" | "test", ...}}

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tactile/core.hpp"

namespace tactile {

inline constexpr const char* kRecordingsFile = "recordings.jsonl";
inline constexpr const char* kSplitFile = "split.json";

nlohmann::json recording_to_json(const GestureRecording& rec);
GestureRecording recording_from_json(const nlohmann::json& j);

void write_recordings(std::ostream& out,
                      std::span<const GestureRecording> recordings);
std::vector<GestureRecording> read_recordings(std::istream& in);

nlohmann::json split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(const nlohmann::json& j);

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace tactile
