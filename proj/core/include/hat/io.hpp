#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hat/linalg.hpp"
#include "hat/records.hpp"
#include "hat/tracker.hpp"

namespace hat {

struct DetectionRow {
  FrameIndex frame = 0;
  std::int64_t id = -1;
  Box box;
  double confidence = 0.0;
  /// Zero-based position in the source file; features align on this.
  std::size_t source_index = 0;

  friend bool operator==(const DetectionRow&, const DetectionRow&) = default;
};

struct DetectionFile {
  /// Stable-sorted by frame.
  std::vector<DetectionRow> rows;
  /// Non-fatal notes, e.g. clamped confidences.
  std::vector<std::string> warnings;
};

/// Embedding vectors aligned one-to-one, in file order, with detection rows.
struct FeatureBank {
  std::size_t dim = 0;
  std::vector<FeatureVector> vectors;

  std::size_t count() const noexcept { return vectors.size(); }
  friend bool operator==(const FeatureBank&, const FeatureBank&) = default;
};

// MOT-style text -------------------------------------------------------------

/// "frame,id,left,top,width,height,conf[,...]" rows. Non-positive sizes and
/// malformed rows raise Parse with the 1-based line number; confidences
/// outside [0, 1] are clamped and reported in `warnings`.
DetectionFile parse_detections(std::string_view text);
DetectionFile read_detections(const std::filesystem::path& path);

std::string format_detections(std::span<const DetectionRow> rows);
void write_detections(std::span<const DetectionRow> rows, const std::filesystem::path& path);

/// Rows "frame,id,left,top,w,h,1,-1,-1,-1" sorted by (frame, id).
std::string format_tracks(std::span<const TrackRecord> records);
void write_tracks(std::span<const TrackRecord> records, const std::filesystem::path& path);

/// Ground truth or tracker output in MOT layout. A 7th column equal to 0
/// marks an ignored row and is skipped.
std::vector<TrackRecord> parse_gt(std::string_view text);
std::vector<TrackRecord> read_gt(const std::filesystem::path& path);

// Binary features --------------------------------------------------------------
//
// "HATF" magic, then little-endian u32 version (1), u32 dim, u64 count,
// followed by count * dim float32 values, row-major.

inline constexpr std::uint32_t kFeatureFormatVersion = 1;

FeatureBank decode_features(std::span<const std::byte> bytes);
std::vector<std::byte> encode_features(const FeatureBank& bank);
FeatureBank read_features(const std::filesystem::path& path);
void write_features(const FeatureBank& bank, const std::filesystem::path& path);

/// One comma-separated vector per line.
FeatureBank parse_features_csv(std::string_view text);
FeatureBank read_features_csv(const std::filesystem::path& path);

// Assembly ---------------------------------------------------------------------

/// Groups aligned detections and features into per-frame tracker inputs.
/// Throws Alignment when the counts differ.
std::vector<FrameInput> assemble_frames(const DetectionFile& dets, const FeatureBank& feats);

/// Whole-file helpers shared by the readers and the CLI.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest round-trip decimal form ("10", "0.95").
std::string format_number(double value);

}  // namespace hat
