#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

struct TfallParse {
  std::vector<RawRecording> recordings;
  std::size_t warnings = 0;  // skipped lines + skipped degenerate files
};

// Walks a tFall-style archive: per-subject plain-text files, one
// comma-separated `t,ax,ay,az` record per line, ADL and fall files in
// separate subtrees (any relative path component containing "fall",
// case-insensitive, marks the fall subtree). Lines that fail to parse, carry
// non-finite values, or step backwards in time are skipped and counted; a
// file whose bad-line ratio exceeds `tolerance` raises MalformedLine.
TfallParse parse_tfall(const std::string& archive_root,
                       double tolerance = 0.01);

// Reads the UCI-HAR-style total-acceleration files (total_acc_{x,y,z}_*.txt,
// 128 whitespace-separated values per row, units g) plus the adjacent row
// label file y_*.txt. Every row becomes one 128-sample ADL window at 50 Hz.
std::vector<WindowRecord> parse_ucihar(const std::string& dataset_root);

// Resamples `rec` to target_rate_hz by linear interpolation and cuts exactly
// one n-sample window centered on the acceleration-magnitude peak (earliest
// index on ties). Out-of-range edges repeat the boundary sample and set the
// padded flag.
WindowRecord window_from_recording(const RawRecording& rec, std::size_t n,
                                   double target_rate_hz);

// Batch form: recordings shorter than the window are skipped and counted.
std::vector<WindowRecord> window_all(std::span<const RawRecording> recs,
                                     std::size_t n, double target_rate_hz,
                                     std::size_t* skipped = nullptr);

// Re-cuts existing windows to a different length/rate (e.g. 128 -> 51) by
// treating each as a uniform recording.
std::vector<WindowRecord> rewindow_all(std::span<const WindowRecord> windows,
                                       std::size_t n, double target_rate_hz);

// Deterministically assembles a train/test split from the two window pools:
// sampling is without replacement, seeded, and independent of pool input
// order (pools are sorted by id first). Pool2 must be fall-free.
SplitDataset build_collection(std::span<const WindowRecord> pool1,
                              std::span<const WindowRecord> pool2,
                              const CollectionSpec& spec);

}  // namespace falldet
