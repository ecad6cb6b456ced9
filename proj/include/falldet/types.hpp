#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falldet/error.hpp"

namespace falldet {

enum class Source { TFALL, UCIHAR, SYNTH };
enum class Label { ADL, FALL };

const char* to_string(Source s);
const char* to_string(Label l);
Source source_from_string(const std::string& s);
Label label_from_string(const std::string& s);

struct Sample {
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
};

// One fixed-length, uniform-rate tri-axial acceleration window (units: g).
// `padded` marks windows whose edges were filled by repeating the boundary
// sample during peak-centered extraction.
struct WindowRecord {
  std::string id;
  Source source = Source::TFALL;
  Label label = Label::ADL;
  double rate_hz = 50.0;
  bool padded = false;
  std::vector<Sample> samples;

  std::size_t length() const { return samples.size(); }
};

// Validates finiteness, length and the "dataset2 contributes no falls" rule.
void validate_window(const WindowRecord& w);

struct TimedSample {
  double t = 0.0;  // seconds
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
};

// A variable-length recording as parsed from a source dataset file.
// Timestamps are strictly increasing; at least two samples.
struct RawRecording {
  std::string subject_id;
  std::string activity_tag;
  double nominal_rate_hz = 0.0;
  Source source = Source::TFALL;
  bool is_fall = false;
  std::vector<TimedSample> samples;

  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

enum class CollectionId { C1, C2, C3 };
enum class AdlSourcePolicy { ALL_D1, HALF_D1_HALF_D2, ALL_D2 };

const char* to_string(CollectionId id);
const char* to_string(AdlSourcePolicy p);
CollectionId collection_from_string(const std::string& s);

// Train/test counts for one collection. preset() builds the three standard
// configurations; validate() rejects anything else.
struct CollectionSpec {
  CollectionId id = CollectionId::C1;
  std::size_t adl_train = 0;
  std::size_t adl_test = 0;
  std::size_t fall_train = 0;
  std::size_t fall_test = 0;
  AdlSourcePolicy adl_policy = AdlSourcePolicy::ALL_D1;
  std::uint64_t seed = 0;

  static CollectionSpec preset(CollectionId id, std::uint64_t seed);
  void validate() const;
};

struct SplitDataset {
  std::vector<WindowRecord> train;
  std::vector<WindowRecord> test;
  CollectionSpec spec;
};

enum class Extractor { RAW, ENERGY, FOURIER, FOURIER_AXES };

const char* to_string(Extractor e);
Extractor extractor_from_string(const std::string& s);

struct FeatureVector {
  Extractor extractor = Extractor::RAW;
  int window_len = 0;
  std::vector<double> values;
};

struct LabeledFeature {
  std::string id;
  Label label = Label::ADL;
  std::vector<double> values;
};

}  // namespace falldet
