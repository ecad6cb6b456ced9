#pragma once

#include <span>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

struct MagnitudeSeries {
  std::vector<double> values;  // per-sample |a|, all >= 0
  double rate_hz = 0.0;
};

// values[i] = sqrt(ax^2 + ay^2 + az^2); rotation-invariant by construction.
MagnitudeSeries magnitude(const WindowRecord& window);

// |DFT(magnitude)| bins 1..floor(N/2); the DC bin is dropped. With
// normalize=true every entry is divided by |coef 0| (by N when |coef 0|
// is below 1e-12). The experiment default is normalize=false.
FeatureVector fourier_features(const WindowRecord& window, bool normalize = false);

// Ablation variant: the same spectrum-magnitude bins computed per axis and
// concatenated (x, y, z), 3*floor(N/2) values. Not rotation-invariant.
FeatureVector fourier_features_per_axis(const WindowRecord& window,
                                        bool normalize = false);

// The magnitude series itself (time-domain baseline), length N.
FeatureVector raw_features(const WindowRecord& window);

// [sum ax^2, sum ay^2, sum az^2, sum |a|^2] over the window.
FeatureVector energy_features(const WindowRecord& window);

struct FeatureOptions {
  Extractor extractor = Extractor::FOURIER;
  bool normalize = false;
};

FeatureVector extract(const WindowRecord& window, const FeatureOptions& opt);

// Extracts one LabeledFeature per window; parallel over windows.
std::vector<LabeledFeature> extract_batch(std::span<const WindowRecord> windows,
                                          const FeatureOptions& opt);

// Columnar text dump: header line with extractor/N, one vector per line.
void write_feature_matrix(const std::string& path,
                          std::span<const LabeledFeature> features,
                          Extractor extractor, int window_len);

}  // namespace falldet
