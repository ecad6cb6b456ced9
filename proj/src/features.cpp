#include "falldet/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "falldet/error.hpp"
#include "falldet/fft.hpp"

namespace falldet {

namespace {

// Spectrum magnitudes, bins 1..floor(N/2), optional division by |coef 0|.
std::vector<double> spectrum_bins(std::span<const double> series,
                                  bool normalize) {
  const auto spec = dft(series);
  const std::size_t n = series.size();
  const std::size_t half = n / 2;
  std::vector<double> out(half);
  for (std::size_t k = 1; k <= half; ++k) out[k - 1] = std::abs(spec[k]);
  if (normalize) {
    double dc = std::abs(spec[0]);
    if (dc < 1e-12) dc = static_cast<double>(n);
    for (double& v : out) v /= dc;
  }
  return out;
}

}  // namespace

MagnitudeSeries magnitude(const WindowRecord& window) {
  validate_window(window);
  MagnitudeSeries out;
  out.rate_hz = window.rate_hz;
  out.values.reserve(window.samples.size());
  for (const Sample& s : window.samples)
    out.values.push_back(std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az));
  return out;
}

FeatureVector fourier_features(const WindowRecord& window, bool normalize) {
  const MagnitudeSeries mag = magnitude(window);
  FeatureVector fv;
  fv.extractor = Extractor::FOURIER;
  fv.window_len = static_cast<int>(window.length());
  fv.values = spectrum_bins(mag.values, normalize);
  return fv;
}

FeatureVector fourier_features_per_axis(const WindowRecord& window,
                                        bool normalize) {
  validate_window(window);
  const std::size_t n = window.length();
  std::vector<double> axis(n);
  FeatureVector fv;
  fv.extractor = Extractor::FOURIER_AXES;
  fv.window_len = static_cast<int>(n);
  fv.values.reserve(3 * (n / 2));
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      const Sample& s = window.samples[i];
      axis[i] = a == 0 ? s.ax : (a == 1 ? s.ay : s.az);
    }
    const auto bins = spectrum_bins(axis, normalize);
    fv.values.insert(fv.values.end(), bins.begin(), bins.end());
  }
  return fv;
}

FeatureVector raw_features(const WindowRecord& window) {
  const MagnitudeSeries mag = magnitude(window);
  FeatureVector fv;
  fv.extractor = Extractor::RAW;
  fv.window_len = static_cast<int>(window.length());
  fv.values = mag.values;
  return fv;
}

FeatureVector energy_features(const WindowRecord& window) {
  validate_window(window);
  double ex = 0.0, ey = 0.0, ez = 0.0;
  for (const Sample& s : window.samples) {
    ex += s.ax * s.ax;
    ey += s.ay * s.ay;
    ez += s.az * s.az;
  }
  FeatureVector fv;
  fv.extractor = Extractor::ENERGY;
  fv.window_len = static_cast<int>(window.length());
  fv.values = {ex, ey, ez, ex + ey + ez};
  return fv;
}

FeatureVector extract(const WindowRecord& window, const FeatureOptions& opt) {
  switch (opt.extractor) {
    case Extractor::RAW: return raw_features(window);
    case Extractor::ENERGY: return energy_features(window);
    case Extractor::FOURIER: return fourier_features(window, opt.normalize);
    case Extractor::FOURIER_AXES:
      return fourier_features_per_axis(window, opt.normalize);
  }
  raise_usage("BadExtractor", "unhandled extractor");
}

std::vector<LabeledFeature> extract_batch(std::span<const WindowRecord> windows,
                                          const FeatureOptions& opt) {
  std::vector<LabeledFeature> out(windows.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(windows.size()); ++i) {
    const WindowRecord& w = windows[i];
    out[i].id = w.id;
    out[i].label = w.label;
    out[i].values = extract(w, opt).values;
  }
  return out;
}

void write_feature_matrix(const std::string& path,
                          std::span<const LabeledFeature> features,
                          Extractor extractor, int window_len) {
  std::ofstream out(path);
  if (!out) raise_data("FileWrite", "cannot open '" + path + "' for writing");
  out << "# falldet-features v1 extractor=" << to_string(extractor)
      << " n=" << window_len << " count=" << features.size() << "\n";
  char buf[32];
  for (const LabeledFeature& f : features) {
    out << f.id << '\t' << to_string(f.label);
    for (double v : f.values) {
      std::snprintf(buf, sizeof buf, "%.10g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

}  // namespace falldet
