#include "falldet/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "falldet/rng.hpp"

namespace falldet {
namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 random_unit(Rng& rng) {
  for (;;) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double norm = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (norm > 1e-6) return Vec3{v.x / norm, v.y / norm, v.z / norm};
  }
}

// Triangular bump of height h centered at c with half-width `half` samples.
double bump(double k, double c, double half, double h) {
  const double d = std::abs(k - c) / half;
  return d >= 1.0 ? 0.0 : h * (1.0 - d);
}

WindowRecord make_window(const SynthOptions& opt, Label label,
                         std::size_t index) {
  const std::size_t n = opt.window_len;
  const bool hard = opt.profile == SynthProfile::HARD;
  Rng rng(derive_seed(opt.seed, (label == Label::FALL ? (1ull << 32) : 0ull) +
                                    index));
  const Vec3 g = random_unit(rng);

  // Scalar motion profile s(k) riding on 1 g along the gravity axis.
  std::vector<double> s(n, 0.0);
  if (label == Label::ADL) {
    const double amp = hard ? rng.uniform(0.25, 2.2) : rng.uniform(0.25, 1.0);
    // Bin-aligned tones keep the separable spectrum leak-free.
    const double freq = hard ? rng.uniform(0.8, 3.2)
                             : static_cast<double>(1 + rng.below(4)) *
                                   opt.rate_hz / static_cast<double>(n);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / opt.rate_hz;
      s[k] = amp * std::sin(2.0 * std::numbers::pi * freq * t + phase);
    }
    if (hard && rng.unit() < 0.4) {  // impact-like bump (sitting down hard)
      const double h = rng.uniform(1.0, 2.6);
      const double half = 1.0 + rng.unit() * 2.0;
      const double c = rng.uniform(half, static_cast<double>(n) - 1.0 - half);
      for (std::size_t k = 0; k < n; ++k)
        s[k] += bump(static_cast<double>(k), c, half, h);
    }
  } else {
    const double wobble_amp = rng.uniform(0.02, 0.12);
    const double wobble_freq = rng.uniform(0.8, 3.2);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double h = hard ? rng.uniform(1.2, 2.8) : rng.uniform(1.5, 3.5);
    const double half = 1.0 + rng.unit() * 1.5;
    const double center =
        static_cast<double>(n) / 2.0 + rng.uniform(-3.0, 3.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / opt.rate_hz;
      s[k] = wobble_amp *
                 std::sin(2.0 * std::numbers::pi * wobble_freq * t + phase) +
             bump(static_cast<double>(k), center, half, h);
    }
  }

  WindowRecord w;
  char idbuf[48];
  std::snprintf(idbuf, sizeof(idbuf), "synth-%s-%06zu",
                label == Label::FALL ? "fall" : "adl", index + 1);
  w.id = idbuf;
  w.source = Source::SYNTH;
  w.label = label;
  w.rate_hz = opt.rate_hz;
  w.samples.reserve(n);
  const double sigma = 0.03;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = 1.0 + s[k];
    w.samples.push_back(Sample{g.x * m + sigma * rng.normal(),
                               g.y * m + sigma * rng.normal(),
                               g.z * m + sigma * rng.normal()});
  }
  return w;
}

}  // namespace

const char* to_string(SynthProfile p) {
  return p == SynthProfile::HARD ? "hard" : "separable";
}

SynthProfile synth_profile_from_string(const std::string& s) {
  if (s == "separable") return SynthProfile::SEPARABLE;
  if (s == "hard") return SynthProfile::HARD;
  raise_usage("BadProfile", "unknown synth profile '" + s + "'");
}

std::vector<WindowRecord> synth_windows(const SynthOptions& opt) {
  if (opt.window_len == 0)
    raise_usage("BadWindowLength", "window length must be positive");
  if (!(opt.rate_hz > 0.0))
    raise_usage("BadRate", "rate must be positive");
  std::vector<WindowRecord> out;
  out.reserve(opt.adl_count + opt.fall_count);
  for (std::size_t i = 0; i < opt.adl_count; ++i)
    out.push_back(make_window(opt, Label::ADL, i));
  for (std::size_t i = 0; i < opt.fall_count; ++i)
    out.push_back(make_window(opt, Label::FALL, i));
  return out;
}

}  // namespace falldet
