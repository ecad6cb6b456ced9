#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

enum class SynthProfile { SEPARABLE, HARD };

const char* to_string(SynthProfile p);
SynthProfile synth_profile_from_string(const std::string& s);

struct SynthOptions {
  std::size_t adl_count = 100;
  std::size_t fall_count = 100;
  std::size_t window_len = 51;
  double rate_hz = 50.0;
  std::uint64_t seed = 1;
  SynthProfile profile = SynthProfile::SEPARABLE;
};

// Deterministic generator for benchmark/CI data. SEPARABLE produces
// bin-aligned periodic ADL motion versus short broadband fall impacts whose
// per-window energies overlap the ADL range; HARD blurs the two classes
// (off-bin tones, vigorous ADL with impact-like bumps, weak falls).
// Window k depends only on (seed, label, k), not on the other counts.
std::vector<WindowRecord> synth_windows(const SynthOptions& opt);

}  // namespace falldet
