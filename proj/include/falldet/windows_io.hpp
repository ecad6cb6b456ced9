#pragma once

#include <span>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

// Canonical interchange format: a header line `# falldet-windows v1`, then
// one self-describing record per window:
//   id=... source=... label=... rate_hz=... padded=0|1 n=... samples=ax:ay:az;...
void write_windows_file(const std::string& path,
                        std::span<const WindowRecord> windows);

std::vector<WindowRecord> read_windows_file(const std::string& path);

// Human-auditable record of how a split was assembled: counts, policy,
// seed, and the exact window ids per stratum.
void write_collection_manifest(const std::string& path,
                               const SplitDataset& split);

}  // namespace falldet
