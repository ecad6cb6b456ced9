#pragma once

#include <cstddef>
#include <span>

#include "falldet/types.hpp"

namespace falldet {

// Per-class tallies for one evaluation pass. FALL is the positive class:
// TP = tp_fall, Positives = np_fall, TN = tp_adl, Negatives = np_adl.
struct ConfusionCounts {
  std::size_t np_adl = 0;   // occurrences of ADL
  std::size_t tp_adl = 0;   // ADL recognized as ADL
  std::size_t np_fall = 0;  // occurrences of FALL
  std::size_t tp_fall = 0;  // FALL recognized as FALL

  std::size_t total() const { return np_adl + np_fall; }
};

ConfusionCounts confusion(std::span<const Label> predictions,
                          std::span<const Label> truths);

// SA = (sum_a TP_a) / (sum_a NP_a)
double standard_accuracy(const ConfusionCounts& c);

// MAA = mean of the per-class accuracies TP_a / NP_a. Computed as the mean
// of the same two quotients sensitivity() and specificity() return, so
// MAA == (SE + SP) / 2 holds bit-for-bit.
double macro_average_accuracy(const ConfusionCounts& c);

// SE = TP / Positives (fall recall)
double sensitivity(const ConfusionCounts& c);

// SP = TN / Negatives (ADL recall)
double specificity(const ConfusionCounts& c);

}  // namespace falldet
