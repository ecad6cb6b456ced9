#include "falldet/metrics.hpp"

#include "falldet/error.hpp"

namespace falldet {

ConfusionCounts confusion(std::span<const Label> predictions,
                          std::span<const Label> truths) {
  if (predictions.size() != truths.size())
    raise_data("LengthMismatch",
               std::to_string(predictions.size()) + " predictions vs " +
                   std::to_string(truths.size()) + " truths");
  if (truths.empty()) raise_data("EmptyInput", "no instances to tally");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == Label::ADL) {
      ++c.np_adl;
      if (predictions[i] == Label::ADL) ++c.tp_adl;
    } else {
      ++c.np_fall;
      if (predictions[i] == Label::FALL) ++c.tp_fall;
    }
  }
  return c;
}

double standard_accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) raise_data("EmptyInput", "SA of empty counts");
  return static_cast<double>(c.tp_adl + c.tp_fall) /
         static_cast<double>(c.np_adl + c.np_fall);
}

double sensitivity(const ConfusionCounts& c) {
  if (c.np_fall == 0) raise_data("ClassAbsent", "SE with no FALL instances");
  return static_cast<double>(c.tp_fall) / static_cast<double>(c.np_fall);
}

double specificity(const ConfusionCounts& c) {
  if (c.np_adl == 0) raise_data("ClassAbsent", "SP with no ADL instances");
  return static_cast<double>(c.tp_adl) / static_cast<double>(c.np_adl);
}

double macro_average_accuracy(const ConfusionCounts& c) {
  if (c.np_adl == 0 || c.np_fall == 0)
    raise_data("ClassAbsent", "MAA needs every class present");
  return (sensitivity(c) + specificity(c)) / 2.0;
}

}  // namespace falldet
