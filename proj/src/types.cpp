#include "falldet/types.hpp"

#include <cmath>

namespace falldet {

const char* to_string(Source s) {
  switch (s) {
    case Source::TFALL: return "TFALL";
    case Source::UCIHAR: return "UCIHAR";
    case Source::SYNTH: return "SYNTH";
  }
  return "?";
}

const char* to_string(Label l) {
  return l == Label::ADL ? "ADL" : "FALL";
}

Source source_from_string(const std::string& s) {
  if (s == "TFALL") return Source::TFALL;
  if (s == "UCIHAR") return Source::UCIHAR;
  if (s == "SYNTH") return Source::SYNTH;
  raise_data("BadSource", "unknown source '" + s + "'");
}

Label label_from_string(const std::string& s) {
  if (s == "ADL") return Label::ADL;
  if (s == "FALL") return Label::FALL;
  raise_data("BadLabel", "unknown label '" + s + "'");
}

void validate_window(const WindowRecord& w) {
  if (w.samples.empty())
    raise_data("EmptyWindow", "window '" + w.id + "' has no samples");
  if (!(w.rate_hz > 0.0))
    raise_data("BadRate", "window '" + w.id + "' has non-positive rate");
  for (const Sample& s : w.samples) {
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az))
      raise_data("NonFiniteValue", "window '" + w.id + "' has a non-finite sample");
  }
  if (w.label == Label::FALL && w.source == Source::UCIHAR)
    raise_data("BadLabel", "window '" + w.id + "': dataset2 contributes no falls");
}

const char* to_string(CollectionId id) {
  switch (id) {
    case CollectionId::C1: return "C1";
    case CollectionId::C2: return "C2";
    case CollectionId::C3: return "C3";
  }
  return "?";
}

const char* to_string(AdlSourcePolicy p) {
  switch (p) {
    case AdlSourcePolicy::ALL_D1: return "ALL_D1";
    case AdlSourcePolicy::HALF_D1_HALF_D2: return "HALF_D1_HALF_D2";
    case AdlSourcePolicy::ALL_D2: return "ALL_D2";
  }
  return "?";
}

CollectionId collection_from_string(const std::string& s) {
  if (s == "C1" || s == "1") return CollectionId::C1;
  if (s == "C2" || s == "2") return CollectionId::C2;
  if (s == "C3" || s == "3") return CollectionId::C3;
  raise_usage("BadCollection", "unknown collection '" + s + "'");
}

CollectionSpec CollectionSpec::preset(CollectionId id, std::uint64_t seed) {
  CollectionSpec spec;
  spec.id = id;
  spec.seed = seed;
  spec.fall_train = 453;
  spec.fall_test = 50;
  switch (id) {
    case CollectionId::C1:
      spec.adl_train = 7035;
      spec.adl_test = 781;
      spec.adl_policy = AdlSourcePolicy::ALL_D1;
      break;
    case CollectionId::C2:
      spec.adl_train = 7035;
      spec.adl_test = 781;
      spec.adl_policy = AdlSourcePolicy::HALF_D1_HALF_D2;
      break;
    case CollectionId::C3:
      spec.adl_train = 9270;
      spec.adl_test = 1029;
      spec.adl_policy = AdlSourcePolicy::ALL_D2;
      break;
  }
  return spec;
}

void CollectionSpec::validate() const {
  const CollectionSpec ref = preset(id, seed);
  if (adl_train != ref.adl_train || adl_test != ref.adl_test ||
      fall_train != ref.fall_train || fall_test != ref.fall_test ||
      adl_policy != ref.adl_policy) {
    raise_data("BadCollectionSpec",
               std::string("counts do not match the standard ") +
                   to_string(id) + " configuration");
  }
}

const char* to_string(Extractor e) {
  switch (e) {
    case Extractor::RAW: return "RAW";
    case Extractor::ENERGY: return "ENERGY";
    case Extractor::FOURIER: return "FOURIER";
    case Extractor::FOURIER_AXES: return "FOURIER_AXES";
  }
  return "?";
}

Extractor extractor_from_string(const std::string& s) {
  if (s == "RAW" || s == "raw") return Extractor::RAW;
  if (s == "ENERGY" || s == "energy") return Extractor::ENERGY;
  if (s == "FOURIER" || s == "fourier") return Extractor::FOURIER;
  if (s == "FOURIER_AXES" || s == "fourier-axes" || s == "fourier_axes")
    return Extractor::FOURIER_AXES;
  raise_usage("BadExtractor", "unknown feature extractor '" + s + "'");
}

}  // namespace falldet
