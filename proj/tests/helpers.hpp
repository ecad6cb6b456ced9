#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "falldet/error.hpp"
#include "falldet/rng.hpp"
#include "falldet/types.hpp"

namespace testutil {

using falldet::Label;
using falldet::Rng;
using falldet::Sample;
using falldet::Source;
using falldet::WindowRecord;

inline WindowRecord random_window(Rng& rng, std::size_t n,
                                  Label label = Label::ADL) {
  static int counter = 0;
  WindowRecord w;
  w.id = "t" + std::to_string(counter++);
  w.source = Source::SYNTH;
  w.label = label;
  w.rate_hz = 50.0;
  w.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples.push_back(Sample{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                               rng.uniform(-2.0, 2.0)});
  return w;
}

// Rotation matrix from a random unit quaternion.
inline std::array<std::array<double, 3>, 3> random_rotation(Rng& rng) {
  double q[4];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& c : q) {
      c = rng.normal();
      norm += c * c;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& c : q) c /= norm;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x),
            1 - 2 * (x * x + y * y)}}};
}

inline WindowRecord rotated(const WindowRecord& w, Rng& rng) {
  const auto r = random_rotation(rng);
  WindowRecord out = w;
  for (Sample& s : out.samples) {
    const double ax = s.ax, ay = s.ay, az = s.az;
    s.ax = r[0][0] * ax + r[0][1] * ay + r[0][2] * az;
    s.ay = r[1][0] * ax + r[1][1] * ay + r[1][2] * az;
    s.az = r[2][0] * ax + r[2][1] * ay + r[2][2] * az;
  }
  return out;
}

inline WindowRecord circular_shift(const WindowRecord& w, std::size_t by) {
  WindowRecord out = w;
  const std::size_t n = w.samples.size();
  for (std::size_t i = 0; i < n; ++i) out.samples[(i + by) % n] = w.samples[i];
  return out;
}

inline WindowRecord reversed(const WindowRecord& w) {
  WindowRecord out = w;
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    out.samples[i] = w.samples[w.samples.size() - 1 - i];
  return out;
}

inline WindowRecord scaled(const WindowRecord& w, double c) {
  WindowRecord out = w;
  for (Sample& s : out.samples) {
    s.ax *= c;
    s.ay *= c;
    s.az *= c;
  }
  return out;
}

// Runs fn and returns the falldet error code it throws ("" if none).
template <class Fn>
std::string error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const falldet::Error& e) {
    return e.code();
  }
  return "";
}

template <class Fn>
bool raises_kind(Fn&& fn, falldet::ErrorKind kind) {
  try {
    fn();
  } catch (const falldet::Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// Scratch directory removed on scope exit.
class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("falldet-test-" + std::to_string(rd()) + "-" +
             std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path_.string() : (path_ / name).string();
  }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  return all;
}

}  // namespace testutil
