#include "falldet/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "falldet/rng.hpp"

namespace fs = std::filesystem;

namespace falldet {
namespace {

bool iequals_contains(const std::string& hay, const char* needle) {
  std::string lower;
  lower.reserve(hay.size());
  for (char c : hay) lower.push_back(static_cast<char>(std::tolower(c)));
  return lower.find(needle) != std::string::npos;
}

bool parse_csv_sample(const std::string& line, TimedSample& out) {
  double v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t next = line.find(',', pos);
    std::string tok = line.substr(pos, next == std::string::npos
                                           ? std::string::npos
                                           : next - pos);
    try {
      std::size_t used = 0;
      v[i] = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
    if (!std::isfinite(v[i])) return false;
    if (i < 3) {
      if (next == std::string::npos) return false;
      pos = next + 1;
    } else if (next != std::string::npos) {
      return false;  // extra columns
    }
  }
  out = TimedSample{v[0], v[1], v[2], v[3]};
  return true;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::string sanitize_tag(fs::path rel) {
  rel.replace_extension();
  std::string tag = rel.generic_string();
  std::replace(tag.begin(), tag.end(), '/', '_');
  return tag;
}

std::vector<std::vector<double>> read_axis_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise_data("MissingFile", "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    row.reserve(128);
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof()) {
      raise_data("BadRow", path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric token");
    }
    if (row.size() != 128) {
      raise_data("BadRow", path.string() + ":" + std::to_string(line_no) +
                               ": expected 128 values, got " +
                               std::to_string(row.size()));
    }
    for (double x : row) {
      if (!std::isfinite(x)) {
        raise_data("NonFiniteValue",
                   path.string() + ":" + std::to_string(line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t count_label_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise_data("MissingFile", "cannot open " + path.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!is_blank(line)) ++n;
  return n;
}

// Seeded order-independent draw: sort ids, shuffle once, deal from the front.
std::vector<const WindowRecord*> shuffled_pool(
    std::vector<const WindowRecord*> pool, std::uint64_t seed) {
  std::sort(pool.begin(), pool.end(),
            [](const WindowRecord* a, const WindowRecord* b) {
              return a->id < b->id;
            });
  Rng rng(seed);
  rng.shuffle(pool);
  return pool;
}

void take(std::vector<const WindowRecord*>& pool, std::size_t count,
          const char* stratum, std::vector<WindowRecord>& out) {
  if (pool.size() < count) {
    raise_data("InsufficientPool",
               std::string(stratum) + ": need " + std::to_string(count) +
                   " windows, pool has " + std::to_string(pool.size()));
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back(*pool[i]);
  pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
}

}  // namespace

TfallParse parse_tfall(const std::string& archive_root, double tolerance) {
  if (!(tolerance >= 0.0 && tolerance <= 1.0))
    raise_usage("BadTolerance", "tolerance must lie in [0,1]");
  fs::path root(archive_root);
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    raise_data("MissingDirectory", archive_root + " is not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".txt" || ext == ".csv" || ext == ".dat")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  TfallParse result;
  for (const fs::path& file : files) {
    const fs::path rel = fs::relative(file, root);
    bool is_fall = false;
    for (const fs::path& part : rel)
      if (iequals_contains(part.string(), "fall")) is_fall = true;

    std::ifstream in(file);
    if (!in) raise_data("MissingFile", "cannot open " + file.string());
    RawRecording rec;
    rec.subject_id = rel.begin() != rel.end() && std::next(rel.begin()) != rel.end()
                         ? rel.begin()->string()
                         : "unknown";
    rec.activity_tag = sanitize_tag(rel);
    rec.source = Source::TFALL;
    rec.is_fall = is_fall;

    std::size_t total = 0;
    std::size_t bad = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (is_blank(line)) continue;
      ++total;
      TimedSample s;
      if (!parse_csv_sample(line, s) ||
          (!rec.samples.empty() && s.t <= rec.samples.back().t)) {
        ++bad;
        continue;
      }
      rec.samples.push_back(s);
    }
    if (total > 0 &&
        static_cast<double>(bad) > tolerance * static_cast<double>(total)) {
      raise_data("MalformedLine",
                 file.string() + ": " + std::to_string(bad) + " of " +
                     std::to_string(total) + " lines unusable");
    }
    result.warnings += bad;
    if (rec.samples.size() < 2) {
      ++result.warnings;  // degenerate file, skip whole recording
      continue;
    }
    rec.nominal_rate_hz =
        static_cast<double>(rec.samples.size() - 1) / rec.duration();
    result.recordings.push_back(std::move(rec));
  }
  if (result.recordings.empty())
    raise_data("EmptyDataset", "no recordings parsed under " + archive_root);
  return result;
}

std::vector<WindowRecord> parse_ucihar(const std::string& dataset_root) {
  fs::path root(dataset_root);
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    raise_data("MissingDirectory", dataset_root + " is not a directory");

  std::vector<fs::path> x_files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("total_acc_x_", 0) == 0 &&
        entry.path().extension() == ".txt")
      x_files.push_back(entry.path());
  }
  if (x_files.empty()) {
    raise_data("MissingFile",
               "no total_acc_x_*.txt found under " + dataset_root);
  }
  std::sort(x_files.begin(), x_files.end());

  std::vector<WindowRecord> out;
  for (const fs::path& xf : x_files) {
    const std::string xname = xf.filename().string();
    // total_acc_x_<tag>.txt -> tag names the split (train/test).
    const std::string tag =
        xname.substr(std::string("total_acc_x_").size(),
                     xname.size() - std::string("total_acc_x_").size() - 4);
    const fs::path yf = xf.parent_path() / ("total_acc_y_" + tag + ".txt");
    const fs::path zf = xf.parent_path() / ("total_acc_z_" + tag + ".txt");
    if (!fs::is_regular_file(yf, ec))
      raise_data("MissingFile", yf.string() + " not found");
    if (!fs::is_regular_file(zf, ec))
      raise_data("MissingFile", zf.string() + " not found");

    const auto ax = read_axis_rows(xf);
    const auto ay = read_axis_rows(yf);
    const auto az = read_axis_rows(zf);
    if (ax.size() != ay.size() || ax.size() != az.size()) {
      raise_data("RowCountMismatch",
                 xf.parent_path().string() + ": axis files disagree (" +
                     std::to_string(ax.size()) + "/" +
                     std::to_string(ay.size()) + "/" +
                     std::to_string(az.size()) + " rows)");
    }
    // The row label file lives beside the Inertial Signals directory.
    const fs::path labels = xf.parent_path().parent_path() / ("y_" + tag + ".txt");
    if (!fs::is_regular_file(labels, ec))
      raise_data("MissingFile", labels.string() + " not found");
    if (count_label_rows(labels) != ax.size()) {
      raise_data("RowCountMismatch", labels.string() +
                                         ": label rows do not match " +
                                         std::to_string(ax.size()));
    }

    for (std::size_t r = 0; r < ax.size(); ++r) {
      WindowRecord w;
      char idbuf[64];
      std::snprintf(idbuf, sizeof(idbuf), "ucihar-%s-%05zu", tag.c_str(),
                    r + 1);
      w.id = idbuf;
      w.source = Source::UCIHAR;
      w.label = Label::ADL;
      w.rate_hz = 50.0;
      w.padded = false;
      w.samples.reserve(128);
      for (std::size_t k = 0; k < 128; ++k)
        w.samples.push_back(Sample{ax[r][k], ay[r][k], az[r][k]});
      out.push_back(std::move(w));
    }
  }
  return out;
}

WindowRecord window_from_recording(const RawRecording& rec, std::size_t n,
                                   double target_rate_hz) {
  if (n == 0) raise_usage("BadWindowLength", "window length must be positive");
  if (!(target_rate_hz > 0.0))
    raise_usage("BadRate", "target rate must be positive");
  if (rec.samples.size() < 2) {
    raise_data("RecordingTooShort",
               rec.activity_tag + ": fewer than 2 samples");
  }
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    if (!(rec.samples[i].t > rec.samples[i - 1].t))
      raise_data("BadRecording",
                 rec.activity_tag + ": timestamps not strictly increasing");
  }
  const double duration = rec.duration();
  const double needed = static_cast<double>(n) / target_rate_hz;
  if (duration < needed) {
    raise_data("RecordingTooShort",
               rec.activity_tag + ": spans " + std::to_string(duration) +
                   " s, window needs " + std::to_string(needed) + " s");
  }

  // Uniform resample by linear interpolation.
  const double t0 = rec.samples.front().t;
  const std::size_t m =
      static_cast<std::size_t>(std::floor(duration * target_rate_hz)) + 1;
  std::vector<Sample> resampled(m);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = t0 + static_cast<double>(k) / target_rate_hz;
    while (seg + 2 < rec.samples.size() && rec.samples[seg + 1].t < t) ++seg;
    const TimedSample& a = rec.samples[seg];
    const TimedSample& b = rec.samples[seg + 1];
    const double u = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
    resampled[k] = Sample{a.ax + u * (b.ax - a.ax), a.ay + u * (b.ay - a.ay),
                          a.az + u * (b.az - a.az)};
  }

  // Earliest magnitude peak.
  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Sample& s = resampled[k];
    const double mag =
        std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az);
    if (mag > best) {
      best = mag;
      peak = k;
    }
  }

  WindowRecord w;
  w.id = rec.subject_id + ":" + rec.activity_tag;
  w.source = rec.source;
  w.label = rec.is_fall ? Label::FALL : Label::ADL;
  w.rate_hz = target_rate_hz;
  w.samples.reserve(n);
  const std::ptrdiff_t start =
      static_cast<std::ptrdiff_t>(peak) - static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    std::ptrdiff_t j = start + static_cast<std::ptrdiff_t>(i);
    if (j < 0) {
      j = 0;
      w.padded = true;
    } else if (j >= static_cast<std::ptrdiff_t>(m)) {
      j = static_cast<std::ptrdiff_t>(m) - 1;
      w.padded = true;
    }
    w.samples.push_back(resampled[static_cast<std::size_t>(j)]);
  }
  validate_window(w);
  return w;
}

std::vector<WindowRecord> window_all(std::span<const RawRecording> recs,
                                     std::size_t n, double target_rate_hz,
                                     std::size_t* skipped) {
  std::vector<WindowRecord> out;
  out.reserve(recs.size());
  std::size_t dropped = 0;
  for (const RawRecording& rec : recs) {
    if (rec.samples.size() >= 2 &&
        rec.duration() < static_cast<double>(n) / target_rate_hz) {
      ++dropped;
      continue;
    }
    out.push_back(window_from_recording(rec, n, target_rate_hz));
  }
  if (skipped) *skipped = dropped;
  return out;
}

std::vector<WindowRecord> rewindow_all(std::span<const WindowRecord> windows,
                                       std::size_t n, double target_rate_hz) {
  std::vector<WindowRecord> out;
  out.reserve(windows.size());
  for (const WindowRecord& w : windows) {
    RawRecording rec;
    rec.subject_id = "rewin";
    rec.activity_tag = w.id;
    rec.nominal_rate_hz = w.rate_hz;
    rec.source = w.source;
    rec.is_fall = w.label == Label::FALL;
    rec.samples.reserve(w.samples.size());
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
      rec.samples.push_back(TimedSample{static_cast<double>(k) / w.rate_hz,
                                        w.samples[k].ax, w.samples[k].ay,
                                        w.samples[k].az});
    }
    WindowRecord cut = window_from_recording(rec, n, target_rate_hz);
    cut.id = w.id;  // keep the original identity
    cut.padded = cut.padded || w.padded;
    out.push_back(std::move(cut));
  }
  return out;
}

SplitDataset build_collection(std::span<const WindowRecord> pool1,
                              std::span<const WindowRecord> pool2,
                              const CollectionSpec& spec) {
  spec.validate();

  std::set<std::string> ids;
  std::size_t window_len = 0;
  auto scan = [&](std::span<const WindowRecord> pool, bool allow_fall) {
    for (const WindowRecord& w : pool) {
      validate_window(w);
      if (!allow_fall && w.label == Label::FALL)
        raise_data("BadPool", "pool2 must be fall-free, got '" + w.id + "'");
      if (!ids.insert(w.id).second)
        raise_data("DuplicateId", "window id '" + w.id + "' repeats");
      if (window_len == 0) window_len = w.length();
      if (w.length() != window_len) {
        raise_data("LengthMismatch",
                   "window '" + w.id + "' has length " +
                       std::to_string(w.length()) + ", expected " +
                       std::to_string(window_len));
      }
    }
  };
  scan(pool1, true);
  scan(pool2, false);

  std::vector<const WindowRecord*> adl1, adl2, fall1;
  for (const WindowRecord& w : pool1)
    (w.label == Label::FALL ? fall1 : adl1).push_back(&w);
  for (const WindowRecord& w : pool2) adl2.push_back(&w);

  adl1 = shuffled_pool(std::move(adl1), derive_seed(spec.seed, 11));
  adl2 = shuffled_pool(std::move(adl2), derive_seed(spec.seed, 12));
  fall1 = shuffled_pool(std::move(fall1), derive_seed(spec.seed, 21));

  // ADL counts per source; odd halves favor dataset1.
  std::size_t d1_train = 0, d1_test = 0, d2_train = 0, d2_test = 0;
  switch (spec.adl_policy) {
    case AdlSourcePolicy::ALL_D1:
      d1_train = spec.adl_train;
      d1_test = spec.adl_test;
      break;
    case AdlSourcePolicy::ALL_D2:
      d2_train = spec.adl_train;
      d2_test = spec.adl_test;
      break;
    case AdlSourcePolicy::HALF_D1_HALF_D2:
      d1_train = (spec.adl_train + 1) / 2;
      d2_train = spec.adl_train / 2;
      d1_test = (spec.adl_test + 1) / 2;
      d2_test = spec.adl_test / 2;
      break;
  }

  SplitDataset split;
  split.spec = spec;
  take(adl1, d1_train, "ADL train (dataset1)", split.train);
  take(adl2, d2_train, "ADL train (dataset2)", split.train);
  take(fall1, spec.fall_train, "FALL train (dataset1)", split.train);
  take(adl1, d1_test, "ADL test (dataset1)", split.test);
  take(adl2, d2_test, "ADL test (dataset2)", split.test);
  take(fall1, spec.fall_test, "FALL test (dataset1)", split.test);
  return split;
}

}  // namespace falldet
