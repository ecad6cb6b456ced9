#include "falldet/windows_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "falldet/error.hpp"

namespace falldet {
namespace {

constexpr const char* kHeader = "# falldet-windows v1";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Splits "key=value" and returns value or raises.
std::string field(const std::string& tok, const char* key,
                  const std::string& path, std::size_t line_no) {
  const std::string prefix = std::string(key) + "=";
  if (tok.rfind(prefix, 0) != 0) {
    raise_data("BadRecord", path + ":" + std::to_string(line_no) +
                                ": expected " + prefix + "..., got '" + tok +
                                "'");
  }
  return tok.substr(prefix.size());
}

double parse_num(const std::string& s, const std::string& path,
                 std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise_data("BadNumber", path + ":" + std::to_string(line_no) +
                                ": cannot parse '" + s + "'");
  }
}

}  // namespace

void write_windows_file(const std::string& path,
                        std::span<const WindowRecord> windows) {
  std::ofstream out(path);
  if (!out) raise_data("CannotWrite", "cannot open " + path + " for writing");
  out << kHeader << "\n";
  out << "# count=" << windows.size() << "\n";
  for (const WindowRecord& w : windows) {
    out << "id=" << w.id << " source=" << to_string(w.source)
        << " label=" << to_string(w.label)
        << " rate_hz=" << fmt_double(w.rate_hz)
        << " padded=" << (w.padded ? 1 : 0) << " n=" << w.samples.size()
        << " samples=";
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      if (i) out << ';';
      out << fmt_double(w.samples[i].ax) << ':' << fmt_double(w.samples[i].ay)
          << ':' << fmt_double(w.samples[i].az);
    }
    out << "\n";
  }
  if (!out) raise_data("WriteFailed", "error while writing " + path);
}

std::vector<WindowRecord> read_windows_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise_data("CannotRead", "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) raise_data("EmptyFile", path + " is empty");
  ++line_no;
  if (line != kHeader) {
    raise_data("BadHeader", path + ": expected '" + kHeader + "'");
  }
  std::vector<WindowRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tok;
    WindowRecord w;
    ss >> tok;
    w.id = field(tok, "id", path, line_no);
    ss >> tok;
    w.source = source_from_string(field(tok, "source", path, line_no));
    ss >> tok;
    w.label = label_from_string(field(tok, "label", path, line_no));
    ss >> tok;
    w.rate_hz = parse_num(field(tok, "rate_hz", path, line_no), path, line_no);
    ss >> tok;
    w.padded = field(tok, "padded", path, line_no) == "1";
    ss >> tok;
    const std::size_t n = static_cast<std::size_t>(
        parse_num(field(tok, "n", path, line_no), path, line_no));
    ss >> tok;
    std::string payload = field(tok, "samples", path, line_no);
    if (!ss.eof() && ss >> tok) {
      raise_data("BadRecord", path + ":" + std::to_string(line_no) +
                                  ": trailing tokens after samples");
    }
    w.samples.reserve(n);
    std::istringstream ps(payload);
    std::string triple;
    while (std::getline(ps, triple, ';')) {
      std::size_t a = triple.find(':');
      std::size_t b = triple.find(':', a == std::string::npos ? 0 : a + 1);
      if (a == std::string::npos || b == std::string::npos) {
        raise_data("BadSample", path + ":" + std::to_string(line_no) +
                                    ": malformed triple '" + triple + "'");
      }
      Sample s;
      s.ax = parse_num(triple.substr(0, a), path, line_no);
      s.ay = parse_num(triple.substr(a + 1, b - a - 1), path, line_no);
      s.az = parse_num(triple.substr(b + 1), path, line_no);
      w.samples.push_back(s);
    }
    if (w.samples.size() != n) {
      raise_data("SampleCountMismatch",
                 path + ":" + std::to_string(line_no) + ": n=" +
                     std::to_string(n) + " but found " +
                     std::to_string(w.samples.size()) + " samples");
    }
    validate_window(w);
    out.push_back(std::move(w));
  }
  return out;
}

void write_collection_manifest(const std::string& path,
                               const SplitDataset& split) {
  std::ofstream out(path);
  if (!out) raise_data("CannotWrite", "cannot open " + path + " for writing");
  const CollectionSpec& s = split.spec;
  out << "# falldet-collection v1\n";
  out << "collection=" << to_string(s.id) << " seed=" << s.seed
      << " policy=" << to_string(s.adl_policy) << " adl_train=" << s.adl_train
      << " adl_test=" << s.adl_test << " fall_train=" << s.fall_train
      << " fall_test=" << s.fall_test << "\n";
  auto dump = [&](const char* part, const std::vector<WindowRecord>& ws) {
    for (const WindowRecord& w : ws)
      out << part << ' ' << to_string(w.label) << ' ' << w.id << "\n";
  };
  dump("train", split.train);
  dump("test", split.test);
  if (!out) raise_data("WriteFailed", "error while writing " + path);
}

}  // namespace falldet
