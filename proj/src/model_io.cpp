#include "falldet/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "falldet/error.hpp"

namespace falldet {
namespace {

constexpr const char* kMagic = "# falldet-model v1";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) raise_data("CannotWrite", "cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  if (!out) raise_data("WriteFailed", "error while writing " + path);
}

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) raise_data("CannotRead", "cannot open " + path);
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    raise_data("BadModelFile",
               path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

// Header lines are `key=value` pairs separated by spaces.
std::string header_field(const std::string& line, const std::string& key,
                         const LineReader& rd) {
  std::istringstream ss(line);
  std::string tok;
  const std::string prefix = key + "=";
  while (ss >> tok)
    if (tok.rfind(prefix, 0) == 0) return tok.substr(prefix.size());
  rd.fail("missing field '" + key + "'");
}

double num_field(const std::string& line, const std::string& key,
                 const LineReader& rd) {
  const std::string s = header_field(line, key, rd);
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    rd.fail("bad number for '" + key + "': " + s);
  }
}

void write_rows(std::ofstream& out, const std::vector<LabeledFeature>& rows) {
  for (const LabeledFeature& r : rows) {
    out << "row " << r.id << ' ' << to_string(r.label);
    for (double v : r.values) out << ' ' << fmt(v);
    out << "\n";
  }
}

std::vector<LabeledFeature> read_rows(LineReader& rd, std::size_t count,
                                      std::size_t dim) {
  std::vector<LabeledFeature> rows;
  rows.reserve(count);
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!rd.next(line)) rd.fail("expected " + std::to_string(count) + " rows");
    std::istringstream ss(line);
    std::string tag, id, label;
    ss >> tag >> id >> label;
    if (tag != "row") rd.fail("expected 'row' record");
    LabeledFeature r;
    r.id = id;
    r.label = label_from_string(label);
    double v;
    while (ss >> v) r.values.push_back(v);
    if (r.values.size() != dim) rd.fail("row has wrong dimension");
    rows.push_back(std::move(r));
  }
  return rows;
}

KnnModel load_knn2(LineReader& rd, const std::string& header) {
  KnnModel m;
  m.k = static_cast<int>(num_field(header, "k", rd));
  m.metric = metric_from_string(header_field(header, "metric", rd));
  m.dim = static_cast<std::size_t>(num_field(header, "dim", rd));
  const auto count = static_cast<std::size_t>(num_field(header, "count", rd));
  m.train = read_rows(rd, count, m.dim);
  return m;
}

OneClassKnnModel load_knn1(LineReader& rd, const std::string& header) {
  OneClassKnnModel m;
  m.k = static_cast<int>(num_field(header, "k", rd));
  m.metric = metric_from_string(header_field(header, "metric", rd));
  m.theta = num_field(header, "theta", rd);
  m.rule = threshold_rule_from_string(header_field(header, "rule", rd));
  m.dim = static_cast<std::size_t>(num_field(header, "dim", rd));
  const auto count = static_cast<std::size_t>(num_field(header, "count", rd));
  m.train = read_rows(rd, count, m.dim);
  return m;
}

SvmModel load_svm(LineReader& rd, const std::string& header, SvmKind kind) {
  SvmModel m;
  m.kind = kind;
  const std::string ktype = header_field(header, "kernel", rd);
  if (ktype == "LINEAR") {
    m.kernel.type = KernelSpec::LINEAR;
  } else if (ktype == "RBF") {
    m.kernel.type = KernelSpec::RBF;
  } else {
    rd.fail("unknown kernel '" + ktype + "'");
  }
  m.kernel.gamma = num_field(header, "gamma", rd);
  m.c = num_field(header, "c", rd);
  m.nu = num_field(header, "nu", rd);
  m.bias = num_field(header, "bias", rd);
  m.dim = static_cast<std::size_t>(num_field(header, "dim", rd));
  const auto count = static_cast<std::size_t>(num_field(header, "count", rd));
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!rd.next(line)) rd.fail("expected " + std::to_string(count) + " SVs");
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "sv") rd.fail("expected 'sv' record");
    double coef;
    if (!(ss >> coef)) rd.fail("missing coefficient");
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.size() != m.dim) rd.fail("support vector has wrong dimension");
    m.coef.push_back(coef);
    m.sv.push_back(std::move(v));
  }
  return m;
}

}  // namespace

void save_model(const std::string& path, const KnnModel& m) {
  std::ofstream out = open_out(path);
  out << kMagic << " type=knn2\n";
  out << "k=" << m.k << " metric=" << to_string(m.metric) << " dim=" << m.dim
      << " count=" << m.train.size() << "\n";
  write_rows(out, m.train);
  finish(out, path);
}

void save_model(const std::string& path, const OneClassKnnModel& m) {
  std::ofstream out = open_out(path);
  out << kMagic << " type=knn1\n";
  out << "k=" << m.k << " metric=" << to_string(m.metric)
      << " theta=" << fmt(m.theta) << " rule=" << to_string(m.rule)
      << " dim=" << m.dim << " count=" << m.train.size() << "\n";
  write_rows(out, m.train);
  finish(out, path);
}

void save_model(const std::string& path, const SvmModel& m) {
  std::ofstream out = open_out(path);
  out << kMagic << " type=" << (m.kind == SvmKind::ONE_CLASS ? "svm1" : "svm2")
      << "\n";
  out << "kernel=" << (m.kernel.type == KernelSpec::LINEAR ? "LINEAR" : "RBF")
      << " gamma=" << fmt(m.kernel.gamma) << " c=" << fmt(m.c)
      << " nu=" << fmt(m.nu) << " bias=" << fmt(m.bias) << " dim=" << m.dim
      << " count=" << m.sv.size() << "\n";
  for (std::size_t i = 0; i < m.sv.size(); ++i) {
    out << "sv " << fmt(m.coef[i]);
    for (double v : m.sv[i]) out << ' ' << fmt(v);
    out << "\n";
  }
  finish(out, path);
}

AnyModel load_model(const std::string& path) {
  LineReader rd(path);
  std::string magic;
  if (!rd.next(magic) || magic.rfind(kMagic, 0) != 0)
    rd.fail(std::string("expected '") + kMagic + "'");
  const std::string type = header_field(magic, "type", rd);
  std::string header;
  if (!rd.next(header)) rd.fail("missing model header line");
  if (type == "knn2") return load_knn2(rd, header);
  if (type == "knn1") return load_knn1(rd, header);
  if (type == "svm2") return load_svm(rd, header, SvmKind::TWO_CLASS);
  if (type == "svm1") return load_svm(rd, header, SvmKind::ONE_CLASS);
  rd.fail("unknown model type '" + type + "'");
}

}  // namespace falldet
