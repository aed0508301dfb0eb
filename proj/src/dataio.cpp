#include "boostmetric/dataio.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "boostmetric/errors.hpp"
#include "boostmetric/rng.hpp"

namespace boostmetric {

namespace {

constexpr double kRadialJitter = 0.05;

std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delimiter) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_finite(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

bool parse_index(const std::string& s, int* out) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  *out = std::atoi(s.c_str());
  return true;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 char delimiter) {
  std::vector<std::string> lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw DataError("empty file: " + path);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  const std::size_t arity = split_line(lines[0], delimiter).size();
  if (arity < 2) throw DataError(path + ": rows need at least one feature and a label");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty())
      throw DataError(path + ": row " + std::to_string(i + 1) + " is empty");
    rows.push_back(split_line(lines[i], delimiter));
    if (rows.back().size() != arity)
      throw DataError(path + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows.back().size()) + " fields, expected " +
                      std::to_string(arity));
  }

  int label_idx = -1;
  bool label_by_name = false;
  if (!parse_index(label_column, &label_idx)) {
    label_by_name = true;
    for (std::size_t c = 0; c < arity; ++c)
      if (rows[0][c] == label_column) label_idx = static_cast<int>(c);
    if (label_idx < 0)
      throw DataError(path + ": label column '" + label_column + "' not found in header");
  }
  if (label_idx < 0 || label_idx >= static_cast<int>(arity))
    throw DataError(path + ": label column index " + std::to_string(label_idx) +
                    " out of range for " + std::to_string(arity) + " columns");

  // first row is a header when any feature field is non-numeric
  bool has_header = label_by_name;
  if (!has_header) {
    double tmp;
    for (std::size_t c = 0; c < arity; ++c)
      if (static_cast<int>(c) != label_idx && !parse_finite(rows[0][c], &tmp))
        has_header = true;
  }

  Dataset ds;
  ds.dim = static_cast<int>(arity) - 1;
  if (has_header)
    for (std::size_t c = 0; c < arity; ++c)
      if (static_cast<int>(c) != label_idx) ds.feature_names.push_back(rows[0][c]);

  std::vector<double> coords(ds.dim);
  for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
    int f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (static_cast<int>(c) == label_idx) continue;
      if (!parse_finite(rows[r][c], &coords[f]))
        throw DataError(path + ": row " + std::to_string(r + 1) + ", column " +
                        std::to_string(c + 1) + ": not a finite number: '" + rows[r][c] +
                        "'");
      f++;
    }
    ds.add_point(coords.data(), ds.add_label(rows[r][label_idx]));
  }
  if (ds.size() == 0) throw DataError(path + ": no data rows");
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path, char delimiter) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open file for writing: " + path);
  if (!ds.feature_names.empty()) {
    for (const std::string& n : ds.feature_names) os << n << delimiter;
    os << "label\n";
  }
  for (int i = 0; i < ds.size(); ++i) {
    const double* p = ds.point(i);
    for (int c = 0; c < ds.dim; ++c) os << full_precision(p[c]) << delimiter;
    os << ds.label(i) << '\n';
  }
  if (!os.good()) throw DataError("failed writing file: " + path);
}

Dataset make_concentric_circles(int n_per_class, int n_classes, int noise_dims,
                                double noise_sigma, std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("make_concentric_circles: n_per_class < 1");
  if (n_classes < 2) throw std::invalid_argument("make_concentric_circles: need >= 2 classes");
  if (noise_dims < 0) throw std::invalid_argument("make_concentric_circles: noise_dims < 0");
  if (noise_sigma < 0.0) throw std::invalid_argument("make_concentric_circles: noise_sigma < 0");

  Rng rng(substream_seed(seed, "concentric-circles"));
  Dataset ds;
  ds.dim = 2 + noise_dims;
  std::vector<double> p(ds.dim);
  for (int c = 0; c < n_classes; ++c) {
    const int label = ds.add_label(std::to_string(c));
    const double radius = static_cast<double>(c + 1);
    for (int i = 0; i < n_per_class; ++i) {
      const double angle = rng.uniform(0.0, 6.283185307179586476925287);
      const double r = radius + rng.normal(0.0, kRadialJitter);
      p[0] = r * std::cos(angle);
      p[1] = r * std::sin(angle);
      for (int d = 0; d < noise_dims; ++d) p[2 + d] = rng.normal(0.0, noise_sigma);
      ds.add_point(p.data(), label);
    }
  }
  return ds;
}

namespace {

constexpr const char* kModelMagic = "boostmetric-model";
constexpr int kModelVersion = 1;

}  // namespace

void save_model(const MetricModel& model, const std::string& path) {
  model.validate();
  std::ostringstream body;
  body << kModelMagic << ' ' << kModelVersion << '\n';
  body << "dim " << model.dim << '\n';
  body << "loss " << loss_name(model.loss) << '\n';
  body << "variant " << variant_name(model.meta.variant) << '\n';
  body << "passes " << model.meta.passes << '\n';
  body << "v " << full_precision(model.meta.v) << '\n';
  body << "max_iterations " << model.meta.max_iterations << '\n';
  body << "seed " << model.meta.seed << '\n';
  body << "iterations " << model.meta.iterations << '\n';
  body << "converged " << (model.meta.converged ? 1 : 0) << '\n';
  body << "weight_capped " << (model.meta.weight_capped ? 1 : 0) << '\n';
  body << "bases " << model.basis_count() << '\n';
  for (int j = 0; j < model.basis_count(); ++j) {
    body << "w " << full_precision(model.weights[j]);
    for (double x : model.bases[j]) body << ' ' << full_precision(x);
    body << '\n';
  }
  const std::string text = body.str();
  char sum[32];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));

  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open model file for writing: " + path);
  os << text << "checksum fnv1a64 " << sum << '\n';
  if (!os.good()) throw DataError("failed writing model file: " + path);
}

MetricModel load_model(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) throw DataError(path + ": not a model file");

  // verify the trailing checksum over everything before it
  {
    std::istringstream last(lines.back());
    std::string tag, algo, hex;
    if (!(last >> tag >> algo >> hex) || tag != "checksum" || algo != "fnv1a64")
      throw DataError(path + ": missing checksum line");
    std::string text;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) text += lines[i] + '\n';
    char sum[32];
    std::snprintf(sum, sizeof(sum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    if (hex != sum) throw DataError(path + ": checksum mismatch, file corrupted");
  }

  std::size_t at = 0;
  auto next = [&]() -> std::istringstream {
    if (at + 1 >= lines.size()) throw DataError(path + ": truncated model file");
    return std::istringstream(lines[at++]);
  };
  auto expect_field = [&](const char* key) -> std::istringstream {
    std::istringstream is = next();
    std::string k;
    is >> k;
    if (k != key) throw DataError(path + ": expected field '" + key + "', found '" + k + "'");
    return is;
  };

  {
    std::istringstream is = next();
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != kModelMagic) throw DataError(path + ": not a model file");
    if (version != kModelVersion)
      throw DataError(path + ": unsupported model format version " +
                      std::to_string(version));
  }

  MetricModel model;
  std::string word;
  expect_field("dim") >> model.dim;
  expect_field("loss") >> word;
  model.loss = loss_from_name(word);
  model.meta.loss = model.loss;
  expect_field("variant") >> word;
  model.meta.variant = variant_from_name(word);
  expect_field("passes") >> model.meta.passes;
  expect_field("v") >> model.meta.v;
  expect_field("max_iterations") >> model.meta.max_iterations;
  expect_field("seed") >> model.meta.seed;
  expect_field("iterations") >> model.meta.iterations;
  int flag = 0;
  expect_field("converged") >> flag;
  model.meta.converged = flag != 0;
  expect_field("weight_capped") >> flag;
  model.meta.weight_capped = flag != 0;
  int count = -1;
  expect_field("bases") >> count;
  if (count < 0 || model.dim < 1) throw DataError(path + ": malformed model header");

  for (int j = 0; j < count; ++j) {
    std::istringstream is = expect_field("w");
    double w = 0.0;
    if (!(is >> w)) throw DataError(path + ": malformed basis line");
    std::vector<double> v(model.dim);
    for (int c = 0; c < model.dim; ++c)
      if (!(is >> v[c])) throw DataError(path + ": basis line has too few components");
    model.weights.push_back(w);
    model.bases.push_back(std::move(v));
  }

  model.rebuild_dense();
  try {
    model.validate();
  } catch (const NumericError& e) {
    throw DataError(path + ": model invariants violated on load: " + e.what());
  }
  return model;
}

}  // namespace boostmetric
