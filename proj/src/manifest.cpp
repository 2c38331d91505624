#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pvrc/data.hpp"

namespace pvrc::data {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, int line,
                       const std::string& msg) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int to_int(const std::string& s, const std::filesystem::path& path, int line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(path, line, "expected integer, got '" + s + "'");
  return v;
}

}  // namespace

DatasetManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open manifest");

  DatasetManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path()
                                      : std::filesystem::path(".");
  bool saw_kind = false;
  ManifestClass* current = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (key == "name") {
      if (toks.size() != 2) fail(path, lineno, "name takes one token");
      m.name = toks[1];
    } else if (key == "kind") {
      if (toks.size() != 2) fail(path, lineno, "kind takes one token");
      if (toks[1] == "image_dir") m.kind = DatasetManifest::Kind::image_dir;
      else if (toks[1] == "csv") m.kind = DatasetManifest::Kind::csv;
      else fail(path, lineno, "kind must be image_dir or csv");
      saw_kind = true;
    } else if (key == "width") {
      m.preprocess.target_width = to_int(toks.at(1), path, lineno);
    } else if (key == "height") {
      m.preprocess.target_height = to_int(toks.at(1), path, lineno);
    } else if (key == "color") {
      if (toks.size() != 2) fail(path, lineno, "color takes one token");
      if (toks[1] == "gray") m.preprocess.mode = ColorMode::gray;
      else if (toks[1] == "rgb_concat") m.preprocess.mode = ColorMode::rgb_concat;
      else fail(path, lineno, "color must be gray or rgb_concat");
    } else if (key == "crop") {
      if (toks.size() != 5) fail(path, lineno, "crop takes x y w h");
      CropRect r;
      r.x = to_int(toks[1], path, lineno);
      r.y = to_int(toks[2], path, lineno);
      r.width = to_int(toks[3], path, lineno);
      r.height = to_int(toks[4], path, lineno);
      m.preprocess.crop = r;
    } else if (key == "csv") {
      if (toks.size() != 2) fail(path, lineno, "csv takes one path");
      m.csv_file = toks[1];
    } else if (key == "class") {
      const int id = to_int(toks.at(1), path, lineno);
      for (const auto& c : m.classes)
        if (c.class_id == id)
          fail(path, lineno, "duplicate class id " + std::to_string(id));
      m.classes.push_back({id, {}});
      current = &m.classes.back();
    } else if (key == "file") {
      if (toks.size() != 2) fail(path, lineno, "file takes one path");
      if (!current) fail(path, lineno, "file before any class declaration");
      current->files.push_back(toks[1]);
    } else {
      fail(path, lineno, "unknown directive '" + key + "'");
    }
  }

  if (!saw_kind) fail(path, 0, "missing kind");
  if (m.kind == DatasetManifest::Kind::csv) {
    if (m.csv_file.empty()) fail(path, 0, "csv manifest missing csv path");
  } else {
    if (m.preprocess.target_width <= 0 || m.preprocess.target_height <= 0)
      fail(path, 0, "image_dir manifest needs positive width and height");
    if (m.classes.empty()) fail(path, 0, "image_dir manifest has no classes");
    for (const auto& c : m.classes)
      if (c.files.empty())
        fail(path, 0, "class " + std::to_string(c.class_id) + " has no files");
  }
  return m;
}

std::vector<Sample> load_samples(const DatasetManifest& manifest) {
  std::vector<Sample> samples;
  if (manifest.kind == DatasetManifest::Kind::csv) {
    samples = load_csv(manifest.base_dir / manifest.csv_file);
  } else {
    for (const auto& cls : manifest.classes) {
      for (const auto& file : cls.files) {
        const auto full = manifest.base_dir / file;
        const Image raw = load_image(full);
        const Image ready = preprocess(raw, manifest.preprocess);
        Sample s;
        s.class_id = cls.class_id;
        s.features = vectorize(ready, manifest.preprocess.mode);
        s.source_id = full.string();
        samples.push_back(std::move(s));
      }
    }
  }
  // Manifest order within a class, classes ascending.
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return a.class_id < b.class_id;
                   });
  if (!samples.empty()) {
    const Eigen::Index q = samples.front().features.size();
    for (const auto& s : samples)
      if (s.features.size() != q)
        throw std::runtime_error("inconsistent feature dimension in sample " +
                                 s.source_id);
  }
  return samples;
}

std::vector<Sample> load_manifest(const std::filesystem::path& path) {
  return load_samples(parse_manifest(path));
}

std::vector<Sample> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open CSV");
  std::vector<Sample> samples;
  std::string line;
  int lineno = 0;
  Eigen::Index q = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < 2) fail(path, lineno, "row needs class_id plus features");

    char* endp = nullptr;
    const long cid = std::strtol(fields[0].c_str(), &endp, 10);
    if (endp == fields[0].c_str() || *endp != '\0') {
      if (lineno == 1) continue;  // header row
      fail(path, lineno, "non-numeric class id '" + fields[0] + "'");
    }

    Sample s;
    s.class_id = static_cast<int>(cid);
    s.features.resize(static_cast<Eigen::Index>(fields.size()) - 1);
    for (size_t i = 1; i < fields.size(); ++i) {
      const double v = std::strtod(fields[i].c_str(), &endp);
      if (endp == fields[i].c_str() || !std::isfinite(v))
        fail(path, lineno, "bad feature value '" + fields[i] + "'");
      s.features(static_cast<Eigen::Index>(i) - 1) = v;
    }
    if (q < 0) q = s.features.size();
    else if (s.features.size() != q)
      fail(path, lineno, "inconsistent feature count");
    s.source_id = path.string() + ":" + std::to_string(lineno);
    samples.push_back(std::move(s));
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return a.class_id < b.class_id;
                   });
  return samples;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for write");
  out.precision(17);
  for (const auto& s : samples) {
    out << s.class_id;
    for (Eigen::Index i = 0; i < s.features.size(); ++i)
      out << ',' << s.features(i);
    out << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace pvrc::data
