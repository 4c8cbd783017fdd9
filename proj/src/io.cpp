#include "hopc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hopc/errors.hpp"

namespace hopc {

namespace {

// This code targets little-endian hosts; the on-disk formats are defined as
// little-endian, so plain byte copies are correct here.
template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is)
    throw DataError(std::string("truncated payload while reading ") + what);
  return v;
}

void check_magic(std::istream& is, const char expect[4], const char* kind) {
  char m[4];
  is.read(m, 4);
  if (!is) throw DataError(std::string("malformed header: ") + kind);
  if (std::memcmp(m, expect, 3) != 0)
    throw DataError(std::string("malformed header: not a ") + kind + " file");
  if (m[3] != expect[3])
    throw DataError(std::string("version mismatch: ") + kind +
                    " format revision " + m[3] + " is not supported");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  return is;
}

void expect_eof(std::istream& is, const std::string& path) {
  is.peek();
  if (!is.eof())
    throw DataError("trailing bytes after payload in " + path);
}

}  // namespace

Frame depth_to_cloud(const std::vector<std::uint16_t>& depth, int width,
                     int height, const CameraIntrinsics& intr,
                     std::int32_t frame_index) {
  if (width <= 0 || height <= 0 ||
      depth.size() != static_cast<std::size_t>(width) * height)
    throw DataError("depth_to_cloud: dimension mismatch");
  if (intr.fx <= 0 || intr.fy <= 0 || intr.depth_scale <= 0)
    throw ConfigError("depth_to_cloud: invalid intrinsics");
  Frame fr;
  fr.index = frame_index;
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u) {
      const std::uint16_t raw = depth[static_cast<std::size_t>(v) * width + u];
      if (raw == 0) continue;
      const double z = raw * intr.depth_scale;
      fr.points.push_back({(u - intr.cx) * z / intr.fx,
                           (v - intr.cy) * z / intr.fy, z});
    }
  return fr;
}

void save_sequence(const CloudSequence& seq, const std::string& path) {
  auto os = open_out(path);
  os.write("HPC1", 4);
  const bool tagged = seq.subject_id >= 0 || seq.action_label >= 0;
  put<std::uint32_t>(os, tagged ? 1u : 0u);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(seq.frames.size()));
  put<double>(os, seq.frame_rate);
  if (tagged) {
    put<std::int32_t>(os, seq.subject_id);
    put<std::int32_t>(os, seq.action_label);
  }
  for (const Frame& fr : seq.frames) {
    put<std::int32_t>(os, fr.index);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(fr.points.size()));
    for (const Vec3& p : fr.points) {
      put<double>(os, p.x);
      put<double>(os, p.y);
      put<double>(os, p.z);
    }
  }
  if (!os) throw DataError("write failed: " + path);
}

CloudSequence load_sequence(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "HPC1", "sequence");
  const auto flags = get<std::uint32_t>(is, "flags");
  if (flags > 1) throw DataError("malformed header: unknown flag bits");
  const auto n_f = get<std::uint32_t>(is, "frame count");
  CloudSequence seq;
  seq.frame_rate = get<double>(is, "frame rate");
  if (!(seq.frame_rate > 0) || !std::isfinite(seq.frame_rate))
    throw DataError("malformed header: frame rate must be positive");
  if (flags & 1u) {
    seq.subject_id = get<std::int32_t>(is, "subject id");
    seq.action_label = get<std::int32_t>(is, "action label");
  }
  seq.frames.resize(n_f);
  for (std::uint32_t f = 0; f < n_f; ++f) {
    Frame& fr = seq.frames[f];
    fr.index = get<std::int32_t>(is, "frame index");
    if (fr.index != static_cast<std::int32_t>(f) + 1)
      throw DataError("malformed header: frame indices must run 1..n_f");
    const auto cnt = get<std::uint32_t>(is, "point count");
    fr.points.resize(cnt);
    for (auto& p : fr.points) {
      p.x = get<double>(is, "point data");
      p.y = get<double>(is, "point data");
      p.z = get<double>(is, "point data");
    }
  }
  expect_eof(is, path);
  return seq;
}

std::vector<std::uint16_t> load_pgm16(const std::string& path, int& width,
                                      int& height) {
  auto is = open_in(path);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw DataError("not a binary PGM (P5): " + path);
  auto next_int = [&]() {
    // skip whitespace and '#' comment lines
    for (;;) {
      const int c = is.peek();
      if (c == '#') {
        std::string line;
        std::getline(is, line);
      } else if (std::isspace(c)) {
        is.get();
      } else {
        break;
      }
    }
    long v;
    if (!(is >> v)) throw DataError("malformed PGM header: " + path);
    return v;
  };
  width = static_cast<int>(next_int());
  height = static_cast<int>(next_int());
  const long maxval = next_int();
  if (width <= 0 || height <= 0 || maxval <= 255 || maxval > 65535)
    throw DataError("PGM must be 16-bit with positive dimensions: " + path);
  is.get();  // single whitespace after maxval
  std::vector<std::uint16_t> out(static_cast<std::size_t>(width) * height);
  std::vector<unsigned char> raw(out.size() * 2);
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!is) throw DataError("truncated payload in PGM: " + path);
  for (std::size_t i = 0; i < out.size(); ++i)  // PGM samples are big-endian
    out[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  return out;
}

CloudSequence load_depth_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);
  const std::string sidecar = dir + "/intrinsics.txt";
  Config cfg = Config::from_file(sidecar);
  CameraIntrinsics intr;
  intr.fx = cfg.get_double("fx", 0);
  intr.fy = cfg.get_double("fy", 0);
  intr.cx = cfg.get_double("cx", 0);
  intr.cy = cfg.get_double("cy", 0);
  intr.depth_scale = cfg.get_double("depth_scale", 0);
  const double rate = cfg.get_double("frame_rate", 30.0);
  cfg.finish();
  if (intr.fx <= 0 || intr.fy <= 0 || intr.depth_scale <= 0)
    throw ConfigError("intrinsics sidecar must set fx, fy, depth_scale > 0");

  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".pgm") files.push_back(e.path().string());
  }
  if (files.empty()) throw DataError("no .pgm frames in " + dir);
  std::sort(files.begin(), files.end());

  CloudSequence seq;
  seq.frame_rate = rate;
  std::int32_t idx = 1;
  for (const auto& f : files) {
    int w, h;
    const auto depth = load_pgm16(f, w, h);
    seq.frames.push_back(depth_to_cloud(depth, w, h, intr, idx++));
  }
  return seq;
}

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.kv_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    cfg.kv_[key] = val;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) {
  seen_.insert(key);
  const auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key, double dflt) {
  seen_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    std::size_t pos;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: " +
                      it->second);
  }
}

int Config::get_int(const std::string& key, int dflt) {
  seen_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    std::size_t pos;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer: " +
                      it->second);
  }
}

bool Config::get_bool(const std::string& key, bool dflt) {
  seen_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
}

void Config::finish() const {
  for (const auto& [key, val] : kv_) {
    if (!seen_.count(key))
      throw ConfigError("config: unknown key '" + key + "'");
  }
}

void save_descriptors(const DataMatrix& m, const std::string& path) {
  auto os = open_out(path);
  os.write("HDSC", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.dim));
  os.write(reinterpret_cast<const char*>(m.v.data()),
           static_cast<std::streamsize>(m.v.size() * sizeof(double)));
  if (!os) throw DataError("write failed: " + path);
}

DataMatrix load_descriptors(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "HDSC", "descriptor");
  const auto ver = get<std::uint32_t>(is, "version");
  if (ver != 1) throw DataError("version mismatch: descriptor file v" +
                                std::to_string(ver));
  DataMatrix m;
  m.n = get<std::uint32_t>(is, "row count");
  m.dim = get<std::uint32_t>(is, "dimension");
  m.v.resize(m.n * m.dim);
  is.read(reinterpret_cast<char*>(m.v.data()),
          static_cast<std::streamsize>(m.v.size() * sizeof(double)));
  if (!is) throw DataError("truncated payload in " + path);
  expect_eof(is, path);
  return m;
}

void save_codebook(const Codebook& cb, const std::string& path) {
  auto os = open_out(path);
  os.write("HCBK", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(cb.k));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(cb.dim));
  os.write(reinterpret_cast<const char*>(cb.centers.data()),
           static_cast<std::streamsize>(cb.centers.size() * sizeof(double)));
  if (!os) throw DataError("write failed: " + path);
}

Codebook load_codebook(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "HCBK", "codebook");
  const auto ver = get<std::uint32_t>(is, "version");
  if (ver != 1)
    throw DataError("version mismatch: codebook file v" + std::to_string(ver));
  Codebook cb;
  cb.k = get<std::uint32_t>(is, "k");
  cb.dim = get<std::uint32_t>(is, "dimension");
  cb.centers.resize(cb.k * cb.dim);
  is.read(reinterpret_cast<char*>(cb.centers.data()),
          static_cast<std::streamsize>(cb.centers.size() * sizeof(double)));
  if (!is) throw DataError("truncated payload in " + path);
  expect_eof(is, path);
  return cb;
}

void save_model(const ClassifierModel& m, const std::string& path) {
  auto os = open_out(path);
  os.write("HSVM", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.n_classes));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.train.n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.dim));
  put<double>(os, m.C);
  for (int l : m.labels) put<std::int32_t>(os, l);
  os.write(reinterpret_cast<const char*>(m.train.v.data()),
           static_cast<std::streamsize>(m.train.v.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(m.coef.data()),
           static_cast<std::streamsize>(m.coef.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(m.bias.data()),
           static_cast<std::streamsize>(m.bias.size() * sizeof(double)));
  if (!os) throw DataError("write failed: " + path);
}

ClassifierModel load_model(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "HSVM", "classifier");
  const auto ver = get<std::uint32_t>(is, "version");
  if (ver != 1) throw DataError("version mismatch: classifier file v" +
                                std::to_string(ver));
  ClassifierModel m;
  m.n_classes = static_cast<int>(get<std::uint32_t>(is, "class count"));
  const auto n = get<std::uint32_t>(is, "row count");
  m.dim = get<std::uint32_t>(is, "dimension");
  m.C = get<double>(is, "C");
  m.labels.resize(n);
  for (auto& l : m.labels) l = get<std::int32_t>(is, "labels");
  m.train.n = n;
  m.train.dim = m.dim;
  m.train.v.resize(static_cast<std::size_t>(n) * m.dim);
  is.read(reinterpret_cast<char*>(m.train.v.data()),
          static_cast<std::streamsize>(m.train.v.size() * sizeof(double)));
  m.coef.resize(static_cast<std::size_t>(m.n_classes) * n);
  is.read(reinterpret_cast<char*>(m.coef.data()),
          static_cast<std::streamsize>(m.coef.size() * sizeof(double)));
  m.bias.resize(m.n_classes);
  is.read(reinterpret_cast<char*>(m.bias.data()),
          static_cast<std::streamsize>(m.bias.size() * sizeof(double)));
  if (!is) throw DataError("truncated payload in " + path);
  expect_eof(is, path);
  return m;
}

void save_keypoints(const std::vector<Keypoint>& kps, const DataMatrix& descs,
                    const std::string& path) {
  if (descs.n != kps.size())
    throw DataError("save_keypoints: descriptor rows must match keypoints");
  auto os = open_out(path);
  os.write("HKPT", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(kps.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(descs.dim));
  for (std::size_t i = 0; i < kps.size(); ++i) {
    const Keypoint& k = kps[i];
    put<std::int32_t>(os, k.t);
    put<double>(os, k.p.x);
    put<double>(os, k.p.y);
    put<double>(os, k.p.z);
    put<double>(os, k.r);
    put<std::int32_t>(os, k.tau);
    put<double>(os, k.eta);
    os.write(reinterpret_cast<const char*>(descs.row(i)),
             static_cast<std::streamsize>(descs.dim * sizeof(double)));
  }
  if (!os) throw DataError("write failed: " + path);
}

void load_keypoints(const std::string& path, std::vector<Keypoint>& kps,
                    DataMatrix& descs) {
  auto is = open_in(path);
  check_magic(is, "HKPT", "keypoint");
  const auto ver = get<std::uint32_t>(is, "version");
  if (ver != 1)
    throw DataError("version mismatch: keypoint file v" + std::to_string(ver));
  const auto n = get<std::uint32_t>(is, "count");
  const auto dim = get<std::uint32_t>(is, "dimension");
  kps.assign(n, Keypoint{});
  descs = DataMatrix{};
  descs.n = n;
  descs.dim = dim;
  descs.v.resize(static_cast<std::size_t>(n) * dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    Keypoint& k = kps[i];
    k.t = get<std::int32_t>(is, "frame");
    k.p.x = get<double>(is, "x");
    k.p.y = get<double>(is, "y");
    k.p.z = get<double>(is, "z");
    k.r = get<double>(is, "r");
    k.tau = get<std::int32_t>(is, "tau");
    k.eta = get<double>(is, "eta");
    is.read(reinterpret_cast<char*>(descs.row(i)),
            static_cast<std::streamsize>(dim * sizeof(double)));
    if (!is) throw DataError("truncated payload in " + path);
  }
  expect_eof(is, path);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void export_keypoints_csv(const std::vector<Keypoint>& kps,
                          const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "frame,x,y,z,r,tau,eta\n";
  for (const Keypoint& k : kps) {
    os << k.t << ',' << format_g17(k.p.x) << ',' << format_g17(k.p.y) << ','
       << format_g17(k.p.z) << ',' << format_g17(k.r) << ',' << k.tau << ','
       << format_g17(k.eta) << '\n';
  }
  if (!os) throw DataError("write failed: " + path);
}

}  // namespace hopc
