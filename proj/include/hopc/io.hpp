#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hopc/geometry.hpp"
#include "hopc/keypoints.hpp"
#include "hopc/learn.hpp"

namespace hopc {

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  double depth_scale = 1.0;  // world units per raw depth value
};

// Pinhole back-projection; raw depth 0 marks an invalid pixel and is skipped.
Frame depth_to_cloud(const std::vector<std::uint16_t>& depth, int width,
                     int height, const CameraIntrinsics& intr,
                     std::int32_t frame_index);

// Native sequence container: magic "HPC1" (the digit is the format version),
// little-endian; u32 flags (bit 0: subject/action tags present), u32 frame
// count, f64 frame rate, optional i32 subject + i32 action, then per frame
// i32 index, u32 point count, count x 3 f64 coordinates. Loaders verify that
// frame indices run 1..n_f.
void save_sequence(const CloudSequence& seq, const std::string& path);
CloudSequence load_sequence(const std::string& path);

// Directory of 16-bit PGM depth maps (frame order = sorted filenames) plus an
// `intrinsics.txt` sidecar (fx, fy, cx, cy, depth_scale, optional frame_rate).
CloudSequence load_depth_dir(const std::string& dir);

std::vector<std::uint16_t> load_pgm16(const std::string& path, int& width,
                                      int& height);

// Flat key=value config ('#' comments). Every key must be known: lookups
// register the key, and `finish()` rejects leftovers, catching typos.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt);
  double get_double(const std::string& key, double dflt);
  int get_int(const std::string& key, int dflt);
  bool get_bool(const std::string& key, bool dflt);

  // throws ConfigError when unconsumed keys remain
  void finish() const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> seen_;
};

// Descriptor matrix: "HDSC" + u32 version + u32 rows + u32 dim + f64 data.
void save_descriptors(const DataMatrix& m, const std::string& path);
DataMatrix load_descriptors(const std::string& path);

// Codebook: "HCBK" + u32 version + u32 k + u32 dim + f64 centers.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

// Classifier: "HSVM" + u32 version + counts + f64/i32 payload.
void save_model(const ClassifierModel& m, const std::string& path);
ClassifierModel load_model(const std::string& path);

// Keypoints: "HKPT" + u32 version + u32 count + u32 descriptor dim, then per
// keypoint i32 frame, f64 x/y/z, f64 r, i32 tau, f64 eta, dim x f64
// descriptor. The CSV export carries the scalar columns only.
void save_keypoints(const std::vector<Keypoint>& kps, const DataMatrix& descs,
                    const std::string& path);
void load_keypoints(const std::string& path, std::vector<Keypoint>& kps,
                    DataMatrix& descs);
void export_keypoints_csv(const std::vector<Keypoint>& kps,
                          const std::string& path);

// %.17g: shortest round-trip decimal for doubles, so text reports are
// byte-stable across runs
std::string format_g17(double v);

}  // namespace hopc
