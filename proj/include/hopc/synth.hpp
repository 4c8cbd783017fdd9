#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hopc/geometry.hpp"

namespace hopc {

enum class Scenario {
  StaticPlane,      // motionless tilted plane patch
  OscillatingBlob,  // blob translating sinusoidally (variant: 0 = x axis,
                    // 1 = y axis, 2 = circular in xy)
  RodSweep,         // rod swinging about a pivot (variant: 0 = xy plane,
                    // 1 = xz plane)
  TwoLimb,          // articulated two-segment limb on a torso
};

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct SynthScenario {
  Scenario id = Scenario::OscillatingBlob;
  int variant = 0;
  int duration = 30;         // frames
  double speed = 1.0;        // motion phase multiplier
  double period = 16.0;      // frames per motion cycle at speed 1
  Vec3 rot_axis{0, 1, 0};    // rigid view rotation applied to every frame
  double rot_angle_deg = 0;
  double scale = 1.0;        // actor size multiplier
  double noise_sigma = 0.0;  // one-time template perturbation (meters)
  std::uint64_t seed = 1;
  double frame_rate = 30.0;
};

struct SynthResult {
  CloudSequence seq;
  // moving[f][i] = 1 when point i of frame f belongs to the moving part
  std::vector<std::vector<std::uint8_t>> moving;
};

// Deterministic in the scenario (seed included). The view rotation is applied
// after sampling, so a rotated sequence is exactly R * the unrotated one.
SynthResult synth_generate(const SynthScenario& sc);

// Motion phase driving frame position t (1-based): (t - 1) * speed / period.
double motion_phase(const SynthScenario& sc, int t);

// Rotation matrix rows for (axis, angle); used by tests to undo view rotation.
void rotation_rows(const Vec3& axis, double angle_deg, Vec3 rows[3]);
Vec3 rotate(const Vec3 rows[3], const Vec3& p);

// Keeps frames 1, 1+factor, 1+2*factor, ... reindexed 1..n' with
// frame_rate / factor. Models a lower capture rate of the same motion.
CloudSequence decimate(const CloudSequence& seq, int factor);

}  // namespace hopc
