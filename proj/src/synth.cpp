#include "hopc/synth.hpp"

#include <cmath>

#include "hopc/errors.hpp"
#include "hopc/rng.hpp"

namespace hopc {

Scenario scenario_from_string(const std::string& s) {
  if (s == "static-plane") return Scenario::StaticPlane;
  if (s == "oscillating-blob") return Scenario::OscillatingBlob;
  if (s == "rod-sweep") return Scenario::RodSweep;
  if (s == "two-limb-articulation") return Scenario::TwoLimb;
  throw ConfigError("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::StaticPlane: return "static-plane";
    case Scenario::OscillatingBlob: return "oscillating-blob";
    case Scenario::RodSweep: return "rod-sweep";
    case Scenario::TwoLimb: return "two-limb-articulation";
  }
  return "?";
}

double motion_phase(const SynthScenario& sc, int t) {
  return (t - 1) * sc.speed / sc.period;
}

void rotation_rows(const Vec3& axis, double angle_deg, Vec3 rows[3]) {
  const Vec3 u = normalized(axis);
  const double a = angle_deg * M_PI / 180.0;
  const double c = std::cos(a), s = std::sin(a), k = 1.0 - c;
  rows[0] = {c + u.x * u.x * k, u.x * u.y * k - u.z * s,
             u.x * u.z * k + u.y * s};
  rows[1] = {u.y * u.x * k + u.z * s, c + u.y * u.y * k,
             u.y * u.z * k - u.x * s};
  rows[2] = {u.z * u.x * k - u.y * s, u.z * u.y * k + u.x * s,
             c + u.z * u.z * k};
}

Vec3 rotate(const Vec3 rows[3], const Vec3& p) {
  return {dot(rows[0], p), dot(rows[1], p), dot(rows[2], p)};
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// one sampled offset around a limb axis: skewed in every direction so the
// cubic sign scores of any support on the limb stay decisive
struct LimbOffset {
  double u;   // position along the limb, denser toward the tip
  double c1;  // in-plane cross offset
  double c2;  // out-of-plane cross offset
};

std::vector<LimbOffset> sample_limb(Rng& rng, int n, double w1, double w2) {
  std::vector<LimbOffset> out(n);
  for (auto& o : out) {
    o.u = std::pow(rng.uniform(), 0.7);
    o.c1 = w1 * (std::fabs(rng.normal()) - 0.55);
    o.c2 = w2 * (std::fabs(rng.normal()) - 0.5);
  }
  return out;
}

std::vector<Vec3> sample_ellipsoid(Rng& rng, int n, const Vec3& semi) {
  std::vector<Vec3> out(n);
  for (auto& p : out) {
    const Vec3 d = normalized({rng.normal(), rng.normal(), rng.normal()});
    p = {semi.x * d.x, semi.y * d.y, semi.z * d.z};
  }
  return out;
}

void add_noise(Rng& rng, double sigma, std::vector<Vec3>& pts) {
  if (sigma <= 0) return;
  for (auto& p : pts)
    p = p + Vec3{rng.normal(0, sigma), rng.normal(0, sigma),
                 rng.normal(0, sigma)};
}

void add_noise(Rng& rng, double sigma, std::vector<LimbOffset>& offs) {
  if (sigma <= 0) return;
  for (auto& o : offs) {
    o.c1 += rng.normal(0, sigma);
    o.c2 += rng.normal(0, sigma);
  }
}

}  // namespace

SynthResult synth_generate(const SynthScenario& sc) {
  if (sc.duration < 2)
    throw ConfigError("synth_generate: duration must be >= 2");
  if (sc.noise_sigma < 0)
    throw ConfigError("synth_generate: noise sigma must be >= 0");
  Rng rng(sc.seed);
  const double s = sc.scale;

  // templates are sampled once; frames repeat/transform them so static
  // geometry is exactly static
  std::vector<Vec3> torso, plane, blob;
  std::vector<LimbOffset> rod, upper, fore;
  switch (sc.id) {
    case Scenario::StaticPlane: {
      plane.resize(400);
      const double tilt = 15.0 * M_PI / 180.0;
      for (auto& p : plane) {
        const double x = rng.uniform(-0.4 * s, 0.4 * s);
        const double y = rng.uniform(-0.3 * s, 0.3 * s);
        p = {x, y * std::cos(tilt), y * std::sin(tilt)};
      }
      add_noise(rng, sc.noise_sigma, plane);
      break;
    }
    case Scenario::OscillatingBlob:
      torso = sample_ellipsoid(rng, 250, Vec3{0.12, 0.2, 0.08} * s);
      blob = sample_ellipsoid(rng, 160, Vec3{0.1, 0.06, 0.045} * s);
      add_noise(rng, sc.noise_sigma, torso);
      add_noise(rng, sc.noise_sigma, blob);
      break;
    case Scenario::RodSweep:
      torso = sample_ellipsoid(rng, 250, Vec3{0.12, 0.2, 0.08} * s);
      rod = sample_limb(rng, 150, 0.018 * s, 0.014 * s);
      add_noise(rng, sc.noise_sigma, torso);
      add_noise(rng, sc.noise_sigma, rod);
      break;
    case Scenario::TwoLimb:
      torso = sample_ellipsoid(rng, 250, Vec3{0.12, 0.2, 0.08} * s);
      upper = sample_limb(rng, 90, 0.02 * s, 0.016 * s);
      fore = sample_limb(rng, 110, 0.018 * s, 0.014 * s);
      add_noise(rng, sc.noise_sigma, torso);
      add_noise(rng, sc.noise_sigma, upper);
      add_noise(rng, sc.noise_sigma, fore);
      break;
  }

  SynthResult out;
  out.seq.frame_rate = sc.frame_rate;
  out.seq.frames.resize(sc.duration);
  out.moving.resize(sc.duration);

  auto emit_limb = [](std::vector<Vec3>& dst, const std::vector<LimbOffset>& t,
                      const Vec3& base, const Vec3& dir, const Vec3& perp,
                      const Vec3& nrm, double len) {
    for (const auto& o : t)
      dst.push_back(base + dir * (o.u * len) + perp * o.c1 + nrm * o.c2);
  };

  for (int t = 1; t <= sc.duration; ++t) {
    const double ph = motion_phase(sc, t);
    const double w = kTwoPi * ph;
    Frame& fr = out.seq.frames[t - 1];
    fr.index = t;
    auto& mv = out.moving[t - 1];

    auto push_static = [&](const std::vector<Vec3>& pts) {
      for (const Vec3& p : pts) {
        fr.points.push_back(p);
        mv.push_back(0);
      }
    };
    const std::size_t static_count = fr.points.size();

    switch (sc.id) {
      case Scenario::StaticPlane:
        push_static(plane);
        break;
      case Scenario::OscillatingBlob: {
        push_static(torso);
        Vec3 c{0.28 * s, 0.05 * s, 0};
        const double A = 0.2 * s;
        if (sc.variant == 0)
          c.x += A * std::sin(w);
        else if (sc.variant == 1)
          c.y += A * std::sin(w);
        else
          c = c + Vec3{A * (std::cos(w) - 1.0), A * std::sin(w), 0};
        for (const Vec3& o : blob) {
          fr.points.push_back(c + o);
          mv.push_back(1);
        }
        break;
      }
      case Scenario::RodSweep: {
        push_static(torso);
        const Vec3 pivot{0.15 * s, 0.24 * s, 0};
        const double th = (30.0 + 35.0 * std::sin(w)) * M_PI / 180.0;
        Vec3 dir, perp, nrm;
        if (sc.variant == 0) {
          dir = {std::sin(th), -std::cos(th), 0};
          perp = {std::cos(th), std::sin(th), 0};
          nrm = {0, 0, 1};
        } else {
          dir = {std::sin(th), 0, -std::cos(th)};
          perp = {std::cos(th), 0, std::sin(th)};
          nrm = {0, 1, 0};
        }
        emit_limb(fr.points, rod, pivot, dir, perp, nrm, 0.45 * s);
        mv.insert(mv.end(), rod.size(), 1);
        break;
      }
      case Scenario::TwoLimb: {
        push_static(torso);
        const Vec3 shoulder{0.14 * s, 0.22 * s, 0};
        const double tu =
            (-15.0 + 28.0 * std::sin(w)) * M_PI / 180.0;
        const double tf =
            tu + (40.0 + 50.0 * std::sin(w + kTwoPi / 6.0)) * M_PI / 180.0;
        const Vec3 du{std::sin(tu), -std::cos(tu), 0};
        const Vec3 pu{std::cos(tu), std::sin(tu), 0};
        const Vec3 df{std::sin(tf), -std::cos(tf), 0};
        const Vec3 pf{std::cos(tf), std::sin(tf), 0};
        const Vec3 nz{0, 0, 1};
        const Vec3 elbow = shoulder + du * (0.22 * s);
        emit_limb(fr.points, upper, shoulder, du, pu, nz, 0.22 * s);
        emit_limb(fr.points, fore, elbow, df, pf, nz, 0.24 * s);
        mv.insert(mv.end(), upper.size() + fore.size(), 1);
        break;
      }
    }
    (void)static_count;
  }

  if (sc.rot_angle_deg != 0) {
    Vec3 R[3];
    rotation_rows(sc.rot_axis, sc.rot_angle_deg, R);
    for (Frame& fr : out.seq.frames)
      for (Vec3& p : fr.points) p = rotate(R, p);
  }
  return out;
}

CloudSequence decimate(const CloudSequence& seq, int factor) {
  if (factor < 1) throw ConfigError("decimate: factor must be >= 1");
  CloudSequence out;
  out.frame_rate = seq.frame_rate / factor;
  out.subject_id = seq.subject_id;
  out.action_label = seq.action_label;
  std::int32_t idx = 1;
  for (std::size_t i = 0; i < seq.frames.size();
       i += static_cast<std::size_t>(factor)) {
    Frame fr = seq.frames[i];
    fr.index = idx++;
    out.frames.push_back(std::move(fr));
  }
  return out;
}

}  // namespace hopc
