// Shared test helpers. Oracles here are deliberately independent of the
// library implementations they check: the Jacobi sweep knows nothing about
// the closed-form 3x3 solver, and the brute-force scans use no spatial index.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "hopc/geometry.hpp"
#include "hopc/rng.hpp"

namespace testsup {

// Cyclic Jacobi on a row-major symmetric n x n matrix. Returns eigenvalues
// sorted descending. Optionally accumulates eigenvectors as columns of V.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a,
                                              std::size_t n,
                                              std::vector<double>* vecs =
                                                  nullptr) {
  std::vector<double> v;
  if (vecs) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t =
            std::copysign(1.0, theta) /
            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        if (vecs) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k * n + p], vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  if (vecs) *vecs = v;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

struct Mat3r {
  double m[9];  // row-major
  hopc::Vec3 apply(const hopc::Vec3& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2] * p.z,
            m[3] * p.x + m[4] * p.y + m[5] * p.z,
            m[6] * p.x + m[7] * p.y + m[8] * p.z};
  }
};

inline Mat3r rotation_about(hopc::Vec3 axis, double angle_rad) {
  const double n = hopc::norm(axis);
  const double ux = axis.x / n, uy = axis.y / n, uz = axis.z / n;
  const double c = std::cos(angle_rad), s = std::sin(angle_rad);
  const double k = 1.0 - c;
  return {{c + ux * ux * k, ux * uy * k - uz * s, ux * uz * k + uy * s,
           uy * ux * k + uz * s, c + uy * uy * k, uy * uz * k - ux * s,
           uz * ux * k - uy * s, uz * uy * k + ux * s, c + uz * uz * k}};
}

inline Mat3r random_rotation(hopc::Rng& rng) {
  // Shoemake's uniform quaternion construction.
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const double tau = 6.283185307179586476925286766559;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double qx = a * std::sin(tau * u2), qy = a * std::cos(tau * u2);
  const double qz = b * std::sin(tau * u3), qw = b * std::cos(tau * u3);
  return {{1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw),
           2 * (qx * qz + qy * qw), 2 * (qx * qy + qz * qw),
           1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
           2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw),
           1 - 2 * (qx * qx + qy * qy)}};
}

// Exhaustive in-ball scan; the oracle counterpart of the voxel-grid query.
inline std::vector<std::size_t> brute_ball(const std::vector<hopc::Vec3>& pts,
                                           const hopc::Vec3& c, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const hopc::Vec3 d = pts[i] - c;
    if (hopc::dot(d, d) <= r * r) out.push_back(i);
  }
  return out;
}

inline std::vector<hopc::Vec3> random_cloud(hopc::Rng& rng, std::size_t n,
                                            double extent) {
  std::vector<hopc::Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({(rng.uniform() * 2 - 1) * extent,
                   (rng.uniform() * 2 - 1) * extent,
                   (rng.uniform() * 2 - 1) * extent});
  return pts;
}

// Anisotropic Gaussian blob with decisively skewed mass along every axis, so
// eigenvalues are well separated and sign scores stay far from zero.
inline std::vector<hopc::Vec3> decisive_support(hopc::Rng& rng, std::size_t n,
                                                double sx = 3.0,
                                                double sy = 2.0,
                                                double sz = 1.0) {
  std::vector<hopc::Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double gx = rng.normal(), gy = rng.normal(), gz = rng.normal();
    // Fold a fraction of the mass to one side of each axis.
    if (rng.uniform() < 0.7) gx = std::fabs(gx);
    if (rng.uniform() < 0.7) gy = std::fabs(gy);
    if (rng.uniform() < 0.7) gz = std::fabs(gz);
    pts.push_back({sx * gx, sy * gy, sz * gz});
  }
  return pts;
}

inline double cosine_similarity(const double* a, const double* b,
                                std::size_t n) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace testsup
