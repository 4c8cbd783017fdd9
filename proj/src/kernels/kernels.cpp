#include "hopc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace hopc::kernels {

namespace {

std::size_t range_select_scalar(const double* x, const double* y,
                                const double* z, std::size_t n, double cx,
                                double cy, double cz, double r2,
                                std::uint32_t* out) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - cx;
    const double dy = y[i] - cy;
    const double dz = z[i] - cz;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 <= r2) out[m++] = static_cast<std::uint32_t>(i);
  }
  return m;
}

void sum3_scalar(const double* x, const double* y, const double* z,
                 std::size_t n, double out[3]) {
  long double sx = 0, sy = 0, sz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sz += z[i];
  }
  out[0] = static_cast<double>(sx);
  out[1] = static_cast<double>(sy);
  out[2] = static_cast<double>(sz);
}

void scatter6_scalar(const double* x, const double* y, const double* z,
                     std::size_t n, const double mu[3], double out[6]) {
  long double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mu[0];
    const double dy = y[i] - mu[1];
    const double dz = z[i] - mu[2];
    sxx += dx * dx;
    sxy += dx * dy;
    sxz += dx * dz;
    syy += dy * dy;
    syz += dy * dz;
    szz += dz * dz;
  }
  out[0] = static_cast<double>(sxx);
  out[1] = static_cast<double>(sxy);
  out[2] = static_cast<double>(sxz);
  out[3] = static_cast<double>(syy);
  out[4] = static_cast<double>(syz);
  out[5] = static_cast<double>(szz);
}

void sign_scores_scalar(const double* x, const double* y, const double* z,
                        std::size_t n, const double c[3], const double basis[9],
                        double out[3]) {
  long double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ox = x[i] - c[0];
    const double oy = y[i] - c[1];
    const double oz = z[i] - c[2];
    const double d0 = ox * basis[0] + oy * basis[1] + oz * basis[2];
    const double d1 = ox * basis[3] + oy * basis[4] + oz * basis[5];
    const double d2 = ox * basis[6] + oy * basis[7] + oz * basis[8];
    s0 += d0 * std::fabs(d0);
    s1 += d1 * std::fabs(d1);
    s2 += d2 * std::fabs(d2);
  }
  out[0] = static_cast<double>(s0);
  out[1] = static_cast<double>(s1);
  out[2] = static_cast<double>(s2);
}

double hik_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::min(a[i], b[i]);
  return s;
}

double l2sq_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

const Ops kScalarOps = {
    "scalar",          range_select_scalar, sum3_scalar, scatter6_scalar,
    sign_scores_scalar, hik_scalar,         l2sq_scalar, dot_scalar,
};

const Ops* select_ops() {
  const char* forced = std::getenv("HOPC_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return &kScalarOps;
    if (std::strcmp(forced, "avx2") == 0 && avx2_ops() != nullptr)
      return avx2_ops();
    return &kScalarOps;
  }
  if (const Ops* v = avx2_ops()) return v;
  return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& active() {
  static const Ops* chosen = select_ops();
  return *chosen;
}

}  // namespace hopc::kernels
