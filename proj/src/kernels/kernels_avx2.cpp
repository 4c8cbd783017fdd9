// AVX2 variants of the kernel set. Element-wise arithmetic mirrors the scalar
// reference exactly (same mul/add sequences, no FMA), so selection decisions
// are bit-identical; only reduction order differs.

#include "hopc/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define HOPC_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define HOPC_HAVE_AVX2_BUILD 0
#endif

#include <cmath>

namespace hopc::kernels {

#if HOPC_HAVE_AVX2_BUILD

namespace {

inline long double reduce4(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((long double)lane[0] + lane[1]) + ((long double)lane[2] + lane[3]);
}

std::size_t range_select_avx2(const double* x, const double* y, const double* z,
                              std::size_t n, double cx, double cy, double cz,
                              double r2, std::uint32_t* out) {
  std::size_t m = 0;
  std::size_t i = 0;
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vcz = _mm256_set1_pd(cz);
  const __m256d vr2 = _mm256_set1_pd(r2);
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vcy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(z + i), vcz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
        _mm256_mul_pd(dz, dz));
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    while (mask != 0) {
      const int b = __builtin_ctz(mask);
      out[m++] = static_cast<std::uint32_t>(i + b);
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    const double dx = x[i] - cx;
    const double dy = y[i] - cy;
    const double dz = z[i] - cz;
    if (dx * dx + dy * dy + dz * dz <= r2)
      out[m++] = static_cast<std::uint32_t>(i);
  }
  return m;
}

void sum3_avx2(const double* x, const double* y, const double* z,
               std::size_t n, double out[3]) {
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  __m256d az = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    ax = _mm256_add_pd(ax, _mm256_loadu_pd(x + i));
    ay = _mm256_add_pd(ay, _mm256_loadu_pd(y + i));
    az = _mm256_add_pd(az, _mm256_loadu_pd(z + i));
  }
  long double sx = reduce4(ax), sy = reduce4(ay), sz = reduce4(az);
  for (; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sz += z[i];
  }
  out[0] = static_cast<double>(sx);
  out[1] = static_cast<double>(sy);
  out[2] = static_cast<double>(sz);
}

void scatter6_avx2(const double* x, const double* y, const double* z,
                   std::size_t n, const double mu[3], double out[6]) {
  const __m256d mx = _mm256_set1_pd(mu[0]);
  const __m256d my = _mm256_set1_pd(mu[1]);
  const __m256d mz = _mm256_set1_pd(mu[2]);
  __m256d axx = _mm256_setzero_pd(), axy = _mm256_setzero_pd();
  __m256d axz = _mm256_setzero_pd(), ayy = _mm256_setzero_pd();
  __m256d ayz = _mm256_setzero_pd(), azz = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(z + i), mz);
    axx = _mm256_add_pd(axx, _mm256_mul_pd(dx, dx));
    axy = _mm256_add_pd(axy, _mm256_mul_pd(dx, dy));
    axz = _mm256_add_pd(axz, _mm256_mul_pd(dx, dz));
    ayy = _mm256_add_pd(ayy, _mm256_mul_pd(dy, dy));
    ayz = _mm256_add_pd(ayz, _mm256_mul_pd(dy, dz));
    azz = _mm256_add_pd(azz, _mm256_mul_pd(dz, dz));
  }
  long double sxx = reduce4(axx), sxy = reduce4(axy), sxz = reduce4(axz);
  long double syy = reduce4(ayy), syz = reduce4(ayz), szz = reduce4(azz);
  for (; i < n; ++i) {
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

void sign_scores_avx2(const double* x, const double* y, const double* z,
                      std::size_t n, const double c[3], const double basis[9],
                      double out[3]) {
  const __m256d cx = _mm256_set1_pd(c[0]);
  const __m256d cy = _mm256_set1_pd(c[1]);
  const __m256d cz = _mm256_set1_pd(c[2]);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(
      0x7fffffffffffffffLL));
  __m256d acc[3] = {_mm256_setzero_pd(), _mm256_setzero_pd(),
                    _mm256_setzero_pd()};
  __m256d vb[9];
  for (int k = 0; k < 9; ++k) vb[k] = _mm256_set1_pd(basis[k]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ox = _mm256_sub_pd(_mm256_loadu_pd(x + i), cx);
    const __m256d oy = _mm256_sub_pd(_mm256_loadu_pd(y + i), cy);
    const __m256d oz = _mm256_sub_pd(_mm256_loadu_pd(z + i), cz);
    for (int j = 0; j < 3; ++j) {
      const __m256d d = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(ox, vb[3 * j]),
                        _mm256_mul_pd(oy, vb[3 * j + 1])),
          _mm256_mul_pd(oz, vb[3 * j + 2]));
      acc[j] = _mm256_add_pd(acc[j],
                             _mm256_mul_pd(d, _mm256_and_pd(d, absmask)));
    }
  }
  long double s[3] = {reduce4(acc[0]), reduce4(acc[1]), reduce4(acc[2])};
  for (; i < n; ++i) {
    const double ox = x[i] - c[0];
    const double oy = y[i] - c[1];
    const double oz = z[i] - c[2];
    for (int j = 0; j < 3; ++j) {
      const double d =
          ox * basis[3 * j] + oy * basis[3 * j + 1] + oz * basis[3 * j + 2];
      s[j] += d * std::fabs(d);
    }
  }
  out[0] = static_cast<double>(s[0]);
  out[1] = static_cast<double>(s[1]);
  out[2] = static_cast<double>(s[2]);
}

double hik_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = static_cast<double>(reduce4(acc));
  for (; i < n; ++i) s += a[i] < b[i] ? a[i] : b[i];
  return s;
}

double l2sq_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                    _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = static_cast<double>(reduce4(acc));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = static_cast<double>(reduce4(acc));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

const Ops kAvx2Ops = {
    "avx2",           range_select_avx2, sum3_avx2, scatter6_avx2,
    sign_scores_avx2, hik_avx2,          l2sq_avx2, dot_avx2,
};

}  // namespace

const Ops* avx2_ops() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2Ops : nullptr;
}

#else

const Ops* avx2_ops() { return nullptr; }

#endif  // HOPC_HAVE_AVX2_BUILD

}  // namespace hopc::kernels
