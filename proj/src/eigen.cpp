#include "hopc/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hopc/errors.hpp"
#include "hopc/kernels.hpp"

namespace hopc {

ScatterMatrix scatter(const SupportVolume& support) {
  const std::size_t n = support.size();
  if (n == 0) throw DataError("scatter: empty support");
  const auto& ops = kernels::active();
  double s[3];
  ops.sum3(support.pts.x.data(), support.pts.y.data(), support.pts.z.data(), n,
           s);
  ScatterMatrix out;
  out.n_p = n;
  const double inv = 1.0 / static_cast<double>(n);
  out.mu = {s[0] * inv, s[1] * inv, s[2] * inv};
  double mu[3] = {out.mu.x, out.mu.y, out.mu.z};
  double c[6];
  ops.scatter6(support.pts.x.data(), support.pts.y.data(),
               support.pts.z.data(), n, mu, c);
  out.C = {c[0] * inv, c[1] * inv, c[2] * inv,
           c[3] * inv, c[4] * inv, c[5] * inv};
  return out;
}

namespace {

double det3(const SymMat3& A) {
  return A.a00 * (A.a11 * A.a22 - A.a12 * A.a12) -
         A.a01 * (A.a01 * A.a22 - A.a12 * A.a02) +
         A.a02 * (A.a01 * A.a12 - A.a11 * A.a02);
}

// Null-space direction of A - lambda*I via the largest cross product of row
// pairs (adjugate columns). Fails (ok=false) when the shifted matrix has rank
// <= 1, i.e. near a repeated eigenvalue.
Vec3 cofactor_vector(const SymMat3& A, double lambda, double scale, bool& ok) {
  const Vec3 r0{A.a00 - lambda, A.a01, A.a02};
  const Vec3 r1{A.a01, A.a11 - lambda, A.a12};
  const Vec3 r2{A.a02, A.a12, A.a22 - lambda};
  const Vec3 c[3] = {cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  int best = 0;
  double bn = dot(c[0], c[0]);
  for (int i = 1; i < 3; ++i) {
    const double n2 = dot(c[i], c[i]);
    if (n2 > bn) {
      bn = n2;
      best = i;
    }
  }
  const double floor2 = scale * scale * 1e-10;
  ok = bn > floor2 * floor2;
  return ok ? c[best] * (1.0 / std::sqrt(bn)) : Vec3{0, 0, 0};
}

void canonical_sign(Vec3& v) {
  const double* c = &v.x;
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(c[i]) > 1e-14) {
      if (c[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

Eigensystem eig3(const SymMat3& A) {
  const double ent[6] = {A.a00, A.a01, A.a02, A.a11, A.a12, A.a22};
  double scale = 0;
  for (double e : ent) {
    if (!std::isfinite(e)) throw NumericalError("eig3: non-finite entry");
    scale = std::max(scale, std::fabs(e));
  }

  Eigensystem es;
  {
    const double q = (A.a00 + A.a11 + A.a22) / 3.0;
    const double p1 = A.a01 * A.a01 + A.a02 * A.a02 + A.a12 * A.a12;
    const double p2 = (A.a00 - q) * (A.a00 - q) + (A.a11 - q) * (A.a11 - q) +
                      (A.a22 - q) * (A.a22 - q) + 2.0 * p1;
    if (p2 == 0) {
      // exactly scalar matrix (includes the zero matrix)
      es.v[0] = {1, 0, 0};
      es.v[1] = {0, 1, 0};
      es.v[2] = {0, 0, 1};
      for (double& lam : es.lambda) lam = std::max(q, 0.0);
      return es;
    }
  }

  // Normalize by a power of two (exact) so polynomial magnitudes stay O(1).
  const double s = std::ldexp(1.0, std::ilogb(scale));
  const double inv_s = 1.0 / s;
  const SymMat3 An{A.a00 * inv_s, A.a01 * inv_s, A.a02 * inv_s,
                   A.a11 * inv_s, A.a12 * inv_s, A.a22 * inv_s};

  const double q = (An.a00 + An.a11 + An.a22) / 3.0;
  const double p1 = An.a01 * An.a01 + An.a02 * An.a02 + An.a12 * An.a12;
  const double p2 = (An.a00 - q) * (An.a00 - q) + (An.a11 - q) * (An.a11 - q) +
                    (An.a22 - q) * (An.a22 - q) + 2.0 * p1;
  double l[3];
  const double p = std::sqrt(p2 / 6.0);
  const double inv_p = 1.0 / p;
  const SymMat3 B{(An.a00 - q) * inv_p, An.a01 * inv_p, An.a02 * inv_p,
                  (An.a11 - q) * inv_p, An.a12 * inv_p, (An.a22 - q) * inv_p};
  const double r = std::clamp(det3(B) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  l[0] = q + 2.0 * p * std::cos(phi);
  l[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  l[1] = 3.0 * q - l[0] - l[2];

  // Safeguarded Newton polish on the characteristic polynomial, in extended
  // precision. A step is accepted only while |p| strictly drops, so noisy
  // steps near clustered roots can never corrupt a good closed-form root.
  const long double i1 = (long double)An.a00 + An.a11 + An.a22;
  const long double i2 =
      ((long double)An.a00 * An.a11 - (long double)An.a01 * An.a01) +
      ((long double)An.a00 * An.a22 - (long double)An.a02 * An.a02) +
      ((long double)An.a11 * An.a22 - (long double)An.a12 * An.a12);
  const long double i3 =
      (long double)An.a00 *
          ((long double)An.a11 * An.a22 - (long double)An.a12 * An.a12) -
      (long double)An.a01 *
          ((long double)An.a01 * An.a22 - (long double)An.a12 * An.a02) +
      (long double)An.a02 *
          ((long double)An.a01 * An.a12 - (long double)An.a11 * An.a02);
  auto charpoly = [&](long double x) {
    return ((-x + i1) * x - i2) * x + i3;
  };
  for (double& lam : l) {
    long double x = lam;
    long double px = charpoly(x);
    for (int iter = 0; iter < 16; ++iter) {
      const long double dv = (-3.0L * x + 2.0L * i1) * x - i2;
      if (std::fabs((double)dv) < 1e-300) break;
      const long double step = px / dv;
      const long double xn = x - step;
      const long double pn = charpoly(xn);
      if (!(fabsl(pn) < fabsl(px))) break;
      x = xn;
      px = pn;
      if (fabsl(step) <= 1e-18L * std::max(1.0L, fabsl(x))) break;
    }
    lam = (double)x;
  }
  std::sort(l, l + 3, std::greater<>());

  // extract the best-isolated eigenvector by cofactors ...
  int ord[3] = {0, 1, 2};
  double gap[3];
  for (int i = 0; i < 3; ++i) {
    gap[i] = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 3; ++j)
      if (j != i) gap[i] = std::min(gap[i], std::fabs(l[i] - l[j]));
  }
  std::stable_sort(ord, ord + 3, [&](int a, int b) { return gap[a] > gap[b]; });

  bool ok = false;
  Vec3 v0 = cofactor_vector(An, l[ord[0]], 1.0, ok);
  if (!ok) v0 = {1, 0, 0};

  // ... then diagonalize the deflated 2x2 block for the remaining pair, which
  // stays backward-stable however tight their gap is.
  const double a[3] = {std::fabs(v0.x), std::fabs(v0.y), std::fabs(v0.z)};
  int k = 0;
  if (a[1] < a[k]) k = 1;
  if (a[2] < a[k]) k = 2;
  const Vec3 axis{k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0, k == 2 ? 1.0 : 0.0};
  Vec3 w1 = normalized(cross(v0, axis));
  Vec3 w2 = cross(v0, w1);
  double p11 = dot(w1, An.mul(w1));
  double p22 = dot(w2, An.mul(w2));
  double p12 = dot(w1, An.mul(w2));
  if (p11 < p22) {  // keep the dominant entry leading: small rotation angle
    const Vec3 t = w1;
    w1 = w2;
    w2 = -t;
    std::swap(p11, p22);
    p12 = -p12;
  }
  const double th = 0.5 * std::atan2(2.0 * p12, p11 - p22);
  const double c = std::cos(th), sn = std::sin(th);
  const Vec3 u1 = w1 * c + w2 * sn;   // pairs with the larger of the two
  const Vec3 u2 = w2 * c - w1 * sn;

  es.v[ord[0]] = v0;
  es.v[std::min(ord[1], ord[2])] = u1;
  es.v[std::max(ord[1], ord[2])] = u2;

  // The deflated pair's eigenvalues come from the same 2x2 rotation as their
  // vectors, which keeps residuals at round-off level even for gaps far below
  // what the characteristic polynomial can resolve.
  double lam[3];
  lam[ord[0]] = l[ord[0]] * s;
  lam[std::min(ord[1], ord[2])] =
      (c * c * p11 + 2.0 * c * sn * p12 + sn * sn * p22) * s;
  lam[std::max(ord[1], ord[2])] =
      (sn * sn * p11 - 2.0 * c * sn * p12 + c * c * p22) * s;
  for (int pass = 0; pass < 2; ++pass)  // undo epsilon-level order inversions
    for (int i = 0; i < 2; ++i)
      if (lam[i] < lam[i + 1]) {
        std::swap(lam[i], lam[i + 1]);
        std::swap(es.v[i], es.v[i + 1]);
      }
  for (int i = 0; i < 3; ++i) es.lambda[i] = std::max(lam[i], 0.0);

  // deterministic order within tied groups: descending (|x|, |y|, |z|)
  const double tie_tol = 1e-10 * std::max(std::fabs(es.lambda[0]), 1e-300);
  auto vec_key_less = [](const Vec3& a, const Vec3& b) {
    const double ax[3] = {std::fabs(a.x), std::fabs(a.y), std::fabs(a.z)};
    const double bx[3] = {std::fabs(b.x), std::fabs(b.y), std::fabs(b.z)};
    for (int i = 0; i < 3; ++i) {
      if (ax[i] != bx[i]) return ax[i] > bx[i];
    }
    return false;
  };
  for (int i = 0; i < 3;) {
    int j = i + 1;
    while (j < 3 && es.lambda[i] - es.lambda[j] <= tie_tol) ++j;
    if (j - i > 1) std::stable_sort(es.v + i, es.v + j, vec_key_less);
    i = j;
  }
  for (auto& v : es.v) canonical_sign(v);
  return es;
}

Eigensystem disambiguate_signs(const Eigensystem& eigs,
                               const SupportVolume& support, const Vec3& p,
                               double score_out[3]) {
  Eigensystem out = eigs;
  const double c[3] = {p.x, p.y, p.z};
  const double basis[9] = {eigs.v[0].x, eigs.v[0].y, eigs.v[0].z,
                           eigs.v[1].x, eigs.v[1].y, eigs.v[1].z,
                           eigs.v[2].x, eigs.v[2].y, eigs.v[2].z};
  double s[3];
  kernels::active().sign_scores(support.pts.x.data(), support.pts.y.data(),
                                support.pts.z.data(), support.size(), c, basis,
                                s);
  for (int j = 0; j < 3; ++j) {
    if (s[j] < 0) out.v[j] = -out.v[j];  // sign(0) counts as +1: no flip
  }
  if (dot(cross(out.v[0], out.v[1]), out.v[2]) < 0) {
    int k = 0;
    double best = std::fabs(s[0]);
    for (int j = 1; j < 3; ++j) {
      if (std::fabs(s[j]) < best) {
        best = std::fabs(s[j]);
        k = j;
      }
    }
    out.v[k] = -out.v[k];
  }
  if (score_out) {
    for (int j = 0; j < 3; ++j) score_out[j] = s[j];
  }
  out.oriented = true;
  return out;
}

EigenRatios eigenratios(const Eigensystem& eigs) {
  const double floor_value =
      eigs.lambda[0] > 0 ? 1e-12 * eigs.lambda[0] : 1e-15;
  return eigenratios(eigs, floor_value);
}

EigenRatios eigenratios(const Eigensystem& eigs, double floor_value) {
  EigenRatios r;
  const double inf = std::numeric_limits<double>::infinity();
  if (eigs.lambda[1] < floor_value) {
    r.inf12 = true;
    r.d12 = inf;
  } else {
    r.d12 = eigs.lambda[0] / eigs.lambda[1];
  }
  if (eigs.lambda[2] < floor_value) {
    r.inf23 = true;
    r.d23 = inf;
  } else {
    r.d23 = eigs.lambda[1] / eigs.lambda[2];
  }
  return r;
}

}  // namespace hopc
