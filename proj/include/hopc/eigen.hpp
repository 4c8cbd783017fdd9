#pragma once

#include "hopc/geometry.hpp"

namespace hopc {

// 3x3 symmetric matrix, upper triangle.
struct SymMat3 {
  double a00 = 0, a01 = 0, a02 = 0, a11 = 0, a12 = 0, a22 = 0;

  Vec3 mul(const Vec3& v) const {
    return {a00 * v.x + a01 * v.y + a02 * v.z,
            a01 * v.x + a11 * v.y + a12 * v.z,
            a02 * v.x + a12 * v.y + a22 * v.z};
  }
};

struct ScatterMatrix {
  SymMat3 C;
  Vec3 mu;
  std::size_t n_p = 0;
};

// Eigenpairs sorted by descending eigenvalue. Until disambiguate_signs runs,
// vector signs follow the first-nonzero-component-positive convention and
// `oriented` is false.
struct Eigensystem {
  double lambda[3] = {0, 0, 0};
  Vec3 v[3];
  bool oriented = false;
};

struct EigenRatios {
  double d12 = 1, d23 = 1;  // +inf when flagged
  bool inf12 = false, inf23 = false;
};

// mu = mean, C = (1/n) sum (q - mu)(q - mu)^T, extended-precision accumulation.
ScatterMatrix scatter(const SupportVolume& support);

// Closed-form symmetric 3x3 eigendecomposition with a safeguarded Newton
// polish per eigenvalue (extended precision, steps accepted only while the
// characteristic-polynomial magnitude drops). Negative round-off eigenvalues
// are clamped to 0. For eigenvalues tied within relative 1e-10 the tied
// vectors are reordered by descending (|x|, |y|, |z|) so results are
// deterministic.
Eigensystem eig3(const SymMat3& C);
inline Eigensystem eig3(const ScatterMatrix& S) { return eig3(S.C); }

// Per-vector score over support offsets o = q - p: sum of sign(o.v) (o.v)^2
// with sign(0) = +1. Each vector takes the sign of its score; if the triad
// ends up left-handed, the vector with the smallest |score| is flipped back.
Eigensystem disambiguate_signs(const Eigensystem& eigs,
                               const SupportVolume& support, const Vec3& p,
                               double score_out[3] = nullptr);

// d12 = l1/l2, d23 = l2/l3. Denominators below the floor (default
// 1e-12 * l1, or absolute 1e-15 when l1 = 0) flag the ratio infinite; flagged
// ratios carry +inf so "> theta" comparisons behave as expected.
EigenRatios eigenratios(const Eigensystem& eigs);
EigenRatios eigenratios(const Eigensystem& eigs, double floor_value);

}  // namespace hopc
