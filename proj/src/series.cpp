#include "radshock/series.hpp"

#include <Eigen/SVD>

namespace radshock {

MatSeries laurent_inverse(const MatSeries& Ain, int K) {
  const int n = int(Ain[0].rows());
  // Pad with zeros so indices up to K+2 exist.
  MatSeries A = Ain;
  while (int(A.size()) < K + 3) A.push_back(MatR::Zero(n, n));

  Eigen::JacobiSVD<MatR> svd(A[0], Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VecR sig = svd.singularValues();
  require(sig(n - 1) <= 1e-8 * std::max(sig(0), 1e-300), Err::Internal,
          "laurent_inverse: constant term is not numerically singular");
  if (n >= 2)
    require(sig(n - 2) > 1e-8 * sig(0), Err::Internal,
            "laurent_inverse: null space is not one-dimensional");
  VecR r0 = svd.matrixV().col(n - 1);
  VecR l0 = svd.matrixU().col(n - 1);
  fix_sign(r0);
  fix_sign(l0);
  const double nu = l0.dot(A[1] * r0);
  require(std::abs(nu) > 1e-12, Err::Degeneracy,
          "laurent_inverse: l0^T A1 r0 vanishes (degenerate crossing)");

  // Bordered solver for A0 X = R with gauge r0^T X = 0.
  MatR Bord = MatR::Zero(n + 1, n + 1);
  Bord.topLeftCorner(n, n) = A[0];
  Bord.topRightCorner(n, 1) = r0;
  Bord.bottomLeftCorner(1, n) = r0.transpose();
  Eigen::PartialPivLU<MatR> lu(Bord);
  auto gauge_solve = [&](const MatR& R) {
    MatR X(n, n);
    VecR rhs(n + 1), sol(n + 1);
    for (int c = 0; c < n; ++c) {
      rhs.head(n) = R.col(c);
      rhs(n) = 0.0;
      sol = lu.solve(rhs);
      X.col(c) = sol.head(n);
    }
    return X;
  };

  // out[k] stores B_{k-1}.
  MatSeries B(K + 2, MatR::Zero(n, n));
  MatR Bhat_prev = MatR::Zero(n, n);  // gauge part of B_{m-1}
  for (int m = 0; m <= K + 1; ++m) {
    MatR S = (m == 0) ? MatR(MatR::Identity(n, n)) : MatR(MatR::Zero(n, n));
    for (int j = 2; j <= m + 1; ++j) S -= A[j] * B[m - j + 1];
    S -= A[1] * Bhat_prev;
    const RowR w = (l0.transpose() * S) / nu;
    B[m] = Bhat_prev + r0 * w;  // finalized B_{m-1}
    if (m == K + 1) break;
    MatR R = (m == 0) ? MatR(MatR::Identity(n, n)) : MatR(MatR::Zero(n, n));
    for (int j = 1; j <= m + 1; ++j) R -= A[j] * B[m - j + 1];
    Bhat_prev = gauge_solve(R);
  }
  return B;
}

}  // namespace radshock
