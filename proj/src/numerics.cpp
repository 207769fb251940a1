#include "radshock/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace radshock::num {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
  VecC y;
  double err;  // scaled error estimate
};

StepResult dp5_step(const Field& f, double x, const VecC& y, const VecC& k1, double h, double atol,
                    double rtol) {
  const VecC k2 = f(x + c2 * h, y + h * (a21 * k1));
  const VecC k3 = f(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const VecC k4 = f(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const VecC k5 = f(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const VecC k6 = f(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  VecC ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const VecC k7 = f(x + h, ynew);
  const VecC errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double err = 0;
  for (int i = 0; i < y.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    const double q = std::abs(errv[i]) / sc;
    err = std::max(err, q);
  }
  return {std::move(ynew), err};
}

void integrate_span(const Field& f, double x0, double x1, VecC& y, const OdeOptions& opt) {
  if (x0 == x1) return;
  const double dir = (x1 > x0) ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  double h = opt.h0 > 0 ? std::min(opt.h0, span) : span / 100.0;
  double x = x0;
  long steps = 0;
  VecC k1 = f(x, y);
  while (dir * (x1 - x) > 0) {
    if (++steps > opt.max_steps) fail(Err::Integration, "ode_integrate: step budget exhausted");
    h = std::min(h, std::abs(x1 - x));
    if (h < opt.hmin)
      fail(Err::Stiffness, "ode_integrate: step underflow at x=" + std::to_string(x));
    StepResult st = dp5_step(f, x, y, k1, dir * h, opt.atol, opt.rtol);
    if (st.err <= 1.0) {
      x += dir * h;
      y = std::move(st.y);
      k1 = f(x, y);  // FSAL not reused; clarity over speed
      const double fac = (st.err > 0) ? 0.9 * std::pow(st.err, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(st.err, -0.25));
    }
  }
}

}  // namespace

VecC ode_integrate(const Field& f, double x0, double x1, VecC y0, const OdeOptions& opt) {
  integrate_span(f, x0, x1, y0, opt);
  return y0;
}

void ode_integrate_checkpoints(const Field& f, const std::vector<double>& xs, VecC y0,
                               const std::function<void(int, double, const VecC&)>& on_node,
                               const OdeOptions& opt) {
  require(!xs.empty(), Err::Internal, "ode_integrate_checkpoints: empty checkpoint list");
  on_node(0, xs[0], y0);
  for (size_t i = 1; i < xs.size(); ++i) {
    integrate_span(f, xs[i - 1], xs[i], y0, opt);
    on_node(int(i), xs[i], y0);
  }
}

VecC ode_integrate_fixed(const Field& f, double x0, double x1, VecC y0, long nsteps) {
  const double h = (x1 - x0) / double(nsteps);
  double x = x0;
  for (long i = 0; i < nsteps; ++i) {
    VecC k1 = f(x, y0);
    StepResult st = dp5_step(f, x, y0, k1, h, 1.0, 1.0);
    y0 = std::move(st.y);
    x = x0 + double(i + 1) * h;
  }
  return y0;
}

// ---------------------------------------------------------------------------

KatoTransporter::KatoTransporter(std::function<MatC(Cplx)> family, std::function<MatC(Cplx)> dfamily,
                                 KatoOptions opt)
    : family_(std::move(family)), dfamily_(std::move(dfamily)), opt_(opt) {}

void KatoTransporter::eig(Cplx lam, MatC& V, MatC& Winv, VecC& mu) const {
  const MatC B = family_(lam);
  Eigen::ComplexEigenSolver<MatC> es(B);
  require(es.info() == Eigen::Success, Err::Internal, "eigensolver failed");
  V = es.eigenvectors();
  mu = es.eigenvalues();
  Winv = V.inverse();
}

namespace {
std::vector<int> match_cluster(const VecC& mu, const std::vector<Cplx>& targets, double gap_floor) {
  std::vector<int> idx;
  std::vector<bool> used(mu.size(), false);
  for (const Cplx& t : targets) {
    int best = -1;
    double bd = 1e300;
    for (int i = 0; i < mu.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(mu[i] - t);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    require(best >= 0, Err::Internal, "cluster matching failed");
    used[best] = true;
    idx.push_back(best);
  }
  // cluster/complement separation guard
  double sep = 1e300;
  for (int i : idx)
    for (int j = 0; j < mu.size(); ++j)
      if (!used[j]) sep = std::min(sep, std::abs(mu[i] - mu[j]));
  require(mu.size() == int(idx.size()) || sep > gap_floor, Err::SplittingViolation,
          "eigenvalue cluster touches its complement (gap " + std::to_string(sep) + ")");
  return idx;
}
}  // namespace

MatC KatoTransporter::projection(Cplx lam, const std::vector<Cplx>& mu_guess, VecC* mu_out) const {
  MatC V, Winv;
  VecC mu;
  eig(lam, V, Winv, mu);
  const std::vector<int> idx = match_cluster(mu, mu_guess, opt_.gap_floor);
  const int d = int(V.rows());
  MatC P = MatC::Zero(d, d);
  for (int i : idx) P += V.col(i) * Winv.row(i);
  if (mu_out) {
    mu_out->resize(int(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) (*mu_out)[int(j)] = mu[idx[j]];
  }
  return P;
}

// P'(lam) via the eigen-decomposition formula: sum over cluster i, complement j
// of (v_j w_j^T B' v_i w_i^T + v_i w_i^T B' v_j w_j^T)/(mu_i - mu_j).
MatC KatoTransporter::dprojection(Cplx lam, const std::vector<Cplx>& mu_guess) const {
  MatC V, Winv;
  VecC mu;
  eig(lam, V, Winv, mu);
  const std::vector<int> idx = match_cluster(mu, mu_guess, opt_.gap_floor);
  std::vector<bool> incl(mu.size(), false);
  for (int i : idx) incl[i] = true;
  const MatC dB = dfamily_(lam);
  const int d = int(V.rows());
  MatC dP = MatC::Zero(d, d);
  for (int i = 0; i < mu.size(); ++i) {
    if (!incl[i]) continue;
    for (int j = 0; j < mu.size(); ++j) {
      if (incl[j]) continue;
      const Cplx den = mu[i] - mu[j];
      require(std::abs(den) > opt_.gap_floor, Err::SplittingViolation,
              "projection derivative: eigenvalue collision");
      const Cplx cij = (Winv.row(j) * dB * V.col(i))(0, 0) / den;
      const Cplx cji = (Winv.row(i) * dB * V.col(j))(0, 0) / den;
      dP += cij * (V.col(j) * Winv.row(i)) + cji * (V.col(i) * Winv.row(j));
    }
  }
  return dP;
}

ClusterFrame KatoTransporter::seed(Cplx lam, const std::vector<Cplx>& mu_targets) const {
  MatC V, Winv;
  VecC mu;
  eig(lam, V, Winv, mu);
  const std::vector<int> idx = match_cluster(mu, mu_targets, opt_.gap_floor);
  ClusterFrame out;
  out.lambda = lam;
  out.F.resize(V.rows(), int(idx.size()));
  out.mu.resize(int(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) {
    VecC col = V.col(idx[j]);
    fix_sign(col);
    out.F.col(int(j)) = col;
    out.mu[int(j)] = mu[idx[j]];
  }
  return out;
}

ClusterFrame KatoTransporter::seed_with_frame(Cplx lam, const std::vector<Cplx>& mu_targets,
                                              const MatC& F) const {
  ClusterFrame out = seed(lam, mu_targets);
  // verify span agreement, then adopt the prescribed columns
  const MatC P = projection(lam, mu_targets);
  const double resid = (P * F - F).norm() / std::max(F.norm(), 1e-300);
  require(resid < 1e-6, Err::Internal, "seed_with_frame: columns not in cluster subspace");
  out.F = P * F;
  return out;
}

ClusterFrame KatoTransporter::advance(const ClusterFrame& from, Cplx to) const {
  ClusterFrame cur = from;
  if (to == from.lambda) return cur;
  double remaining = 1.0;  // fraction of the segment still to cover
  Cplx a = from.lambda;
  const Cplx seg = to - from.lambda;
  double frac = opt_.step_rel;
  auto mu_vec = [&](const ClusterFrame& c) {
    return std::vector<Cplx>(c.mu.data(), c.mu.data() + c.mu.size());
  };
  int halvings = 0;
  while (remaining > 1e-14) {
    frac = std::min(frac, remaining);
    const Cplx b = a + seg * frac;
    // one RK4 step of F' = P'(lam) F along the segment, with step doubling
    auto rk4 = [&](const ClusterFrame& c, Cplx la, Cplx lb) {
      const Cplx h = lb - la;
      const std::vector<Cplx> guess = mu_vec(c);
      const MatC K1 = dprojection(la, guess) * c.F;
      const MatC K2 = dprojection(la + 0.5 * h, guess) * (c.F + 0.5 * h * K1);
      const MatC K3 = dprojection(la + 0.5 * h, guess) * (c.F + 0.5 * h * K2);
      const MatC K4 = dprojection(lb, guess) * (c.F + h * K3);
      ClusterFrame nf;
      nf.lambda = lb;
      nf.F = c.F + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      VecC mu_new;
      const MatC P = projection(lb, guess, &mu_new);
      nf.F = P * nf.F;  // remove O(h^5) drift off the subspace
      nf.mu = mu_new;
      return nf;
    };
    ClusterFrame full = rk4(cur, a, b);
    ClusterFrame half = rk4(rk4(cur, a, a + 0.5 * (b - a)), a + 0.5 * (b - a), b);
    const double err = (full.F - half.F).norm() / std::max(1.0, half.F.norm());
    if (err > opt_.proj_tol && halvings < opt_.max_halvings) {
      frac *= 0.5;
      ++halvings;
      continue;
    }
    cur = half;
    a = b;
    remaining -= frac;
    if (err < 0.01 * opt_.proj_tol) frac *= 2.0;
    halvings = 0;
  }
  cur.lambda = to;
  return cur;
}

ClusterFrame KatoTransporter::advance_path(const ClusterFrame& from, const std::vector<Cplx>& pts) const {
  ClusterFrame cur = from;
  for (const Cplx& p : pts) cur = advance(cur, p);
  return cur;
}

// ---------------------------------------------------------------------------

MatC RiccatiReduction::reduced_flow_fast(int i) const {
  return Th11.empty() ? MatC() : Th11[i] + Th12[i] * Phi2[i];
}

RiccatiReduction riccati_reduce(const RiccatiInput& in) {
  const int m = in.m, k = in.k;
  RiccatiReduction out;
  out.xs.resize(in.grid_n);
  const double h = (in.x1 - in.x0) / double(in.grid_n - 1);
  for (int i = 0; i < in.grid_n; ++i) out.xs[i] = in.x0 + i * h;

  // gap and delta/eta scan
  double sup_de = 0;
  out.eta.resize(in.grid_n);
  for (int i = 0; i < in.grid_n; ++i) {
    const MatC M1 = in.M1(out.xs[i]), M2 = in.M2(out.xs[i]);
    Eigen::SelfAdjointEigenSolver<MatC> e1(0.5 * (M1 + M1.adjoint()));
    Eigen::SelfAdjointEigenSolver<MatC> e2(0.5 * (M2 + M2.adjoint()));
    const double eta = e1.eigenvalues().minCoeff() - e2.eigenvalues().maxCoeff();
    require(eta > 0, Err::GapViolation, "riccati_reduce: spectral gap not positive");
    out.eta[i] = eta;
    sup_de = std::max(sup_de, in.delta(out.xs[i]) / eta);
  }
  out.sup_delta_over_eta = sup_de;
  require(sup_de <= 0.1 + 1e-12, Err::GapViolation,
          "riccati_reduce: sup(delta/eta) exceeds smallness threshold");

  // Graph equation Phi2' = M2 Phi2 - Phi2 M1 + delta(Th21 + Th22 Phi2 - Phi2 Th11 - Phi2 Th12 Phi2)
  auto field = [&](double x, const VecC& y) {
    MatC Phi2 = Eigen::Map<const MatC>(y.data(), k, m);
    const MatC Th = in.Theta(x);
    const MatC Th11 = Th.topLeftCorner(m, m), Th12 = Th.topRightCorner(m, k);
    const MatC Th21 = Th.bottomLeftCorner(k, m), Th22 = Th.bottomRightCorner(k, k);
    const double d = in.delta(x);
    MatC rhs = in.M2(x) * Phi2 - Phi2 * in.M1(x) +
               d * (Th21 + Th22 * Phi2 - Phi2 * Th11 - Phi2 * Th12 * Phi2);
    VecC v(k * m);
    Eigen::Map<MatC>(v.data(), k, m) = rhs;
    return v;
  };

  out.Phi2.resize(in.grid_n);
  out.Th11.resize(in.grid_n);
  out.Th12.resize(in.grid_n);
  VecC y = VecC::Zero(k * m);
  OdeOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  double sup = 0;
  ode_integrate_checkpoints(field, out.xs, y,
                            [&](int i, double x, const VecC& yy) {
                              out.Phi2[i] = Eigen::Map<const MatC>(yy.data(), k, m);
                              const MatC Th = in.Theta(x);
                              out.Th11[i] = Th.topLeftCorner(m, m);
                              out.Th12[i] = Th.topRightCorner(m, k);
                              const double nrm = out.Phi2[i].norm();
                              sup = std::max(sup, nrm);
                              require(nrm <= 10.0 * std::max(sup_de, 1e-300), Err::GapViolation,
                                      "riccati_reduce: graph transform exceeded 10*sup(delta/eta)");
                            },
                            opt);
  out.sup_phi2 = sup;
  out.C = (sup_de > 0) ? sup / sup_de : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

WindingAccum accumulate_argument(const std::vector<Cplx>& values, const std::vector<Cplx>* logs) {
  const size_t n = values.size();
  require(n >= 3, Err::InconclusiveWinding, "accumulate_argument: too few samples");
  WindingAccum out;
  double total = 0;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const Cplx a = values[i], b = values[j];
    require(std::abs(a) > 0 && std::abs(b) > 0, Err::ZeroOnContour,
            "accumulate_argument: zero sample on contour");
    Cplx ratio = b / a;
    if (logs) ratio *= std::exp(Cplx(0.0, ((*logs)[j] - (*logs)[i]).imag()));
    total += std::arg(ratio);
    // jump metric in physical terms: |D_b/D_a - 1| relative to smaller modulus
    double mod_ratio = std::abs(ratio);
    double jump = std::abs(ratio - 1.0) / std::min(1.0, mod_ratio);
    out.max_jump = std::max(out.max_jump, jump);
  }
  const double w = total / (2.0 * M_PI);
  out.winding = int(std::lround(w));
  out.residual = std::abs(w - double(out.winding));
  return out;
}

// ---------------------------------------------------------------------------

double brent(const std::function<double(double)>& f, double a, double b, double tol, int maxit) {
  double fa = f(a), fb = f(b);
  require(fa * fb <= 0, Err::Internal, "brent: root not bracketed");
  if (fa == 0) return a;
  if (fb == 0) return b;
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < maxit; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol,
                  int maxit) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < maxit && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

VecR newton_nd(const std::function<VecR(const VecR&)>& F, VecR x, double tol, int maxit) {
  const int n = int(x.size());
  for (int it = 0; it < maxit; ++it) {
    const VecR r = F(x);
    if (r.norm() < tol) return x;
    MatR J(n, n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      VecR xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (F(xp) - F(xm)) / (2 * h);
    }
    const VecR dx = J.partialPivLu().solve(r);
    double step = 1.0;
    const double r0 = r.norm();
    for (int ls = 0; ls < 40; ++ls) {
      const VecR xn = x - step * dx;
      if (F(xn).norm() < r0 * (1.0 - 0.25 * step) + 1e-300) {
        x = xn;
        break;
      }
      step *= 0.5;
      if (ls == 39) fail(Err::ProfileBranch, "newton_nd: line search failed");
    }
  }
  const VecR r = F(x);
  require(r.norm() < tol * 100, Err::ProfileBranch, "newton_nd: no convergence");
  return x;
}

VecR nelder_mead(const std::function<double(const VecR&)>& f, VecR x0, double scale, int maxit,
                 double ftol) {
  const int n = int(x0.size());
  std::vector<VecR> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 1; i <= n; ++i) pts[i][i - 1] += scale;
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  for (int it = 0; it < maxit; ++it) {
    std::vector<int> ord(n + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<VecR> ps(n + 1);
    std::vector<double> fs(n + 1);
    for (int i = 0; i <= n; ++i) {
      ps[i] = pts[ord[i]];
      fs[i] = fv[ord[i]];
    }
    pts = ps;
    fv = fs;
    if (std::abs(fv[n] - fv[0]) < ftol * (std::abs(fv[0]) + ftol)) break;
    VecR centroid = VecR::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= double(n);
    const VecR xr = centroid + (centroid - pts[n]);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const VecR xe = centroid + 2.0 * (centroid - pts[n]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      const VecR xc = centroid + 0.5 * (pts[n] - centroid);
      const double fc = f(xc);
      if (fc < fv[n]) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return pts[best];
}

}  // namespace radshock::num
