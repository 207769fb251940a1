#include "radshock/profile.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "radshock/numerics.hpp"

namespace radshock {

namespace {

// Right/left null pair of A(u0) for the field whose eigenvalue vanishes.
void null_pair(const ModelSystem& m, const VecR& u0, int p, VecR& r0, VecR& l0) {
  const CharField cf = char_field(m, u0, p);
  r0 = cf.r;
  l0 = cf.l;  // already normalized l0.r0 = 1
}

}  // namespace

FoldSolver::FoldSolver(const ModelSystem& m, VecR u_sonic, double q_sonic, VecR c0, int p)
    : m_(m), u0_(std::move(u_sonic)), c0_(std::move(c0)), q0_(q_sonic), p_(p) {
  const int n = m_.dim();
  null_pair(m_, u0_, p_, r0_, l0_);
  // complement bases
  if (n > 1) {
    Eigen::JacobiSVD<MatR> svr(r0_.transpose(), Eigen::ComputeFullV);
    Z_ = svr.matrixV().rightCols(n - 1);
    Eigen::JacobiSVD<MatR> svl(l0_.transpose(), Eigen::ComputeFullV);
    Wc_ = svl.matrixV().rightCols(n - 1).transpose();
  }
  MatR T(n, n);
  T.col(0) = r0_;
  if (n > 1) T.rightCols(n - 1) = Z_;
  coord_inv_ = T.inverse();
  // quadratic coefficient of l0 . f(U0 + t r0)
  VecSeries path = {u0_, r0_, VecR::Zero(n)};
  const VecSeries fs = m_.flux_series(path);
  gamma_ = l0_.dot(fs[2]);
  require(std::abs(gamma_) > 1e-12, Err::Degeneracy,
          "fold solver: vanishing quadratic coefficient (genuine nonlinearity fails)");
}

VecR FoldSolver::solve(double Q, int side, const VecR& warm, bool* clamped) const {
  const int n = m_.dim();
  const VecR L = m_.coupling();
  const double scale = 1.0 + c0_.cwiseAbs().maxCoeff();
  VecR coords = coord_inv_ * (warm - u0_);
  double s = coords[0];
  if (side * s < 0) s = 0.0;
  VecR w = (n > 1) ? VecR(coords.tail(n - 1)) : VecR();
  bool cl = false;
  VecR U = u0_ + s * r0_;
  if (n > 1) U += Z_ * w;
  for (int it = 0; it < 12; ++it) {
    VecR F = m_.flux(U) + L * Q - c0_;
    if (n > 1) {
      for (int inner = 0; inner < 3; ++inner) {
        const VecR rc = Wc_ * F;
        if (rc.norm() < 1e-15 * scale) break;
        const MatR J = Wc_ * m_.jac_flux(U) * Z_;
        w -= J.partialPivLu().solve(rc);
        U = u0_ + s * r0_ + Z_ * w;
        F = m_.flux(U) + L * Q - c0_;
      }
    }
    const double beta = l0_.dot(F) - gamma_ * s * s;
    const double s2 = -beta / gamma_;
    double snew;
    if (s2 <= 0) {
      snew = 0.0;
      cl = true;
    } else {
      snew = side * std::sqrt(s2);
      cl = false;
    }
    const bool s_conv = std::abs(snew - s) < 1e-14 * (1.0 + std::abs(snew));
    s = snew;
    U = u0_ + s * r0_;
    if (n > 1) U += Z_ * w;
    if (s_conv && it > 0) break;
  }
  if (clamped) *clamped = cl;
  return U;
}

void endpoint_rates(const ModelSystem& m, const ShockTriple& s, double& eta_minus,
                    double& eta_plus) {
  auto slope = [&](const VecR& u) {
    const VecR z = m.jac_flux(u).partialPivLu().solve(m.coupling());
    return -(m.jac_rad(u) * z)(0);  // d(g(U(Q)))/dQ at the endpoint
  };
  const double bm = slope(s.u_minus), bp = slope(s.u_plus);
  eta_minus = 0.5 * (bm + std::sqrt(bm * bm + 4.0));      // unstable rate at u-
  eta_plus = -0.5 * (bp - std::sqrt(bp * bp + 4.0));      // |stable| rate at u+
  require(eta_minus > 0 && eta_plus > 0, Err::ProfileBranch,
          "endpoint linearization produced no saddle rates");
}

namespace {

struct SonicPoint {
  VecR U0;
  double Q0;
};

SonicPoint find_sonic(const ModelSystem& m, const ShockTriple& s, const VecR& c0) {
  const int n = m.dim();
  const VecR L = m.coupling();
  VecR x0(n + 1);
  x0.head(n) = 0.5 * (s.u_minus + s.u_plus);
  x0[n] = L.dot(c0 - m.flux(x0.head(n))) / L.squaredNorm();
  const VecR sol = num::newton_nd(
      [&](const VecR& x) {
        VecR F(n + 1);
        const VecR u = x.head(n);
        F.head(n) = m.flux(u) + L * x[n] - c0;
        F[n] = char_field(m, u, s.p).a[s.p - 1];
        return F;
      },
      x0, 1e-13);
  return {sol.head(n), sol[n]};
}

struct SeriesBuild {
  ProfileSeries series;
  double chi = 0;  // grad a_p . r_p at the sonic state
};

SeriesBuild build_series(const ModelSystem& m, const ShockTriple& sh, const SonicPoint& sp,
                         const VecR& c0, int M) {
  const int n = m.dim();
  const VecR L = m.coupling();
  VecR r0, l0;
  null_pair(m, sp.U0, sh.p, r0, l0);

  // chi = grad a_p . r0 by central differences along r0
  const double hgr = 1e-6;
  const double chi = (char_field(m, sp.U0 + hgr * r0, sh.p).a[sh.p - 1] -
                      char_field(m, sp.U0 - hgr * r0, sh.p).a[sh.p - 1]) /
                     (2 * hgr);
  require(std::abs(chi) > 1e-10, Err::Degeneracy, "profile series: (H2) fails at sonic state");

  VecSeries Uc(M + 3, VecR::Zero(n));
  std::vector<double> Qc(M + 3, 0.0);
  Uc[0] = sp.U0;
  Qc[0] = sp.Q0;
  Qc[1] = 0.0;

  // bordered gauge solve for A0 x = rhs (kernel r0, gauge r0^T x = 0)
  const MatR A0 = m.jac_flux(sp.U0);
  MatR Bord = MatR::Zero(n + 1, n + 1);
  Bord.topLeftCorner(n, n) = A0;
  Bord.topRightCorner(n, 1) = r0;
  Bord.bottomLeftCorner(1, n) = r0.transpose();
  Eigen::PartialPivLU<MatR> lu(Bord);
  auto gauge_solve = [&](const VecR& rhs) {
    VecR b(n + 1);
    b.head(n) = rhs;
    b[n] = 0;
    return VecR(lu.solve(b).head(n));
  };

  VecR Uhat_prev = VecR::Zero(n);  // gauge part of the pending coefficient U_{m-1}
  for (int mm = 2; mm <= M + 2; ++mm) {
    auto eval = [&](double sval, double* Qm_out) {
      Uc[mm - 1] = Uhat_prev + sval * r0;
      VecSeries upath(Uc.begin(), Uc.begin() + mm);  // orders 0..mm-1
      const auto gs = m.rad_series(upath);
      const double Gm1 = gs[mm - 1];
      const double Qm = (Qc[mm - 2] + (mm - 1) * Gm1) / (double(mm) * (mm - 1));
      VecSeries fpath(Uc.begin(), Uc.begin() + mm);
      fpath.push_back(VecR::Zero(n));  // U_m = 0 to expose the inhomogeneity
      const auto fs = m.flux_series(fpath);
      if (Qm_out) *Qm_out = Qm;
      return l0.dot(fs[mm] + L * Qm);
    };
    double sstar = 0;
    if (mm == 2) {
      const double h = std::max(std::abs(sp.Q0), 1e-4);
      const double rm = eval(-h, nullptr), r0v = eval(0, nullptr), rp = eval(h, nullptr);
      const double a2 = (rp + rm - 2 * r0v) / (2 * h * h);
      const double a1 = (rp - rm) / (2 * h);
      const double a0 = r0v;
      const double disc = a1 * a1 - 4 * a2 * a0;
      require(disc >= 0 && std::abs(a2) > 1e-14, Err::ProfileBranch,
              "profile series: sonic crossing quadratic has no real slope");
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (a1 + (a1 >= 0 ? sq : -sq));
      double root1 = q / a2, root2 = (std::abs(q) > 0) ? a0 / q : 0.0;
      // monotonicity (a_p)_x < 0 requires s * chi < 0
      std::vector<double> ok;
      for (double r : {root1, root2})
        if (r * chi < 0) ok.push_back(r);
      require(!ok.empty(), Err::ProfileBranch,
              "profile series: no sonic slope with decreasing a_p");
      sstar = *std::min_element(ok.begin(), ok.end(),
                                [](double a, double b) { return std::abs(a) < std::abs(b); });
    } else {
      const double f0 = eval(0, nullptr), f1 = eval(1.0, nullptr);
      require(std::abs(f1 - f0) > 1e-300, Err::ProfileBranch, "profile series: singular recurrence");
      sstar = -f0 / (f1 - f0);
    }
    double Qm = 0;
    eval(sstar, &Qm);  // finalizes Uc[mm-1]
    Qc[mm] = Qm;
    // U_m gauge part from A0 U_m = -(F_m + L Q_m)
    VecSeries fpath(Uc.begin(), Uc.begin() + mm);
    fpath.push_back(VecR::Zero(n));
    const auto fs = m.flux_series(fpath);
    const VecR rhs = -(fs[mm] + L * Qm);
    Uhat_prev = gauge_solve(rhs);
    if (mm <= M + 1) Uc[mm] = Uhat_prev;
  }

  SeriesBuild out;
  out.series.Ucoef.assign(Uc.begin(), Uc.begin() + M + 1);
  out.series.Qcoef.assign(Qc.begin(), Qc.begin() + M + 1);
  out.chi = chi;
  return out;
}

double series_residual(const ModelSystem& m, const ProfileSeries& ser, const VecR& c0, double x) {
  const VecR L = m.coupling();
  const VecR U = ser.eval_U(x);
  const VecR Ux = ser.eval_Ux(x);
  const double scale = 1.0 + c0.cwiseAbs().maxCoeff();
  const double r1 = (m.flux(U) + L * ser.eval_Q(x) - c0).cwiseAbs().maxCoeff() / scale;
  const double r2 = std::abs(-ser.eval_Px(x) + ser.eval_Q(x) + (m.jac_rad(U) * Ux)(0)) / scale;
  return std::max(r1, r2);
}

}  // namespace

VecR ProfileSeries::eval_U(double x) const {
  VecR acc = VecR::Zero(Ucoef[0].size());
  for (int k = int(Ucoef.size()) - 1; k >= 0; --k) acc = acc * x + Ucoef[size_t(k)];
  return acc;
}
VecR ProfileSeries::eval_Ux(double x) const {
  VecR acc = VecR::Zero(Ucoef[0].size());
  for (int k = int(Ucoef.size()) - 1; k >= 1; --k) acc = acc * x + double(k) * Ucoef[size_t(k)];
  return acc;
}
double ProfileSeries::eval_Q(double x) const {
  double acc = 0;
  for (int k = int(Qcoef.size()) - 1; k >= 0; --k) acc = acc * x + Qcoef[size_t(k)];
  return acc;
}
double ProfileSeries::eval_P(double x) const {
  double acc = 0;
  for (int k = int(Qcoef.size()) - 1; k >= 1; --k) acc = acc * x + double(k) * Qcoef[size_t(k)];
  return acc;
}
double ProfileSeries::eval_Px(double x) const {
  double acc = 0;
  for (int k = int(Qcoef.size()) - 1; k >= 2; --k)
    acc = acc * x + double(k) * double(k - 1) * Qcoef[size_t(k)];
  return acc;
}

namespace {

std::vector<double> build_grid(double X, int base_nodes, double w_ref, double x0p) {
  std::vector<double> specials = {-X, -1.0, -x0p, 0.0, x0p, 1.0, X};
  std::sort(specials.begin(), specials.end());
  specials.erase(std::unique(specials.begin(), specials.end()), specials.end());

  const double h0 = 2 * X / double(base_nodes - 1);
  const double hr = h0 / 8.0;
  const double gap = hr / 4.0;
  struct Nd {
    double x;
    bool special;
  };
  std::vector<Nd> all;
  for (double s : specials) all.push_back({s, true});
  for (int i = 0; i < base_nodes; ++i) all.push_back({-X + i * h0, false});
  const long nr = std::lround(2 * w_ref / hr);
  for (long i = 0; i <= nr; ++i) all.push_back({-w_ref + double(i) * hr, false});
  std::sort(all.begin(), all.end(), [](const Nd& a, const Nd& b) {
    return a.x < b.x || (a.x == b.x && a.special && !b.special);
  });
  std::vector<double> out;
  std::vector<bool> flag;
  for (const Nd& nd : all) {
    if (!out.empty() && nd.x - out.back() < gap) {
      if (nd.special && !flag.back()) {
        out.back() = nd.x;  // a special displaces a nearby regular node
        flag.back() = true;
      } else if (nd.special && flag.back() && nd.x > out.back()) {
        out.push_back(nd.x);
        flag.push_back(true);
      }
      continue;
    }
    out.push_back(nd.x);
    flag.push_back(nd.special);
  }
  return out;
}

}  // namespace

Profile solve_profile(std::shared_ptr<const ModelSystem> model, const ShockTriple& shock,
                      const ProfileOptions& opt) {
  const ModelSystem& m = *model;
  const int n = m.dim();
  require((shock.u_plus - shock.u_minus).norm() > 1e-12, Err::Domain,
          "profile: degenerate shock (u_+ = u_-)");
  require(shock.epsilon <= opt.eps_max, Err::Domain,
          "profile: amplitude exceeds the configured bound");
  require(check_rankine_hugoniot(m, shock) <
              1e-10 * m.flux(shock.u_minus).cwiseAbs().maxCoeff() + 1e-12,
          Err::Domain, "profile: Rankine-Hugoniot residual too large");

  const VecR L = m.coupling();
  const VecR c0 = m.flux(shock.u_minus);

  double eta_m, eta_p;
  endpoint_rates(m, shock, eta_m, eta_p);
  const double eta_est = std::min(eta_m, eta_p);
  const double X = (opt.X > 0) ? opt.X : 15.0 / eta_est;
  require(X > 2.0, Err::DomainTooSmall, "profile: domain must contain |x| <= 1");

  const SonicPoint sp = find_sonic(m, shock, c0);
  const SeriesBuild sb = build_series(m, shock, sp, c0, opt.series_order);

  // series validity radius
  double x0p = std::min(1.0, 0.5 / eta_est);
  x0p = std::min(x0p, 0.4 * X);
  const double ser_tol = 1e-11;
  int shrink = 0;
  while (std::max(series_residual(m, sb.series, c0, x0p),
                  series_residual(m, sb.series, c0, -x0p)) > ser_tol) {
    x0p *= 0.75;
    require(++shrink < 40, Err::ProfileBranch, "profile: series radius collapsed");
  }

  Profile prof;
  prof.model = model;
  prof.shock = shock;
  prof.X = X;
  prof.eta_minus = eta_m;
  prof.eta_plus = eta_p;
  prof.eta = eta_est;
  prof.first_integral_const = c0;
  prof.g_jump = m.rad_flux(shock.u_plus) - m.rad_flux(shock.u_minus);
  prof.series = sb.series;
  prof.series.radius = x0p;
  prof.sonic_state = sp.U0;
  prof.q_sonic = sp.Q0;
  // a_p'(0) = chi * s1 with s1 the r0-coefficient of U_1
  {
    VecR r0, l0;
    null_pair(m, sp.U0, shock.p, r0, l0);
    prof.ap_prime0 = sb.chi * r0.dot(sb.series.Ucoef[1]);
  }
  require(prof.ap_prime0 < 0, Err::ProfileBranch, "profile: a_p not decreasing at the sonic point");

  prof.fold = std::make_shared<FoldSolver>(m, sp.U0, sp.Q0, c0, shock.p);
  auto side_of = [&](const VecR& u) {
    VecR r0, l0;
    null_pair(m, sp.U0, shock.p, r0, l0);
    // r0-coordinate sign of u - U0
    const double c = r0.dot(u - sp.U0);
    return (c >= 0) ? +1 : -1;
  };
  const int side_left = side_of(shock.u_minus);
  const int side_right = side_of(shock.u_plus);
  require(side_left * side_right < 0, Err::ProfileBranch,
          "profile: endpoints on the same side of the sonic state");

  // planar field with warm-started algebraic recovery
  const double g_minus = m.rad_flux(shock.u_minus);
  auto make_field = [&](int side, VecR warm0) {
    auto warm = std::make_shared<VecR>(std::move(warm0));
    return [&m, L, side, warm, this_fold = prof.fold, g_minus](double, const VecC& y) {
      const double Qv = y[0].real(), Rv = y[1].real();
      const VecR U = this_fold->solve(Qv, side, *warm);
      *warm = U;
      const double G = m.rad_flux(U) - g_minus;
      VecC dy(2);
      dy[0] = Cplx(Rv + G, 0);
      dy[1] = Cplx(Qv, 0);
      return dy;
    };
  };

  num::OdeOptions oopt;
  oopt.rtol = 1e-12;
  oopt.atol = 1e-14;

  // left: from -X to -x0p, amplitude delta on the unstable direction of u_-
  const double targetQL = prof.series.eval_Q(-x0p);
  const double vQL = eta_m;  // eigenvector (mu, 1)
  auto shootL = [&](double delta) {
    VecC y0(2);
    y0[0] = Cplx(delta * vQL, 0);
    y0[1] = Cplx(delta, 0);
    const VecC yf = num::ode_integrate(make_field(side_left, shock.u_minus), -X, -x0p, y0, oopt);
    return yf;
  };
  const double d0L = targetQL / (vQL * std::exp(eta_m * (X - x0p)));
  auto secant = [&](const std::function<double(double)>& fz, double z0, double scale) {
    double z1 = z0 + 0.05;
    double f0 = fz(z0), f1 = fz(z1);
    for (int it = 0; it < 40; ++it) {
      if (std::abs(f1) < 1e-11 * (std::abs(scale) + 1e-12)) return z1;
      const double dz = f1 * (z1 - z0) / (f1 - f0);
      z0 = z1;
      f0 = f1;
      z1 -= std::clamp(dz, -1.0, 1.0);
      f1 = fz(z1);
    }
    require(std::abs(f1) < 1e-8 * (std::abs(scale) + 1e-9), Err::Matching,
            "profile: saddle-amplitude match failed");
    return z1;
  };
  const double sgnL = (d0L >= 0) ? 1.0 : -1.0;
  const double zL =
      secant([&](double z) { return shootL(sgnL * std::exp(z))[0].real() - targetQL; },
             std::log(std::abs(d0L)), targetQL);
  const double deltaL = sgnL * std::exp(zL);

  // right: from +X down to +x0p around the fixed point (0, -[g])
  const double targetQR = prof.series.eval_Q(x0p);
  const double muR = -eta_p;  // stable eigenvalue at u_+
  auto shootR = [&](double delta) {
    VecC y0(2);
    y0[0] = Cplx(delta * muR, 0);
    y0[1] = Cplx(-prof.g_jump + delta, 0);
    return num::ode_integrate(make_field(side_right, shock.u_plus), X, x0p, y0, oopt);
  };
  const double d0R = targetQR / (muR * std::exp(eta_p * (X - x0p)));
  const double sgnR = (d0R >= 0) ? 1.0 : -1.0;
  const double zR =
      secant([&](double z) { return shootR(sgnR * std::exp(z))[0].real() - targetQR; },
             std::log(std::abs(d0R)), targetQR);
  const double deltaR = sgnR * std::exp(zR);

  // assemble the grid and fill node data
  const double w_ref = std::min(0.45 * X, std::max(0.6 * std::min(1.0, 1.0 / eta_est), 1.15 * x0p));
  const std::vector<double> nodes = build_grid(X, opt.base_nodes, w_ref, x0p);
  const int N = int(nodes.size());
  prof.grid = Eigen::Map<const VecR>(nodes.data(), N);
  prof.U.resize(n, N);
  prof.Ux.resize(n, N);
  prof.Q.resize(N);
  prof.P.resize(N);
  prof.Px.resize(N);
  prof.ap.resize(N);

  auto fill_node = [&](int i, const VecR& U, double Qv, double Pv) {
    const MatR A = m.jac_flux(U);
    const VecR Uxv = -A.partialPivLu().solve(L * Pv);
    prof.U.col(i) = U;
    prof.Ux.col(i) = Uxv;
    prof.Q[i] = Qv;
    prof.P[i] = Pv;
    prof.Px[i] = Qv + (m.jac_rad(U) * Uxv)(0);
    prof.ap[i] = char_field(m, U, shock.p).a[shock.p - 1];
  };

  // series region (including the boundary nodes +-x0p)
  for (int i = 0; i < N; ++i) {
    const double x = nodes[size_t(i)];
    if (std::abs(x) <= x0p + 1e-14) {
      const VecR U = prof.series.eval_U(x);
      const VecR Uxv = prof.series.eval_Ux(x);
      prof.U.col(i) = U;
      prof.Ux.col(i) = Uxv;
      prof.Q[i] = prof.series.eval_Q(x);
      prof.P[i] = prof.series.eval_P(x);
      prof.Px[i] = prof.series.eval_Px(x);
      prof.ap[i] = char_field(m, U, shock.p).a[shock.p - 1];
      if (x == 0.0) prof.sonic_index = i;
    }
  }
  require(prof.sonic_index >= 0, Err::Internal, "profile: sonic node missing from grid");

  // left checkpoints
  {
    std::vector<double> xs;
    for (int i = 0; i < N && nodes[size_t(i)] < -x0p - 1e-14; ++i) xs.push_back(nodes[size_t(i)]);
    xs.push_back(-x0p);
    VecC y0(2);
    y0[0] = Cplx(deltaL * vQL, 0);
    y0[1] = Cplx(deltaL, 0);
    VecR warm = shock.u_minus;
    num::ode_integrate_checkpoints(
        make_field(side_left, shock.u_minus), xs, y0,
        [&](int k, double x, const VecC& y) {
          const double Qv = y[0].real(), Rv = y[1].real();
          if (x <= -x0p - 1e-14) {
            bool cl = false;
            const VecR U = prof.fold->solve(Qv, side_left, warm, &cl);
            require(!cl, Err::ProfileBranch, "profile: fold clamp outside the series region");
            warm = U;
            const double G = m.rad_flux(U) - g_minus;
            fill_node(k, U, Qv, Rv + G);
          } else {
            // matching diagnostic at -x0p
            const double dq = std::abs(Qv - prof.series.eval_Q(-x0p));
            const double Rser = prof.series.eval_P(-x0p) -
                                (m.rad_flux(prof.series.eval_U(-x0p)) - g_minus);
            require(dq < 1e-8 * (1 + std::abs(sp.Q0)) && std::abs(Rv - Rser) < 1e-7,
                    Err::Matching, "profile: left shoot does not match the sonic series");
          }
        },
        oopt);
  }
  // right checkpoints (traversed from +X down to +x0p)
  {
    std::vector<double> xs;
    for (int i = N - 1; i >= 0 && nodes[size_t(i)] > x0p + 1e-14; --i) xs.push_back(nodes[size_t(i)]);
    std::vector<int> node_ids;
    for (int i = N - 1; i >= 0 && nodes[size_t(i)] > x0p + 1e-14; --i) node_ids.push_back(i);
    xs.push_back(x0p);
    VecC y0(2);
    y0[0] = Cplx(deltaR * muR, 0);
    y0[1] = Cplx(-prof.g_jump + deltaR, 0);
    VecR warm = shock.u_plus;
    num::ode_integrate_checkpoints(
        make_field(side_right, shock.u_plus), xs, y0,
        [&](int k, double x, const VecC& y) {
          const double Qv = y[0].real(), Rv = y[1].real();
          if (x > x0p + 1e-14) {
            bool cl = false;
            const VecR U = prof.fold->solve(Qv, side_right, warm, &cl);
            require(!cl, Err::ProfileBranch, "profile: fold clamp outside the series region");
            warm = U;
            const double G = m.rad_flux(U) - g_minus;
            fill_node(node_ids[size_t(k)], U, Qv, Rv + G);
          } else {
            const double dq = std::abs(Qv - prof.series.eval_Q(x0p));
            const double Rser = prof.series.eval_P(x0p) -
                                (m.rad_flux(prof.series.eval_U(x0p)) - g_minus);
            require(dq < 1e-8 * (1 + std::abs(sp.Q0)) && std::abs(Rv - Rser) < 1e-7,
                    Err::Matching, "profile: right shoot does not match the sonic series");
          }
        },
        oopt);
  }

  // far-field and monotonicity checks
  require((prof.U.col(0) - shock.u_minus).norm() <= 1e-6 * shock.epsilon, Err::DomainTooSmall,
          "profile: left far field not converged (increase X)");
  require((prof.U.col(N - 1) - shock.u_plus).norm() <= 1e-6 * shock.epsilon, Err::DomainTooSmall,
          "profile: right far field not converged (increase X)");
  for (int i = 0; i + 1 < N; ++i)
    require(prof.ap[i + 1] < prof.ap[i] + 1e-9 * std::max(1.0, std::abs(prof.ap[i])),
            Err::ProfileBranch, "profile: a_p not monotonically decreasing");
  require(prof.ap[0] > 0 && prof.ap[N - 1] < 0, Err::ProfileBranch,
          "profile: a_p does not change sign across the domain");

  return prof;
}

int Profile::node_index(double x) const {
  const int N = int(grid.size());
  int lo = 0, hi = N - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (grid[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  return (std::abs(grid[lo] - x) <= std::abs(grid[hi] - x)) ? lo : hi;
}

Profile::Point Profile::at(double x) const {
  Point pt;
  if (std::abs(x) <= series.radius) {
    pt.u = series.eval_U(x);
    pt.ux = series.eval_Ux(x);
    pt.q = series.eval_Q(x);
    pt.p = series.eval_P(x);
    pt.px = series.eval_Px(x);
    pt.ap = char_field(*model, pt.u, shock.p).a[shock.p - 1];
    return pt;
  }
  const int N = int(grid.size());
  require(x >= grid[0] - 1e-12 && x <= grid[N - 1] + 1e-12, Err::Domain,
          "profile evaluation outside the grid");
  int lo = 0, hi = N - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (grid[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  const double h = grid[hi] - grid[lo];
  const double t = (x - grid[lo]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double d00 = (6 * t * t - 6 * t) / h, d10 = 3 * t * t - 4 * t + 1;
  const double d01 = (6 * t - 6 * t * t) / h, d11 = 3 * t * t - 2 * t;
  auto hermite = [&](double fa, double fb, double da, double db) {
    return h00 * fa + h10 * h * da + h01 * fb + h11 * h * db;
  };
  auto hermite_d = [&](double fa, double fb, double da, double db) {
    return d00 * fa + d10 * da + d01 * fb + d11 * db;
  };
  const int n = int(U.rows());
  pt.u.resize(n);
  pt.ux.resize(n);
  for (int c = 0; c < n; ++c) {
    pt.u[c] = hermite(U(c, lo), U(c, hi), Ux(c, lo), Ux(c, hi));
    pt.ux[c] = hermite_d(U(c, lo), U(c, hi), Ux(c, lo), Ux(c, hi));
  }
  pt.q = hermite(Q[lo], Q[hi], P[lo], P[hi]);
  pt.p = hermite(P[lo], P[hi], Px[lo], Px[hi]);
  const double apd_lo = (hi >= 2) ? (ap[hi] - ap[lo - (lo > 0 ? 1 : 0)]) / (grid[hi] - grid[lo - (lo > 0 ? 1 : 0)])
                                  : (ap[hi] - ap[lo]) / h;
  pt.px = hermite(Px[lo], Px[hi], (Px[hi] - Px[lo]) / h, (Px[hi] - Px[lo]) / h);
  pt.ap = hermite(ap[lo], ap[hi], apd_lo, apd_lo);
  return pt;
}

double Profile::first_integral_residual() const {
  const VecR L = model->coupling();
  double worst = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const VecR r = model->flux(U.col(i)) + L * Q[i] - first_integral_const;
    for (int c = 0; c < r.size(); ++c)
      worst = std::max(worst, std::abs(r[c]) / (std::abs(first_integral_const[c]) + 1.0));
  }
  return worst;
}

DecayRate decay_rate(const Profile& prof) {
  const ShockTriple& s = prof.shock;
  require((s.u_plus - s.u_minus).norm() > 1e-12, Err::Domain, "decay_rate: degenerate input");
  DecayRate out;
  out.eta_linearized = std::min(prof.eta_minus, prof.eta_plus);

  auto side_fit = [&](bool left) {
    std::vector<double> xs, ys;
    const VecR uref = left ? s.u_minus : s.u_plus;
    for (int i = 0; i < prof.grid.size(); ++i) {
      const double x = prof.grid[i];
      if (left && (x < -prof.X * 0.98 || x > -prof.X * 0.45)) continue;
      if (!left && (x > prof.X * 0.98 || x < prof.X * 0.45)) continue;
      const double d = (prof.U.col(i) - uref).norm();
      if (d <= 0) continue;
      xs.push_back(x);
      ys.push_back(std::log(d));
    }
    return fit_line(xs, ys).b;
  };
  const double sl = side_fit(true);    // ~ +eta_minus
  const double sr = -side_fit(false);  // ~ +eta_plus
  out.eta_fit = std::min(sl, sr);
  out.mismatch = std::abs(out.eta_fit - out.eta_linearized) /
                 std::max(out.eta_linearized, 1e-300);
  require(out.mismatch <= 0.2, Err::ProfileBranch,
          "decay_rate: log-slope fit disagrees with the endpoint linearization");
  return out;
}

}  // namespace radshock
