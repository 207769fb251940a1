#pragma once

// Stationary radiative shock profile (U, Q) solving
//   f(U)_x + L Q_x = 0,   -Q_xx + Q + g(U)_x = 0,
// normalized so the sonic point a_p(U(0)) = 0 sits at x = 0.
//
// Construction: the first integral f(U) + L Q = f(u_-) reduces the problem to
// the planar system Q' = R + (g(U(Q)) - g(u_-)), R' = Q with U recovered
// algebraically from Q along the branch.  A power series centered at the
// sonic point covers |x| <= x0p; the two halves are produced by inward
// integration from +-X along the saddle connections, with the left/right
// amplitudes matched to the series.

#include <memory>

#include "radshock/model.hpp"

namespace radshock {

// Algebraic recovery of U from Q on the first-integral manifold.  The map has
// a quadratic fold at the sonic point; the solver splits the correction into
// the regular complement (Newton) and the r_p-coordinate (square root with
// side-dependent sign, clamped at the fold).
class FoldSolver {
 public:
  FoldSolver(const ModelSystem& m, VecR u_sonic, double q_sonic, VecR c0, int p);
  // side: +1 means the r_p-coordinate of U - U0 is positive on this branch.
  VecR solve(double Q, int side, const VecR& warm, bool* clamped = nullptr) const;
  const VecR& u_sonic() const { return u0_; }
  double q_sonic() const { return q0_; }
  double quad_coeff() const { return gamma_; }
  const VecR& r0() const { return r0_; }
  const VecR& l0() const { return l0_; }

 private:
  const ModelSystem& m_;
  VecR u0_, c0_;
  double q0_;
  int p_;
  VecR r0_, l0_;   // right/left null pair of A(U0), l0.r0 = 1
  MatR Z_;         // n x (n-1) complement basis of r0
  MatR Wc_;        // (n-1) x n complement basis of l0
  MatR coord_inv_; // [r0 Z]^{-1}
  double gamma_;   // 1/2 l0 D^2f(r0, r0)
};

struct ProfileSeries {
  VecSeries Ucoef;              // U_m
  std::vector<double> Qcoef;    // Q_m
  double radius = 0;            // validity radius x0p
  VecR eval_U(double x) const;
  VecR eval_Ux(double x) const;
  double eval_Q(double x) const;
  double eval_P(double x) const;   // Q'
  double eval_Px(double x) const;  // Q''
};

struct ProfileOptions {
  double X = 0;          // half-length; 0 = auto (15 / eta_est)
  int base_nodes = 4001;
  double tol = 1e-11;
  double eps_max = 0.5;  // largest amplitude the solver accepts
  int series_order = 14;
};

struct Profile {
  std::shared_ptr<const ModelSystem> model;
  ShockTriple shock;
  double X = 0;

  VecR grid;       // strictly increasing nodes on [-X, X], 0 and +-1 included
  MatR U;          // n x N states
  MatR Ux;         // n x N derivative
  VecR Q, P, Px;   // radiative flux, P = Q', Px = P'
  VecR ap;         // a_p(U(x_i))
  int sonic_index = -1;
  double eta = 0;             // far-field decay rate (min of the two sides)
  double eta_minus = 0, eta_plus = 0;
  VecR first_integral_const;  // f(u_-)
  double g_jump = 0;          // g(u_+) - g(u_-)

  ProfileSeries series;
  VecR sonic_state;
  double q_sonic = 0;
  double ap_prime0 = 0;  // a_p'(0) < 0

  struct Point {
    VecR u, ux;
    double q, p, px, ap;
  };
  Point at(double x) const;
  int node_index(double x) const;  // nearest grid index

  double first_integral_residual() const;  // max over nodes, scaled
  std::shared_ptr<FoldSolver> fold;        // shared algebraic recovery
};

Profile solve_profile(std::shared_ptr<const ModelSystem> model, const ShockTriple& shock,
                      const ProfileOptions& opt = {});

struct DecayRate {
  double eta_linearized = 0;
  double eta_fit = 0;
  double mismatch = 0;  // relative
};
// Decay rate from the endpoint linearization, cross-checked against the
// log-slope fit of |U(x) - u_pm|; mismatch > 20% rejects the profile.
DecayRate decay_rate(const Profile& prof);

// Endpoint linearization rates of the reduced (Q,R) system; eta_minus is the
// unstable rate at u_-, eta_plus the |stable| rate at u_+.
void endpoint_rates(const ModelSystem& m, const ShockTriple& s, double& eta_minus,
                    double& eta_plus);

}  // namespace radshock
