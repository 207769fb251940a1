#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "radshock/profile.hpp"

using namespace radshock;

namespace {

// Independent shooting oracle: classic fixed-step RK4 on the reduced (Q,R)
// system with U recovered by a plain damped Newton iteration on the first
// integral.  Entirely separate from the adaptive integrator and the
// fold-aware solver used by solve_profile.
struct Oracle {
  const ModelSystem& m;
  VecR c0;
  double g_minus;

  VecR newton_u(VecR u, double Qv) const {
    const VecR L = m.coupling();
    for (int it = 0; it < 50; ++it) {
      const VecR F = m.flux(u) + L * Qv - c0;
      if (F.cwiseAbs().maxCoeff() < 1e-14 * (1.0 + c0.cwiseAbs().maxCoeff())) break;
      const VecR du = m.jac_flux(u).partialPivLu().solve(F);
      u -= du;
    }
    return u;
  }

  // advance (Q,R) from xa to xb in nsub equal RK4 steps; warm holds U
  void advance(double xa, double xb, long nsub, double& Qv, double& Rv, VecR& warm) const {
    const double h = (xb - xa) / double(nsub);
    auto f = [&](double Q, double R, VecR& w) {
      w = newton_u(w, Q);
      const double G = m.rad_flux(w) - g_minus;
      return std::pair<double, double>(R + G, Q);
    };
    for (long i = 0; i < nsub; ++i) {
      VecR w = warm;
      auto [k1q, k1r] = f(Qv, Rv, w);
      auto [k2q, k2r] = f(Qv + 0.5 * h * k1q, Rv + 0.5 * h * k1r, w);
      auto [k3q, k3r] = f(Qv + 0.5 * h * k2q, Rv + 0.5 * h * k2r, w);
      auto [k4q, k4r] = f(Qv + h * k3q, Rv + h * k3r, w);
      Qv += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
      Rv += h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
      warm = w;
    }
  }
};

}  // namespace

TEST_CASE("hamer profile: sonic values, far field, first integral") {
  auto m = make_hamer();
  const ShockTriple s = hamer_shock(0.2);
  const Profile prof = solve_profile(m, s);

  // phase condition and first-integral value at the sonic point
  CHECK(std::abs(prof.sonic_state[0]) < 1e-12);
  CHECK(prof.q_sonic == doctest::Approx(0.005).epsilon(1e-10));
  CHECK(prof.grid[prof.sonic_index] == 0.0);

  const int N = int(prof.grid.size());
  CHECK((prof.U.col(0) - s.u_minus).norm() <= 1e-6 * s.epsilon);
  CHECK((prof.U.col(N - 1) - s.u_plus).norm() <= 1e-6 * s.epsilon);
  CHECK(prof.first_integral_residual() <= 1e-8);
  CHECK(std::abs(prof.Q[0]) <= 1e-6 * s.epsilon * s.epsilon);
  CHECK(std::abs(prof.Q[N - 1]) <= 1e-6 * s.epsilon * s.epsilon);

  // a_p strictly decreasing through 0
  for (int i = 0; i + 1 < N; ++i) CHECK(prof.ap[i + 1] < prof.ap[i] + 1e-9);
  CHECK(prof.ap[0] > 0);
  CHECK(prof.ap[N - 1] < 0);

  // grid contains +-1 exactly
  bool has_p1 = false, has_m1 = false;
  for (int i = 0; i < N; ++i) {
    if (prof.grid[i] == 1.0) has_p1 = true;
    if (prof.grid[i] == -1.0) has_m1 = true;
  }
  CHECK(has_p1);
  CHECK(has_m1);
}

TEST_CASE("hamer profile: matches independent RK4 shooting oracle") {
  auto m = make_hamer();
  const ShockTriple s = hamer_shock(0.2);
  const Profile prof = solve_profile(m, s);
  Oracle orc{*m, prof.first_integral_const, m->rad_flux(s.u_minus)};

  // left half: seed the oracle with the profile's far-field values
  double Qv = prof.Q[0], Rv = prof.P[0] - (m->rad_flux(prof.U.col(0)) - orc.g_minus);
  VecR warm = prof.U.col(0);
  double sup_q = 0, sup_u = 0;
  const double hstep = 1e-3;  // unit-test resolution; acceptance uses 1e-5
  for (int i = 1; i < prof.grid.size(); ++i) {
    const double xa = prof.grid[i - 1], xb = prof.grid[i];
    if (xb > -prof.series.radius) break;
    const long nsub = std::max(2L, std::lround((xb - xa) / hstep));
    orc.advance(xa, xb, nsub, Qv, Rv, warm);
    sup_q = std::max(sup_q, std::abs(Qv - prof.Q[i]));
    if (xb <= -0.01) sup_u = std::max(sup_u, (warm - prof.U.col(i)).norm());
  }
  CHECK(sup_q < 1e-7);
  CHECK(sup_u < 1e-7);
}

TEST_CASE("decay rate: linearization agrees with log-slope fit") {
  auto m = make_hamer();
  const Profile prof = solve_profile(m, hamer_shock(0.2));
  const DecayRate dr = decay_rate(prof);
  CHECK(dr.mismatch < 0.10);
  // exact scalar rates: eta solves eta^2 - b eta - 1 = 0 with b = -1/u_-
  const double b = -1.0 / 0.1;
  const double eta_exact = 0.5 * (b + std::sqrt(b * b + 4.0));
  CHECK(dr.eta_linearized == doctest::Approx(eta_exact).epsilon(1e-10));
}

TEST_CASE("decay rate: eta = O(eps) scaling over eps in {0.1, 0.2, 0.4}") {
  auto m = make_hamer();
  std::vector<double> etas;
  for (double eps : {0.1, 0.2, 0.4}) {
    const Profile prof = solve_profile(m, hamer_shock(eps));
    etas.push_back(prof.eta);
  }
  CHECK(std::abs(etas[0] / etas[1] - 0.5) < 0.25 * 0.5);
  CHECK(std::abs(etas[1] / etas[2] - 0.5) < 0.25 * 0.5);
}

TEST_CASE("degenerate shock is rejected before any fit") {
  auto m = make_hamer();
  ShockTriple s = hamer_shock(0.2);
  s.u_plus = s.u_minus;
  s.epsilon = 0.0;
  CHECK_THROWS_AS(solve_profile(m, s), Error);
}

TEST_CASE("translation invariance: different half-lengths give the same wave") {
  auto m = make_hamer();
  const ShockTriple s = hamer_shock(0.2);
  ProfileOptions o1, o2;
  const Profile p1 = solve_profile(m, s, o1);
  o2.X = p1.X * 1.17;
  const Profile p2 = solve_profile(m, s, o2);
  for (double x : {-40.0, -7.3, -1.0, -0.2, 0.0, 0.4, 3.1, 55.0}) {
    const auto a = p1.at(x);
    const auto b = p2.at(x);
    CHECK((a.u - b.u).norm() < 1e-8);
    CHECK(std::abs(a.q - b.q) < 1e-8);
  }
}

TEST_CASE("profile evaluation is consistent with stored nodes and smooth") {
  auto m = make_hamer();
  const Profile prof = solve_profile(m, hamer_shock(0.2));
  for (int i : {3, 100, prof.sonic_index + 1, int(prof.grid.size()) - 5}) {
    const auto pt = prof.at(prof.grid[i]);
    CHECK((pt.u - prof.U.col(i)).norm() < 1e-12);
    CHECK(std::abs(pt.q - prof.Q[i]) < 1e-12);
  }
  // between nodes: first-integral residual stays small
  const VecR L = m->coupling();
  for (double x : {-33.33, -2.71, 0.123, 8.88}) {
    const auto pt = prof.at(x);
    const VecR r = m->flux(pt.u) + L * pt.q - prof.first_integral_const;
    CHECK(r.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("euler profile: builds and satisfies the structural invariants") {
  auto m = make_euler_rad();
  const ShockTriple s = euler_shock(*m, 0.05);
  ProfileOptions opt;
  const Profile prof = solve_profile(m, s, opt);
  const int N = int(prof.grid.size());
  CHECK(prof.first_integral_residual() <= 1e-8);
  CHECK((prof.U.col(0) - s.u_minus).norm() <= 1e-6 * s.epsilon);
  CHECK((prof.U.col(N - 1) - s.u_plus).norm() <= 1e-6 * s.epsilon);
  CHECK(prof.ap[0] > 0);
  CHECK(prof.ap[N - 1] < 0);
  CHECK(prof.ap_prime0 < 0);
  const DecayRate dr = decay_rate(prof);
  CHECK(dr.mismatch < 0.2);
}
