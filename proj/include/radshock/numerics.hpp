#pragma once

// Shared numerical kernels: adaptive complex ODE integration (Dormand-Prince
// 5(4)), analytic eigenframe transport along lambda-paths, invariant-graph
// (Riccati) reduction for slowly varying block systems, argument-principle
// accumulation, and small optimization/root helpers.

#include "radshock/common.hpp"

namespace radshock::num {

using Field = std::function<VecC(double, const VecC&)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 0.0;  // 0 = auto
  double hmin = 1e-13;
  long max_steps = 50'000'000;
};

// Adaptive integration from x0 to x1 (either direction).
VecC ode_integrate(const Field& f, double x0, double x1, VecC y0, const OdeOptions& opt = {});

// Integrate hitting every checkpoint exactly; on_node(i, xs[i], y) is invoked
// for every checkpoint including the first.
void ode_integrate_checkpoints(const Field& f, const std::vector<double>& xs, VecC y0,
                               const std::function<void(int, double, const VecC&)>& on_node,
                               const OdeOptions& opt = {});

// Fixed-step Dormand-Prince (order-5 stepping, no error control).
VecC ode_integrate_fixed(const Field& f, double x0, double x1, VecC y0, long nsteps);

// ---------------------------------------------------------------------------
// Analytic eigenframe transport (Kato ODE F' = P'(lam) P(lam) F).

struct ClusterFrame {
  Cplx lambda;
  MatC F;   // d x k frame spanning the invariant subspace, analytic in lambda
  VecC mu;  // k continued eigenvalues (labels follow the transport)
};

struct KatoOptions {
  double step_rel = 0.02;    // max step as fraction of remaining path leg
  double proj_tol = 1e-11;   // step-doubling error target on the frame
  double gap_floor = 1e-10;  // cluster/complement separation guard
  int max_halvings = 40;
};

class KatoTransporter {
 public:
  // family(lam) is the matrix whose invariant subspace is transported;
  // dfamily(lam) its analytic lambda-derivative.
  KatoTransporter(std::function<MatC(Cplx)> family, std::function<MatC(Cplx)> dfamily,
                  KatoOptions opt = {});

  // Build a frame at lam from explicit eigenvalue targets: picks the
  // eigenvalues of family(lam) nearest each target (injectively).
  ClusterFrame seed(Cplx lam, const std::vector<Cplx>& mu_targets) const;
  // Same, but replaces the eigen-basis with prescribed analytic columns
  // (must span the same subspace).
  ClusterFrame seed_with_frame(Cplx lam, const std::vector<Cplx>& mu_targets, const MatC& F) const;

  // Transport along the segment from state.lambda to lam_to (refining
  // internally); returns the frame at lam_to.
  ClusterFrame advance(const ClusterFrame& from, Cplx to) const;
  // Polyline convenience.
  ClusterFrame advance_path(const ClusterFrame& from, const std::vector<Cplx>& pts) const;

  // Spectral projection onto the cluster continuing mu_guess at lam.
  MatC projection(Cplx lam, const std::vector<Cplx>& mu_guess, VecC* mu_out = nullptr) const;

 private:
  struct EigCache;
  void eig(Cplx lam, MatC& V, MatC& Winv, VecC& mu) const;
  MatC dprojection(Cplx lam, const std::vector<Cplx>& mu_guess) const;

  std::function<MatC(Cplx)> family_, dfamily_;
  KatoOptions opt_;
};

// ---------------------------------------------------------------------------
// Invariant-graph reduction (pointwise reduction of slowly varying systems).

struct RiccatiInput {
  std::function<MatC(double)> M1;     // m x m, "fast" block
  std::function<MatC(double)> M2;     // k x k, "slow" block
  std::function<double(double)> delta;  // pointwise perturbation size
  std::function<MatC(double)> Theta;  // (m+k)x(m+k) bounded matrix, perturbation = delta*Theta
  int m = 1, k = 1;
  double x0 = 0, x1 = 0;
  int grid_n = 1001;
};

struct RiccatiReduction {
  std::vector<double> xs;
  std::vector<MatC> Phi2;      // k x m graph transform per node
  std::vector<double> eta;     // pointwise gap
  double sup_phi2 = 0;
  double sup_delta_over_eta = 0;
  double C = 0;                // certified sup|Phi2| / sup(delta/eta)
  // reduced-flow coefficient on the Z1 graph: M1 + delta*(Th11 + Th12*Phi2)
  MatC reduced_flow_fast(int i) const;
  std::vector<MatC> Th11, Th12;  // stashed for reduced flows
};

RiccatiReduction riccati_reduce(const RiccatiInput& in);

// ---------------------------------------------------------------------------
// Argument accumulation for winding numbers.

struct WindingAccum {
  int winding = 0;
  double residual = 0;   // |total/2pi - winding|
  double max_jump = 0;   // max |D_{k+1}-D_k| / min(|D_k|,|D_{k+1}|)
};

// values: D samples along a closed contour (closure edge last->first included
// automatically). logs: optional complex log-scales, D_phys = value*exp(log).
WindingAccum accumulate_argument(const std::vector<Cplx>& values,
                                 const std::vector<Cplx>* logs = nullptr);

// ---------------------------------------------------------------------------
// Small solvers.

double brent(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
             int maxit = 200);
double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                  int maxit = 300);
// Damped Newton for F(x) = 0 with numerically differenced Jacobian.
VecR newton_nd(const std::function<VecR(const VecR&)>& F, VecR x0, double tol = 1e-12,
               int maxit = 60);
// Derivative-free Nelder-Mead minimization.
VecR nelder_mead(const std::function<double(const VecR&)>& f, VecR x0, double scale,
                 int maxit = 2000, double ftol = 1e-12);

}  // namespace radshock::num
