#pragma once

// Hyperbolic-elliptic model systems
//   u_t + f(u)_x + L q_x = 0,   -q_xx + q + g(u)_x = 0
// together with the structural checks a shock-stability run relies on:
// symmetrizability, genuine coupling, Lax ordering, genuine nonlinearity,
// positive diffusion, and the skew compensator certificate.

#include <memory>
#include <random>

#include "radshock/common.hpp"
#include "radshock/series.hpp"

namespace radshock {

struct Box {
  VecR lo, hi;
  bool contains(const VecR& u) const {
    for (int i = 0; i < u.size(); ++i)
      if (u[i] < lo[i] || u[i] > hi[i]) return false;
    return true;
  }
};

class ModelSystem {
 public:
  virtual ~ModelSystem() = default;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  virtual VecR flux(const VecR& u) const = 0;                 // f
  virtual double rad_flux(const VecR& u) const = 0;           // g
  virtual VecR coupling() const = 0;                          // L
  virtual MatR jac_flux(const VecR& u) const = 0;             // A = Df
  virtual RowR jac_rad(const VecR& u) const = 0;              // B = Dg

  // Taylor lifts along a path u(x) given by its coefficient list.
  virtual VecSeries flux_series(const VecSeries& u) const = 0;
  virtual std::vector<double> rad_series(const VecSeries& u) const = 0;
  virtual MatSeries jacA_series(const VecSeries& u) const = 0;
  virtual std::vector<RowR> jacB_series(const VecSeries& u) const = 0;

  virtual Box domain() const;
  // Analytic symmetrizer when the model has one; otherwise the numeric search
  // in find_symmetrizer() is used.
  virtual bool has_analytic_symmetrizer() const { return false; }
  virtual MatR analytic_symmetrizer(const VecR&) const { return MatR(); }

  void check_in_domain(const VecR& u) const;

  // d/dx of A(u(x)) given u and u_x (exact via the order-1 Taylor lift).
  MatR jacA_dir(const VecR& u, const VecR& ux) const;
  RowR jacB_dir_row(const VecR& u, const VecR& ux, RowR* B0 = nullptr) const;
};

std::shared_ptr<ModelSystem> make_hamer();
std::shared_ptr<ModelSystem> make_euler_rad(double gamma = 5.0 / 3.0);
// Scalar model with polynomial fluxes  f(u) = sum fc[k] u^k,  g likewise.
std::shared_ptr<ModelSystem> make_custom_scalar(std::vector<double> f_coeffs,
                                                std::vector<double> g_coeffs);
// Coupling-broken mutant (g = 0) used to exercise the genuine-coupling check.
std::shared_ptr<ModelSystem> make_decoupled(std::shared_ptr<ModelSystem> base);

struct ShockTriple {
  VecR u_minus, u_plus;
  double s = 0.0;   // stationary normalization
  int p = 1;        // principal field, 1-based
  double epsilon = 0.0;
};

// Builtin shock families.
ShockTriple hamer_shock(double epsilon);
ShockTriple euler_shock(const ModelSystem& model, double epsilon);

// Eigen-data of A(u) with ascending eigenvalues and the sign-fixed
// left/right eigenvector pair of field p (l.r = 1).
struct CharField {
  VecR a;       // all eigenvalues ascending
  VecR r, l;    // field-p right/left eigenvectors, l^T r = 1, r sign-fixed
};
CharField char_field(const ModelSystem& m, const VecR& u, int p);

double check_rankine_hugoniot(const ModelSystem& m, const ShockTriple& s);

struct LaxGnlResult {
  bool lax_ok = false;
  double gnl_witness = 0.0;
};
LaxGnlResult check_lax_and_gnl(const ModelSystem& m, const ShockTriple& s,
                               const std::vector<VecR>& states);

struct CouplingResult {
  double witness = 0.0;       // min_j |L B(u) r_j(u)| over samples
  double h3_minus = 0.0;      // l_p L B r_p at u-
  double h3_plus = 0.0;       // at u+
  VecR worst_state;
};
CouplingResult check_coupling(const ModelSystem& m, const ShockTriple& s,
                              const std::vector<VecR>& states);

// Numeric symmetrizer: A0 SPD with A0 A symmetric and A0 L B symmetric PSD of
// rank one.  Solves the linear constraints in the symmetric-matrix basis and
// maximizes the minimum eigenvalue over the residual null space.
MatR find_symmetrizer(const ModelSystem& m, const VecR& u);
MatR symmetrizer(const ModelSystem& m, const VecR& u);

struct Compensator {
  VecR skew_params;  // n(n-1)/2 entries parametrizing K
  double theta = 0.0;
  MatR K(int n) const;
};
Compensator find_compensator(const ModelSystem& m, const std::vector<VecR>& states,
                             uint64_t seed = 12345);

struct HypothesisEntry {
  std::string hypothesis;
  bool pass = false;
  double witness = 0.0;
  VecR worst_state;
};

struct StructureReport {
  std::vector<HypothesisEntry> entries;
  double kawashima_theta = 0.0;
  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  const HypothesisEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.hypothesis == name) return &e;
    return nullptr;
  }
};

// Seeded sample of states around the shock (deterministic per seed).
std::vector<VecR> sample_states(const ModelSystem& m, const ShockTriple& s, int count,
                                uint64_t seed);

StructureReport check_structure(const ModelSystem& m, const ShockTriple& s, uint64_t seed = 12345,
                                int samples = 64);

}  // namespace radshock
