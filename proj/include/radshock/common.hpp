#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radshock {

using Cplx = std::complex<double>;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;
using RowR = Eigen::RowVectorXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

// Failure categories; each maps to a distinct CLI exit code.
enum class Err {
  Domain,
  Degeneracy,
  CompensatorNotFound,
  ProfileBranch,
  DomainTooSmall,
  SplittingViolation,
  Resonance,
  Matching,
  Integration,
  Stiffness,
  ZeroOnContour,
  NearSingularResolvent,
  TrackingLost,
  Instability,
  InconclusiveWinding,
  GapViolation,
  Config,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool ok, Err kind, const std::string& msg) {
  if (!ok) fail(kind, msg);
}

const char* err_name(Err kind);
int err_exit_code(Err kind);

// Least-squares fit y ~ a + b*x.
struct LineFit {
  double a = 0, b = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation of two equally sized samples.
double pearson(const VecR& a, const VecR& b);

// Sign convention used for eigenvector columns: unit length, largest-modulus
// component made positive (real case) / made positive-real (complex case).
void fix_sign(VecR& v);
void fix_sign(VecC& v);

// Chunked parallel map over [0, n). threads <= 1 runs inline.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace radshock
