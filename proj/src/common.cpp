#include "radshock/common.hpp"

#include <cmath>
#include <mutex>
#include <thread>

namespace radshock {

const char* err_name(Err kind) {
  switch (kind) {
    case Err::Domain: return "domain";
    case Err::Degeneracy: return "degeneracy";
    case Err::CompensatorNotFound: return "compensator-not-found";
    case Err::ProfileBranch: return "profile-branch";
    case Err::DomainTooSmall: return "domain-too-small";
    case Err::SplittingViolation: return "consistent-splitting-violation";
    case Err::Resonance: return "resonance";
    case Err::Matching: return "matching";
    case Err::Integration: return "integration";
    case Err::Stiffness: return "stiffness";
    case Err::ZeroOnContour: return "zero-on-contour";
    case Err::NearSingularResolvent: return "near-singular-resolvent";
    case Err::TrackingLost: return "tracking-lost";
    case Err::Instability: return "instability";
    case Err::InconclusiveWinding: return "inconclusive-winding";
    case Err::GapViolation: return "gap-violation";
    case Err::Config: return "config";
    case Err::Internal: return "internal";
  }
  return "unknown";
}

int err_exit_code(Err kind) { return 10 + static_cast<int>(kind); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const size_t n = x.size();
  if (n < 2 || y.size() != n) fail(Err::Internal, "fit_line: need >= 2 samples");
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) fail(Err::Internal, "fit_line: degenerate abscissae");
  out.b = sxy / sxx;
  out.a = my - out.b * mx;
  double ssres = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - (out.a + out.b * x[i]);
    ssres += r * r;
  }
  out.r2 = (syy > 0) ? 1.0 - ssres / syy : 1.0;
  return out;
}

double pearson(const VecR& a, const VecR& b) {
  if (a.size() != b.size() || a.size() < 2) fail(Err::Internal, "pearson: size mismatch");
  const double ma = a.mean(), mb = b.mean();
  const VecR da = a.array() - ma, db = b.array() - mb;
  const double den = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (den == 0) return 0.0;
  return da.dot(db) / den;
}

void fix_sign(VecR& v) {
  double nrm = v.norm();
  if (nrm == 0) return;
  v /= nrm;
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0) v = -v;
}

void fix_sign(VecC& v) {
  double nrm = v.norm();
  if (nrm == 0) return;
  v /= nrm;
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  Cplx ph = v[imax] / std::abs(v[imax]);
  v /= ph;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int nt = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr eptr;
  std::mutex mu;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += nt) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!eptr) eptr = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (eptr) std::rethrow_exception(eptr);
}

}  // namespace radshock
