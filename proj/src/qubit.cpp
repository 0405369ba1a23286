#include "steer/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace steer {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

//============================================================================
// PureState
//============================================================================

PureState::PureState(cplx a0, cplx a1) : a0_(a0), a1_(a1) {
  const double norm2 = std::norm(a0_) + std::norm(a1_);
  if (norm2 <= kStructuralTol * kStructuralTol) {
    throw std::invalid_argument("pure state amplitudes are numerically zero");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  a0_ *= inv;
  a1_ *= inv;

  // Fix the global phase: first significant amplitude real and >= 0.
  cplx pivot = (std::abs(a0_) > 1e-12) ? a0_ : a1_;
  const cplx unit = std::conj(pivot) / std::abs(pivot);
  a0_ *= unit;
  a1_ *= unit;
  if (std::abs(a0_) > 1e-12) {
    a0_ = cplx(std::abs(a0_), 0.0);
  } else {
    a1_ = cplx(std::abs(a1_), 0.0);
  }
}

cplx overlap(const PureState& a, const PureState& b) {
  return std::conj(a.a0()) * b.a0() + std::conj(a.a1()) * b.a1();
}

PureState orthogonal_complement(const PureState& s) {
  return PureState(-std::conj(s.a1()), std::conj(s.a0()));
}

//============================================================================
// DensityMatrix
//============================================================================

DensityMatrix::DensityMatrix(double r00, double r11, cplx r01, double tol)
    : r00_(r00), r11_(r11), r01_(r01) {
  std::ostringstream err;
  if (std::abs(r00_ + r11_ - 1.0) > tol) {
    err << "density matrix trace is " << r00_ + r11_ << ", must be 1";
    throw std::invalid_argument(err.str());
  }
  if (r00_ < -tol || r11_ < -tol) {
    err << "density matrix population is negative (r00 = " << r00_
        << ", r11 = " << r11_ << ")";
    throw std::invalid_argument(err.str());
  }
  if (r00_ * r11_ - std::norm(r01_) < -tol) {
    err << "density matrix is not positive semidefinite (det = "
        << r00_ * r11_ - std::norm(r01_) << ")";
    throw std::invalid_argument(err.str());
  }

  // Tidy accepted values onto the structural invariants.
  r00_ = clamp01(r00_);
  r11_ = clamp01(r11_);
  r00_ /= r00_ + r11_;
  r11_ = 1.0 - r00_;  // unit trace holds exactly, not just within tol
  const double bound2 = r00_ * r11_;
  if (std::norm(r01_) > bound2) {
    r01_ *= std::sqrt(bound2 / std::norm(r01_));
  }
}

DensityMatrix DensityMatrix::pure(const PureState& s) {
  return DensityMatrix(std::norm(s.a0()), std::norm(s.a1()),
                       s.a0() * std::conj(s.a1()), kStructuralTol);
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(0.5, 0.5, cplx(0.0, 0.0), kStructuralTol);
}

//============================================================================
// TargetFrame, MeasurementBasis, BasisAngles
//============================================================================

TargetFrame::TargetFrame(const PureState& target)
    : zeta_(target), zeta_perp_(orthogonal_complement(target)) {}

MeasurementBasis::MeasurementBasis(PureState state0, PureState state1)
    : s0(state0), s1(state1) {
  if (std::abs(overlap(s0, s1)) > kInputTol) {
    throw std::invalid_argument("measurement basis states are not orthogonal");
  }
}

MeasurementBasis realize_basis(const TargetFrame& frame, double alpha, double beta) {
  const double c = std::cos(0.5 * alpha);
  const double s = std::sin(0.5 * alpha);
  const cplx phase(std::cos(beta), std::sin(beta));
  const PureState& z = frame.zeta();
  const PureState& zp = frame.zeta_perp();

  const cplx w0 = c;
  const cplx w1 = phase * s;
  PureState state0(w0 * z.a0() + w1 * zp.a0(), w0 * z.a1() + w1 * zp.a1());

  const cplx v0 = -std::conj(phase) * s;
  const cplx v1 = c;
  PureState state1(v0 * z.a0() + v1 * zp.a0(), v0 * z.a1() + v1 * zp.a1());

  return MeasurementBasis(state0, state1);
}

MeasurementBasis BasisAngles::realize(const TargetFrame& frame) const {
  return realize_basis(frame, alpha, beta);
}

BasisAngles basis_angles_of(const TargetFrame& frame, const PureState& zero_state) {
  const cplx ct = overlap(frame.zeta(), zero_state);
  const cplx cp = overlap(frame.zeta_perp(), zero_state);
  const double alpha = 2.0 * std::atan2(std::abs(cp), std::abs(ct));
  double beta = 0.0;
  if (std::abs(ct) > 1e-12 && std::abs(cp) > 1e-12) {
    beta = std::arg(cp) - std::arg(ct);
    const double two_pi = 2.0 * M_PI;
    beta = std::fmod(beta, two_pi);
    if (beta < 0.0) beta += two_pi;
  }
  return BasisAngles{alpha, beta};
}

//============================================================================
// Operations
//============================================================================

double expectation(const DensityMatrix& rho, const PureState& psi) {
  const double value = std::norm(psi.a0()) * rho.r00() +
                       std::norm(psi.a1()) * rho.r11() +
                       2.0 * std::real(std::conj(psi.a0()) * rho.r01() * psi.a1());
  return clamp01(value);
}

namespace {

// <a|rho|b> for possibly different bra and ket.
cplx sandwich(const PureState& a, const DensityMatrix& rho, const PureState& b) {
  return std::conj(a.a0()) * rho.r00() * b.a0() +
         std::conj(a.a0()) * rho.r01() * b.a1() +
         std::conj(a.a1()) * rho.r10() * b.a0() +
         std::conj(a.a1()) * rho.r11() * b.a1();
}

}  // namespace

FrameCoefficients frame_coefficients(const DensityMatrix& rho, const TargetFrame& frame) {
  FrameCoefficients fc;
  fc.p_target = expectation(rho, frame.zeta());
  fc.p_perp = expectation(rho, frame.zeta_perp());
  fc.coherence = sandwich(frame.zeta(), rho, frame.zeta_perp());
  return fc;
}

DensityMatrix from_frame(const TargetFrame& frame, const FrameCoefficients& coeffs) {
  const PureState& z = frame.zeta();
  const PureState& zp = frame.zeta_perp();
  const cplx c = coeffs.coherence;

  const auto element = [&](const cplx zi, const cplx zpi, const cplx zj, const cplx zpj) {
    return coeffs.p_target * zi * std::conj(zj) + coeffs.p_perp * zpi * std::conj(zpj) +
           c * zi * std::conj(zpj) + std::conj(c) * zpi * std::conj(zj);
  };

  const double r00 = std::real(element(z.a0(), zp.a0(), z.a0(), zp.a0()));
  const double r11 = std::real(element(z.a1(), zp.a1(), z.a1(), zp.a1()));
  const cplx r01 = element(z.a0(), zp.a0(), z.a1(), zp.a1());
  return DensityMatrix(r00, r11, r01);
}

std::optional<double> gamma_of(const DensityMatrix& rho, const TargetFrame& frame) {
  const FrameCoefficients fc = frame_coefficients(rho, frame);
  const double denom2 = fc.p_target * fc.p_perp;
  if (denom2 <= 1e-12) {
    return std::nullopt;
  }
  return clamp01(std::abs(fc.coherence) / std::sqrt(denom2));
}

DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis) {
  const double q0 = expectation(rho, basis.s0);
  const double q1 = expectation(rho, basis.s1);
  const double r00 = q0 * std::norm(basis.s0.a0()) + q1 * std::norm(basis.s1.a0());
  const double r11 = q0 * std::norm(basis.s0.a1()) + q1 * std::norm(basis.s1.a1());
  const cplx r01 = q0 * basis.s0.a0() * std::conj(basis.s0.a1()) +
                   q1 * basis.s1.a0() * std::conj(basis.s1.a1());
  return DensityMatrix(r00, r11, r01);
}

double hs_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const double d00 = a.r00() - b.r00();
  const double d11 = a.r11() - b.r11();
  const cplx d01 = a.r01() - b.r01();
  return std::sqrt(d00 * d00 + d11 * d11 + 2.0 * std::norm(d01));
}

std::array<EigenPair, 2> eigensystem(const DensityMatrix& rho) {
  const double a = rho.r00();
  const double b = rho.r11();
  const cplx c = rho.r01();

  if (std::abs(c) <= 1e-15) {
    PureState e0(1.0, 0.0);
    PureState e1(0.0, 1.0);
    if (a >= b) {
      return {EigenPair{clamp01(a), e0}, EigenPair{clamp01(b), e1}};
    }
    return {EigenPair{clamp01(b), e1}, EigenPair{clamp01(a), e0}};
  }

  const double gap = std::sqrt((a - b) * (a - b) + 4.0 * std::norm(c));
  const double lam0 = 0.5 * (1.0 + gap);
  const double lam1 = 0.5 * (1.0 - gap);
  // (c, lam - a) is an eigenvector of [[a, c], [conj(c), b]] for eigenvalue lam;
  // it cannot degenerate here because |c| > 0 keeps the gap open.
  PureState v0(c, cplx(lam0 - a, 0.0));
  PureState v1 = orthogonal_complement(v0);
  return {EigenPair{clamp01(lam0), v0}, EigenPair{clamp01(lam1), v1}};
}

}  // namespace steer
