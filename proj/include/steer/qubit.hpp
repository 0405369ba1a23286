#pragma once

#include <array>
#include <complex>
#include <optional>

namespace steer {

using cplx = std::complex<double>;

// Tolerance for invariants maintained by the library itself.
inline constexpr double kStructuralTol = 1e-12;
// Tolerance applied to values supplied by callers (CLI input, file input).
inline constexpr double kInputTol = 1e-9;

//============================================================================
// States
//============================================================================

// Normalized qubit state. The global phase is fixed so that the first
// amplitude with magnitude above 1e-12 is real and non-negative, which makes
// states directly comparable.
class PureState {
public:
  // Normalizes and canonicalizes. Throws std::invalid_argument if both
  // amplitudes are (numerically) zero.
  PureState(cplx a0, cplx a1);

  cplx a0() const { return a0_; }
  cplx a1() const { return a1_; }

private:
  cplx a0_, a1_;
};

// Inner product <a|b>.
cplx overlap(const PureState& a, const PureState& b);

// The unique (up to phase) state orthogonal to s, fixed as (-conj(a1), conj(a0)).
PureState orthogonal_complement(const PureState& s);

// 2x2 density operator. Hermiticity is structural: only r00, r11 and the
// upper coherence r01 are stored, r10 is implied.
class DensityMatrix {
public:
  // Validates trace, population positivity and positive semidefiniteness
  // within `tol`, throwing std::invalid_argument naming the violated
  // invariant. Accepted values are then tidied so the stored matrix meets
  // the structural 1e-12 invariants exactly.
  DensityMatrix(double r00, double r11, cplx r01, double tol = kInputTol);

  static DensityMatrix pure(const PureState& s);
  static DensityMatrix maximally_mixed();

  double r00() const { return r00_; }
  double r11() const { return r11_; }
  cplx r01() const { return r01_; }
  cplx r10() const { return std::conj(r01_); }

private:
  double r00_, r11_;
  cplx r01_;
};

//============================================================================
// Target frame and bases
//============================================================================

// The pair {|zeta>, |zeta_perp>}; all optimization coordinates are expressed
// relative to this frame.
class TargetFrame {
public:
  explicit TargetFrame(const PureState& target);

  const PureState& zeta() const { return zeta_; }
  const PureState& zeta_perp() const { return zeta_perp_; }

private:
  PureState zeta_;
  PureState zeta_perp_;
};

// Components of a density matrix in a target frame:
//   p_target = <zeta|rho|zeta>, p_perp = <zeta_perp|rho|zeta_perp>,
//   coherence = <zeta|rho|zeta_perp>.
struct FrameCoefficients {
  double p_target;
  double p_perp;
  cplx coherence;
};

// Orthonormal eigenbasis of an intermediate observable.
struct MeasurementBasis {
  // Checks orthonormality within kInputTol.
  MeasurementBasis(PureState state0, PureState state1);

  PureState s0;
  PureState s1;
};

// Chart for a measurement basis relative to the target frame:
//   |0> = cos(alpha/2)|zeta> + e^{i beta} sin(alpha/2)|zeta_perp>
//   |1> = -e^{-i beta} sin(alpha/2)|zeta> + cos(alpha/2)|zeta_perp>
// so |<0|zeta>|^2 = cos^2(alpha/2). Canonical ranges: alpha in [0, pi],
// beta in [0, 2pi).
struct BasisAngles {
  double alpha;
  double beta;

  MeasurementBasis realize(const TargetFrame& frame) const;
};

// Realization for arbitrary real angles (used by optimizers; the formulas
// above are well defined for any alpha, beta).
MeasurementBasis realize_basis(const TargetFrame& frame, double alpha, double beta);

// Canonical angles of the basis whose "0" state is `zero_state`.
BasisAngles basis_angles_of(const TargetFrame& frame, const PureState& zero_state);

//============================================================================
// Operations
//============================================================================

// <psi|rho|psi>, clamped to [0, 1].
double expectation(const DensityMatrix& rho, const PureState& psi);

FrameCoefficients frame_coefficients(const DensityMatrix& rho, const TargetFrame& frame);

// Rebuilds the density matrix from its frame components.
DensityMatrix from_frame(const TargetFrame& frame, const FrameCoefficients& coeffs);

// Coherence ratio |<zeta|rho|zeta_perp>| / sqrt(p_target * p_perp), clamped
// to [0, 1]. Empty when p_target * p_perp <= 1e-12 (the ratio is undefined
// and callers must branch).
std::optional<double> gamma_of(const DensityMatrix& rho, const TargetFrame& frame);

// Non-selective projective measurement: kills the off-diagonal part of rho
// in the given basis. Trace and positivity preserving, idempotent per basis.
DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis);

// sqrt(trace[(a - b)^2]).
double hs_distance(const DensityMatrix& a, const DensityMatrix& b);

struct EigenPair {
  double value;
  PureState state;
};

// Spectral decomposition, eigenvalues in descending order and clamped to [0, 1].
std::array<EigenPair, 2> eigensystem(const DensityMatrix& rho);

}  // namespace steer
