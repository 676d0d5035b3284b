#pragma once

// Singular throttle c_s = B / A on a singular arc and the pieces it is
// assembled from.

#include <array>

#include "singarc/extremal_dynamics.hpp"
#include "singarc/orbital_core.hpp"
#include "singarc/singular_conditions.hpp"

namespace singarc {

inline constexpr double kADegeneracyTol = 1e-9;     // a_tol
inline constexpr double kGateTol = 1e-8;            // |Psi| gate
inline constexpr double kDenominatorTol = 1e-12;    // on 1 - 3 cos^2(beta)
inline constexpr double kSaturationEpsilon = 1e-3;  // singular iff eps <= c_s <= 1 - eps
inline constexpr double kAngleTol = 1e-9;

/// A(beta) = (1 - 3 cos^2 b) cos b + 2 cos b sin^2 b.
double a_term(double beta);

/// Both routes to alpha_ddot: the K1/K2 expansion through the Gauss rates and
/// the reduced closed form -2 mu e sin(theta)/r^3 + c T sin(beta)/(m r).
struct AlphaDdotTerms {
    double k1 = 0.0;
    double k2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double expanded = 0.0;  ///< -3/2 mu e sin(theta)/r^3 + K1 + K2 from the Gauss rates
    double reduced = 0.0;
};

AlphaDdotTerms alpha_ddot_terms(const PlanarOrbitPoint& p, const ThrustGeometry& g);
double alpha_ddot(const PlanarOrbitPoint& p, const ThrustGeometry& g);

/// Thrust-free part of beta_ddot. Throws DomainError if 1 - 3cos^2 <= denom_tol.
double d_term(const PlanarOrbitPoint& p, double beta, SignBranch branch);

struct BetaDdot {
    double value = 0.0;   ///< D - c T sin(beta) / (m r)
    double d_val = 0.0;
};

BetaDdot beta_ddot(const PlanarOrbitPoint& p, const ThrustGeometry& g, SignBranch branch);

/// Additive terms of the singular-arc condition D3_dot = 0 written in
/// (r, e, m, theta, beta, c). Two terms carry the throttle; their sum is
/// -c T A(beta)/(m r). The full time derivative of the costate-form D3 is
/// 3 mu |p_v|^2 times `sum`.
struct D3DotStateForm {
    std::array<double, 9> terms{};
    double sum = 0.0;
    double scale = 0.0;  ///< largest |term|
};

D3DotStateForm d3dot_state_form(const PlanarOrbitPoint& p, double beta, SignBranch branch,
                                double c, double t_max);

enum class ThrottleClass { singular, saturated_high, saturated_low, a_degenerate };

const char* to_string(ThrottleClass c);

struct SingularEval {
    double c_s = 0.0;
    double a_val = 0.0;
    double b_val = 0.0;
    double d_val = 0.0;
    ThrottleClass classification = ThrottleClass::a_degenerate;
};

struct ThrottleOptions {
    double epsilon = kSaturationEpsilon;
    double a_tol = kADegeneracyTol;
    double gate_tol = kGateTol;
    bool enforce_gate = true;  ///< require |Psi| <= gate_tol before evaluating
};

/// c_s = B / A. a_degenerate (with c_s = NaN) when |A| <= a_tol. Throws
/// DomainError when the gate fails, beta is not interior, or eng.mu differs
/// from p.mu.
SingularEval singular_throttle(const PlanarOrbitPoint& p, double beta, SignBranch branch,
                               const EngineParams& eng, const ThrottleOptions& opts = {});

/// Classification of a c_s value against the saturation band.
ThrottleClass classify_throttle(double c_s, double epsilon = kSaturationEpsilon);

enum class ADegeneracy { persistent_possible, isolated_only, non_degenerate };

const char* to_string(ADegeneracy d);

/// Whether A(beta) = 0 can persist over an interval. Only cos(beta) = 0 zeros
/// A on the admissible domain; such an interval needs e = 0 (so that e_dot can
/// vanish) together with cos(theta) = 0. Every other cos(beta) = 0 case,
/// including sin(theta) = 0 where theta_dot > 0, gives isolated zeros only.
ADegeneracy a_degeneracy_analysis(const PlanarOrbitPoint& p, double beta,
                                  double a_tol = kADegeneracyTol, double angle_tol = kAngleTol);

}  // namespace singarc
