#pragma once

// Explicit costates realizing a singular configuration, and the raw costate
// identities (S, D1, D2, D3 and dD3/dt) evaluated straight from the vectors.
// This is the cross-check for the reduced formulas in singular_conditions and
// singular_control.

#include <array>
#include <span>
#include <vector>

#include "singarc/extremal_dynamics.hpp"
#include "singarc/orbital_core.hpp"
#include "singarc/singular_conditions.hpp"

namespace singarc {

struct SingularConfiguration {
    ExtremalState state;  ///< planar: all third components zero
    PlanarOrbitPoint point;
    double omega = 0.0;
    double beta = 0.0;
    SignBranch branch;
    double p_v_norm = 1.0;
};

/// p_v at angle beta from r with norm p_v_norm; p_r perpendicular with
/// |p_r| = |p_v| sqrt(mu (1 - 3cos^2 beta) / r^3), oriented by branch.blue;
/// p_m = I_sp g0 |p_v| / m so that S = 0.
/// Throws DomainError unless 1 - 3 cos^2(beta) > 0.
SingularConfiguration construct_configuration(const PlanarOrbitPoint& point, double omega,
                                              double beta, SignBranch branch, double p_v_norm,
                                              const EngineParams& eng);

struct SoundnessResiduals {
    double s = 0.0;   ///< switching function
    double d1 = 0.0;  ///< p_v . p_v_dot = -p_v . p_r
    double d2 = 0.0;  ///< -r^3 delta_dot^2 + mu (1 - 3 cos^2 beta), delta = polar angle of p_v
    double s_scale = 0.0;
    double d1_scale = 0.0;
    double d2_scale = 0.0;
};

SoundnessResiduals soundness_residuals(const SingularConfiguration& cfg, const EngineParams& eng);

/// Signed angle from a to b in the x-y plane.
double planar_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// beta(t) from r and p_v, unwrapped so consecutive values never jump by 2 pi.
std::vector<double> unwrapped_beta(std::span<const TrajectorySample> samples);

/// D3 = -2 r^3 (p_r . p_r_dot) - 3 r |p_r|^2 (r . v) + 6 mu |p_v|^2 cos b sin b beta_dot
/// with beta_dot from the red branch formula at the configuration's (e, theta).
double d3_costate_form(const SingularConfiguration& cfg, double mu);

/// Same expression with beta_dot taken from the motion itself,
/// beta_dot = delta_dot - alpha_dot. A function of (state, costate) only, so it
/// can be differentiated along a trajectory.
double d3_kinematic(const ExtremalState& s, double mu);

/// Positive factor with D3 = factor * Psi for a constructed configuration:
/// 3 mu |p_v|^2 sqrt(mu (1 + e cos theta) / r^3).
double d3_psi_factor(const PlanarOrbitPoint& p, double p_v_norm);

/// Analytic dD3/dt at the configuration for throttle c: 3 mu |p_v|^2 times the
/// state-form sum. `scale` is the matching largest-term magnitude.
struct D3DotAnalytic {
    double value = 0.0;
    double scale = 0.0;
};

D3DotAnalytic d3dot_analytic(const SingularConfiguration& cfg, double c, const EngineParams& eng);

struct FdLevel {
    double h = 0.0;
    double fd = 0.0;     ///< central difference of d3_kinematic over [-h, h]
    double error = 0.0;  ///< |fd - analytic|
};

struct FdReport {
    double c = 0.0;
    double analytic = 0.0;
    double scale = 0.0;
    std::vector<FdLevel> levels;
    std::vector<double> ratios;  ///< error(h_i) / error(h_{i+1})
    double order = 0.0;          ///< log2 of the last ratio for halving steps
};

inline constexpr std::array<double, 3> kDefaultFdSteps{1e-3, 5e-4, 2.5e-4};

/// Relative steps for scaled_fd_steps.
inline constexpr std::array<double, 3> kRelativeFdSteps{4e-3, 2e-3, 1e-3};

/// kRelativeFdSteps times the shorter of the orbital time sqrt(r^3 / mu) and the
/// thrust time |v| m / (c T_max). Fixed absolute steps lose the truncation
/// error under roundoff at large radii and overshoot under strong thrust.
std::array<double, 3> scaled_fd_steps(const PlanarOrbitPoint& p, double c, const EngineParams& eng);

/// Propagates forward and backward with constant throttle c, thrust along
/// p_v(t)/|p_v(t)|, and central-differences D3 at t = 0 for each h.
/// Requires a same-sign branch (mixed branches are not realizable by the
/// costate flow) and c in [0, 1].
FdReport d3dot_fd_check(const SingularConfiguration& cfg, double c, const EngineParams& eng,
                        std::span<const double> h_steps = kDefaultFdSteps, int substeps = 4);

}  // namespace singarc
