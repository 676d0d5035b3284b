#pragma once

// State + costate dynamics of the minimum-fuel two-body problem, the
// switching function, the bang-bang control law, and a fixed-step RK4
// propagator that localizes switching events.

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

namespace singarc {

/// s_tol: |S| at or below this marks a singular-arc candidate.
inline constexpr double kSwitchingTolerance = 1e-9;
/// r_min: collision guard for the -mu r / |r|^3 term.
inline constexpr double kMinimumRadius = 1e-6;

struct EngineParams {
    double t_max = 1.0;
    double isp_g0 = 1.0;  ///< exhaust velocity I_sp g_0
    double mu = 1.0;
};

/// Cartesian state and costates. The same layout doubles as the rate type.
struct ExtremalState {
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    double m = 1.0;
    Eigen::Vector3d p_r = Eigen::Vector3d::Zero();
    Eigen::Vector3d p_v = Eigen::Vector3d::Zero();
    double p_m = 0.0;

    ExtremalState& operator+=(const ExtremalState& o);
    ExtremalState& operator*=(double k);
};

ExtremalState operator+(ExtremalState a, const ExtremalState& b);
ExtremalState operator*(double k, ExtremalState a);

using ExtremalRate = ExtremalState;

/// Throws DomainError on m <= 0, |r| == 0 or all-zero costates.
void validate(const ExtremalState& s);
void validate(const EngineParams& eng);

/// S = |p_v|/m - p_m/(I_sp g0). Throws IndeterminateSwitching if p_v and p_m
/// are both zero.
double switching_function(const ExtremalState& s, const EngineParams& eng);

enum class ThrustRegime { max, coast, singular_candidate };

struct ControlLaw {
    double c = 0.0;
    Eigen::Vector3d n = Eigen::Vector3d::UnitX();
    ThrustRegime regime = ThrustRegime::coast;
};

/// Bang-bang law with n = p_v/|p_v|. The throttle follows sign(S) (c = 0 when
/// S == 0); the regime is flagged singular_candidate when |S| <= s_tol.
/// Throws DomainError if p_v == 0.
ControlLaw optimal_control(const ExtremalState& s, const EngineParams& eng,
                           double s_tol = kSwitchingTolerance);

/// Right-hand side of the state and costate equations for a given control.
/// Preconditions: 0 <= c <= 1 and |n| == 1 (checked, std::invalid_argument).
ExtremalRate extremal_derivative(const ExtremalState& s, double c, const Eigen::Vector3d& n,
                                 const EngineParams& eng);

/// Hamiltonian p_r.v + p_v.(-mu r/|r|^3 + T c n/m) - p_m T c/(I_sp g0).
double hamiltonian(const ExtremalState& s, double c, const Eigen::Vector3d& n,
                   const EngineParams& eng);

/// v^2/2 - mu/|r|.
double specific_energy(const ExtremalState& s, double mu);

struct Control {
    double c = 0.0;
    Eigen::Vector3d n = Eigen::Vector3d::UnitX();
};

/// Evaluated at every RK4 stage, so smooth policies keep fourth-order accuracy.
using ControlPolicy = std::function<Control(double t, const ExtremalState&)>;

ControlPolicy pmp_policy(const EngineParams& eng);
/// Fixed throttle, thrust along the instantaneous p_v direction.
ControlPolicy constant_throttle_policy(double c);

struct TrajectorySample {
    double t = 0.0;
    ExtremalState state;
    double s = 0.0;  ///< switching function, NaN when indeterminate
    double c = 0.0;  ///< throttle the policy returns at this sample
};

struct SwitchEvent {
    double t = 0.0;
    double s = 0.0;      ///< residual |S| after bisection
    int direction = 0;   ///< +1 when S goes from negative to positive
    ExtremalState state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<SwitchEvent> events;
};

struct PropagateOptions {
    double r_min = kMinimumRadius;
    double event_tol = 1e-10;
    int max_bisections = 200;
    bool detect_events = true;
};

/// One classical RK4 step of signed size h.
ExtremalState rk4_step(const ExtremalState& s, double t, double h, const EngineParams& eng,
                       const ControlPolicy& policy);

/// Fixed-step RK4 from t0 to t1 (t1 < t0 integrates backwards); the last step
/// is shortened to land on t1. Throws PropagationError if m <= 0 or
/// |r| <= r_min.
Trajectory propagate(const ExtremalState& s0, const EngineParams& eng, double t0, double t1,
                     double dt, const ControlPolicy& policy, const PropagateOptions& opts = {});

/// t, r_x..v_z, m, p_rx..p_vz, p_m, S, c with a header row.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace singarc
