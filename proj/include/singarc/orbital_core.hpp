#pragma once

// Planar two-body kinematics in dimensionless units, plus the Gauss
// variational rates for eccentricity and true anomaly under in-plane thrust.

#include <Eigen/Core>

namespace singarc {

/// Below this eccentricity the 1/e factor in the thrust part of theta_dot is
/// not evaluated and the argument of periapsis is taken as zero.
inline constexpr double kEccentricityFloor = 1e-8;

/// Instantaneous planar orbit state in physical coordinates.
struct PlanarOrbitPoint {
    double r_norm = 1.0;  ///< distance from the primary (> 0)
    double e = 0.0;       ///< eccentricity (>= 0)
    double theta = 0.0;   ///< true anomaly [rad]
    double m = 1.0;       ///< spacecraft mass (> 0)
    double mu = 1.0;      ///< gravitational parameter (> 0)
};

/// Thrust direction relative to the radius, throttle and engine ceiling.
struct ThrustGeometry {
    double beta = 0.0;  ///< angle from r to the thrust direction [rad]
    double c = 0.0;     ///< throttle in [0, 1]
    double t_max = 1.0;

    double radial() const;      ///< T_r = c T_max cos(beta)
    double transverse() const;  ///< T_s = c T_max sin(beta)
};

/// Throws DomainError unless r, m, mu > 0, e >= 0 and 1 + e cos(theta) > 0.
void validate(const PlanarOrbitPoint& p);
void validate(const ThrustGeometry& g);

/// 1 + e cos(theta), the conic denominator that appears under every radical.
double conic_factor(const PlanarOrbitPoint& p);

double angular_momentum(const PlanarOrbitPoint& p);

struct VelocityComponents {
    double radial = 0.0;
    double transverse = 0.0;
    double speed_sq = 0.0;  ///< radial^2 + transverse^2
};

VelocityComponents velocity_components(const PlanarOrbitPoint& p);

/// ||v||^2 = mu/r [(1 + e cos)^2 + e^2 sin^2] / (1 + e cos), evaluated
/// without going through the components.
double speed_sq_closed_form(const PlanarOrbitPoint& p);

/// Rate of the polar angle of r: sqrt(mu (1 + e cos theta) / r^3).
double alpha_dot(const PlanarOrbitPoint& p);

struct GaussRates {
    double e_dot = 0.0;
    double theta_dot = 0.0;
};

/// Gauss variational rates with T_r, T_s taken from the thrust geometry.
/// Throws DegenerateEccentricity if e <= kEccentricityFloor while thrusting.
GaussRates gauss_rates(const PlanarOrbitPoint& p, const ThrustGeometry& g);

struct PlanarCartesian {
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
};

/// Position at polar angle theta + omega, velocity split into radial and
/// transverse parts. Prograde (counter-clockwise) motion.
PlanarCartesian cartesian_from_elements(const PlanarOrbitPoint& p, double omega);

struct ElementsFromCartesian {
    PlanarOrbitPoint point;
    double omega = 0.0;
    bool degenerate = false;  ///< e below kEccentricityFloor, omega forced to 0
};

/// Inverse of cartesian_from_elements via the eccentricity vector.
/// theta and omega are returned in [0, 2 pi). Retrograde states are rejected.
ElementsFromCartesian elements_from_cartesian(const Eigen::Vector2d& r, const Eigen::Vector2d& v,
                                              double mu, double m);

/// Wraps an angle into [0, 2 pi).
double wrap_two_pi(double angle);

}  // namespace singarc
