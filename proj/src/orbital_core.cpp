#include "singarc/orbital_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "singarc/errors.hpp"

namespace singarc {

namespace {

[[noreturn]] void fail(const std::string& what) { throw DomainError("orbital_core: " + what); }

}  // namespace

double ThrustGeometry::radial() const { return c * t_max * std::cos(beta); }

double ThrustGeometry::transverse() const { return c * t_max * std::sin(beta); }

void validate(const PlanarOrbitPoint& p) {
    if (!(p.r_norm > 0.0)) fail("r_norm must be positive");
    if (!(p.m > 0.0)) fail("mass must be positive");
    if (!(p.mu > 0.0)) fail("mu must be positive");
    if (!(p.e >= 0.0)) fail("eccentricity must be non-negative");
    if (!(1.0 + p.e * std::cos(p.theta) > 0.0)) fail("1 + e cos(theta) must be positive");
}

void validate(const ThrustGeometry& g) {
    if (!(g.c >= 0.0 && g.c <= 1.0)) fail("throttle must lie in [0, 1]");
    if (!(g.t_max >= 0.0)) fail("t_max must be non-negative");
}

double conic_factor(const PlanarOrbitPoint& p) { return 1.0 + p.e * std::cos(p.theta); }

double angular_momentum(const PlanarOrbitPoint& p) {
    validate(p);
    return std::sqrt(p.mu * p.r_norm * conic_factor(p));
}

VelocityComponents velocity_components(const PlanarOrbitPoint& p) {
    const double h = angular_momentum(p);
    VelocityComponents out;
    out.radial = p.mu / h * p.e * std::sin(p.theta);
    out.transverse = p.mu / h * conic_factor(p);
    out.speed_sq = out.radial * out.radial + out.transverse * out.transverse;
    return out;
}

double speed_sq_closed_form(const PlanarOrbitPoint& p) {
    validate(p);
    const double w = conic_factor(p);
    const double es = p.e * std::sin(p.theta);
    return p.mu / p.r_norm * (w * w + es * es) / w;
}

double alpha_dot(const PlanarOrbitPoint& p) {
    validate(p);
    const double r = p.r_norm;
    return std::sqrt(p.mu * conic_factor(p) / (r * r * r));
}

GaussRates gauss_rates(const PlanarOrbitPoint& p, const ThrustGeometry& g) {
    validate(p);
    validate(g);
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    const double w = conic_factor(p);
    const double tr = g.radial() / p.m;
    const double ts = g.transverse() / p.m;

    GaussRates out;
    out.e_dot = std::sqrt(p.r_norm * w / p.mu) * st * tr +
                std::sqrt(p.r_norm / (p.mu * w)) * ((2.0 + p.e * ct) * ct + p.e) * ts;
    out.theta_dot = alpha_dot(p);
    if (tr == 0.0 && ts == 0.0) return out;
    if (p.e <= kEccentricityFloor) {
        throw DegenerateEccentricity("gauss_rates: theta_dot thrust term divides by e");
    }
    out.theta_dot += std::sqrt(p.r_norm / (p.mu * w)) / p.e * (w * ct * tr - (2.0 + p.e * ct) * st * ts);
    return out;
}

PlanarCartesian cartesian_from_elements(const PlanarOrbitPoint& p, double omega) {
    const VelocityComponents vel = velocity_components(p);
    const double alpha = p.theta + omega;
    const Eigen::Vector2d radial_dir(std::cos(alpha), std::sin(alpha));
    const Eigen::Vector2d transverse_dir(-std::sin(alpha), std::cos(alpha));
    PlanarCartesian out;
    out.r = p.r_norm * radial_dir;
    out.v = vel.radial * radial_dir + vel.transverse * transverse_dir;
    return out;
}

double wrap_two_pi(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double out = std::fmod(angle, two_pi);
    if (out < 0.0) out += two_pi;
    if (out >= two_pi) out -= two_pi;
    return out;
}

ElementsFromCartesian elements_from_cartesian(const Eigen::Vector2d& r, const Eigen::Vector2d& v,
                                              double mu, double m) {
    const double rn = r.norm();
    if (!(rn > 0.0)) fail("position must be non-zero");
    if (!(mu > 0.0)) fail("mu must be positive");
    if (!(m > 0.0)) fail("mass must be positive");
    const double h = r.x() * v.y() - r.y() * v.x();
    if (!(h > 0.0)) fail("state is not prograde (h <= 0)");

    const Eigen::Vector2d e_vec = ((v.squaredNorm() - mu / rn) * r - r.dot(v) * v) / mu;
    const double e = e_vec.norm();
    const double alpha = std::atan2(r.y(), r.x());

    ElementsFromCartesian out;
    out.point.r_norm = rn;
    out.point.m = m;
    out.point.mu = mu;
    if (e < kEccentricityFloor) {
        out.degenerate = true;
        out.omega = 0.0;
        out.point.e = 0.0;
        out.point.theta = wrap_two_pi(alpha);
    } else {
        out.omega = wrap_two_pi(std::atan2(e_vec.y(), e_vec.x()));
        out.point.e = e;
        out.point.theta = wrap_two_pi(alpha - out.omega);
    }
    validate(out.point);
    return out;
}

}  // namespace singarc
