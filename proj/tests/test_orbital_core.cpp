#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "singarc/errors.hpp"
#include "singarc/extremal_dynamics.hpp"
#include "singarc/orbital_core.hpp"

using namespace singarc;
using std::numbers::pi;

namespace {

PlanarOrbitPoint random_point(std::mt19937_64& rng, double e_lo = 0.0, double e_hi = 0.9) {
    std::uniform_real_distribution<double> r(0.1, 15.0), e(e_lo, e_hi), th(0.0, 2.0 * pi), m(0.2, 3.0),
        mu(0.5, 2.0);
    return {r(rng), e(rng), th(rng), m(rng), mu(rng)};
}

}  // namespace

TEST_CASE("angular momentum") {
    CHECK(angular_momentum({1.0, 0.0, 0.7}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(angular_momentum({1.0, 0.2, 0.0}) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-15));
    CHECK(angular_momentum({2.0, 0.5, pi}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invalid points are rejected") {
    CHECK_THROWS_AS(angular_momentum({0.0, 0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(angular_momentum({1.0, -0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(angular_momentum({1.0, 2.0, pi}), DomainError);  // 1 + e cos = -1
    CHECK_THROWS_AS(angular_momentum({1.0, 1.0, pi}), DomainError);  // exactly 0
    CHECK_THROWS_AS(alpha_dot({1.0, 0.1, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(ThrustGeometry{0.0, 1.5, 1.0}), DomainError);
}

TEST_CASE("velocity components") {
    const auto circ = velocity_components({1.0, 0.0, 2.0});
    CHECK(circ.radial == doctest::Approx(0.0));
    CHECK(circ.transverse == doctest::Approx(1.0));
    CHECK(circ.speed_sq == doctest::Approx(1.0));

    const auto v = velocity_components({1.0, 0.2, pi / 2});
    CHECK(v.radial == doctest::Approx(0.2));
    CHECK(v.transverse == doctest::Approx(1.0));
    CHECK(v.speed_sq == doctest::Approx(1.04));
}

TEST_CASE("property: speed from components equals the closed form and vis-viva") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const PlanarOrbitPoint p = random_point(rng);
        const auto v = velocity_components(p);
        const double closed = speed_sq_closed_form(p);
        REQUIRE(std::abs(v.speed_sq - closed) <= 1e-12 * closed);
        // vis-viva with a = p / (1 - e^2), p = r (1 + e cos theta)
        const double semi_latus = p.r_norm * conic_factor(p);
        const double vis_viva = p.mu * (2.0 / p.r_norm - (1.0 - p.e * p.e) / semi_latus);
        REQUIRE(std::abs(closed - vis_viva) <= 1e-12 * closed);
    }
}

TEST_CASE("alpha dot") {
    CHECK(alpha_dot({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(alpha_dot({4.0, 0.0, 0.0}) == doctest::Approx(0.125));
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        const PlanarOrbitPoint p = random_point(rng);
        const double h = angular_momentum(p);
        REQUIRE(std::abs(alpha_dot(p) * p.r_norm * p.r_norm - h) <= 1e-14 * h);
    }
}

TEST_CASE("gauss rates") {
    SUBCASE("coasting reduces to the two-body rates") {
        std::mt19937_64 rng(13);
        for (int i = 0; i < 200; ++i) {
            const PlanarOrbitPoint p = random_point(rng);
            const GaussRates g = gauss_rates(p, ThrustGeometry{1.0, 0.0, 1.0});
            REQUIRE(g.e_dot == 0.0);
            REQUIRE(g.theta_dot == doctest::Approx(alpha_dot(p)).epsilon(1e-14));
        }
    }
    SUBCASE("pure radial thrust at periapsis leaves e unchanged") {
        const GaussRates g = gauss_rates({1.0, 0.2, 0.0}, ThrustGeometry{0.0, 0.01, 1.0});
        CHECK(g.e_dot == doctest::Approx(0.0).epsilon(1e-18));
    }
    SUBCASE("thrusting on a circular orbit is degenerate") {
        CHECK_THROWS_AS(gauss_rates({1.0, 0.0, 0.0}, ThrustGeometry{1.0, 0.5, 1.0}), DegenerateEccentricity);
        CHECK_NOTHROW(gauss_rates({1.0, 0.0, 0.0}, ThrustGeometry{1.0, 0.0, 1.0}));
    }
}

TEST_CASE("gauss rates match finite differences along a thrusting trajectory") {
    // Thrust at a fixed angle from r: e(t) and theta(t) are read back from the
    // Cartesian state through the eccentricity vector.
    const double beta = 1.1;
    const double c = 0.3;
    const EngineParams eng{0.05, 1.0, 1.0};
    const PlanarOrbitPoint p0{1.3, 0.25, 0.8};
    const PlanarCartesian xy = cartesian_from_elements(p0, 0.4);
    ExtremalState s;
    s.r = {xy.r.x(), xy.r.y(), 0.0};
    s.v = {xy.v.x(), xy.v.y(), 0.0};
    s.p_v = {1.0, 0.0, 0.0};
    const ControlPolicy fixed_angle = [&](double, const ExtremalState& st) {
        const double a = std::atan2(st.r.y(), st.r.x()) + beta;
        return Control{c, Eigen::Vector3d(std::cos(a), std::sin(a), 0.0)};
    };
    const GaussRates g = gauss_rates(p0, ThrustGeometry{beta, c, eng.t_max});

    auto elems_at = [&](double t) {
        PropagateOptions opts;
        opts.detect_events = false;
        const Trajectory tr = propagate(s, eng, 0.0, t, std::abs(t) / 8, fixed_angle, opts);
        const ExtremalState& f = tr.samples.back().state;
        return elements_from_cartesian(f.r.head<2>(), f.v.head<2>(), eng.mu, f.m).point;
    };
    double prev_e = 0.0, prev_th = 0.0;
    for (double h : {4e-3, 2e-3, 1e-3}) {
        const auto plus = elems_at(h);
        const auto minus = elems_at(-h);
        const double fd_e = (plus.e - minus.e) / (2 * h);
        const double fd_th = (plus.theta - minus.theta) / (2 * h);
        const double err_e = std::abs(fd_e - g.e_dot);
        const double err_th = std::abs(fd_th - g.theta_dot);
        CHECK(err_e < 1e-5);
        CHECK(err_th < 1e-5);
        if (prev_e > 0.0) {
            CHECK(prev_e / err_e == doctest::Approx(4.0).epsilon(0.15));
            CHECK(prev_th / err_th == doctest::Approx(4.0).epsilon(0.15));
        }
        prev_e = err_e;
        prev_th = err_th;
    }
}

TEST_CASE("cartesian from elements") {
    const PlanarCartesian a = cartesian_from_elements({1.0, 0.0, 0.0}, 0.0);
    CHECK(a.r.x() == doctest::Approx(1.0));
    CHECK(a.r.y() == doctest::Approx(0.0));
    CHECK(a.v.x() == doctest::Approx(0.0));
    CHECK(a.v.y() == doctest::Approx(1.0));

    const PlanarCartesian b = cartesian_from_elements({1.0, 0.2, pi / 2}, 0.0);
    CHECK(b.r.x() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b.r.y() == doctest::Approx(1.0));
    CHECK(b.v.x() == doctest::Approx(-1.0));
    CHECK(b.v.y() == doctest::Approx(0.2));
}

TEST_CASE("property: element round trip") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> om(0.0, 2.0 * pi);
    for (int i = 0; i < 1000; ++i) {
        const PlanarOrbitPoint p = random_point(rng, 1e-3, 0.9);
        const double omega = om(rng);
        const PlanarCartesian xy = cartesian_from_elements(p, omega);
        const ElementsFromCartesian back = elements_from_cartesian(xy.r, xy.v, p.mu, p.m);
        REQUIRE_FALSE(back.degenerate);
        REQUIRE(back.point.r_norm == doctest::Approx(p.r_norm).epsilon(1e-10));
        REQUIRE(std::abs(back.point.e - p.e) < 1e-10);
        const double dth = std::remainder(back.point.theta - p.theta, 2.0 * pi);
        const double dom = std::remainder(back.omega - omega, 2.0 * pi);
        REQUIRE(std::abs(dth) < 1e-10);
        REQUIRE(std::abs(dom) < 1e-10);
    }
}

TEST_CASE("circular orbits report zero omega") {
    const PlanarCartesian xy = cartesian_from_elements({2.0, 0.0, 1.0}, 0.0);
    const ElementsFromCartesian back = elements_from_cartesian(xy.r, xy.v, 1.0, 1.0);
    CHECK(back.degenerate);
    CHECK(back.omega == 0.0);
    CHECK(back.point.theta == doctest::Approx(1.0));
}

TEST_CASE("retrograde and zero-radius states are rejected") {
    CHECK_THROWS_AS(elements_from_cartesian({1.0, 0.0}, {0.0, -1.0}, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(elements_from_cartesian({0.0, 0.0}, {0.0, 1.0}, 1.0, 1.0), DomainError);
}
