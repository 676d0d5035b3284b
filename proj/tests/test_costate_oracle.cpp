#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "singarc/costate_oracle.hpp"
#include "singarc/errors.hpp"
#include "singarc/singular_control.hpp"

using namespace singarc;
using std::numbers::pi;

namespace {

struct Sample {
    PlanarOrbitPoint p;
    double omega;
    BetaRoot root;
};

Sample random_root_sample(std::mt19937_64& rng, bool same_sign_only) {
    std::uniform_real_distribution<double> r(0.1, 15.0), e(1e-3, 0.9), th(1e-2, 1.99 * pi), om(0, 2 * pi);
    for (;;) {
        const PlanarOrbitPoint p{r(rng), e(rng), th(rng), 1.0, 1.0};
        const BetaRootSet set = enumerate_roots(p.e, p.theta);
        const BetaRoot& root = set.roots[rng() % set.roots.size()];
        if (same_sign_only && !is_same_sign(root.branch)) continue;
        return {p, om(rng), root};
    }
}

ExtremalState propagated(const SingularConfiguration& cfg, const EngineParams& eng, double c, double t) {
    PropagateOptions opts;
    opts.detect_events = false;
    return propagate(cfg.state, eng, 0.0, t, std::abs(t) / 8, constant_throttle_policy(c), opts).samples.back().state;
}

}  // namespace

TEST_CASE("constructed configuration satisfies the costate constraints") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> r(0.1, 15.0), e(0.0, 0.9), th(0, 2 * pi), om(0, 2 * pi),
        b(BetaDomain::sub1_lo + 1e-6, BetaDomain::sub1_hi - 1e-6), pv(0.1, 10.0), isp(0.5, 3.0);
    const SignBranch branches[] = {kBothPositive, kMixed, kMixedSwapped, kBothNegative};
    for (int i = 0; i < 500; ++i) {
        const EngineParams eng{1.0, isp(rng), 1.0};
        const PlanarOrbitPoint p{r(rng), e(rng), th(rng), 1.0, 1.0};
        const double beta = b(rng) + (i % 2 ? pi : 0.0);
        const SignBranch br = branches[i % 4];
        const double pv_norm = i < 200 ? 1.0 : pv(rng);
        const SingularConfiguration cfg = construct_configuration(p, om(rng), beta, br, pv_norm, eng);
        const SoundnessResiduals res = soundness_residuals(cfg, eng);
        REQUIRE(std::abs(res.s) <= 1e-14 * res.s_scale);
        REQUIRE(std::abs(res.d1) <= 1e-14 * res.d1_scale);
        REQUIRE(std::abs(res.d2) <= 1e-12 * res.d2_scale);
        if (pv_norm == 1.0) {
            REQUIRE(std::abs(res.d2) <= 1e-12);
        }

        const ExtremalState& s = cfg.state;
        REQUIRE(std::abs(std::remainder(planar_angle(s.r, s.p_v) - beta, 2 * pi)) < 1e-12);
        REQUIRE(s.p_v.norm() == doctest::Approx(pv_norm).epsilon(1e-14));
        const double expect_pr = pv_norm * std::sqrt(p.mu * radicand(beta) / std::pow(p.r_norm, 3));
        REQUIRE(s.p_r.norm() == doctest::Approx(expect_pr).epsilon(1e-13));
        // blue = +1 puts p_r a quarter turn clockwise of p_v
        REQUIRE(std::remainder(planar_angle(s.p_v, s.p_r) + br.blue * pi / 2, 2 * pi) == doctest::Approx(0.0));
        REQUIRE(s.r.z() == 0.0);
        REQUIRE(s.p_r.z() == 0.0);
    }
}

TEST_CASE("construction guards") {
    const EngineParams eng{};
    CHECK_THROWS_AS(construct_configuration({1.0, 0.1, 0.0}, 0.0, 0.3, kBothPositive, 1.0, eng), DomainError);
    CHECK_THROWS_AS(construct_configuration({1.0, 0.1, 0.0}, 0.0, BetaDomain::beta0 - 1e-10, kBothPositive, 1.0, eng),
                    DomainError);
    CHECK_THROWS_AS(construct_configuration({1.0, 0.1, 0.0}, 0.0, 1.2, kBothPositive, 0.0, eng), DomainError);
}

TEST_CASE("D3 vanishes at the roots and follows the sign of Psi elsewhere") {
    std::mt19937_64 rng(52);
    const EngineParams eng{};
    for (int i = 0; i < 100; ++i) {
        const Sample smp = random_root_sample(rng, false);
        const SingularConfiguration cfg =
            construct_configuration(smp.p, smp.omega, smp.root.beta, smp.root.branch, 1.0, eng);
        const double d3 = d3_costate_form(cfg, eng.mu);
        const double norm = eng.mu / (smp.p.r_norm * smp.p.r_norm);
        REQUIRE(std::abs(d3) / norm <= 1e-8);
    }

    std::uniform_real_distribution<double> r(0.1, 15.0), e(0.0, 0.9), th(0, 2 * pi), b(BetaDomain::sub1_lo + 1e-3,
                                                                                        BetaDomain::sub1_hi - 1e-3);
    int checked = 0;
    for (int i = 0; checked < 300; ++i) {
        const PlanarOrbitPoint p{r(rng), e(rng), th(rng), 1.0, 1.0};
        const double beta = b(rng) + (i % 2 ? pi : 0.0);
        const SignBranch br = SignBranch{i % 3 ? 1 : -1, i % 5 ? 1 : -1};
        const double ps = psi(p.e, p.theta, beta, br);
        if (std::abs(ps) <= 0.1) continue;
        ++checked;
        const SingularConfiguration cfg = construct_configuration(p, 0.5, beta, br, 2.0, eng);
        const double d3 = d3_costate_form(cfg, eng.mu);
        REQUIRE((d3 > 0) == (ps > 0));
        REQUIRE(d3 / ps == doctest::Approx(d3_psi_factor(p, 2.0)).epsilon(1e-10));
    }
}

TEST_CASE("D3 is quadratic in the costate scale") {
    const EngineParams eng{};
    const PlanarOrbitPoint p{1.7, 0.4, 2.5};
    const double d1 = d3_costate_form(construct_configuration(p, 0.2, 1.3, kBothNegative, 1.0, eng), 1.0);
    const double d3 = d3_costate_form(construct_configuration(p, 0.2, 1.3, kBothNegative, 3.0, eng), 1.0);
    CHECK(d3 == doctest::Approx(9.0 * d1).epsilon(1e-13));
}

TEST_CASE("kinematic and branch beta rates agree on same-sign branches only") {
    const EngineParams eng{};
    const PlanarOrbitPoint p{2.2, 0.3, 0.9};
    for (SignBranch br : {kBothPositive, kBothNegative}) {
        const SingularConfiguration cfg = construct_configuration(p, 1.0, 1.4, br, 1.0, eng);
        CHECK(d3_kinematic(cfg.state, 1.0) == doctest::Approx(d3_costate_form(cfg, 1.0)).epsilon(1e-12));
    }
    const SingularConfiguration mixed = construct_configuration(p, 1.0, 1.4, kMixed, 1.0, eng);
    CHECK(std::abs(d3_kinematic(mixed.state, 1.0) - d3_costate_form(mixed, 1.0)) > 1e-3);
    CHECK_THROWS_AS(d3dot_fd_check(mixed, 0.5, eng), DomainError);
}

TEST_CASE("FD derivative of D3 vanishes at the singular throttle") {
    std::mt19937_64 rng(53);
    int ran = 0;
    while (ran < 40) {
        const Sample smp = random_root_sample(rng, true);
        EngineParams eng{};
        const SingularEval ev = singular_throttle(smp.p, smp.root.beta, smp.root.branch, eng);
        if (!std::isfinite(ev.c_s) || ev.c_s <= 0.0) continue;
        double c = ev.c_s;
        if (c > 1.0) {
            eng.t_max = c / 0.5;
            c = 0.5;
        }
        ++ran;
        const SingularConfiguration cfg =
            construct_configuration(smp.p, smp.omega, smp.root.beta, smp.root.branch, 1.0, eng);
        const FdReport rep = d3dot_fd_check(cfg, c, eng, scaled_fd_steps(smp.p, c, eng));
        REQUIRE(std::abs(rep.analytic) <= 1e-9 * rep.scale);
        REQUIRE(rep.ratios.back() >= 3.5);
        REQUIRE(rep.ratios.back() <= 4.5);
        const std::array<double, 1> fine{scaled_fd_steps(smp.p, c, eng)[2] / 10};
        REQUIRE(std::abs(d3dot_fd_check(cfg, c, eng, fine).levels[0].fd) <= 1e-6 * rep.scale);
    }
}

TEST_CASE("FD derivative of D3 matches the state form at full throttle") {
    std::mt19937_64 rng(54);
    for (int i = 0; i < 40; ++i) {
        const Sample smp = random_root_sample(rng, true);
        const EngineParams eng{0.3, 1.0, 1.0};
        const SingularConfiguration cfg =
            construct_configuration(smp.p, smp.omega, smp.root.beta, smp.root.branch, 1.0, eng);
        const FdReport rep = d3dot_fd_check(cfg, 1.0, eng, scaled_fd_steps(smp.p, 1.0, eng));
        const double sc = std::max(rep.scale, std::abs(rep.analytic));
        REQUIRE(std::abs(rep.levels.back().fd - rep.analytic) <= 1e-5 * sc);
        REQUIRE(rep.ratios.back() >= 3.5);
        REQUIRE(rep.ratios.back() <= 4.5);
    }
}

TEST_CASE("FD with absolute steps near unit radius") {
    const EngineParams eng{};
    const BetaRootSet set = enumerate_roots(0.2, 1.308);
    const BetaRoot& root = set.roots[1];  // singular throttle ~0.087 at r = 1
    const PlanarOrbitPoint p{1.0, 0.2, 1.308};
    const SingularEval ev = singular_throttle(p, root.beta, root.branch, eng);
    const SingularConfiguration cfg = construct_configuration(p, 0.0, root.beta, root.branch, 1.0, eng);
    const std::array<double, 3> steps{4e-4, 2e-4, 1e-4};
    const FdReport rep = d3dot_fd_check(cfg, ev.c_s, eng, steps);
    CHECK(std::abs(rep.levels.back().fd) < 1e-6 * rep.scale);
}

TEST_CASE("beta(t) second derivative matches the beta ddot formula at a root") {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 20; ++i) {
        const Sample smp = random_root_sample(rng, true);
        const double c = 0.3;
        const EngineParams eng{0.2, 1.0, 1.0};
        const SingularConfiguration cfg =
            construct_configuration(smp.p, smp.omega, smp.root.beta, smp.root.branch, 1.0, eng);
        const double expect = beta_ddot(smp.p, ThrustGeometry{smp.root.beta, c, eng.t_max}, smp.root.branch).value;
        const double tau = std::sqrt(std::pow(smp.p.r_norm, 3));
        double prev = 0.0;
        for (double rel : {8e-3, 4e-3, 2e-3}) {
            const double h = rel * tau;
            std::vector<TrajectorySample> three(3);
            three[0].state = propagated(cfg, eng, c, -h);
            three[1].state = cfg.state;
            three[2].state = propagated(cfg, eng, c, h);
            const std::vector<double> b = unwrapped_beta(three);
            const double fd = (b[2] - 2 * b[1] + b[0]) / (h * h);
            const double err = std::abs(fd - expect);
            REQUIRE(err <= 1e-3 * (std::abs(expect) + 1.0 / (tau * tau) + c * eng.t_max / smp.p.r_norm));
            if (prev > 0.0) REQUIRE(prev / err == doctest::Approx(4.0).epsilon(0.125));
            prev = err;
        }
    }
}

TEST_CASE("S has second-order contact at a constructed singular point") {
    const EngineParams eng{};
    const BetaRootSet set = enumerate_roots(0.2, 1.308);
    const BetaRoot& root = set.roots[1];
    const PlanarOrbitPoint p{1.0, 0.2, 1.308};
    const double c = singular_throttle(p, root.beta, root.branch, eng).c_s;
    const SingularConfiguration cfg = construct_configuration(p, 0.0, root.beta, root.branch, 1.0, eng);
    const double q1 = switching_function(propagated(cfg, eng, c, 1e-2), eng) / 1e-4;
    const double q2 = switching_function(propagated(cfg, eng, c, 5e-3), eng) / 2.5e-5;
    CHECK(std::abs(q1) < 10.0);
    CHECK(q2 == doctest::Approx(q1).epsilon(0.05));
}

TEST_CASE("unwrapped beta never jumps by a full turn") {
    std::vector<TrajectorySample> samples(50);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double a = 0.3 * static_cast<double>(i);
        samples[i].state.r = {1.0, 0.0, 0.0};
        samples[i].state.p_v = {std::cos(a), std::sin(a), 0.0};
    }
    const std::vector<double> b = unwrapped_beta(samples);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] - b[i - 1] == doctest::Approx(0.3));
}
