#include "singarc/costate_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "singarc/errors.hpp"
#include "singarc/singular_control.hpp"

namespace singarc {

namespace {

double cross_z(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector3d planar_unit(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

double pr_dot_prdot(const ExtremalState& s, double mu) {
    const double rn = s.r.norm();
    const double r5 = std::pow(rn, 5);
    // p_r . (-3 mu/r^5 (r.p_v) r + mu/r^3 p_v)
    return -3.0 * mu / r5 * s.r.dot(s.p_v) * s.r.dot(s.p_r) + mu / (rn * rn * rn) * s.p_r.dot(s.p_v);
}

double d3_with_beta_dot(const ExtremalState& s, double mu, double beta_dot) {
    const double rn = s.r.norm();
    const double pv2 = s.p_v.squaredNorm();
    const double cos_sin = s.r.dot(s.p_v) * cross_z(s.r, s.p_v) / (rn * rn * pv2);
    return -2.0 * rn * rn * rn * pr_dot_prdot(s, mu) - 3.0 * rn * s.p_r.squaredNorm() * s.r.dot(s.v) +
           6.0 * mu * pv2 * cos_sin * beta_dot;
}

}  // namespace

SingularConfiguration construct_configuration(const PlanarOrbitPoint& point, double omega,
                                              double beta, SignBranch branch, double p_v_norm,
                                              const EngineParams& eng) {
    validate(point);
    validate(eng);
    if (!(p_v_norm > 0.0)) throw DomainError("construct_configuration: p_v_norm must be positive");
    const double k = radicand(beta);
    if (!(k > 0.0)) throw DomainError("construct_configuration: beta must be strictly inside the domain");

    const PlanarCartesian xy = cartesian_from_elements(point, omega);
    const double alpha = point.theta + omega;
    const double delta = alpha + beta;
    const double r3 = point.r_norm * point.r_norm * point.r_norm;

    SingularConfiguration cfg;
    cfg.point = point;
    cfg.omega = omega;
    cfg.beta = beta;
    cfg.branch = branch;
    cfg.p_v_norm = p_v_norm;
    cfg.state.r = {xy.r.x(), xy.r.y(), 0.0};
    cfg.state.v = {xy.v.x(), xy.v.y(), 0.0};
    cfg.state.m = point.m;
    cfg.state.p_v = p_v_norm * planar_unit(delta);
    cfg.state.p_r = p_v_norm * std::sqrt(point.mu * k / r3) *
                    planar_unit(delta - branch.blue * std::numbers::pi / 2.0);
    cfg.state.p_m = eng.isp_g0 * p_v_norm / point.m;
    return cfg;
}

SoundnessResiduals soundness_residuals(const SingularConfiguration& cfg, const EngineParams& eng) {
    const ExtremalState& s = cfg.state;
    const double rn = s.r.norm();
    const double pv = s.p_v.norm();
    const double beta = planar_angle(s.r, s.p_v);
    const double k = radicand(beta);
    // p_v_dot = -p_r, so the polar rate of p_v is (p_v x p_v_dot)_z / |p_v|^2.
    const double delta_dot = -cross_z(s.p_v, s.p_r) / (pv * pv);

    SoundnessResiduals out;
    out.s = switching_function(s, eng);
    out.d1 = -s.p_v.dot(s.p_r);
    out.d2 = -rn * rn * rn * delta_dot * delta_dot + eng.mu * k;
    out.s_scale = pv / s.m;
    out.d1_scale = pv * s.p_r.norm();
    out.d2_scale = std::max({rn * rn * rn * delta_dot * delta_dot, eng.mu * std::abs(k), eng.mu});
    return out;
}

double planar_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::atan2(cross_z(a, b), a.x() * b.x() + a.y() * b.y());
}

std::vector<double> unwrapped_beta(std::span<const TrajectorySample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const TrajectorySample& smp : samples) {
        double b = planar_angle(smp.state.r, smp.state.p_v);
        if (!out.empty()) b += two_pi * std::round((out.back() - b) / two_pi);
        out.push_back(b);
    }
    return out;
}

double d3_costate_form(const SingularConfiguration& cfg, double mu) {
    const ExtremalState& s = cfg.state;
    const ElementsFromCartesian el = elements_from_cartesian(s.r.head<2>(), s.v.head<2>(), mu, s.m);
    const double rn = s.r.norm();
    const double k = std::max(radicand(planar_angle(s.r, s.p_v)), 0.0);
    const double beta_dot = -alpha_dot(el.point) + cfg.branch.red * std::sqrt(mu * k / (rn * rn * rn));
    return d3_with_beta_dot(s, mu, beta_dot);
}

double d3_kinematic(const ExtremalState& s, double mu) {
    const double rn = s.r.norm();
    const double pv2 = s.p_v.squaredNorm();
    const double delta_dot = -cross_z(s.p_v, s.p_r) / pv2;
    const double alpha_rate = cross_z(s.r, s.v) / (rn * rn);
    return d3_with_beta_dot(s, mu, delta_dot - alpha_rate);
}

double d3_psi_factor(const PlanarOrbitPoint& p, double p_v_norm) {
    const double r3 = p.r_norm * p.r_norm * p.r_norm;
    return 3.0 * p.mu * p_v_norm * p_v_norm * std::sqrt(p.mu * conic_factor(p) / r3);
}

D3DotAnalytic d3dot_analytic(const SingularConfiguration& cfg, double c, const EngineParams& eng) {
    const D3DotStateForm form = d3dot_state_form(cfg.point, cfg.beta, cfg.branch, c, eng.t_max);
    const double factor = 3.0 * cfg.point.mu * cfg.p_v_norm * cfg.p_v_norm;
    return {factor * form.sum, factor * form.scale};
}

std::array<double, 3> scaled_fd_steps(const PlanarOrbitPoint& p, double c, const EngineParams& eng) {
    double tau = std::sqrt(p.r_norm * p.r_norm * p.r_norm / p.mu);
    const double accel = c * eng.t_max / p.m;
    if (accel > 0.0) tau = std::min(tau, std::sqrt(speed_sq_closed_form(p)) / accel);
    std::array<double, 3> out = kRelativeFdSteps;
    for (double& h : out) h *= tau;
    return out;
}

FdReport d3dot_fd_check(const SingularConfiguration& cfg, double c, const EngineParams& eng,
                        std::span<const double> h_steps, int substeps) {
    if (!is_same_sign(cfg.branch)) {
        throw DomainError("d3dot_fd_check: mixed branches are not realizable along the costate flow");
    }
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("d3dot_fd_check: c outside [0, 1]");
    if (h_steps.empty() || substeps < 1) throw std::invalid_argument("d3dot_fd_check: no steps");
    if (cfg.point.mu != eng.mu) throw DomainError("d3dot_fd_check: point and engine disagree on mu");

    const D3DotAnalytic analytic = d3dot_analytic(cfg, c, eng);
    const ControlPolicy policy = constant_throttle_policy(c);
    PropagateOptions opts;
    opts.detect_events = false;

    FdReport report;
    report.c = c;
    report.analytic = analytic.value;
    report.scale = analytic.scale;
    for (double h : h_steps) {
        const double dt = h / substeps;
        const Trajectory fwd = propagate(cfg.state, eng, 0.0, h, dt, policy, opts);
        const Trajectory bwd = propagate(cfg.state, eng, 0.0, -h, dt, policy, opts);
        const double d_plus = d3_kinematic(fwd.samples.back().state, eng.mu);
        const double d_minus = d3_kinematic(bwd.samples.back().state, eng.mu);
        FdLevel lvl;
        lvl.h = h;
        lvl.fd = (d_plus - d_minus) / (2.0 * h);
        lvl.error = std::abs(lvl.fd - analytic.value);
        report.levels.push_back(lvl);
    }
    for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
        report.ratios.push_back(report.levels[i].error / report.levels[i + 1].error);
    }
    if (!report.ratios.empty()) {
        const double step_ratio = report.levels[report.levels.size() - 2].h / report.levels.back().h;
        report.order = std::log(report.ratios.back()) / std::log(step_ratio);
    }
    return report;
}

}  // namespace singarc
