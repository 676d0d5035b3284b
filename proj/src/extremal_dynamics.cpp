#include "singarc/extremal_dynamics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "singarc/csv.hpp"
#include "singarc/errors.hpp"

namespace singarc {

ExtremalState& ExtremalState::operator+=(const ExtremalState& o) {
    r += o.r;
    v += o.v;
    m += o.m;
    p_r += o.p_r;
    p_v += o.p_v;
    p_m += o.p_m;
    return *this;
}

ExtremalState& ExtremalState::operator*=(double k) {
    r *= k;
    v *= k;
    m *= k;
    p_r *= k;
    p_v *= k;
    p_m *= k;
    return *this;
}

ExtremalState operator+(ExtremalState a, const ExtremalState& b) { return a += b; }

ExtremalState operator*(double k, ExtremalState a) { return a *= k; }

void validate(const ExtremalState& s) {
    if (!(s.m > 0.0)) throw DomainError("extremal state: mass must be positive");
    if (!(s.r.norm() > 0.0)) throw DomainError("extremal state: position must be non-zero");
    if (s.p_r.isZero(0.0) && s.p_v.isZero(0.0) && s.p_m == 0.0) {
        throw DomainError("extremal state: costates violate nontriviality");
    }
}

void validate(const EngineParams& eng) {
    if (!(eng.t_max >= 0.0)) throw DomainError("engine: t_max must be non-negative");
    if (!(eng.isp_g0 > 0.0)) throw DomainError("engine: isp_g0 must be positive");
    if (!(eng.mu > 0.0)) throw DomainError("engine: mu must be positive");
}

double switching_function(const ExtremalState& s, const EngineParams& eng) {
    const double pv = s.p_v.norm();
    if (pv == 0.0 && s.p_m == 0.0) {
        throw IndeterminateSwitching("switching_function: p_v and p_m are both zero");
    }
    return pv / s.m - s.p_m / eng.isp_g0;
}

ControlLaw optimal_control(const ExtremalState& s, const EngineParams& eng, double s_tol) {
    const double pv = s.p_v.norm();
    if (pv == 0.0) throw DomainError("optimal_control: thrust direction undefined for p_v = 0");
    const double sw = switching_function(s, eng);
    ControlLaw out;
    out.n = s.p_v / pv;
    out.c = sw > 0.0 ? 1.0 : 0.0;
    if (std::abs(sw) <= s_tol) {
        out.regime = ThrustRegime::singular_candidate;
    } else {
        out.regime = sw > 0.0 ? ThrustRegime::max : ThrustRegime::coast;
    }
    return out;
}

ExtremalRate extremal_derivative(const ExtremalState& s, double c, const Eigen::Vector3d& n,
                                 const EngineParams& eng) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("extremal_derivative: c outside [0, 1]");
    if (std::abs(n.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("extremal_derivative: thrust direction is not a unit vector");
    }
    const double rn = s.r.norm();
    const double r3 = rn * rn * rn;
    const double r5 = r3 * rn * rn;
    const double thrust_acc = eng.t_max * c / s.m;

    ExtremalRate d;
    d.r = s.v;
    d.v = -eng.mu / r3 * s.r + thrust_acc * n;
    d.m = -eng.t_max * c / eng.isp_g0;
    d.p_r = -3.0 * eng.mu / r5 * s.r.dot(s.p_v) * s.r + eng.mu / r3 * s.p_v;
    d.p_v = -s.p_r;
    d.p_m = c * s.p_v.norm() * eng.t_max / (s.m * s.m);
    return d;
}

double hamiltonian(const ExtremalState& s, double c, const Eigen::Vector3d& n,
                   const EngineParams& eng) {
    const double rn = s.r.norm();
    const Eigen::Vector3d acc = -eng.mu / (rn * rn * rn) * s.r + eng.t_max * c / s.m * n;
    return s.p_r.dot(s.v) + s.p_v.dot(acc) - s.p_m * eng.t_max * c / eng.isp_g0;
}

double specific_energy(const ExtremalState& s, double mu) {
    return 0.5 * s.v.squaredNorm() - mu / s.r.norm();
}

ControlPolicy pmp_policy(const EngineParams& eng) {
    return [eng](double, const ExtremalState& s) {
        const ControlLaw law = optimal_control(s, eng);
        return Control{law.c, law.n};
    };
}

ControlPolicy constant_throttle_policy(double c) {
    return [c](double, const ExtremalState& s) {
        const double pv = s.p_v.norm();
        if (pv == 0.0) throw DomainError("constant_throttle_policy: p_v = 0");
        return Control{c, s.p_v / pv};
    };
}

ExtremalState rk4_step(const ExtremalState& s, double t, double h, const EngineParams& eng,
                       const ControlPolicy& policy) {
    auto rate = [&](double tt, const ExtremalState& x) {
        const Control u = policy(tt, x);
        return extremal_derivative(x, u.c, u.n, eng);
    };
    const ExtremalRate k1 = rate(t, s);
    const ExtremalRate k2 = rate(t + 0.5 * h, s + (0.5 * h) * k1);
    const ExtremalRate k3 = rate(t + 0.5 * h, s + (0.5 * h) * k2);
    const ExtremalRate k4 = rate(t + h, s + h * k3);
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

double safe_switching(const ExtremalState& s, const EngineParams& eng) {
    if (s.p_v.norm() == 0.0 && s.p_m == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return switching_function(s, eng);
}

void guard(const ExtremalState& s, double t, const PropagateOptions& opts) {
    if (!(s.m > 0.0)) {
        throw PropagationError("propagate: mass became non-positive at t = " + format_number(t));
    }
    if (!(s.r.norm() > opts.r_min)) {
        throw PropagationError("propagate: radius fell below r_min at t = " + format_number(t));
    }
}

TrajectorySample make_sample(double t, const ExtremalState& s, const EngineParams& eng,
                             const ControlPolicy& policy) {
    return TrajectorySample{t, s, safe_switching(s, eng), policy(t, s).c};
}

// Bisection on the RK4 continuation from the left sample: S(tau) is the
// switching function of rk4_step(x_left, tau - t_left).
SwitchEvent locate_switch(const TrajectorySample& left, double h, double s_right,
                          const EngineParams& eng, const ControlPolicy& policy,
                          const PropagateOptions& opts) {
    double lo = 0.0;
    double hi = h;
    double s_lo = left.s;
    ExtremalState x = left.state;
    double s_mid = s_right;
    double mid = hi;
    for (int i = 0; i < opts.max_bisections; ++i) {
        mid = 0.5 * (lo + hi);
        x = rk4_step(left.state, left.t, mid, eng, policy);
        s_mid = switching_function(x, eng);
        if (std::abs(s_mid) < opts.event_tol || mid == lo || mid == hi) break;
        if ((s_mid > 0.0) == (s_lo > 0.0)) {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    SwitchEvent ev;
    ev.t = left.t + mid;
    ev.s = std::abs(s_mid);
    ev.direction = s_right > left.s ? 1 : -1;
    ev.state = x;
    return ev;
}

}  // namespace

Trajectory propagate(const ExtremalState& s0, const EngineParams& eng, double t0, double t1,
                     double dt, const ControlPolicy& policy, const PropagateOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
    validate(eng);
    validate(s0);
    guard(s0, t0, opts);

    const double span = t1 - t0;
    const double sign = span >= 0.0 ? 1.0 : -1.0;
    const auto n_steps = static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9));

    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.samples.push_back(make_sample(t0, s0, eng, policy));
    for (long k = 0; k < n_steps; ++k) {
        const TrajectorySample& left = traj.samples.back();
        const double t_next = (k + 1 == n_steps) ? t1 : t0 + sign * dt * static_cast<double>(k + 1);
        const double h = t_next - left.t;
        const ExtremalState next = rk4_step(left.state, left.t, h, eng, policy);
        guard(next, t_next, opts);
        TrajectorySample sample = make_sample(t_next, next, eng, policy);
        if (opts.detect_events && std::isfinite(left.s) && std::isfinite(sample.s) &&
            left.s != 0.0 && (left.s > 0.0) != (sample.s > 0.0)) {
            traj.events.push_back(locate_switch(left, h, sample.s, eng, policy, opts));
        }
        traj.samples.push_back(std::move(sample));
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,r_x,r_y,r_z,v_x,v_y,v_z,m,p_rx,p_ry,p_rz,p_vx,p_vy,p_vz,p_m,S,c\n";
    for (const TrajectorySample& smp : traj.samples) {
        const ExtremalState& x = smp.state;
        os << format_number(smp.t);
        for (int i = 0; i < 3; ++i) os << ',' << format_number(x.r[i]);
        for (int i = 0; i < 3; ++i) os << ',' << format_number(x.v[i]);
        os << ',' << format_number(x.m);
        for (int i = 0; i < 3; ++i) os << ',' << format_number(x.p_r[i]);
        for (int i = 0; i < 3; ++i) os << ',' << format_number(x.p_v[i]);
        os << ',' << format_number(x.p_m) << ',' << format_number(smp.s) << ','
           << format_number(smp.c) << '\n';
    }
}

}  // namespace singarc
