#include "singarc/singular_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singarc/errors.hpp"

namespace singarc {

namespace {

struct Trig {
    double cb, sb, k, w, ct, st, e;
};

Trig trig_of(const PlanarOrbitPoint& p, double beta) {
    validate(p);
    Trig t{};
    t.cb = std::cos(beta);
    t.sb = std::sin(beta);
    t.k = 1.0 - 3.0 * t.cb * t.cb;
    t.ct = std::cos(p.theta);
    t.st = std::sin(p.theta);
    t.e = p.e;
    t.w = 1.0 + p.e * t.ct;
    if (!(t.k > kDenominatorTol)) {
        throw DomainError("singular_control: beta must lie inside the domain (1 - 3 cos^2 beta > denom_tol)");
    }
    return t;
}

// Throttle-free additive terms of D3_dot = 0, in the order they appear in B.
std::array<double, 7> throttle_free_terms(const PlanarOrbitPoint& p, SignBranch branch, const Trig& t,
                                          double d_val) {
    const double g = p.mu / (p.r_norm * p.r_norm * p.r_norm);
    const double sqk = std::sqrt(t.k);
    const double q = -1.0 + branch.red * std::sqrt(t.k / t.w);
    const double c2s2 = t.cb * t.cb - t.sb * t.sb;
    const double es = t.e * t.st;
    const double blue = branch.blue;
    return {
        -6.0 * g * t.cb * t.cb * t.sb * t.sb,
        blue * 2.0 * g * sqk * c2s2 * std::sqrt(t.w) * q,
        -g * es * es / t.w * t.k,
        blue * 6.0 * g * t.cb * t.sb * sqk * es / std::sqrt(t.w),
        -g * t.k * ((t.w * t.w + es * es) / t.w - 1.0),
        2.0 * g * c2s2 * t.w * q * q,
        2.0 * t.cb * t.sb * d_val,
    };
}

}  // namespace

double a_term(double beta) {
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    return (1.0 - 3.0 * c * c) * c + 2.0 * c * s * s;
}

AlphaDdotTerms alpha_ddot_terms(const PlanarOrbitPoint& p, const ThrustGeometry& g) {
    validate(p);
    validate(g);
    const double r = p.r_norm;
    const double r3 = r * r * r;
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    const double w = 1.0 + p.e * ct;
    const double cb = std::cos(g.beta);
    const double sb = std::sin(g.beta);
    const double acc = g.c * g.t_max / p.m;

    AlphaDdotTerms out;
    out.h1 = (ct * st * cb + ct * ct * (2.0 + p.e * ct) / w * sb + p.e * ct / w * sb) / (2.0 * r);
    out.h2 = (-ct * st * cb + st * st * (2.0 + p.e * ct) / w * sb) / (2.0 * r);

    // K1, K2 straight from their definitions with the Gauss rates. On a
    // circular orbit e * theta_dot stays finite; its thrust part loses the 1/e.
    const double pre = std::sqrt(p.mu / r3) / (2.0 * std::sqrt(w));
    double e_dot = 0.0;
    double e_theta_dot = 0.0;
    if (p.e > kEccentricityFloor) {
        const GaussRates rates = gauss_rates(p, g);
        e_dot = rates.e_dot;
        e_theta_dot = p.e * rates.theta_dot;
    } else {
        e_dot = std::sqrt(r * w / p.mu) * st * (acc * cb) +
                std::sqrt(r / (p.mu * w)) * ((2.0 + p.e * ct) * ct + p.e) * (acc * sb);
        e_theta_dot = p.e * alpha_dot(p) +
                      std::sqrt(r / (p.mu * w)) * (w * ct * acc * cb - (2.0 + p.e * ct) * st * acc * sb);
    }
    out.k1 = pre * e_dot * ct;
    out.k2 = -pre * e_theta_dot * st;
    out.expanded = -1.5 * p.mu / r3 * p.e * st + out.k1 + out.k2;
    out.reduced = -2.0 * p.mu / r3 * p.e * st + acc * sb / r;
    return out;
}

double alpha_ddot(const PlanarOrbitPoint& p, const ThrustGeometry& g) {
    validate(p);
    validate(g);
    const double r = p.r_norm;
    return -2.0 * p.mu / (r * r * r) * p.e * std::sin(p.theta) +
           g.c * g.t_max / p.m * std::sin(g.beta) / r;
}

double d_term(const PlanarOrbitPoint& p, double beta, SignBranch branch) {
    const Trig t = trig_of(p, beta);
    const double g = p.mu / (p.r_norm * p.r_norm * p.r_norm);
    const double q = -1.0 + branch.red * std::sqrt(t.k / t.w);
    const double es = t.e * t.st;
    const double bracket = 6.0 * t.cb * t.sb * std::sqrt(t.w) * q - 3.0 * es * t.k / std::sqrt(t.w);
    return branch.red * g * bracket / (2.0 * std::sqrt(t.k)) + 2.0 * g * es;
}

BetaDdot beta_ddot(const PlanarOrbitPoint& p, const ThrustGeometry& g, SignBranch branch) {
    validate(g);
    BetaDdot out;
    out.d_val = d_term(p, g.beta, branch);
    out.value = out.d_val - g.c * g.t_max / p.m * std::sin(g.beta) / p.r_norm;
    return out;
}

D3DotStateForm d3dot_state_form(const PlanarOrbitPoint& p, double beta, SignBranch branch,
                                double c, double t_max) {
    const Trig t = trig_of(p, beta);
    const double d_val = d_term(p, beta, branch);
    const std::array<double, 7> free_terms = throttle_free_terms(p, branch, t, d_val);
    const double acc = c * t_max / p.m;

    D3DotStateForm out;
    std::copy(free_terms.begin(), free_terms.end(), out.terms.begin());
    out.terms[7] = -t.k * acc * t.cb / p.r_norm;
    out.terms[8] = -2.0 * t.cb * t.sb * acc * t.sb / p.r_norm;
    for (double term : out.terms) {
        out.sum += term;
        out.scale = std::max(out.scale, std::abs(term));
    }
    return out;
}

const char* to_string(ThrottleClass c) {
    switch (c) {
        case ThrottleClass::singular: return "singular";
        case ThrottleClass::saturated_high: return "saturated_high";
        case ThrottleClass::saturated_low: return "saturated_low";
        case ThrottleClass::a_degenerate: return "a_degenerate";
    }
    return "unknown";
}

ThrottleClass classify_throttle(double c_s, double epsilon) {
    if (c_s > 1.0 - epsilon) return ThrottleClass::saturated_high;
    if (c_s < epsilon) return ThrottleClass::saturated_low;
    return ThrottleClass::singular;
}

SingularEval singular_throttle(const PlanarOrbitPoint& p, double beta, SignBranch branch,
                               const EngineParams& eng, const ThrottleOptions& opts) {
    validate(eng);
    if (p.mu != eng.mu) throw DomainError("singular_throttle: point and engine disagree on mu");
    if (!(eng.t_max > 0.0)) throw DomainError("singular_throttle: t_max must be positive");
    const Trig t = trig_of(p, beta);
    if (opts.enforce_gate) {
        const double residual = psi(p.e, p.theta, beta, branch);
        if (!(std::abs(residual) <= opts.gate_tol)) {
            throw DomainError("singular_throttle: (e, theta, beta) does not satisfy Psi = 0");
        }
    }

    SingularEval out;
    out.d_val = d_term(p, beta, branch);
    const std::array<double, 7> terms = throttle_free_terms(p, branch, t, out.d_val);
    double bracket = 0.0;
    for (double term : terms) bracket += term;
    out.b_val = p.r_norm * p.m / eng.t_max * bracket;
    out.a_val = a_term(beta);
    if (std::abs(out.a_val) <= opts.a_tol) {
        out.c_s = std::numeric_limits<double>::quiet_NaN();
        out.classification = ThrottleClass::a_degenerate;
        return out;
    }
    out.c_s = out.b_val / out.a_val;
    out.classification = classify_throttle(out.c_s, opts.epsilon);
    return out;
}

const char* to_string(ADegeneracy d) {
    switch (d) {
        case ADegeneracy::persistent_possible: return "persistent_possible";
        case ADegeneracy::isolated_only: return "isolated_only";
        case ADegeneracy::non_degenerate: return "non_degenerate";
    }
    return "unknown";
}

ADegeneracy a_degeneracy_analysis(const PlanarOrbitPoint& p, double beta, double a_tol,
                                  double angle_tol) {
    if (std::abs(std::cos(beta)) > a_tol) return ADegeneracy::non_degenerate;
    if (p.e <= kEccentricityFloor && std::abs(std::cos(p.theta)) <= angle_tol) {
        return ADegeneracy::persistent_possible;
    }
    return ADegeneracy::isolated_only;
}

}  // namespace singarc
