// Command-line driver for the root-surface, percentage-map and oracle sweeps.
// Exit codes: 0 success, 1 invariant failure, 2 usage or input error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "singarc/costate_oracle.hpp"
#include "singarc/csv.hpp"
#include "singarc/errors.hpp"
#include "singarc/extremal_dynamics.hpp"
#include "singarc/singular_conditions.hpp"
#include "singarc/singular_control.hpp"
#include "singarc/sweep.hpp"

using namespace singarc;

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<double> mu, t_max, mass, epsilon;
    std::optional<std::string> r_grid, e_grid, theta_grid;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool grids) {
    cmd->add_option("--config", f.config_path, "key=value config file (flags win)");
    cmd->add_option("--out", f.out_path, "output path (default stdout)");
    cmd->add_option("--mu", f.mu, "gravitational parameter");
    cmd->add_option("--tmax", f.t_max, "maximum thrust");
    cmd->add_option("--mass", f.mass, "spacecraft mass");
    cmd->add_option("--epsilon", f.epsilon, "saturation band for singular classification");
    if (grids) {
        cmd->add_option("--r-grid", f.r_grid, "radius grid min,max,n");
        cmd->add_option("--e-grid", f.e_grid, "eccentricity grid min,max,n");
        cmd->add_option("--theta-grid", f.theta_grid, "true anomaly grid min,max,n");
    }
}

SweepConfig resolve(const CommonFlags& f, SweepConfig cfg = {}) {
    if (!f.config_path.empty()) apply_config_file(cfg, f.config_path);
    if (f.mu) cfg.mu = *f.mu;
    if (f.t_max) cfg.t_max = *f.t_max;
    if (f.mass) cfg.m = *f.mass;
    if (f.epsilon) cfg.epsilon = *f.epsilon;
    if (f.r_grid) cfg.r_grid = parse_grid(*f.r_grid);
    if (f.e_grid) cfg.e_grid = parse_grid(*f.e_grid);
    if (f.theta_grid) cfg.theta_grid = parse_grid(*f.theta_grid);
    if (!f.out_path.empty()) cfg.output_path = f.out_path;
    validate(cfg);
    return cfg;
}

/// stdout unless a path is given.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::invalid_argument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

SignBranch make_branch(int red, int blue) {
    if ((red != 1 && red != -1) || (blue != 1 && blue != -1)) {
        throw std::invalid_argument("branch signs must be +1 or -1");
    }
    return SignBranch{red, blue};
}

void write_control_row(std::ostream& os, const PlanarOrbitPoint& p, double beta, SignBranch b,
                       const EngineParams& eng, const ThrottleOptions& topts) {
    const SingularEval ev = singular_throttle(p, beta, b, eng, topts);
    os << format_number(p.r_norm) << ',' << format_number(p.e) << ',' << format_number(p.theta) << ','
       << format_number(beta) << ',' << b.red << ',' << b.blue << ','
       << format_number(psi(p.e, p.theta, beta, b)) << ',' << format_number(ev.a_val) << ','
       << format_number(ev.b_val) << ',' << format_number(ev.d_val) << ',' << format_number(ev.c_s) << ','
       << to_string(ev.classification) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singular-arc necessary conditions for planar low-thrust transfers"};
    app.require_subcommand(1);

    // psi-roots
    CommonFlags roots_flags;
    double roots_e = 0.0, roots_theta = 0.0;
    auto* roots_cmd = app.add_subcommand("psi-roots", "all beta roots of Psi at one (e, theta)");
    add_common(roots_cmd, roots_flags, false);
    roots_cmd->add_option("--e", roots_e, "eccentricity")->required();
    roots_cmd->add_option("--theta", roots_theta, "true anomaly [rad]")->required();

    // root-surface
    CommonFlags surf_flags;
    std::string surf_summary;
    auto* surf_cmd = app.add_subcommand("root-surface", "roots over an (e, theta) grid");
    add_common(surf_cmd, surf_flags, true);
    surf_cmd->add_option("--summary", surf_summary, "per-cell count CSV");

    // percentage-map
    CommonFlags pct_flags;
    std::string pct_records;
    auto* pct_cmd = app.add_subcommand("percentage-map", "fraction of singular throttles per (r, e)");
    add_common(pct_cmd, pct_flags, true);
    pct_cmd->add_option("--records", pct_records, "per-evaluation CSV");

    // control
    CommonFlags ctl_flags;
    double ctl_r = 1.0, ctl_e = 0.0, ctl_theta = 0.0;
    std::optional<double> ctl_beta;
    int ctl_red = 1, ctl_blue = 1;
    bool ctl_no_gate = false;
    auto* ctl_cmd = app.add_subcommand("control", "singular throttle at one point (every root if --beta is omitted)");
    add_common(ctl_cmd, ctl_flags, false);
    ctl_cmd->add_option("--r", ctl_r, "orbit radius")->required();
    ctl_cmd->add_option("--e", ctl_e, "eccentricity")->required();
    ctl_cmd->add_option("--theta", ctl_theta, "true anomaly [rad]")->required();
    ctl_cmd->add_option("--beta", ctl_beta, "thrust angle [rad]");
    ctl_cmd->add_option("--red", ctl_red, "beta_dot branch sign");
    ctl_cmd->add_option("--blue", ctl_blue, "p_r orientation sign");
    ctl_cmd->add_flag("--no-gate", ctl_no_gate, "skip the |Psi| gate");

    // verify
    CommonFlags ver_flags;
    VerifyOptions ver_opts;
    auto* ver_cmd = app.add_subcommand("verify", "costate oracle over sampled configurations");
    add_common(ver_cmd, ver_flags, true);
    ver_cmd->add_option("--samples", ver_opts.samples, "number of configurations")->check(CLI::PositiveNumber);
    ver_cmd->add_option("--seed", ver_opts.seed, "sampling seed");

    // propagate
    CommonFlags prop_flags;
    double prop_r = 1.0, prop_e = 0.0, prop_theta = 0.0, prop_omega = 0.0, prop_beta = std::acos(-1.0) / 2;
    double prop_pv = 1.0, prop_c = 0.0, prop_t1 = 1.0, prop_dt = 1e-3, prop_isp = 1.0;
    int prop_red = 1, prop_blue = 1;
    std::string prop_policy = "pmp";
    auto* prop_cmd = app.add_subcommand("propagate", "extremal trajectory from a constructed costate configuration");
    add_common(prop_cmd, prop_flags, false);
    prop_cmd->add_option("--r", prop_r, "orbit radius");
    prop_cmd->add_option("--e", prop_e, "eccentricity");
    prop_cmd->add_option("--theta", prop_theta, "true anomaly [rad]");
    prop_cmd->add_option("--omega", prop_omega, "argument of periapsis [rad]");
    prop_cmd->add_option("--beta", prop_beta, "angle from r to p_v [rad]");
    prop_cmd->add_option("--red", prop_red, "beta_dot branch sign");
    prop_cmd->add_option("--blue", prop_blue, "p_r orientation sign");
    prop_cmd->add_option("--pv-norm", prop_pv, "|p_v|");
    prop_cmd->add_option("--isp-g0", prop_isp, "exhaust velocity");
    prop_cmd->add_option("--policy", prop_policy, "pmp or constant")->check(CLI::IsMember({"pmp", "constant"}));
    prop_cmd->add_option("--c", prop_c, "throttle for the constant policy")->check(CLI::Range(0.0, 1.0));
    prop_cmd->add_option("--t1", prop_t1, "final time (negative integrates backwards)");
    prop_cmd->add_option("--dt", prop_dt, "step size")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*roots_cmd) {
            const SweepConfig cfg = resolve(roots_flags);
            const BetaRootSet set = enumerate_roots(roots_e, roots_theta);
            Output out(cfg.output_path);
            write_roots_header(out.stream());
            write_root_rows(out.stream(), set);
            return 0;
        }
        if (*surf_cmd) {
            SweepConfig base;
            base.e_grid = {0.0, 0.5, 26};
            base.theta_grid = {1e-2, 2.0 * std::acos(-1.0) - 1e-2, 100};
            const SweepConfig cfg = resolve(surf_flags, base);
            const auto egrid = cfg.e_grid.values();
            const auto tgrid = cfg.theta_grid.values();
            const auto cells = root_surface_sweep(egrid, tgrid);
            Output out(cfg.output_path);
            write_root_surface_csv(out.stream(), cells);
            if (!surf_summary.empty()) {
                Output summary(surf_summary);
                write_root_surface_summary_csv(summary.stream(), cells);
            }
            const RootSurfaceSummary s = summarize(cells);
            std::cerr << "cells=" << s.cells << " failed=" << s.failed << " min_count=" << s.min_count
                      << " max_count=" << s.max_count << " ten=" << s.ten_count_cells
                      << " below_ten=" << s.below_ten_cells << " pairing=" << (s.pairing_ok ? "ok" : "broken")
                      << '\n';
            const bool ten_regime = cfg.e_grid.max <= 0.5;
            if (s.failed > 0 || !s.pairing_ok) return kExitInvariant;
            if (ten_regime && s.ten_count_cells != s.cells) {
                std::cerr << "count assertion failed: expected 10 roots in every cell for e <= 0.5\n";
                return kExitInvariant;
            }
            return 0;
        }
        if (*pct_cmd) {
            const SweepConfig cfg = resolve(pct_flags);
            std::unique_ptr<Output> rec;
            if (!pct_records.empty()) rec = std::make_unique<Output>(pct_records);
            const PercentageMap map = percentage_map(cfg, rec ? &rec->stream() : nullptr);
            Output out(cfg.output_path);
            write_percentage_matrix(out.stream(), map, cfg);
            const PercentageClaims c = evaluate_claims(map);
            std::cerr << (c.inner_below_ten_percent ? "PASS" : "WARN")
                      << " inner band (r in [" << c.inner_r_min << ", " << c.inner_r_max << "], e in ["
                      << c.inner_e_min << ", " << c.inner_e_max << "]) max fraction "
                      << format_number(c.inner_max_fraction) << " (claim < 0.10)\n"
                      << (c.outer_all_singular ? "PASS" : "WARN") << " largest radius min fraction "
                      << format_number(c.outer_min_fraction) << " (claim 1.0)\n";
            if (map.root_failures > 0) {
                std::cerr << "root enumeration failed in " << map.root_failures << " cells\n";
                return kExitInvariant;
            }
            return 0;
        }
        if (*ctl_cmd) {
            const SweepConfig cfg = resolve(ctl_flags);
            EngineParams eng;
            eng.t_max = cfg.t_max;
            eng.mu = cfg.mu;
            ThrottleOptions topts;
            topts.epsilon = cfg.epsilon;
            topts.enforce_gate = !ctl_no_gate;
            const PlanarOrbitPoint p{ctl_r, ctl_e, ctl_theta, cfg.m, cfg.mu};
            Output out(cfg.output_path);
            out.stream() << "r,e,theta,beta,branch_red,branch_blue,psi,a,b,d,c_s,classification\n";
            if (ctl_beta) {
                write_control_row(out.stream(), p, *ctl_beta, make_branch(ctl_red, ctl_blue), eng, topts);
                return 0;
            }
            const BetaRootSet set = enumerate_roots(ctl_e, ctl_theta);
            for (const BetaRoot& root : set.roots) {
                for (SignBranch b : kAllAssignments) {
                    if (shape_of(b) == shape_of(root.branch)) write_control_row(out.stream(), p, root.beta, b, eng, topts);
                }
            }
            return 0;
        }
        if (*ver_cmd) {
            const SweepConfig cfg = resolve(ver_flags);
            const VerifyReport rep = run_verify(cfg, ver_opts);
            Output out(cfg.output_path);
            write_verify_csv(out.stream(), rep);
            const int n = static_cast<int>(rep.rows.size());
            std::cerr << "soundness " << rep.sound_pass << "/" << n << ", d3 at roots " << rep.d3_pass << "/" << n
                      << ", fd order " << rep.order_pass << "/" << rep.fd_runs << '\n';
            return rep.soundness_ok() ? 0 : kExitInvariant;
        }
        if (*prop_cmd) {
            const SweepConfig cfg = resolve(prop_flags);
            EngineParams eng;
            eng.t_max = cfg.t_max;
            eng.mu = cfg.mu;
            eng.isp_g0 = prop_isp;
            const PlanarOrbitPoint p{prop_r, prop_e, prop_theta, cfg.m, cfg.mu};
            const SingularConfiguration sc =
                construct_configuration(p, prop_omega, prop_beta, make_branch(prop_red, prop_blue), prop_pv, eng);
            const ControlPolicy policy = prop_policy == "pmp" ? pmp_policy(eng) : constant_throttle_policy(prop_c);
            const Trajectory traj = propagate(sc.state, eng, 0.0, prop_t1, prop_dt, policy);
            Output out(cfg.output_path);
            write_trajectory_csv(out.stream(), traj);
            return 0;
        }
    } catch (const CountViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const PropagationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::logic_error& e) {
        // DomainError and std::invalid_argument: bad input values.
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return 0;
}
