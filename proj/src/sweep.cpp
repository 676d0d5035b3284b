#include "singarc/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "singarc/costate_oracle.hpp"
#include "singarc/csv.hpp"
#include "singarc/errors.hpp"
#include "singarc/parallel.hpp"

namespace singarc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view text, const char* what) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": not a number: '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + ": not a finite number: '" + t + "'");
    }
    return v;
}

int parse_int(std::string_view text, const char* what) {
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw std::invalid_argument(std::string(what) + ": not an integer: '" + t + "'");
    }
    return v;
}

std::string branch_fields(SignBranch b) { return std::to_string(b.red) + "," + std::to_string(b.blue); }

}  // namespace

std::vector<double> GridSpec::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    if (n == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(i == n - 1 ? max : min + (max - min) * static_cast<double>(i) / (n - 1));
    }
    return out;
}

GridSpec parse_grid(std::string_view text) {
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos) {
        throw std::invalid_argument("grid must be 'min,max,n': '" + std::string(text) + "'");
    }
    GridSpec g;
    g.min = parse_double(text.substr(0, c1), "grid min");
    g.max = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "grid max");
    g.n = parse_int(text.substr(c2 + 1), "grid n");
    if (g.n < 1) throw std::invalid_argument("grid n must be at least 1");
    if (g.min > g.max) throw std::invalid_argument("grid min exceeds max");
    return g;
}

std::string to_string(const GridSpec& g) {
    return format_number(g.min) + "," + format_number(g.max) + "," + std::to_string(g.n);
}

void validate(const SweepConfig& cfg) {
    if (!(cfg.r_grid.min > 0.0)) throw DomainError("r grid must be positive");
    if (!(cfg.e_grid.min >= 0.0) || cfg.e_grid.max > 0.9) throw DomainError("e grid must lie in [0, 0.9]");
    if (!(cfg.m > 0.0) || !(cfg.mu > 0.0) || !(cfg.t_max > 0.0)) {
        throw DomainError("m, mu and t_max must be positive");
    }
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) throw DomainError("epsilon must lie in (0, 0.5)");
}

void apply_config_text(SweepConfig& cfg, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key == "r_grid") cfg.r_grid = parse_grid(value);
        else if (key == "e_grid") cfg.e_grid = parse_grid(value);
        else if (key == "theta_grid") cfg.theta_grid = parse_grid(value);
        else if (key == "m") cfg.m = parse_double(value, "m");
        else if (key == "t_max") cfg.t_max = parse_double(value, "t_max");
        else if (key == "mu") cfg.mu = parse_double(value, "mu");
        else if (key == "epsilon") cfg.epsilon = parse_double(value, "epsilon");
        else if (key == "output_path") cfg.output_path = value;
        else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

void apply_config_file(SweepConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    apply_config_text(cfg, in);
}

void write_config_metadata(std::ostream& os, const SweepConfig& cfg) {
    os << "# r_grid=" << to_string(cfg.r_grid) << "\n"
       << "# e_grid=" << to_string(cfg.e_grid) << "\n"
       << "# theta_grid=" << to_string(cfg.theta_grid) << "\n"
       << "# m=" << format_number(cfg.m) << "\n"
       << "# t_max=" << format_number(cfg.t_max) << " (assumed; not fixed by the source experiment)\n"
       << "# mu=" << format_number(cfg.mu) << " (assumed; not fixed by the source experiment)\n"
       << "# epsilon=" << format_number(cfg.epsilon) << "\n";
}

// ---- roots ----------------------------------------------------------------

void write_roots_header(std::ostream& os) { os << "e,theta,branch_red,branch_blue,subdomain,beta,psi_residual\n"; }

void write_root_rows(std::ostream& os, const BetaRootSet& set) {
    for (const BetaRoot& root : set.roots) {
        os << format_number(set.e) << ',' << format_number(set.theta) << ',' << branch_fields(root.branch)
           << ',' << root.subdomain << ',' << format_number(root.beta) << ','
           << format_number(root.residual) << '\n';
    }
}

RootSurfaceSummary summarize(std::span<const RootSurfaceCell> cells) {
    RootSurfaceSummary s;
    s.cells = static_cast<int>(cells.size());
    s.min_count = std::numeric_limits<int>::max();
    s.max_count = 0;
    for (const RootSurfaceCell& c : cells) {
        if (!c.roots) {
            ++s.failed;
            continue;
        }
        const int n = c.roots->total_count;
        s.min_count = std::min(s.min_count, n);
        s.max_count = std::max(s.max_count, n);
        if (n == 10) ++s.ten_count_cells;
        if (n < 10) ++s.below_ten_cells;
        if (!pairing_holds(*c.roots)) s.pairing_ok = false;
    }
    if (s.min_count == std::numeric_limits<int>::max()) s.min_count = 0;
    return s;
}

void write_root_surface_csv(std::ostream& os, std::span<const RootSurfaceCell> cells) {
    write_roots_header(os);
    for (const RootSurfaceCell& c : cells) {
        if (c.roots) write_root_rows(os, *c.roots);
    }
}

void write_root_surface_summary_csv(std::ostream& os, std::span<const RootSurfaceCell> cells) {
    os << "e,theta,total_count,upper_count,lower_count,pairing,status\n";
    for (const RootSurfaceCell& c : cells) {
        os << format_number(c.e) << ',' << format_number(c.theta) << ',';
        if (!c.roots) {
            std::string msg = c.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            os << "0,0,0,0,error: " << msg << '\n';
            continue;
        }
        os << c.roots->total_count << ',' << c.upper().size() << ',' << c.lower().size() << ','
           << (pairing_holds(*c.roots) ? 1 : 0) << ",ok\n";
    }
}

// ---- percentage map -------------------------------------------------------

double PercentageCell::fraction() const {
    const int d = denominator();
    return d == 0 ? kNaN : static_cast<double>(singular) / d;
}

PercentageMap percentage_map(const SweepConfig& cfg, std::ostream* records) {
    validate(cfg);
    PercentageMap map;
    map.r_values = cfg.r_grid.values();
    map.e_values = cfg.e_grid.values();
    const std::vector<double> thetas = cfg.theta_grid.values();
    const std::size_t nr = map.r_values.size();
    const std::size_t ne = map.e_values.size();
    map.cells.assign(nr * ne, PercentageCell{});

    EngineParams eng;
    eng.t_max = cfg.t_max;
    eng.mu = cfg.mu;
    ThrottleOptions topts;
    topts.epsilon = cfg.epsilon;

    // Columns are processed in batches so streamed records stay in order
    // without holding the whole sweep in memory.
    const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < ne; start += batch) {
        const std::size_t stop = std::min(ne, start + batch);
        std::vector<std::vector<PercentageCell>> columns(stop - start, std::vector<PercentageCell>(nr));
        std::vector<std::string> text(stop - start);
        std::vector<int> failures(stop - start, 0);
        parallel_for(stop - start, [&](std::size_t j) {
            const double e = map.e_values[start + j];
            std::ostringstream out;
            for (double theta : thetas) {
                BetaRootSet set;
                try {
                    set = enumerate_roots(e, theta);
                } catch (const std::exception&) {
                    ++failures[j];
                    continue;
                }
                for (const BetaRoot& root : set.roots) {
                    for (SignBranch assignment : kAllAssignments) {
                        if (shape_of(assignment) != shape_of(root.branch)) continue;
                        for (std::size_t ir = 0; ir < nr; ++ir) {
                            PercentageCell& cell = columns[j][ir];
                            PlanarOrbitPoint p{map.r_values[ir], e, theta, cfg.m, cfg.mu};
                            SingularEval ev;
                            try {
                                ev = singular_throttle(p, root.beta, assignment, eng, topts);
                            } catch (const DomainError&) {
                                ++cell.rejected;
                                continue;
                            }
                            switch (ev.classification) {
                                case ThrottleClass::singular: ++cell.singular; break;
                                case ThrottleClass::saturated_high: ++cell.saturated_high; break;
                                case ThrottleClass::saturated_low: ++cell.saturated_low; break;
                                case ThrottleClass::a_degenerate: ++cell.a_degenerate; break;
                            }
                            if (records) {
                                out << format_number(p.r_norm) << ',' << format_number(e) << ','
                                    << format_number(theta) << ',' << format_number(root.beta) << ','
                                    << branch_fields(assignment) << ',' << format_number(ev.c_s) << ','
                                    << to_string(ev.classification) << '\n';
                            }
                        }
                    }
                }
            }
            text[j] = out.str();
        });
        for (std::size_t j = 0; j < stop - start; ++j) {
            for (std::size_t ir = 0; ir < nr; ++ir) map.cells[ir * ne + start + j] = columns[j][ir];
            map.root_failures += failures[j];
        }
        if (records) {
            if (start == 0) *records << "r,e,theta,beta,branch_red,branch_blue,c_s,classification\n";
            for (const std::string& t : text) *records << t;
        }
    }
    return map;
}

void write_percentage_matrix(std::ostream& os, const PercentageMap& map, const SweepConfig& cfg) {
    write_config_metadata(os, cfg);
    os << "# rows: r; columns: e; entry: singular / (singular + saturated), marginalized uniformly over theta and sign assignments\n";
    os << "# a_degenerate evaluations are excluded from the denominator\n";
    os << "r";
    for (double e : map.e_values) os << ",e=" << format_number(e);
    os << '\n';
    for (std::size_t ir = 0; ir < map.r_values.size(); ++ir) {
        os << format_number(map.r_values[ir]);
        for (std::size_t ie = 0; ie < map.e_values.size(); ++ie) os << ',' << format_number(map.at(ir, ie).fraction());
        os << '\n';
    }
}

PercentageClaims evaluate_claims(const PercentageMap& map) {
    PercentageClaims c;
    c.inner_max_fraction = 0.0;
    c.outer_min_fraction = 1.0;
    bool inner_any = false;
    for (std::size_t ir = 0; ir < map.r_values.size(); ++ir) {
        const double r = map.r_values[ir];
        if (r < c.inner_r_min || r > c.inner_r_max) continue;
        for (std::size_t ie = 0; ie < map.e_values.size(); ++ie) {
            const double e = map.e_values[ie];
            if (e < c.inner_e_min || e > c.inner_e_max) continue;
            const double f = map.at(ir, ie).fraction();
            if (std::isnan(f)) continue;
            inner_any = true;
            c.inner_max_fraction = std::max(c.inner_max_fraction, f);
        }
    }
    if (!map.r_values.empty()) {
        const std::size_t last = map.r_values.size() - 1;
        for (std::size_t ie = 0; ie < map.e_values.size(); ++ie) {
            const double f = map.at(last, ie).fraction();
            if (!std::isnan(f)) c.outer_min_fraction = std::min(c.outer_min_fraction, f);
        }
    }
    c.inner_below_ten_percent = inner_any && c.inner_max_fraction < 0.10;
    c.outer_all_singular = !map.r_values.empty() && c.outer_min_fraction == 1.0;
    return c;
}

// ---- verify ---------------------------------------------------------------

VerifyReport run_verify(const SweepConfig& cfg, const VerifyOptions& opts) {
    validate(cfg);
    std::mt19937_64 rng(opts.seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    struct Draw {
        double r, e, theta, omega;
        std::size_t pick;
    };
    std::vector<Draw> draws;
    draws.reserve(static_cast<std::size_t>(opts.samples));
    for (int i = 0; i < opts.samples; ++i) {
        Draw d{};
        d.r = uniform(cfg.r_grid.min, cfg.r_grid.max);
        d.e = uniform(cfg.e_grid.min, cfg.e_grid.max);
        d.theta = uniform(cfg.theta_grid.min, cfg.theta_grid.max);
        d.omega = uniform(0.0, 2.0 * std::numbers::pi);
        d.pick = static_cast<std::size_t>(rng());
        draws.push_back(d);
    }

    VerifyReport report;
    report.rows.resize(draws.size());
    parallel_for(draws.size(), [&](std::size_t i) {
        const Draw& d = draws[i];
        VerifyRow& row = report.rows[i];
        row.r = d.r;
        row.e = d.e;
        row.theta = d.theta;
        row.omega = d.omega;
        row.conv_order = kNaN;
        row.d3dot_fd = kNaN;
        row.d3dot_analytic = kNaN;
        row.c_s = kNaN;

        const BetaRootSet set = enumerate_roots(d.e, d.theta);
        const BetaRoot& root = set.roots[d.pick % set.roots.size()];
        row.beta = root.beta;
        row.branch = root.branch;
        row.psi = root.residual;

        EngineParams eng;
        eng.t_max = cfg.t_max;
        eng.mu = cfg.mu;
        const PlanarOrbitPoint p{d.r, d.e, d.theta, cfg.m, cfg.mu};
        const SingularConfiguration sc = construct_configuration(p, d.omega, root.beta, root.branch, 1.0, eng);
        const SoundnessResiduals res = soundness_residuals(sc, eng);
        row.d1 = res.d1;
        row.d2 = res.d2;
        row.sound = std::abs(res.s) <= opts.soundness_s_tol * res.s_scale &&
                    std::abs(res.d1) <= opts.soundness_d1_tol * res.d1_scale &&
                    std::abs(res.d2) <= opts.soundness_d2_tol * res.d2_scale;

        row.d3 = d3_costate_form(sc, cfg.mu);
        const double d3_norm = cfg.mu * sc.p_v_norm * sc.p_v_norm / (d.r * d.r);
        row.d3_ok = std::abs(row.d3) / d3_norm <= opts.d3_tol;

        ThrottleOptions topts;
        topts.epsilon = cfg.epsilon;
        const SingularEval ev = singular_throttle(p, root.beta, root.branch, eng, topts);
        row.c_s = ev.c_s;
        row.fd_t_max = eng.t_max;
        if (!is_same_sign(root.branch) || !std::isfinite(ev.c_s) || ev.c_s < 0.0) return;

        EngineParams fd_eng = eng;
        double c = ev.c_s;
        if (c > 1.0) {
            // c_s scales as 1/t_max, so this lands it at exactly 1/2.
            fd_eng.t_max = eng.t_max * c / 0.5;
            c = 0.5;
        }
        row.fd_t_max = fd_eng.t_max;
        const FdReport fd = d3dot_fd_check(sc, c, fd_eng, scaled_fd_steps(p, c, fd_eng));
        row.fd_ran = true;
        row.d3dot_analytic = fd.analytic;
        row.d3dot_fd = fd.levels.back().fd;
        row.conv_order = fd.ratios.back();
        row.order_ok = fd.ratios.back() >= opts.order_lo && fd.ratios.back() <= opts.order_hi;
    });

    for (const VerifyRow& row : report.rows) {
        report.sound_pass += row.sound ? 1 : 0;
        report.d3_pass += row.d3_ok ? 1 : 0;
        report.fd_runs += row.fd_ran ? 1 : 0;
        report.order_pass += row.order_ok ? 1 : 0;
    }
    return report;
}

void write_verify_csv(std::ostream& os, const VerifyReport& report) {
    os << "e,theta,beta,branch_red,branch_blue,psi,d1,d2,d3,c_s,d3dot_analytic,d3dot_fd,conv_order\n";
    for (const VerifyRow& r : report.rows) {
        os << format_number(r.e) << ',' << format_number(r.theta) << ',' << format_number(r.beta) << ','
           << branch_fields(r.branch) << ',' << format_number(r.psi) << ',' << format_number(r.d1) << ','
           << format_number(r.d2) << ',' << format_number(r.d3) << ',' << format_number(r.c_s) << ','
           << format_number(r.d3dot_analytic) << ',' << format_number(r.d3dot_fd) << ','
           << format_number(r.conv_order) << '\n';
    }
}

}  // namespace singarc
