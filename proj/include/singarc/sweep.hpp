#pragma once

// Grid sweeps behind the command-line driver: root surfaces, the singular
// throttle percentage map and the costate oracle report.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "singarc/extremal_dynamics.hpp"
#include "singarc/singular_conditions.hpp"
#include "singarc/singular_control.hpp"

namespace singarc {

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int n = 1;

    /// n uniformly spaced values including both ends (just `min` when n == 1).
    std::vector<double> values() const;
};

/// Parses "min,max,n". Throws std::invalid_argument on malformed text,
/// n < 1, non-finite bounds or min > max.
GridSpec parse_grid(std::string_view text);
std::string to_string(const GridSpec& g);

struct SweepConfig {
    GridSpec r_grid{0.1, 15.0, 60};
    GridSpec e_grid{1e-3, 0.9, 50};
    GridSpec theta_grid{1e-2, 1.99 * std::numbers::pi, 100};
    double m = 1.0;
    double t_max = 1.0;
    double mu = 1.0;
    double epsilon = kSaturationEpsilon;
    std::string output_path;
};

/// Throws DomainError for non-positive r, m, mu, t_max, e outside [0, 0.9] or
/// epsilon outside (0, 0.5).
void validate(const SweepConfig& cfg);

/// Flat key=value lines; blank lines and lines starting with '#' are skipped.
/// Keys: r_grid, e_grid, theta_grid, m, t_max, mu, epsilon, output_path.
/// Throws std::invalid_argument on unknown keys or bad values.
void apply_config_text(SweepConfig& cfg, std::istream& in);
void apply_config_file(SweepConfig& cfg, const std::string& path);

/// '#'-prefixed lines recording the configuration.
void write_config_metadata(std::ostream& os, const SweepConfig& cfg);

// ---- roots ----------------------------------------------------------------

/// e, theta, branch_red, branch_blue, subdomain, beta, psi_residual
void write_roots_header(std::ostream& os);
void write_root_rows(std::ostream& os, const BetaRootSet& set);

struct RootSurfaceSummary {
    int cells = 0;
    int failed = 0;
    int min_count = 0;
    int max_count = 0;
    int ten_count_cells = 0;
    int below_ten_cells = 0;
    bool pairing_ok = true;
};

RootSurfaceSummary summarize(std::span<const RootSurfaceCell> cells);

void write_root_surface_csv(std::ostream& os, std::span<const RootSurfaceCell> cells);
/// e, theta, total_count, upper_count, lower_count, pairing, status
void write_root_surface_summary_csv(std::ostream& os, std::span<const RootSurfaceCell> cells);

// ---- percentage map -------------------------------------------------------

/// Every admissible sign assignment: the mixed root is evaluated for both
/// (+,-) and (-,+), which share the root but not the throttle.
inline constexpr std::array<SignBranch, 4> kAllAssignments{kBothPositive, kBothNegative, kMixed,
                                                           kMixedSwapped};

struct SweepRecord {
    double r = 0.0;
    double e = 0.0;
    double theta = 0.0;
    double beta = 0.0;
    SignBranch branch;
    double c_s = 0.0;
    ThrottleClass classification = ThrottleClass::a_degenerate;
};

struct PercentageCell {
    int singular = 0;
    int saturated_high = 0;
    int saturated_low = 0;
    int a_degenerate = 0;
    int rejected = 0;  ///< root too close to the domain edge or failed re-gating

    int denominator() const { return singular + saturated_high + saturated_low; }
    /// NaN when the denominator is zero.
    double fraction() const;
};

struct PercentageMap {
    std::vector<double> r_values;
    std::vector<double> e_values;
    std::vector<PercentageCell> cells;  ///< row-major, r rows by e columns
    int root_failures = 0;              ///< (e, theta) cells whose enumeration threw

    const PercentageCell& at(std::size_t ir, std::size_t ie) const {
        return cells[ir * e_values.size() + ie];
    }
};

/// Records are streamed to `records` (when non-null) in e, theta, root,
/// assignment, r order with a header row.
PercentageMap percentage_map(const SweepConfig& cfg, std::ostream* records = nullptr);

void write_percentage_matrix(std::ostream& os, const PercentageMap& map, const SweepConfig& cfg);

struct PercentageClaims {
    double inner_r_min = 0.7;
    double inner_r_max = 3.3;
    double inner_e_min = 0.1;
    double inner_e_max = 0.5;
    double inner_max_fraction = 0.0;  ///< largest fraction in the inner band
    double outer_min_fraction = 0.0;  ///< smallest fraction on the largest-radius row
    bool inner_below_ten_percent = false;
    bool outer_all_singular = false;
};

PercentageClaims evaluate_claims(const PercentageMap& map);

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
    int samples = 200;
    std::uint64_t seed = 20240611;
    double soundness_s_tol = 1e-14;
    double soundness_d1_tol = 1e-14;
    double soundness_d2_tol = 1e-12;
    double d3_tol = 1e-8;  ///< on |D3| / (mu |p_v|^2 / r^2)
    double order_lo = 3.5;
    double order_hi = 4.5;
};

struct VerifyRow {
    double r = 0.0;
    double e = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    double beta = 0.0;
    SignBranch branch;
    double psi = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double c_s = 0.0;
    double fd_t_max = 0.0;  ///< thrust used for the FD run (rescaled when c_s > 1)
    double d3dot_analytic = 0.0;
    double d3dot_fd = 0.0;
    double conv_order = 0.0;  ///< NaN when the FD check did not run
    bool sound = false;
    bool d3_ok = false;
    bool fd_ran = false;
    bool order_ok = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    int sound_pass = 0;
    int d3_pass = 0;
    int fd_runs = 0;
    int order_pass = 0;

    bool soundness_ok() const { return sound_pass == static_cast<int>(rows.size()); }
};

/// Samples (r, e, theta) uniformly from the config ranges and one root per
/// sample, builds the costates and runs the oracle. The FD check runs on
/// same-sign roots with c = c_s; when c_s > 1 the thrust is scaled up so that
/// c_s = 1/2, and negative c_s skips the check.
VerifyReport run_verify(const SweepConfig& cfg, const VerifyOptions& opts = {});

/// e, theta, beta, branch_red, branch_blue, psi, d1, d2, d3, c_s, d3dot_analytic, d3dot_fd, conv_order
void write_verify_csv(std::ostream& os, const VerifyReport& report);

}  // namespace singarc
