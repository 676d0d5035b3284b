#include "singarc/singular_conditions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "singarc/csv.hpp"
#include "singarc/errors.hpp"
#include "singarc/orbital_core.hpp"
#include "singarc/parallel.hpp"

namespace singarc {

namespace {

constexpr double kPi = std::numbers::pi;

double conic(double e, double theta) {
    const double w = 1.0 + e * std::cos(theta);
    if (!(w > 0.0)) throw DomainError("singular_conditions: 1 + e cos(theta) must be positive");
    return w;
}

struct ShapeRoots {
    std::vector<double> betas;  // subdomain 1 only
};

double bisect(double e, double theta, SignBranch branch, double lo, double hi, double f_lo,
              double tol) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        const double f_mid = psi(e, theta, mid, branch);
        // the shifted copy in subdomain 2 has to meet the tolerance as well
        if (std::abs(f_mid) < tol && std::abs(psi(e, theta, mid + kPi, branch)) < tol) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> scan_shape(double e, double theta, SignBranch branch, int n,
                               const RootScanOptions& opts) {
    const double lo = BetaDomain::sub1_lo + opts.endpoint_inset;
    const double hi = BetaDomain::sub1_hi - opts.endpoint_inset;
    const double step = (hi - lo) / static_cast<double>(n);
    std::vector<double> out;
    double x_prev = lo;
    double f_prev = psi(e, theta, lo, branch);
    for (int i = 1; i <= n; ++i) {
        const double x = (i == n) ? hi : lo + step * static_cast<double>(i);
        const double f = psi(e, theta, x, branch);
        if (f_prev == 0.0) {
            out.push_back(x_prev);
        } else if (f != 0.0 && (f > 0.0) != (f_prev > 0.0)) {
            out.push_back(bisect(e, theta, branch, x_prev, x, f_prev, opts.root_tol));
        }
        x_prev = x;
        f_prev = f;
    }
    if (f_prev == 0.0) out.push_back(x_prev);
    return out;
}

BetaRootSet assemble(double e, double theta, int n, const RootScanOptions& opts) {
    BetaRootSet set;
    set.e = e;
    set.theta = theta;
    for (BranchShape shape : {BranchShape::both_positive, BranchShape::mixed, BranchShape::both_negative}) {
        const SignBranch branch = representative(shape);
        const std::vector<double> sub1 = scan_shape(e, theta, branch, n, opts);
        for (int sub : {1, 2}) {
            for (double b : sub1) {
                const double beta = sub == 1 ? b : b + kPi;
                set.roots.push_back(BetaRoot{beta, branch, sub, psi(e, theta, beta, branch)});
            }
        }
    }
    set.total_count = static_cast<int>(set.roots.size());
    return set;
}

}  // namespace

BranchShape shape_of(SignBranch b) {
    if (b.red != b.blue) return BranchShape::mixed;
    return b.red > 0 ? BranchShape::both_positive : BranchShape::both_negative;
}

SignBranch representative(BranchShape s) {
    switch (s) {
        case BranchShape::both_positive: return kBothPositive;
        case BranchShape::mixed: return kMixed;
        case BranchShape::both_negative: return kBothNegative;
    }
    return kMixed;
}

std::optional<int> BetaDomain::subdomain_of(double beta) {
    const double b = wrap_two_pi(beta);
    if (radicand(b) < -kRadicandSlack) return std::nullopt;
    return std::sin(b) >= 0.0 ? 1 : 2;
}

double radicand(double beta) {
    const double c = std::cos(beta);
    return 1.0 - 3.0 * c * c;
}

double gamma_term(double e, double theta) { return e * std::sin(theta) / conic(e, theta); }

double psi(double e, double theta, double beta, SignBranch branch) {
    const double w = conic(e, theta);
    double k = radicand(beta);
    if (k < -kRadicandSlack) {
        throw DomainError("psi: beta outside the admissible domain (1 - 3 cos^2 beta < 0)");
    }
    k = std::max(k, 0.0);
    const double root = std::sqrt(k / w);
    const double cs = std::cos(beta) * std::sin(beta);
    const double gamma = e * std::sin(theta) / w;
    return 2.0 * cs * (-1.0 + branch.red * root + branch.blue * root) - k * gamma;
}

double psi_derivative(double e, double theta, double beta, SignBranch branch) {
    const double w = conic(e, theta);
    const double k = radicand(beta);
    if (!(k > 0.0)) throw DomainError("psi_derivative: beta must be strictly inside the domain");
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    const double gamma = e * std::sin(theta) / w;
    const double signs = branch.red + branch.blue;
    return 2.0 * (c * c - s * s) * (-1.0 + signs * std::sqrt(k / w)) +
           6.0 * c * c * s * s * signs / std::sqrt(k * w) - 6.0 * c * s * gamma;
}

int BetaRootSet::count(BranchShape s, int subdomain) const {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(), [&](const BetaRoot& r) {
        return shape_of(r.branch) == s && r.subdomain == subdomain;
    }));
}

BetaRootSet enumerate_roots(double e, double theta, const RootScanOptions& opts) {
    if (!(e >= 0.0 && e <= opts.e_max)) {
        throw DomainError("enumerate_roots: eccentricity outside [0, e_max]");
    }
    conic(e, theta);
    if (opts.scan_n < 2) throw std::invalid_argument("enumerate_roots: scan_n must be >= 2");

    BetaRootSet set = assemble(e, theta, opts.scan_n, opts);
    if (set.total_count < kMinRootCount) {
        // Undercount means a tangency was stepped over; the lower bound is a theorem.
        set = assemble(e, theta, opts.scan_n * opts.refine_factor, opts);
    }
    if (set.total_count < kMinRootCount || set.total_count > kMaxRootCount) {
        throw CountViolation("enumerate_roots: found " + std::to_string(set.total_count) +
                             " roots at e = " + format_number(e) + ", theta = " +
                             format_number(theta) + " (expected 6..10)");
    }
    return set;
}

bool pairing_holds(const BetaRootSet& set, double tol) {
    for (const BetaRoot& a : set.roots) {
        if (a.subdomain != 1) continue;
        const bool found = std::any_of(set.roots.begin(), set.roots.end(), [&](const BetaRoot& b) {
            return b.subdomain == 2 && b.branch == a.branch && std::abs(b.beta - (a.beta + kPi)) <= tol;
        });
        if (!found) return false;
    }
    return set.count(BranchShape::both_positive, 1) == set.count(BranchShape::both_positive, 2) &&
           set.count(BranchShape::mixed, 1) == set.count(BranchShape::mixed, 2) &&
           set.count(BranchShape::both_negative, 1) == set.count(BranchShape::both_negative, 2);
}

std::vector<BetaRoot> RootSurfaceCell::upper() const {
    std::vector<BetaRoot> out;
    if (!roots) return out;
    std::copy_if(roots->roots.begin(), roots->roots.end(), std::back_inserter(out),
                 [](const BetaRoot& r) { return std::sin(r.beta) > 0.0; });
    return out;
}

std::vector<BetaRoot> RootSurfaceCell::lower() const {
    std::vector<BetaRoot> out;
    if (!roots) return out;
    std::copy_if(roots->roots.begin(), roots->roots.end(), std::back_inserter(out),
                 [](const BetaRoot& r) { return std::sin(r.beta) < 0.0; });
    return out;
}

std::vector<RootSurfaceCell> root_surface_sweep(std::span<const double> e_grid,
                                                std::span<const double> theta_grid,
                                                const RootScanOptions& opts) {
    const std::size_t nt = theta_grid.size();
    std::vector<RootSurfaceCell> cells(e_grid.size() * nt);
    parallel_for(cells.size(), [&](std::size_t idx) {
        RootSurfaceCell& cell = cells[idx];
        cell.e = e_grid[idx / nt];
        cell.theta = theta_grid[idx % nt];
        try {
            cell.roots = enumerate_roots(cell.e, cell.theta, opts);
        } catch (const std::exception& ex) {
            cell.error = std::string(ex.what()) + " [e = " + format_number(cell.e) +
                         ", theta = " + format_number(cell.theta) + "]";
        }
    });
    return cells;
}

}  // namespace singarc
