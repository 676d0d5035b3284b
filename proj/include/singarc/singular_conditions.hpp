#pragma once

// Algebraic necessary condition Psi(e, theta, beta) = 0 for singular arcs,
// its admissible beta domain, and enumeration of its zeros.

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace singarc {

/// Sign choice of the two radical terms in Psi.
///
///   Psi = 2 cos(b) sin(b) (-1 + red sqrt(k/w) + blue sqrt(k/w)) - k e sin(theta)/w
///   k = 1 - 3 cos^2(b),  w = 1 + e cos(theta)
///
/// red is the sign of alpha_dot + beta_dot relative to sqrt(mu k / r^3).
/// blue is the coefficient the p_r orientation puts in front of the second
/// radical: blue = +1 places p_r at the angle beta - pi/2 from r (so that
/// r.p_r = +|r||p_r| sin(beta)), blue = -1 at beta + pi/2.
struct SignBranch {
    int red = 1;
    int blue = 1;

    friend bool operator==(const SignBranch&, const SignBranch&) = default;
};

inline constexpr SignBranch kBothPositive{+1, +1};
inline constexpr SignBranch kMixed{+1, -1};
inline constexpr SignBranch kMixedSwapped{-1, +1};
inline constexpr SignBranch kBothNegative{-1, -1};

/// The two mixed assignments give the same Psi, so four branches make three shapes.
enum class BranchShape { both_positive, mixed, both_negative };

BranchShape shape_of(SignBranch b);
/// Representative branch of a shape (kMixed for the mixed shape).
SignBranch representative(BranchShape s);
/// Same-sign branches are the only ones where the beta_dot branch and the p_r
/// orientation agree with p_v' = -p_r along an actual trajectory.
inline bool is_same_sign(SignBranch b) { return b.red == b.blue; }

/// Admissible set 1 - 3 cos^2(beta) >= 0: two sub-intervals per revolution.
struct BetaDomain {
    /// arccos(1/sqrt(3))
    static constexpr double beta0 = 0.9553166181245093;
    static constexpr double sub1_lo = beta0;
    static constexpr double sub1_hi = std::numbers::pi - beta0;
    static constexpr double sub2_lo = std::numbers::pi + beta0;
    static constexpr double sub2_hi = 2.0 * std::numbers::pi - beta0;

    /// 1 or 2 for beta (mod 2 pi) inside a sub-interval, nullopt otherwise.
    static std::optional<int> subdomain_of(double beta);
};

/// Rounding slack on 1 - 3 cos^2(beta) at the interval endpoints.
inline constexpr double kRadicandSlack = 1e-14;

/// 1 - 3 cos^2(beta).
double radicand(double beta);

/// e sin(theta) / (1 + e cos(theta)).
double gamma_term(double e, double theta);

/// Throws DomainError when 1 - 3 cos^2(beta) < 0 or 1 + e cos(theta) <= 0.
double psi(double e, double theta, double beta, SignBranch branch);

/// d Psi / d beta. Requires beta strictly inside the domain (the
/// same-sign derivatives diverge at the endpoints).
double psi_derivative(double e, double theta, double beta, SignBranch branch);

struct BetaRoot {
    double beta = 0.0;
    SignBranch branch;  ///< kMixed stands for both mixed assignments
    int subdomain = 1;
    double residual = 0.0;  ///< Psi at beta
};

struct BetaRootSet {
    double e = 0.0;
    double theta = 0.0;
    std::vector<BetaRoot> roots;  ///< ordered by shape, then subdomain, then beta
    int total_count = 0;

    int count(BranchShape s, int subdomain) const;
};

struct RootScanOptions {
    int scan_n = 4096;             ///< sign-change scan intervals per subdomain
    double root_tol = 1e-12;       ///< bisection target on |Psi|
    double endpoint_inset = 1e-9;  ///< scan avoids the domain endpoints by this much
    double e_max = 0.9;
    int refine_factor = 16;        ///< rescan density multiplier on undercount
};

inline constexpr int kMinRootCount = 6;
inline constexpr int kMaxRootCount = 10;

/// All zeros of the three shapes in both subdomains. Subdomain-2 roots are the
/// subdomain-1 roots shifted by pi. Throws DomainError for e outside
/// [0, e_max] or 1 + e cos(theta) <= 0 and CountViolation if the total falls
/// outside [6, 10] after a refined rescan.
BetaRootSet enumerate_roots(double e, double theta, const RootScanOptions& opts = {});

/// True if every subdomain-1 root has a partner at beta + pi.
bool pairing_holds(const BetaRootSet& set, double tol = 1e-9);

struct RootSurfaceCell {
    double e = 0.0;
    double theta = 0.0;
    std::optional<BetaRootSet> roots;
    std::string error;  ///< empty unless enumeration failed for this cell

    /// Roots with sin(beta) > 0 (subdomain 1) or < 0 (subdomain 2).
    std::vector<BetaRoot> upper() const;
    std::vector<BetaRoot> lower() const;
};

/// Row-major over (e, theta); cells are independent and evaluated in parallel.
std::vector<RootSurfaceCell> root_surface_sweep(std::span<const double> e_grid,
                                                std::span<const double> theta_grid,
                                                const RootScanOptions& opts = {});

}  // namespace singarc
