#pragma once

// Leapfrog integration of the 1+1 Klein-Gordon system u_tt = u_xx + mu u on
// a periodic interval, and the discrete Noether charge of a symmetry U(t, x).

#include <string>
#include <utility>
#include <vector>

#include "pdham/numsim/kernel.hpp"
#include "pdham/sym/expr.hpp"

namespace pdham::numsim {

using sym::Expr;

struct SimConfig {
    double L = 1.0;
    int N = 128;
    double cfl = 0.5;
    int steps = 256;
    double mu = 0.0;
    Expr u0, v0, U;
    Expr exact;  // optional reference solution u(t, x); zero when absent
    bool has_exact = false;
    // the same quantities as written, for symbolic checks
    Expr L_expr = Expr(1), mu_expr;
};

/// Keys L, N, cfl, steps, mu, u0, v0, U and optionally exact. Expressions may
/// use x, t, L, mu and pi.
SimConfig parse_config(const std::vector<std::pair<std::string, std::string>>& entries);
/// `key = value` per line, '#' comments.
SimConfig read_config_file(const std::string& path);
/// N >= 8, 0 < cfl <= 1, steps >= 2, L > 0.
void validate(const SimConfig& cfg);

/// Symbolic check that U solves -U_tt + U_xx + mu U = 0 (verdict string).
std::string check_symmetry_profile(const SimConfig& cfg);

struct Trajectory {
    double dx = 0, dt = 0;
    std::vector<std::vector<double>> u;  // steps + 1 slices
};

Trajectory simulate_leapfrog(const SimConfig& cfg, KernelKind kernel = KernelKind::Auto);

/// Continues the leapfrog recursion from two given slices.
std::vector<std::vector<double>> evolve(const std::vector<double>& prev, const std::vector<double>& cur, int steps,
                                        double dx, double dt, double mu, KernelKind kernel = KernelKind::Auto);

enum class TimeDifference { Centered, Forward };

/// Q(t_s) = dx Σ_j -(u ∂_t U - u_t U). Centered u_t is second order at every
/// slice (one-sided three-point at the ends); Forward is first order.
std::vector<double> charge_series(const Trajectory& traj, const SimConfig& cfg,
                                  TimeDifference td = TimeDifference::Centered);

/// max_s |Q_s - Q_0| / max(|Q_0|, 1)
double relative_drift(const std::vector<double>& q);

/// max over all slices of |u - exact|.
double max_error(const Trajectory& traj, const SimConfig& cfg);

struct Convergence {
    double coarse = 0, fine = 0;  // measured quantity at N and 2N
    double factor = 0;            // coarse / fine
    double order = 0;             // log2(factor)
    bool exact = false;           // both below round-off
    bool pass = false;            // exact, or order within [1.5, 2.5]
    std::string verdict() const;
};

Convergence compare(double coarse, double fine, double scale = 1.0);

/// Runs cfg and the configuration with N and steps doubled.
Convergence charge_convergence(const SimConfig& cfg, TimeDifference td = TimeDifference::Centered,
                               KernelKind kernel = KernelKind::Auto);
Convergence error_convergence(const SimConfig& cfg, KernelKind kernel = KernelKind::Auto);

/// Oscillation period of u(t, x_j) from successive upward zero crossings.
double estimate_period(const Trajectory& traj, std::size_t j);

}  // namespace pdham::numsim
