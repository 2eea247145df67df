#pragma once
#include <utility>
#include <vector>

#include "capdrop/energy.hpp"
#include "capdrop/geometry.hpp"

namespace capdrop {

struct EquilibriumSolution {
    SurfaceProfile profile;
    double multiplier = 0.0;
    double eps_used = 0.0;
    double el_residual = 0.0;
    std::pair<double, double> bc_residuals{0.0, 0.0};    // (lower, upper)
    // frame angles (gamma2 at lower, gamma1 at upper), sin gamma = -/+ rho'/sqrt(rho^2+rho'^2)
    std::pair<double, double> contact_angles{0.0, 0.0};
    // Young angles, cos(theta_eq) = rho'/sqrt(.) at lower and -rho'/sqrt(.) at upper
    std::pair<double, double> young_angles{0.0, 0.0};
    int iterations = 0;
};

struct ContinuationReport {
    std::vector<double> eps_schedule;
    std::vector<double> sup_rho_prime;
    std::vector<double> bv_norms;
    std::vector<double> multipliers;
    std::vector<double> energies;
};

struct MinimizeOptions {
    double tol_el = 1e-8;        // times sigma
    double tol_bc = 1e-7;        // times sigma
    int descent_iters = 300;
    int newton_iters = 60;
    int rounds = 4;              // descent+Newton rounds before giving up
};

SurfaceProfile initial_profile(const PhysicalParams& params, int n_cells);

// exact rescaling onto the volume constraint
void rescale_to_volume(Field& rho, const AngularGrid& grid, double volume);

EquilibriumSolution minimize_eps(const PhysicalParams& params, double eps, const SurfaceProfile& init,
                                 const MinimizeOptions& opt = {});

std::pair<EquilibriumSolution, ContinuationReport> continuation(const PhysicalParams& params,
                                                                const std::vector<double>& eps_schedule,
                                                                const SurfaceProfile& init,
                                                                const MinimizeOptions& opt = {});

std::vector<double> default_eps_schedule();

EquilibriumSolution shoot_symmetric(const PhysicalParams& params, int n_cells = 400);

struct SymmetryReport {
    double max_asymmetry = 0.0;
    double max_rho = 0.0;
    bool passed = false;
};
SymmetryReport verify_symmetry(const EquilibriumSolution& sol);

// Zero-gravity equilibrium: circle of radius R centred at (0, b) with b/R = -[[gamma]]/sigma.
struct CircularCap {
    double R = 1.0;
    double b = 0.0;
    double radius_at(double theta) const;
    double derivative_at(double theta) const;
};
CircularCap circular_cap(const PhysicalParams& params);

}  // namespace capdrop
