#pragma once
#include <utility>
#include <vector>

#include "capdrop/energy.hpp"
#include "capdrop/geometry.hpp"

namespace capdrop {

// Flow velocity d(rho)/dt for the volume-preserving L2 gradient flow with
// contact mobility kappa.  Returns the dissipation  v^T M v.
double flow_velocity(const DiscreteEnergy& e, const Field& rho, double kappa, Field& v);

// one explicit step with exact volume rescale; halves dt on positivity loss.
// dt is updated to the step actually taken.
SurfaceProfile step(const SurfaceProfile& profile, const PhysicalParams& params, double& dt);

struct RelaxOptions {
    int snapshots = 200;
    double dt_min = 1e-14;
    double dt_max = 1.0;
    double grow = 1.05;
    // roundoff allowance in the energy-decrease test, relative to |E|
    double energy_slack = 1e-14;
    bool recentre_snapshots = true;
};

struct RelaxationTrace {
    std::vector<double> times;
    std::vector<double> energies;
    std::vector<double> volumes;
    std::vector<double> pole_positions;
    std::vector<std::pair<double, double>> contact_rhos;
    std::vector<double> l2_distance_to_equilibrium;
    double decay_rate = 0.0;
    double fit_r2 = 0.0;

    long accepted_steps = 0;
    long rejected_steps = 0;
    long dissipation_checks = 0;
    double max_dissipation_mismatch = 0.0;  // relative, over checked steps
    double max_energy_increase = 0.0;       // largest accepted E_{n+1} - E_n
    double max_volume_drift = 0.0;          // relative, over all accepted steps
    SurfaceProfile final_profile;
    double final_pole = 0.0;
    double final_err = 0.0;
};

RelaxationTrace run(const SurfaceProfile& profile, const PhysicalParams& params, double t_end, double dt0,
                    const SurfaceProfile& rho0, const RelaxOptions& opt = {});

// least-squares line through (t, log y); returns (slope, r2)
std::pair<double, double> log_linear_fit(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace capdrop
