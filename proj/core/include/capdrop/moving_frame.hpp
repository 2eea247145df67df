#pragma once
#include <vector>

#include "capdrop/geometry.hpp"

namespace capdrop {

struct MovingFrameState {
    double pole_x = 0.0;
    SurfaceProfile profile_in_frame;
    Field perturbation;  // rho - rho0
    double lambda = 0.0;
    Field xi3;
    double l2_perturbation = 0.0;
    // |int xi xi_s| three ways: raw, over ||rho0|| ||xi_s||, over ||xi|| ||xi_s||
    double ortho_abs = 0.0;
    double ortho_residual = 0.0;
    double ortho_relative = 0.0;
    double objective = 0.0;
    double objective_slope = 0.0;         // d/dc of int (rho0 - rho_c)^2 at the pole
    std::vector<double> scan_minima;      // local minimizers seen on the coarse scan
};

struct RecentreOptions {
    int scan_points = 41;
    // after Brent, solve int (rho_c - rho0) xi_s = 0 for c near the minimizer
    bool orthogonal_polish = true;
};

// frame state for a given pole, no minimization
MovingFrameState frame_at(const CartesianCurve& curve, const SurfaceProfile& rho0, double pole_x);

MovingFrameState recentre(const CartesianCurve& curve, const SurfaceProfile& rho0,
                          const RecentreOptions& opt = {});

double lambda_factor(const MovingFrameState& state, const SurfaceProfile& rho0);
double pole_velocity(const MovingFrameState& state, const SurfaceProfile& rho0, const Field& normal_speed);

}  // namespace capdrop
