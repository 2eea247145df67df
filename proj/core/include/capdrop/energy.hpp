#pragma once
#include <complex>
#include <vector>

#include "capdrop/geometry.hpp"

namespace capdrop {

struct PhysicalParams {
    double g = 0.0;
    double sigma = 1.0;
    double gamma_jump = 0.0;  // [[gamma]]
    double volume = 0.0;      // value of the integral of rho^2
    double theta1 = 0.0;
    double theta2 = 0.0;
    double kappa = 1.0;

    void validate() const;  // throws ValidationError
    double theta_lo() const { return theta2; }
    double theta_hi() const;
    AngularGrid grid(int n_cells) const { return AngularGrid(theta_lo(), theta_hi(), n_cells); }
};

struct VariationReport {
    Field interior_gradient;
    double boundary_residual_lo = 0.0;
    double boundary_residual_hi = 0.0;
    double multiplier = 0.0;
};

double volume_functional(const SurfaceProfile& p);
double energy(const SurfaceProfile& p, const PhysicalParams& params);
double energy_eps(const SurfaceProfile& p, const PhysicalParams& params, double eps);
Field curvature(const SurfaceProfile& p);
VariationReport first_variation(const SurfaceProfile& p, const PhysicalParams& params, double eps);
double lagrange_multiplier(const SurfaceProfile& p, const PhysicalParams& params, double eps);
double energy_lower_bound(const PhysicalParams& params);

// sup of |interior_gradient| over interior nodes
double el_residual(const VariationReport& r);

// The discrete energy as a function of nodal values.  energy_eps is
// value(); first_variation is built from gradient().  Kept public so the
// solvers and the flow can work on raw arrays without rebuilding profiles.
class DiscreteEnergy {
public:
    DiscreteEnergy(const AngularGrid& grid, const PhysicalParams& params, double eps);

    double value(const Field& rho) const;
    // same sum in complex arithmetic; Im(value(rho + i*tau*v))/tau is the
    // directional derivative without cancellation (complex-step)
    std::complex<double> value(const std::vector<std::complex<double>>& rho) const;
    void gradient(const Field& rho, Field& grad) const;
    // dense row-major Hessian, (n+1)^2 entries
    void hessian(const Field& rho, std::vector<double>& hess) const;
    // split parts used by the multiplier identity
    struct Parts {
        double gravity3;   // g * int rho^3 sin
        double length;     // int sqrt(rho^2 + rho'^2)
        double penalty2;   // int rho'^2
        double ends;       // rho(lo) + rho(hi)
    };
    Parts parts(const Field& rho) const;

    const AngularGrid& grid() const { return grid_; }
    const std::vector<QuadPoint>& quad() const { return quad_; }
    const PhysicalParams& params() const { return params_; }
    double eps() const { return eps_; }

private:
    AngularGrid grid_;
    PhysicalParams params_;
    double eps_;
    std::vector<QuadPoint> quad_;
    Field sin_;
};

// report from a precomputed gradient; shared with the flow
VariationReport variation_from_gradient(const Field& rho, const Field& grad, const AngularGrid& grid,
                                        double multiplier);

}  // namespace capdrop
