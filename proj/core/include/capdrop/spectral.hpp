#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capdrop/energy.hpp"
#include "capdrop/geometry.hpp"

namespace capdrop {

// xi_s = cos(theta) + (rho0'/rho0) sin(theta)
Field shift_function(const SurfaceProfile& rho0);

// How second_variation turns the integrand into a number.  nodal: nodal
// finite differences and Simpson.  element: the energy's element quadrature,
// which is what the second difference of the discrete energy sees.
enum class Evaluation { nodal, element };

double second_variation(const SurfaceProfile& rho0, const PhysicalParams& params, const Field& xi,
                        const Field& xi_tilde, Evaluation how = Evaluation::nodal);

// discrete H^1 norm squared: int xi^2 + int xi'^2
double h1_norm_sq(const Field& xi, const AngularGrid& grid);

struct SigmaForm {
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
    Eigen::VectorXd constraint_rho0;
    Eigen::VectorXd constraint_xis;

    double evaluate(const Field& a, const Field& b) const;
};

SigmaForm sigma_form(const SurfaceProfile& rho0, const PhysicalParams& params);

enum class Subspace { unconstrained, mass_constrained, doubly_constrained };
std::string to_string(Subspace s);
Subspace subspace_from_string(const std::string& s);

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, mass-orthonormal
    Subspace subspace = Subspace::unconstrained;
    Eigen::MatrixXd basis;         // orthonormal basis of the constraint subspace (columns)
    Eigen::MatrixXd mass;
};

SpectralDecomposition constrained_eigen(const SigmaForm& form, Subspace subspace);

// residual of the linearized equilibrium equation, shifted by C
Field kernel_ode_residual(const SurfaceProfile& rho0, const PhysicalParams& params, const Field& xi,
                          double C);

struct KernelConstruction {
    Field Q_values;
    Field xi5;
    Field xi6;
    Field xi_s;
    std::vector<bool> masked;         // node nearest pi/2
    int masked_node = -1;
    std::array<double, 4> constants{1.0, 1.0, 0.0, 0.0};  // C1, C2, D1, D2
};

KernelConstruction build_Q(const SurfaceProfile& rho0);
KernelConstruction build_xi56(const SurfaceProfile& rho0,
                              std::array<double, 4> constants = {1.0, 1.0, 0.0, 0.0});

Field functional_calculus(const SpectralDecomposition& d, const std::function<double(double)>& f,
                          const Field& u);
// D_j^s u = sum_{k<j} lambda_k^s u_k w_k
Field truncated_power(const SpectralDecomposition& d, int j, double s, const Field& u);

struct ACoefficients {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
};
ACoefficients a_coefficients(const SurfaceProfile& rho0, const Field& xi, const Field& xi_t,
                             const Field& xi_tt);

}  // namespace capdrop
