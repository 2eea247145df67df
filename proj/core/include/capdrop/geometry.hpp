#pragma once
#include <array>
#include <utility>
#include <vector>

namespace capdrop {

using Field = std::vector<double>;

// Uniform grid on [theta_lo, theta_hi] with composite Simpson weights
// (trapezoid when n_cells is odd).
struct AngularGrid {
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    int n_cells = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    AngularGrid() = default;
    AngularGrid(double lo, double hi, int n_cells);

    double h() const { return (theta_hi - theta_lo) / n_cells; }
    std::size_t size() const { return nodes.size(); }
    bool simpson() const { return n_cells % 2 == 0; }
};

struct SurfaceProfile {
    AngularGrid grid;
    Field rho;

    SurfaceProfile() = default;
    SurfaceProfile(AngularGrid g, Field r);  // checks length and positivity
    std::size_t size() const { return rho.size(); }
};

struct CartesianCurve {
    std::vector<std::pair<double, double>> points;
};

// One quadrature point of the element-wise scheme used by the energy: the
// point sits on a grid node and carries the local derivative stencil of its
// element.  P2 elements on Simpson panels, P1 on cells for odd n_cells.
struct QuadPoint {
    int node;
    double weight;
    int count;                 // stencil entries used (2 or 3)
    std::array<int, 3> idx;
    std::array<double, 3> coef;
};

std::vector<QuadPoint> element_quadrature(const AngularGrid& grid);

// value and derivative of a nodal field at a quadrature point
inline double qp_derivative(const QuadPoint& q, const double* f) {
    double s = 0.0;
    for (int k = 0; k < q.count; ++k) s += q.coef[k] * f[q.idx[k]];
    return s;
}

Field derivative(const Field& f, const AngularGrid& grid);
Field second_derivative(const Field& f, const AngularGrid& grid);
Field derivative(const SurfaceProfile& p);

double integrate(const Field& f, const AngularGrid& grid);

CartesianCurve to_cartesian(const SurfaceProfile& p);
SurfaceProfile from_cartesian(const CartesianCurve& curve, double pole_x, const AngularGrid& grid);

// sample a function on the grid nodes
template <class F>
Field sample(const AngularGrid& grid, F&& f) {
    Field out(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out[j] = f(grid.nodes[j]);
    return out;
}

}  // namespace capdrop
