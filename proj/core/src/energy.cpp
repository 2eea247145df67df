#include "capdrop/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "capdrop/errors.hpp"

namespace capdrop {

double PhysicalParams::theta_hi() const { return std::numbers::pi - theta1; }

void PhysicalParams::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    if (!(g >= 0.0)) throw ValidationError("g must be nonnegative");
    if (!(std::abs(gamma_jump) < sigma))
        throw ValidationError("Young relation violated: |gamma_jump| must be < sigma");
    if (!(volume > 0.0)) throw ValidationError("volume must be positive");
    const double half = std::numbers::pi / 2;
    if (!(theta1 >= 0.0 && theta1 < half)) throw ValidationError("theta1 must lie in [0, pi/2)");
    if (!(theta2 >= 0.0 && theta2 < half)) throw ValidationError("theta2 must lie in [0, pi/2)");
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
}

DiscreteEnergy::DiscreteEnergy(const AngularGrid& grid, const PhysicalParams& params, double eps)
    : grid_(grid), params_(params), eps_(eps), quad_(element_quadrature(grid)) {
    sin_.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) sin_[j] = std::sin(grid.nodes[j]);
}

namespace {

template <class T>
T energy_sum(const std::vector<QuadPoint>& quad, const Field& sn, const PhysicalParams& prm, double eps,
             const std::vector<T>& rho) {
    const double g = prm.g, sg = prm.sigma;
    T e = 0.0;
    for (const auto& q : quad) {
        const T r = rho[q.node];
        T p = 0.0;
        for (int k = 0; k < q.count; ++k) p += q.coef[k] * rho[q.idx[k]];
        e += q.weight * (g / 3.0 * r * r * r * sn[q.node] + sg * std::sqrt(r * r + p * p) + 0.5 * eps * p * p);
    }
    return e - prm.gamma_jump * (rho.front() + rho.back());
}

}  // namespace

double DiscreteEnergy::value(const Field& rho) const { return energy_sum(quad_, sin_, params_, eps_, rho); }

std::complex<double> DiscreteEnergy::value(const std::vector<std::complex<double>>& rho) const {
    return energy_sum(quad_, sin_, params_, eps_, rho);
}

DiscreteEnergy::Parts DiscreteEnergy::parts(const Field& rho) const {
    Parts out{0.0, 0.0, 0.0, rho.front() + rho.back()};
    for (const auto& q : quad_) {
        const double r = rho[q.node];
        const double p = qp_derivative(q, rho.data());
        out.gravity3 += q.weight * params_.g * r * r * r * sin_[q.node];
        out.length += q.weight * std::sqrt(r * r + p * p);
        out.penalty2 += q.weight * p * p;
    }
    return out;
}

void DiscreteEnergy::gradient(const Field& rho, Field& grad) const {
    const double g = params_.g, sg = params_.sigma;
    grad.assign(rho.size(), 0.0);
    for (const auto& q : quad_) {
        const double r = rho[q.node];
        const double p = qp_derivative(q, rho.data());
        const double root = std::sqrt(r * r + p * p);
        const double e_r = g * r * r * sin_[q.node] + sg * r / root;
        const double e_p = sg * p / root + eps_ * p;
        grad[q.node] += q.weight * e_r;
        for (int k = 0; k < q.count; ++k) grad[q.idx[k]] += q.weight * e_p * q.coef[k];
    }
    grad.front() -= params_.gamma_jump;
    grad.back() -= params_.gamma_jump;
}

void DiscreteEnergy::hessian(const Field& rho, std::vector<double>& hess) const {
    const std::size_t m = rho.size();
    const double g = params_.g, sg = params_.sigma;
    hess.assign(m * m, 0.0);
    for (const auto& q : quad_) {
        const double r = rho[q.node];
        const double p = qp_derivative(q, rho.data());
        const double s = r * r + p * p;
        const double s32 = s * std::sqrt(s);
        const double e_rr = 2.0 * g * r * sin_[q.node] + sg * p * p / s32;
        const double e_rp = -sg * r * p / s32;
        const double e_pp = sg * r * r / s32 + eps_;
        const int n = q.node;
        hess[n * m + n] += q.weight * e_rr;
        for (int k = 0; k < q.count; ++k) {
            const double c = q.weight * e_rp * q.coef[k];
            hess[n * m + q.idx[k]] += c;
            hess[q.idx[k] * m + n] += c;
            for (int l = 0; l < q.count; ++l)
                hess[q.idx[k] * m + q.idx[l]] += q.weight * e_pp * q.coef[k] * q.coef[l];
        }
    }
}

double volume_functional(const SurfaceProfile& p) {
    Field sq(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) sq[j] = p.rho[j] * p.rho[j];
    return integrate(sq, p.grid);
}

double energy(const SurfaceProfile& p, const PhysicalParams& params) {
    return DiscreteEnergy(p.grid, params, 0.0).value(p.rho);
}

double energy_eps(const SurfaceProfile& p, const PhysicalParams& params, double eps) {
    return DiscreteEnergy(p.grid, params, eps).value(p.rho);
}

Field curvature(const SurfaceProfile& p) {
    if (p.size() < 6) throw InvalidGrid("curvature needs at least 5 cells");
    const Field d1 = derivative(p.rho, p.grid);
    const Field d2 = second_derivative(p.rho, p.grid);
    Field H(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double r = p.rho[j], a = d1[j], b = d2[j];
        const double s = r * r + a * a;
        H[j] = (2.0 * a * a - r * b + r * r) / (s * std::sqrt(s));
    }
    return H;
}

double lagrange_multiplier(const SurfaceProfile& p, const PhysicalParams& params, double eps) {
    const double c = volume_functional(p);
    if (!(c > 0.0)) throw DegenerateProfile("zero volume");
    const auto parts = DiscreteEnergy(p.grid, params, eps).parts(p.rho);
    return (parts.gravity3 + params.sigma * parts.length + eps * parts.penalty2 -
            params.gamma_jump * parts.ends) /
           c;
}

VariationReport variation_from_gradient(const Field& rho, const Field& grad, const AngularGrid& grid,
                                        double multiplier) {
    const std::size_t m = rho.size();
    VariationReport r;
    r.multiplier = multiplier;
    r.interior_gradient.resize(m);
    for (std::size_t j = 1; j + 1 < m; ++j)
        r.interior_gradient[j] = grad[j] / grid.weights[j] - multiplier * rho[j];
    // endpoints: quadratic extrapolation of the interior density
    auto& ig = r.interior_gradient;
    ig[0] = 3.0 * ig[1] - 3.0 * ig[2] + ig[3];
    ig[m - 1] = 3.0 * ig[m - 2] - 3.0 * ig[m - 3] + ig[m - 4];
    // residuals pick up what the extrapolated density leaves over, so that
    //   dE[h] = int ig*h + res_hi*h(hi) - res_lo*h(lo) + P int rho*h
    // holds exactly for the discrete energy
    const double w0 = grid.weights[0], wn = grid.weights[m - 1];
    r.boundary_residual_lo = w0 * ig[0] - (grad[0] - multiplier * w0 * rho[0]);
    r.boundary_residual_hi = (grad[m - 1] - multiplier * wn * rho[m - 1]) - wn * ig[m - 1];
    return r;
}

VariationReport first_variation(const SurfaceProfile& p, const PhysicalParams& params, double eps) {
    if (p.size() < 5) throw InvalidGrid("first variation needs at least 4 cells");
    DiscreteEnergy e(p.grid, params, eps);
    Field grad;
    e.gradient(p.rho, grad);
    return variation_from_gradient(p.rho, grad, p.grid, lagrange_multiplier(p, params, eps));
}

double el_residual(const VariationReport& r) {
    double m = 0.0;
    for (std::size_t j = 1; j + 1 < r.interior_gradient.size(); ++j)
        m = std::max(m, std::abs(r.interior_gradient[j]));
    return m;
}

double energy_lower_bound(const PhysicalParams& params) {
    return -2.0 * params.sigma *
           std::sqrt(params.volume / (std::numbers::pi - params.theta1 - params.theta2));
}

}  // namespace capdrop
