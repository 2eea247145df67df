#include "capdrop/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "capdrop/errors.hpp"

namespace capdrop {

namespace {

constexpr double kPi = std::numbers::pi;

bool all_positive(const Field& r) {
    for (double v : r)
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
}

double dot(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double multiplier_of(const DiscreteEnergy& e, const Field& rho) {
    const auto p = e.parts(rho);
    const auto& prm = e.params();
    double c = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) c += e.grid().weights[j] * rho[j] * rho[j];
    return (p.gravity3 + prm.sigma * p.length + e.eps() * p.penalty2 - prm.gamma_jump * p.ends) / c;
}

void fill_angles(EquilibriumSolution& s, double slope_lo, double slope_hi) {
    const auto& r = s.profile.rho;
    const double clo = slope_lo / std::hypot(r.front(), slope_lo);
    const double chi = slope_hi / std::hypot(r.back(), slope_hi);
    s.contact_angles = {std::asin(-clo), std::asin(chi)};
    s.young_angles = {std::acos(std::clamp(clo, -1.0, 1.0)), std::acos(std::clamp(-chi, -1.0, 1.0))};
}

EquilibriumSolution finalize(const DiscreteEnergy& e, Field rho, int iters) {
    EquilibriumSolution s;
    s.profile = SurfaceProfile(e.grid(), std::move(rho));
    Field grad;
    e.gradient(s.profile.rho, grad);
    const auto rep = variation_from_gradient(s.profile.rho, grad, e.grid(), multiplier_of(e, s.profile.rho));
    s.multiplier = rep.multiplier;
    s.eps_used = e.eps();
    s.el_residual = el_residual(rep);
    s.bc_residuals = {rep.boundary_residual_lo, rep.boundary_residual_hi};
    s.iterations = iters;
    const Field d = derivative(s.profile);
    fill_angles(s, d.front(), d.back());
    return s;
}

bool converged(const EquilibriumSolution& s, double sigma, const MinimizeOptions& opt) {
    return s.el_residual < opt.tol_el * sigma && std::abs(s.bc_residuals.first) < opt.tol_bc * sigma &&
           std::abs(s.bc_residuals.second) < opt.tol_bc * sigma;
}

// Projected steepest descent in the quadrature metric with Armijo backtracking.
int descent(const DiscreteEnergy& e, Field& rho, double volume, int iters, double& alpha) {
    const auto& w = e.grid().weights;
    const std::size_t m = rho.size();
    Field grad, d(m), trial(m);
    double E = e.value(rho);
    int done = 0;
    for (; done < iters; ++done) {
        e.gradient(rho, grad);
        const double P = multiplier_of(e, rho);
        for (std::size_t j = 0; j < m; ++j) d[j] = -(grad[j] - P * w[j] * rho[j]) / w[j];
        const double slope = dot(grad, d);
        if (!(slope < 0.0)) break;
        alpha = std::min(alpha * 2.0, 1.0);
        bool accepted = false;
        for (int k = 0; k < 60; ++k, alpha *= 0.5) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = rho[j] + alpha * d[j];
            if (!all_positive(trial)) continue;
            rescale_to_volume(trial, e.grid(), volume);
            const double Et = e.value(trial);
            if (Et <= E + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double drop = E - e.value(trial);
        rho.swap(trial);
        E = e.value(rho);
        if (drop <= 1e-15 * std::max(1.0, std::abs(E))) break;
    }
    return done;
}

// Newton on the KKT system  G(rho) - P W rho = 0,  (rho^T W rho - V)/2 = 0.
int newton(const DiscreteEnergy& e, Field& rho, double volume, int iters, const MinimizeOptions& opt) {
    const auto& w = e.grid().weights;
    const int m = static_cast<int>(rho.size());
    const double sigma = e.params().sigma;
    double P = multiplier_of(e, rho);
    Field grad;
    std::vector<double> hess;
    auto residual = [&](const Field& r, double p, Eigen::VectorXd& F) {
        e.gradient(r, grad);
        F.resize(m + 1);
        double c = 0.0;
        for (int j = 0; j < m; ++j) {
            F[j] = grad[j] - p * w[j] * r[j];
            c += w[j] * r[j] * r[j];
        }
        F[m] = 0.5 * (c - volume);
    };
    Eigen::VectorXd F, Ft;
    Eigen::MatrixXd J(m + 1, m + 1);
    Field trial(m);
    int it = 0;
    for (; it < iters; ++it) {
        residual(rho, P, F);
        const auto s = finalize(e, rho, 0);
        if (converged(s, sigma, opt)) break;
        e.hessian(rho, hess);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) J(i, j) = hess[static_cast<std::size_t>(i) * m + j];
            J(i, i) -= P * w[i];
            J(i, m) = -w[i] * rho[i];
            J(m, i) = w[i] * rho[i];
        }
        J(m, m) = 0.0;
        const Eigen::VectorXd step = J.partialPivLu().solve(-F);
        if (!step.allFinite()) return -1;
        const double f0 = F.norm();
        double a = 1.0;
        bool ok = false;
        for (int k = 0; k < 40; ++k, a *= 0.5) {
            for (int j = 0; j < m; ++j) trial[j] = rho[j] + a * step[j];
            if (!all_positive(trial)) continue;
            residual(trial, P + a * step[m], Ft);
            if (Ft.norm() < (1.0 - 1e-4 * a) * f0 || Ft.norm() < 1e-14) {
                ok = true;
                break;
            }
        }
        if (!ok) return -1;
        rho = trial;
        P += a * step[m];
        rescale_to_volume(rho, e.grid(), volume);
    }
    return it;
}

}  // namespace

void rescale_to_volume(Field& rho, const AngularGrid& grid, double volume) {
    double c = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) c += grid.weights[j] * rho[j] * rho[j];
    if (!(c > 0.0)) throw DegenerateProfile("zero volume");
    const double f = std::sqrt(volume / c);
    for (double& v : rho) v *= f;
}

SurfaceProfile initial_profile(const PhysicalParams& params, int n_cells) {
    const AngularGrid grid = params.grid(n_cells);
    const double r0 = std::sqrt(params.volume / (grid.theta_hi - grid.theta_lo));
    return SurfaceProfile(grid, Field(grid.size(), r0));
}

std::vector<double> default_eps_schedule() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

EquilibriumSolution minimize_eps(const PhysicalParams& params, double eps, const SurfaceProfile& init,
                                 const MinimizeOptions& opt) {
    params.validate();
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (init.size() < 7) throw InvalidGrid("minimizer needs at least 6 cells");
    const DiscreteEnergy e(init.grid, params, eps);
    Field rho = init.rho;
    if (!all_positive(rho)) throw DegenerateProfile("initial profile must be positive");
    rescale_to_volume(rho, init.grid, params.volume);
    // an already stationary start is returned untouched; stepping would only
    // feed rounding into the near-null translation direction
    if (auto s0 = finalize(e, rho, 0); converged(s0, params.sigma, opt)) return s0;

    double alpha = 1e-3;
    int total = 0;
    for (int round = 0; round < opt.rounds; ++round) {
        total += descent(e, rho, params.volume, opt.descent_iters * (round + 1), alpha);
        Field trial = rho;
        const int k = newton(e, trial, params.volume, opt.newton_iters, opt);
        if (k >= 0) {
            auto s = finalize(e, trial, total + k);
            if (converged(s, params.sigma, opt)) return s;
            // keep the Newton iterate only if it did not go uphill
            if (e.value(trial) <= e.value(rho)) rho = trial;
        }
    }
    auto s = finalize(e, rho, total);
    if (converged(s, params.sigma, opt)) return s;
    throw ConvergenceFailure("minimize_eps did not converge (el_residual " + std::to_string(s.el_residual) +
                                 ")",
                             rho, eps, s.el_residual);
}

std::pair<EquilibriumSolution, ContinuationReport> continuation(const PhysicalParams& params,
                                                                const std::vector<double>& schedule,
                                                                const SurfaceProfile& init,
                                                                const MinimizeOptions& opt) {
    if (schedule.empty()) throw ValidationError("eps schedule is empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0)) throw ValidationError("eps schedule must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw ValidationError("eps schedule must be strictly decreasing");
    }
    ContinuationReport rep;
    SurfaceProfile current = init;
    EquilibriumSolution sol;
    for (double eps : schedule) {
        try {
            sol = minimize_eps(params, eps, current, opt);
        } catch (const ConvergenceFailure& f) {
            throw ConvergenceFailure(std::string(f.what()) + " at eps=" + std::to_string(eps),
                                     f.last_iterate(), eps, f.residual());
        }
        current = sol.profile;
        const Field d = derivative(sol.profile);
        Field absd(d.size());
        double sup = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            absd[j] = std::abs(d[j]);
            sup = std::max(sup, absd[j]);
        }
        rep.eps_schedule.push_back(eps);
        rep.sup_rho_prime.push_back(sup);
        rep.bv_norms.push_back(integrate(absd, sol.profile.grid));
        rep.multipliers.push_back(sol.multiplier);
        rep.energies.push_back(energy_eps(sol.profile, params, eps));
    }
    return {sol, rep};
}

// ---------------------------------------------------------------- shooting

namespace {

using State = std::array<double, 3>;  // rho, rho', int rho^2 from the apex

struct ApexOde {
    double g, sigma, P;
    void operator()(const State& y, State& dy, double t) const {
        const double r = y[0], p = y[1];
        if (!(r > 0.0)) throw std::runtime_error("radius collapsed");
        const double s = r * r + p * p;
        const double s32 = s * std::sqrt(s);
        dy[0] = p;
        dy[1] = (2.0 * p * p + r * r - (P - g * r * std::sin(t)) * s32 / sigma) / r;
        dy[2] = r * r;
    }
};

struct ShotResult {
    std::array<double, 2> res;
    State at_zero;
    std::vector<double> samples;  // rho at the requested half-angles (descending)
};

ShotResult shoot(const PhysicalParams& prm, double apex, double P, const std::vector<double>& times) {
    namespace ode = boost::numeric::odeint;
    ApexOde rhs{prm.g, prm.sigma, P};
    State y{apex, 0.0, 0.0};
    ShotResult out;
    out.samples.reserve(times.size());
    // controlled stepping lands exactly on every requested angle
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(
        stepper, rhs, y, times.begin(), times.end(), -1e-3,
        [&](const State& s, double) {
            if (!std::isfinite(s[0]) || !(s[0] > 0.0)) throw std::runtime_error("invalid state");
            out.samples.push_back(s[0]);
            out.at_zero = s;
        },
        ode::max_step_checker(100000));
    const State& y0 = out.at_zero;
    const double c = y0[1] / std::hypot(y0[0], y0[1]);
    out.res[0] = c + prm.gamma_jump / prm.sigma;
    out.res[1] = (-2.0 * y0[2] - prm.volume) / prm.volume;
    return out;
}

}  // namespace

EquilibriumSolution shoot_symmetric(const PhysicalParams& params, int n_cells) {
    params.validate();
    if (params.theta1 != 0.0 || params.theta2 != 0.0)
        throw ValidationError("shooting requires theta1 = theta2 = 0");
    const AngularGrid grid = params.grid(n_cells);
    const std::vector<double> only_ends{kPi / 2, 0.0};

    // start from the zero-gravity cap with the same volume
    const CircularCap cap = circular_cap(params);
    double x[2] = {cap.R + cap.b, params.sigma / cap.R + params.g * (cap.R + cap.b)};

    auto eval = [&](double a, double P, std::array<double, 2>& r) {
        try {
            r = shoot(params, a, P, only_ends).res;
            return std::isfinite(r[0]) && std::isfinite(r[1]);
        } catch (const std::exception&) {
            return false;
        }
    };
    std::array<double, 2> r{};
    if (!eval(x[0], x[1], r)) throw ShootingFailure("shooting failed at the initial guess", {});
    double norm = std::hypot(r[0], r[1]);
    for (int it = 0; it < 80 && norm > 1e-13; ++it) {
        double Jm[2][2];
        for (int k = 0; k < 2; ++k) {
            const double hk = 1e-6 * std::max(1.0, std::abs(x[k]));
            double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
            xp[k] += hk;
            xm[k] -= hk;
            std::array<double, 2> rp{}, rm{};
            if (!eval(xp[0], xp[1], rp) || !eval(xm[0], xm[1], rm))
                throw ShootingFailure("shooting Jacobian evaluation failed", {r[0], r[1]});
            Jm[0][k] = (rp[0] - rm[0]) / (2 * hk);
            Jm[1][k] = (rp[1] - rm[1]) / (2 * hk);
        }
        const double det = Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0];
        if (!(std::abs(det) > 0.0)) throw ShootingFailure("singular shooting Jacobian", {r[0], r[1]});
        const double dx0 = -(Jm[1][1] * r[0] - Jm[0][1] * r[1]) / det;
        const double dx1 = -(-Jm[1][0] * r[0] + Jm[0][0] * r[1]) / det;
        double a = 1.0;
        bool ok = false;
        for (int k = 0; k < 40; ++k, a *= 0.5) {
            std::array<double, 2> rt{};
            if (x[0] + a * dx0 <= 0.0) continue;
            if (!eval(x[0] + a * dx0, x[1] + a * dx1, rt)) continue;
            const double nt = std::hypot(rt[0], rt[1]);
            if (nt < (1.0 - 1e-4 * a) * norm || nt < 1e-13) {
                x[0] += a * dx0;
                x[1] += a * dx1;
                r = rt;
                norm = nt;
                ok = true;
                break;
            }
        }
        if (!ok) break;
    }
    if (!(norm <= 1e-11)) throw ShootingFailure("shooting Newton did not converge", {r[0], r[1]});

    // sample on the grid through the symmetric half-angles
    std::map<double, std::vector<std::size_t>, std::greater<>> half;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = std::min(grid.nodes[j], kPi - grid.nodes[j]);
        half[std::max(t, 0.0)].push_back(j);
    }
    std::vector<double> times{kPi / 2};
    for (const auto& [t, idx] : half)
        if (t < kPi / 2) times.push_back(t);
    const ShotResult shot = shoot(params, x[0], x[1], times);
    Field rho(grid.size());
    {
        std::size_t k = 0;
        if (half.begin()->first >= kPi / 2)  // node exactly at the apex
            for (auto j : half.begin()->second) rho[j] = shot.samples[0];
        for (const auto& [t, idx] : half) {
            if (t >= kPi / 2) continue;
            ++k;
            for (auto j : idx) rho[j] = shot.samples[k];
        }
    }
    // the ODE volume is exact; the grid quadrature differs by O(h^4)
    rescale_to_volume(rho, grid, params.volume);

    EquilibriumSolution s;
    s.profile = SurfaceProfile(grid, std::move(rho));
    s.multiplier = x[1];
    s.eps_used = 0.0;
    s.el_residual = std::max(std::abs(r[0]), std::abs(r[1]));
    const double slope = shot.at_zero[1];
    const double c = slope / std::hypot(shot.at_zero[0], slope);
    s.bc_residuals = {params.sigma * c + params.gamma_jump, -(params.sigma * c + params.gamma_jump)};
    fill_angles(s, slope, -slope);
    return s;
}

SymmetryReport verify_symmetry(const EquilibriumSolution& sol) {
    const auto& r = sol.profile.rho;
    SymmetryReport rep;
    const std::size_t m = r.size();
    for (std::size_t j = 0; j < m; ++j) {
        rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(r[j] - r[m - 1 - j]));
        rep.max_rho = std::max(rep.max_rho, r[j]);
    }
    rep.passed = rep.max_asymmetry <= 1e-8 * rep.max_rho;
    return rep;
}

double CircularCap::radius_at(double t) const {
    const double c = std::cos(t);
    return b * std::sin(t) + std::sqrt(R * R - b * b * c * c);
}

double CircularCap::derivative_at(double t) const {
    const double c = std::cos(t), s = std::sin(t);
    return b * c + b * b * c * s / std::sqrt(R * R - b * b * c * c);
}

CircularCap circular_cap(const PhysicalParams& params) {
    const double c = -params.gamma_jump / params.sigma;  // b / R
    // int rho^2 = twice the area above the support
    const double unit = 2.0 * (kPi - std::acos(c) + c * std::sqrt(1.0 - c * c));
    CircularCap cap;
    cap.R = std::sqrt(params.volume / unit);
    cap.b = c * cap.R;
    return cap;
}

}  // namespace capdrop
