#include "capdrop/relax.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "capdrop/equilibrium.hpp"
#include "capdrop/errors.hpp"
#include "capdrop/moving_frame.hpp"

namespace capdrop {

namespace {

bool positive(const Field& r) {
    for (double v : r)
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
}

double volume_of(const Field& rho, const AngularGrid& g) {
    double c = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) c += g.weights[j] * rho[j] * rho[j];
    return c;
}

}  // namespace

double flow_velocity(const DiscreteEnergy& e, const Field& rho, double kappa, Field& v) {
    const auto& w = e.grid().weights;
    const std::size_t m = rho.size();
    Field grad;
    e.gradient(rho, grad);
    auto minv = [&](std::size_t j) { return (j == 0 || j + 1 == m) ? 1.0 / kappa : 1.0 / w[j]; };
    // project out the volume direction W rho in the flow metric
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double u = w[j] * rho[j];
        num += u * minv(j) * grad[j];
        den += u * minv(j) * u;
    }
    const double P = num / den;
    v.resize(m);
    double diss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        v[j] = -minv(j) * (grad[j] - P * w[j] * rho[j]);
        diss += v[j] * v[j] / minv(j);
    }
    return diss;
}

SurfaceProfile step(const SurfaceProfile& profile, const PhysicalParams& params, double& dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const DiscreteEnergy e(profile.grid, params, 0.0);
    Field v, trial(profile.size());
    flow_velocity(e, profile.rho, params.kappa, v);
    while (dt >= 1e-14) {
        for (std::size_t j = 0; j < trial.size(); ++j) trial[j] = profile.rho[j] + dt * v[j];
        if (positive(trial)) {
            rescale_to_volume(trial, profile.grid, params.volume);
            return SurfaceProfile(profile.grid, trial);
        }
        dt *= 0.5;
    }
    throw StiffnessError("time step underflow");
}

std::pair<double, double> log_linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        n += 1;
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        syy += ly * ly;
    }
    if (n < 3) return {0.0, 0.0};
    const double vt = stt - st * st / n, vy = syy - sy * sy / n, cty = sty - st * sy / n;
    if (!(vt > 0.0)) return {0.0, 0.0};
    const double slope = cty / vt;
    const double r2 = vy > 0.0 ? cty * cty / (vt * vy) : 1.0;
    return {slope, r2};
}

RelaxationTrace run(const SurfaceProfile& profile, const PhysicalParams& params, double t_end, double dt0,
                    const SurfaceProfile& rho0, const RelaxOptions& opt) {
    params.validate();
    if (!(t_end > 0.0) || !(dt0 > 0.0)) throw ValidationError("t_end and dt0 must be positive");
    if (rho0.size() != profile.size()) throw DimensionError("reference equilibrium grid differs");
    const AngularGrid& grid = profile.grid;
    const DiscreteEnergy e(grid, params, 0.0);
    const double V = params.volume;

    Field rho = profile.rho;
    rescale_to_volume(rho, grid, V);
    RelaxationTrace tr;

    auto snapshot = [&](double t, double E) {
        tr.times.push_back(t);
        tr.energies.push_back(E);
        tr.volumes.push_back(volume_of(rho, grid));
        tr.contact_rhos.emplace_back(rho.front(), rho.back());
        double pole = std::numeric_limits<double>::quiet_NaN();
        double dist = 0.0;
        bool framed = false;
        if (opt.recentre_snapshots) {
            try {
                const auto st = recentre(to_cartesian(SurfaceProfile(grid, rho)), rho0);
                pole = st.pole_x;
                dist = st.l2_perturbation;
                framed = true;
            } catch (const RecentreDomainError&) {
            }
        }
        if (!framed) {
            Field d(rho.size());
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = (rho[j] - rho0.rho[j]) * (rho[j] - rho0.rho[j]);
            dist = std::sqrt(integrate(d, grid));
        }
        tr.pole_positions.push_back(pole);
        tr.l2_distance_to_equilibrium.push_back(dist);
    };

    double E = e.value(rho);
    double t = 0.0, dt = dt0;
    snapshot(t, E);
    const int nsnap = std::max(opt.snapshots, 4);
    Field v, trial(rho.size());
    std::vector<std::complex<double>> zr(rho.size());
    for (int k = 1; k <= nsnap; ++k) {
        const double t_next = t_end * k / nsnap;
        while (t < t_next) {
            const double diss = flow_velocity(e, rho, params.kappa, v);
            double vmax = 0.0;
            for (double x : v) vmax = std::max(vmax, std::abs(x));
            // complex-step rate of the energy along v, compared with -v^T M v
            if (vmax > 0.0) {
                const double tau = 1e-30;
                for (std::size_t j = 0; j < rho.size(); ++j) zr[j] = {rho[j], tau * v[j]};
                const double rate = e.value(zr).imag() / tau;
                // below this the sum itself is at roundoff
                double scale = 0.0;
                for (std::size_t j = 0; j < rho.size(); ++j) scale += std::abs(v[j]) * vmax;
                if (diss > 1e-10 * scale) {
                    tr.max_dissipation_mismatch =
                        std::max(tr.max_dissipation_mismatch, std::abs(rate + diss) / diss);
                    ++tr.dissipation_checks;
                }
            }
            double h = std::min(dt, t_next - t);
            bool done = false;
            while (!done) {
                if (h < opt.dt_min) throw StiffnessError("time step underflow at t=" + std::to_string(t));
                for (std::size_t j = 0; j < rho.size(); ++j) trial[j] = rho[j] + h * v[j];
                if (!positive(trial)) {
                    h *= 0.5;
                    dt = h;
                    ++tr.rejected_steps;
                    continue;
                }
                rescale_to_volume(trial, grid, V);
                const double Et = e.value(trial);
                if (Et <= E + opt.energy_slack * std::abs(E)) {
                    tr.max_energy_increase = std::max(tr.max_energy_increase, Et - E);
                    rho.swap(trial);
                    E = Et;
                    t = (t_next - t <= h) ? t_next : t + h;
                    ++tr.accepted_steps;
                    tr.max_volume_drift = std::max(tr.max_volume_drift, std::abs(volume_of(rho, grid) - V) / V);
                    if (h >= dt) dt = std::min(dt * opt.grow, opt.dt_max);
                    done = true;
                } else {
                    h *= 0.5;
                    dt = h;
                    ++tr.rejected_steps;
                }
            }
        }
        snapshot(t, E);
    }
    // exponential fit on the tail half
    std::vector<double> tt, yy;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (tr.times[i] >= 0.5 * t_end) {
            tt.push_back(tr.times[i]);
            yy.push_back(tr.l2_distance_to_equilibrium[i]);
        }
    const auto [slope, r2] = log_linear_fit(tt, yy);
    tr.decay_rate = -slope;
    tr.fit_r2 = r2;
    tr.final_profile = SurfaceProfile(grid, rho);
    tr.final_pole = tr.pole_positions.back();
    tr.final_err = tr.l2_distance_to_equilibrium.back();
    return tr;
}

}  // namespace capdrop
