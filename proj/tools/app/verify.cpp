#include <cmath>
#include <complex>
#include <random>

#include "capdrop/spectral.hpp"
#include "commands.hpp"

namespace capdrop::cli {

namespace {

struct Checks {
    Json list = Json::array();
    bool ok = true;
    void add(const std::string& name, bool passed, double value, double limit) {
        list.push_back(Json{{"name", name}, {"passed", passed}, {"value", num(value)}, {"limit", limit}});
        ok = ok && passed;
    }
};

// exp of a short random Fourier series, then onto the volume constraint
Field random_profile(const AngularGrid& g, double volume, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double a[9], b[9];
    for (int k = 0; k <= 8; ++k) {
        a[k] = 0.8 * uni(rng) / (1 + k);
        b[k] = 0.8 * uni(rng) / (1 + k);
    }
    Field r(g.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k <= 8; ++k) s += a[k] * std::cos(k * g.nodes[j]) + b[k] * std::sin(k * g.nodes[j]);
        r[j] = std::exp(s);
    }
    rescale_to_volume(r, g, volume);
    return r;
}

}  // namespace

Json verify_suite(const RunConfig& cfg, bool& all_passed) {
    const auto& par = cfg.params;
    const double sig = par.sigma;
    Checks c;
    const auto sol = solve_equilibrium(cfg);
    const auto& g = sol.profile.grid;

    c.add("el_residual", sol.el_residual <= 1e-6 * sig, sol.el_residual, 1e-6 * sig);
    const double bc = std::max(std::abs(sol.bc_residuals.first), std::abs(sol.bc_residuals.second));
    c.add("boundary_residual", bc <= 1e-6 * sig, bc, 1e-6 * sig);
    const double dv = std::abs(volume_functional(sol.profile) - par.volume) / par.volume;
    c.add("volume", dv <= 1e-10, dv, 1e-10);

    const double young = std::acos(-par.gamma_jump / sig);
    const double dy = std::max(std::abs(sol.young_angles.first - young), std::abs(sol.young_angles.second - young));
    c.add("young_angles", dy <= 1e-3, dy, 1e-3);
    if (par.gamma_jump <= 0.0) c.add("multiplier_positive", sol.multiplier > 0.0, sol.multiplier, 0.0);

    // gradient against a complex-step directional derivative
    {
        DiscreteEnergy e(g, par, 0.0);
        Field grad;
        e.gradient(sol.profile.rho, grad);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Field v(g.size());
        for (double& x : v) x = uni(rng);
        const double tau = 1e-30;
        std::vector<std::complex<double>> z(g.size());
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = {sol.profile.rho[j], tau * v[j]};
        const double cs = e.value(z).imag() / tau;
        double gv = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            gv += grad[j] * v[j];
            scale += std::abs(grad[j] * v[j]);
        }
        const double rel = std::abs(gv - cs) / std::max(scale, 1e-300);
        c.add("gradient_directional", rel <= 1e-6, rel, 1e-6);
    }

    // random admissible profiles against the lower bound and the equilibrium
    {
        const double lb = energy_lower_bound(par);
        const double e0 = energy(sol.profile, par);
        std::mt19937_64 rng(cfg.seed);
        int below = 0, under_eq = 0;
        double emin = INFINITY;
        for (int i = 0; i < cfg.lower_bound_samples; ++i) {
            const SurfaceProfile p(g, random_profile(g, par.volume, rng));
            const double e = energy(p, par);
            if (e < lb) ++below;
            if (e < e0 - 1e-9 * std::abs(e0)) ++under_eq;
            emin = std::min(emin, e);
        }
        c.add("energy_lower_bound_violations", below == 0, below, 0);
        c.add("random_profiles_below_equilibrium", under_eq == 0, under_eq, 0);
    }

    const bool sessile = par.theta1 == 0.0 && par.theta2 == 0.0;
    if (sessile) {
        const auto sym = verify_symmetry(sol);
        c.add("symmetry", sym.passed, sym.max_asymmetry, 1e-8 * sym.max_rho);

        const Field xs = shift_function(sol.profile);
        const double f0 = std::abs(second_variation(sol.profile, par, xs, xs)) / h1_norm_sq(xs, g);
        c.add("kernel_F0_over_h1", f0 <= 1e-4, f0, 1e-4);

        const auto form = sigma_form(sol.profile, par);
        const auto mass = constrained_eigen(form, Subspace::mass_constrained);
        const auto dbl = constrained_eigen(form, Subspace::doubly_constrained);
        c.add("mass_constrained_min", std::abs(mass.eigenvalues[0]) <= 1e-3 * sig, mass.eigenvalues[0], 1e-3 * sig);
        Field w(mass.eigenvectors.col(0).data(), mass.eigenvectors.col(0).data() + g.size());
        Field ab(g.size()), aa(g.size()), bb(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            ab[j] = w[j] * xs[j];
            aa[j] = w[j] * w[j];
            bb[j] = xs[j] * xs[j];
        }
        const double cosine = std::abs(integrate(ab, g)) / std::sqrt(integrate(aa, g) * integrate(bb, g));
        c.add("kernel_alignment", cosine >= 0.99, cosine, 0.99);
        const double gap = dbl.eigenvalues[0];
        c.add("doubly_constrained_gap", gap >= 10.0 * std::abs(mass.eigenvalues[0]) && gap > 0.0, gap,
              10.0 * std::abs(mass.eigenvalues[0]));
    }

    all_passed = c.ok;
    Json j{{"schema_version", kSchemaVersion}, {"command", "verify"}, {"grid_n", cfg.grid_n}};
    j["all_passed"] = c.ok;
    j["checks"] = c.list;
    return j;
}

}  // namespace capdrop::cli
