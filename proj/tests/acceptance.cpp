// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance          all criteria, exit 0 iff every one passes
//   acceptance 3 7      only the listed ones
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

#include "capdrop/errors.hpp"
#include "capdrop/moving_frame.hpp"
#include "capdrop/relax.hpp"
#include "capdrop/spectral.hpp"
#include "support.hpp"

using namespace capdrop;
using namespace capdrop::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double cosine(const Field& a, const Field& b, const AngularGrid& g) {
    Field ab(a.size()), aa(a.size()), bb(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        ab[j] = a[j] * b[j];
        aa[j] = a[j] * a[j];
        bb[j] = b[j] * b[j];
    }
    return std::abs(integrate(ab, g)) / std::sqrt(integrate(aa, g) * integrate(bb, g));
}

Field column(const Eigen::MatrixXd& m, Eigen::Index k) { return Field(m.col(k).data(), m.col(k).data() + m.rows()); }

// ---------------------------------------------------------------- criteria

Outcome flat_gap() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto par = flat_params();
    const auto [sol, rep] = continuation(par, default_eps_schedule(), initial_profile(par, 400));
    const auto d = constrained_eigen(sigma_form(sol.profile, par), Subspace::doubly_constrained);
    const double lam = d.eigenvalues[0], secs = seconds_since(t0);
    return {std::abs(lam - 3.0) <= 0.02 * 3.0 && secs < 30.0,
            fmt("lambda_0 = %.6f (3 +- 2%%), %.1f s (< 30 s)", lam, secs)};
}

Outcome kernel_property() {
    auto ratio = [](const SurfaceProfile& p, const PhysicalParams& par) {
        const Field xs = shift_function(p);
        return std::abs(second_variation(p, par, xs, xs)) / h1_norm_sq(xs, p.grid);
    };
    const auto fp = flat_params();
    const double f4 = ratio(shoot_symmetric(fp, 400).profile, fp);
    const double f8 = ratio(shoot_symmetric(fp, 800).profile, fp);
    const auto gp = g1_params();
    const double g4 = ratio(g1_shot(400).profile, gp), g8 = ratio(g1_shot(800).profile, gp);
    const bool pass = f4 <= 1e-4 && g4 <= 1e-4 && f4 / f8 > 3.0 && f4 / f8 < 5.0 && g4 / g8 > 3.0 && g4 / g8 < 5.0;
    return {pass, fmt("flat %.2e -> %.2e (x%.2f), g=1 %.2e -> %.2e (x%.2f); need <= 1e-4 and ~x4", f4, f8, f4 / f8,
                      g4, g8, g4 / g8)};
}

Outcome kernel_uniqueness() {
    bool pass = true;
    std::string detail;
    const auto fp = flat_params();
    const auto gp = g1_params();
    const EquilibriumSolution flat = shoot_symmetric(fp, 400);
    for (const auto& [name, sol, par] : {std::tuple{"flat", &flat, fp}, std::tuple{"g=1", &g1_shot(400), gp}}) {
        const auto form = sigma_form(sol->profile, par);
        const auto m = constrained_eigen(form, Subspace::mass_constrained);
        const auto d = constrained_eigen(form, Subspace::doubly_constrained);
        const double cs = cosine(column(m.eigenvectors, 0), shift_function(sol->profile), sol->profile.grid);
        const double lm = m.eigenvalues[0], ld = d.eigenvalues[0];
        pass = pass && std::abs(lm) <= 1e-3 && cs >= 0.99 && ld >= 10.0 * std::abs(lm) && ld > 0.0;
        detail += fmt("%s: mass %.2e, cos %.6f, doubly %.4f; ", name, lm, cs, ld);
    }
    return {pass, detail};
}

Outcome circular_cap_young() {
    const auto par = cap_params();
    const auto [sol, rep] = continuation(par, default_eps_schedule(), initial_profile(par, 400));
    const auto cap = circular_cap(par);
    const double err = sup_diff(sol.profile.rho, sample(sol.profile.grid, [&](double t) { return cap.radius_at(t); }));
    const double young = std::acos(-par.gamma_jump / par.sigma);
    const double da = std::max(std::abs(sol.young_angles.first - young), std::abs(sol.young_angles.second - young));
    return {err <= 1e-4 && da <= 1e-4, fmt("arc sup error %.2e (<= 1e-4), Young angle error %.2e rad (<= 1e-4)", err, da)};
}

Outcome continuation_bounds() {
    const auto par = g1_params();
    const auto [sol, rep] = continuation(par, default_eps_schedule(), initial_profile(par, 400));
    bool pos = true, mono = true;
    for (std::size_t i = 0; i < rep.energies.size(); ++i) {
        pos = pos && rep.multipliers[i] > 0.0;
        if (i > 0) mono = mono && rep.energies[i] <= rep.energies[i - 1];
    }
    const auto [lo, hi] = std::minmax_element(rep.sup_rho_prime.begin(), rep.sup_rho_prime.end());
    const double var = (*hi - *lo) / *hi;
    return {pos && mono && var < 0.05,
            fmt("P > 0: %s, energies monotone: %s, sup|rho'| variation %.2f%% (< 5%%)", pos ? "yes" : "no",
                mono ? "yes" : "no", 100 * var)};
}

Outcome lower_bound() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int violations = 0;
    double margin = INFINITY;
    for (int i = 0; i < 1000; ++i) {
        PhysicalParams par;
        par.g = 2.0 * std::abs(uni(rng));
        par.sigma = 0.5 + std::abs(uni(rng));
        par.gamma_jump = 0.99 * par.sigma * uni(rng);
        par.volume = 0.5 + 4.0 * std::abs(uni(rng));
        par.theta1 = 0.5 * std::abs(uni(rng));
        par.theta2 = 0.5 * std::abs(uni(rng));
        const auto g = par.grid(200);
        double a[8], b[8];
        for (int k = 0; k < 8; ++k) {
            a[k] = uni(rng) / (1 + k);
            b[k] = uni(rng) / (1 + k);
        }
        Field r = sample(g, [&](double t) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
            return std::exp(s);
        });
        rescale_to_volume(r, g, par.volume);
        const double e = energy(SurfaceProfile(g, r), par), lb = energy_lower_bound(par);
        if (e < lb) ++violations;
        margin = std::min(margin, e - lb);
    }
    return {violations == 0, fmt("%d violations in 1000 profiles, smallest E - bound %.3f", violations, margin)};
}

Outcome derivative_oracles() {
    const auto par = g1_params();
    const auto& rho0 = g1_shot(400).profile;
    const auto& g = rho0.grid;
    Field rr(g.size());
    for (std::size_t j = 0; j < rr.size(); ++j) rr[j] = rho0.rho[j] * rho0.rho[j];
    const double vol = integrate(rr, g);
    auto tangent = [&](Field h) {
        Field hr(h.size());
        for (std::size_t j = 0; j < h.size(); ++j) hr[j] = h[j] * rho0.rho[j];
        const double a = integrate(hr, g) / vol;
        for (std::size_t j = 0; j < h.size(); ++j) h[j] -= a * rho0.rho[j];
        return h;
    };

    // first derivative: central difference of E^eps against the variation report,
    // away from equilibrium so that dE[h] is not itself at roundoff
    Field moved = rho0.rho;
    for (std::size_t j = 0; j < moved.size(); ++j) moved[j] += 0.05 * std::cos(2 * g.nodes[j]) + 0.02 * std::sin(g.nodes[j]);
    rescale_to_volume(moved, g, par.volume);
    const SurfaceProfile base(g, moved);
    Field br(g.size());
    for (std::size_t j = 0; j < br.size(); ++j) br[j] = moved[j] * moved[j];
    const double bvol = integrate(br, g);
    auto tangent_at_base = [&](Field h) {
        Field hr(h.size());
        for (std::size_t j = 0; j < h.size(); ++j) hr[j] = h[j] * moved[j];
        const double a = integrate(hr, g) / bvol;
        for (std::size_t j = 0; j < h.size(); ++j) h[j] -= a * moved[j];
        return h;
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double eps = 1e-3;
    double worst1 = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        double ca[6], cb[6];
        for (int k = 0; k < 6; ++k) {
            ca[k] = uni(rng);
            cb[k] = uni(rng);
        }
        const Field h = tangent_at_base(sample(g, [&](double t) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += ca[k] * std::cos(k * t) + cb[k] * std::sin(k * t);
            return s;
        }));
        const auto rep = first_variation(base, par, eps);
        Field gh(g.size());
        for (std::size_t j = 0; j < h.size(); ++j) gh[j] = rep.interior_gradient[j] * h[j];
        const double an = integrate(gh, g) - rep.boundary_residual_lo * h.front() + rep.boundary_residual_hi * h.back();
        const double t = 1e-5;
        Field up = moved, dn = moved;
        for (std::size_t j = 0; j < h.size(); ++j) {
            up[j] += t * h[j];
            dn[j] -= t * h[j];
        }
        const double fd = (energy_eps(SurfaceProfile(g, up), par, eps) - energy_eps(SurfaceProfile(g, dn), par, eps)) / (2 * t);
        worst1 = std::max(worst1, std::abs(fd - an) / std::abs(fd));
    }

    // second derivative: energy along the volume-corrected path rho0 + t xi, rescaled
    double worst2 = 0.0;
    for (int k : {2, 3, 4}) {
        const Field xi = tangent(sample(g, [&](double t) { return std::cos(k * t) + 0.3 * std::sin(t); }));
        auto path = [&](double t) {
            Field r = rho0.rho;
            for (std::size_t j = 0; j < r.size(); ++j) r[j] += t * xi[j];
            rescale_to_volume(r, g, par.volume);
            return energy(SurfaceProfile(g, r), par);
        };
        const double t = 1e-4;
        const double sd = (path(t) - 2.0 * path(0.0) + path(-t)) / (t * t);
        const double f0 = second_variation(rho0, par, xi, xi, Evaluation::element);
        worst2 = std::max(worst2, std::abs(sd - f0) / std::abs(f0));
    }
    return {worst1 <= 1e-6 && worst2 <= 1e-4,
            fmt("first derivative rel %.2e (<= 1e-6), second difference vs F0 rel %.2e (<= 1e-4)", worst1, worst2)};
}

Outcome recentring() {
    const auto& rho0 = g1_shot(400).profile;
    double pole = 0.0, ortho = 0.0;
    for (double d : {-0.1, -0.05, -0.01, 0.01, 0.05, 0.1}) {
        auto c = to_cartesian(rho0);
        for (auto& pt : c.points) pt.first += d;
        const auto st = recentre(c, rho0);
        pole = std::max(pole, std::abs(st.pole_x - d));
        ortho = std::max(ortho, st.ortho_residual);
    }
    return {pole <= 1e-3 && ortho <= 1e-6,
            fmt("max |pole - shift| %.2e (<= 1e-3), max |int xi xi_s| / (|rho0| |xi_s|) %.2e (<= 1e-6)", pole, ortho)};
}

Outcome relaxation() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto par = flat_params();
    const auto rho0 = constant(par.grid(400), 1.0);
    auto start = rho0;
    for (std::size_t j = 0; j < start.size(); ++j) {
        const double t = start.grid.nodes[j];
        start.rho[j] += 0.05 * (std::cos(2 * t) + 0.5 * std::cos(3 * t) + 0.5 * std::cos(t));
    }
    rescale_to_volume(start.rho, start.grid, par.volume);
    RelaxOptions opt;
    const auto tr = run(start, par, 8.0, 1e-5, rho0, opt);
    bool mono = true;
    for (std::size_t i = 1; i < tr.energies.size(); ++i) mono = mono && tr.energies[i] <= tr.energies[i - 1];
    // the flow accepts E_new <= E + slack |E|; that sum is itself rounded
    const double e0 = std::abs(tr.energies.front());
    const double ulp = std::nextafter(e0, INFINITY) - e0;
    const bool steps_ok = tr.max_energy_increase <= opt.energy_slack * e0 + 2.0 * ulp;
    const double secs = seconds_since(t0);
    const bool pass = mono && steps_ok && tr.max_volume_drift <= 1e-8 && tr.final_err <= 1e-4 && tr.fit_r2 >= 0.99 &&
                      secs < 120.0;
    return {pass, fmt("energy monotone %s (largest step rise %.1e, roundoff), volume drift %.1e, final L2 %.2e at "
                      "pole %.4f, R^2 %.6f, rate %.3f, %.1f s",
                      mono ? "yes" : "no", tr.max_energy_increase, tr.max_volume_drift, tr.final_err, tr.final_pole,
                      tr.fit_r2, tr.decay_rate, secs)};
}

Outcome xi56_dichotomy() {
    const auto a = build_xi56(constant(flat_params().grid(400), 1.0));
    const auto b = build_xi56(constant(flat_params().grid(800), 1.0));
    const double s4 = sup_abs(a.xi5), s8 = sup_abs(b.xi5);
    const double change = std::abs(s8 - s4) / s4;
    // |xi6| at 64h, 32h, ... , h from pi/2 on the fine grid
    std::string growth;
    bool grows = true;
    double prev = 0.0;
    for (int d : {64, 32, 16, 8, 4, 2, 1}) {
        const double v = 0.5 * (std::abs(b.xi6[b.masked_node - d]) + std::abs(b.xi6[b.masked_node + d]));
        if (prev > 0.0) {
            grows = grows && v >= 1.5 * prev;
            growth += fmt("x%.3f ", v / prev);
        }
        prev = v;
    }
    return {change < 0.05 && grows, fmt("sup|xi5| %.4f -> %.4f (%.2f%%), |xi6| per halving: %s(need >= x1.5)", s4, s8,
                                        100 * change, growth.c_str())};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {"flat-cap spectral gap", flat_gap},
    {"kernel of the second variation", kernel_property},
    {"kernel uniqueness signature", kernel_uniqueness},
    {"zero-gravity circular cap and Young angle", circular_cap_young},
    {"eps-continuation bounds", continuation_bounds},
    {"energy lower bound", lower_bound},
    {"gradient and second-variation oracles", derivative_oracles},
    {"recentring", recentring},
    {"relaxation", relaxation},
    {"xi5/xi6 dichotomy", xi56_dichotomy},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > 10) {
            std::fprintf(stderr, "usage: acceptance [criterion 1..10 ...]\n");
            return 2;
        }
        which.push_back(c);
    }
    if (which.empty())
        for (int c = 1; c <= 10; ++c) which.push_back(c);

    int failed = 0;
    for (int c : which) {
        const auto& k = kCriteria[c - 1];
        Outcome o;
        try {
            o = k.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c, k.name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
