#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "capdrop/errors.hpp"
#include "capdrop/moving_frame.hpp"
#include "capdrop/relax.hpp"
#include "capdrop/spectral.hpp"

namespace capdrop::cli {

namespace fs = std::filesystem;

namespace {

std::string at(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

Json params_json(const PhysicalParams& p) {
    return Json{{"g", p.g},           {"sigma", p.sigma},   {"gamma_jump", p.gamma_jump}, {"volume", p.volume},
                {"theta1", p.theta1}, {"theta2", p.theta2}, {"kappa", p.kappa}};
}

Json header(const std::string& command, const RunConfig& cfg) {
    return Json{{"schema_version", kSchemaVersion},
                {"command", command},
                {"params", params_json(cfg.params)},
                {"grid_n", cfg.grid_n}};
}

bool sessile(const PhysicalParams& p) { return p.theta1 == 0.0 && p.theta2 == 0.0; }

void profile_svg(const std::string& path, const SurfaceProfile& p, const std::string& title) {
    const auto c = to_cartesian(p);
    Series s;
    for (const auto& [x, y] : c.points) {
        s.x.push_back(x);
        s.y.push_back(y);
    }
    write_line_svg(path, {s}, {title, "x", "y", false, true});
}

void profile_csv(const std::string& path, const SurfaceProfile& p) {
    write_csv(path, {"theta", "rho"}, {p.grid.nodes, p.rho});
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

Field column(const Eigen::MatrixXd& m, Eigen::Index k) {
    return Field(m.col(k).data(), m.col(k).data() + m.rows());
}

int cmd_equilibrate(const RunConfig& cfg, const std::string& out, bool plots) {
    const auto sol = solve_equilibrium(cfg);
    profile_csv(at(out, "profile.csv"), sol.profile);
    Json j = header("equilibrate", cfg);
    j["solver"] = cfg.solver;
    j["multiplier"] = sol.multiplier;
    j["eps_used"] = sol.eps_used;
    j["el_residual"] = sol.el_residual;
    j["bc_residuals"] = {sol.bc_residuals.first, sol.bc_residuals.second};
    j["contact_angles"] = {{"gamma2_lower", sol.contact_angles.first}, {"gamma1_upper", sol.contact_angles.second}};
    j["young_angles"] = {sol.young_angles.first, sol.young_angles.second};
    j["young_target"] = std::acos(-cfg.params.gamma_jump / cfg.params.sigma);
    const double C = volume_functional(sol.profile);
    j["volume_functional"] = C;
    j["area"] = 0.5 * C;
    j["energy"] = energy(sol.profile, cfg.params);
    if (sessile(cfg.params)) {
        const auto sym = verify_symmetry(sol);
        j["symmetry"] = {{"max_asymmetry", sym.max_asymmetry}, {"passed", sym.passed}};
    }
    write_json(at(out, "solution.json"), j);
    if (plots) profile_svg(at(out, "profile.svg"), sol.profile, "equilibrium profile");
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out, bool plots) {
    const auto [sol, rep] =
        continuation(cfg.params, cfg.eps_schedule, initial_profile(cfg.params, cfg.grid_n));
    Json j = header("sweep-eps", cfg);
    j["eps_schedule"] = num_array(rep.eps_schedule);
    j["sup_rho_prime"] = num_array(rep.sup_rho_prime);
    j["bv_norms"] = num_array(rep.bv_norms);
    j["multipliers"] = num_array(rep.multipliers);
    j["energies"] = num_array(rep.energies);
    bool mono = true, pos = true;
    double lo = rep.sup_rho_prime.front(), hi = lo;
    for (std::size_t i = 0; i < rep.energies.size(); ++i) {
        if (i > 0 && rep.energies[i] > rep.energies[i - 1]) mono = false;
        if (!(rep.multipliers[i] > 0.0)) pos = false;
        lo = std::min(lo, rep.sup_rho_prime[i]);
        hi = std::max(hi, rep.sup_rho_prime[i]);
    }
    j["energies_monotone"] = mono;
    j["multipliers_positive"] = pos;
    j["sup_rho_prime_variation"] = (hi - lo) / hi;
    write_json(at(out, "continuation.json"), j);
    profile_csv(at(out, "profile.csv"), sol.profile);
    if (plots) {
        Series s{rep.eps_schedule, rep.energies, "E^eps"};
        for (double& x : s.x) x = std::log10(x);
        write_line_svg(at(out, "energy_vs_eps.svg"), {s}, {"energy along the eps schedule", "log10 eps", "E^eps"});
        profile_svg(at(out, "profile.svg"), sol.profile, "equilibrium profile (smallest eps)");
    }
    return kOk;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& out, bool plots) {
    const auto sol = solve_equilibrium(cfg);
    const auto form = sigma_form(sol.profile, cfg.params);
    const Subspace sub = subspace_from_string(cfg.subspace);
    const auto dec = constrained_eigen(form, sub);
    const auto mass = sub == Subspace::mass_constrained ? dec : constrained_eigen(form, Subspace::mass_constrained);
    const Field xs = shift_function(sol.profile);
    const int count = std::min<int>(cfg.eigen_count, static_cast<int>(dec.eigenvalues.size()));
    std::vector<double> ev(dec.eigenvalues.data(), dec.eigenvalues.data() + count);
    Json j = header("spectrum", cfg);
    j["subspace"] = to_string(sub);
    j["eigenvalues"] = num_array(ev);
    j["gap"] = dec.eigenvalues[0];
    j["xis_alignment"] = cosine(column(mass.eigenvectors, 0), xs, sol.profile.grid);
    j["mass_constrained_min"] = mass.eigenvalues[0];
    write_json(at(out, "spectrum.json"), j);
    if (cfg.eigvec_csv) {
        std::vector<std::string> head{"theta"};
        std::vector<std::vector<double>> cols{sol.profile.grid.nodes};
        for (int k = 0; k < count; ++k) {
            head.push_back("w" + std::to_string(k));
            cols.push_back(column(dec.eigenvectors, k));
        }
        write_csv(at(out, "eigenvectors.csv"), head, cols);
    }
    if (plots) write_stem_svg(at(out, "spectrum.svg"), ev, {"(1,Sigma) spectrum, " + to_string(sub), "k", "lambda_k"});
    return kOk;
}

int cmd_kernel(const RunConfig& cfg, const std::string& out, bool plots) {
    if (!sessile(cfg.params)) throw ValidationError("kernel needs theta1 = theta2 = 0");
    const auto sol = solve_equilibrium(cfg);
    const auto& g = sol.profile.grid;
    const auto k = build_xi56(sol.profile, cfg.xi56);
    const Field res = kernel_ode_residual(sol.profile, cfg.params, k.xi_s, 0.0);
    Field Q = k.Q_values, x6 = k.xi6;
    Q[k.masked_node] = std::nan("");
    x6[k.masked_node] = std::nan("");
    write_csv(at(out, "kernel.csv"), {"theta", "Q", "xi5", "xi6", "xi_s", "residual"}, {g.nodes, Q, k.xi5, x6, k.xi_s, res});
    double sup_res = 0.0, sup5 = 0.0;
    const std::size_t skip = std::max<std::size_t>(3, g.size() / 100);
    for (std::size_t j = skip; j + skip < g.size(); ++j) sup_res = std::max(sup_res, std::abs(res[j]));
    for (double v : k.xi5) sup5 = std::max(sup5, std::abs(v));
    Field prod(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) prod[j] = k.xi_s[j] * sol.profile.rho[j];
    const double F0 = second_variation(sol.profile, cfg.params, k.xi_s, k.xi_s);
    Json j = header("kernel", cfg);
    j["residual_sup_interior"] = sup_res;
    j["residual_over_sigma"] = sup_res / cfg.params.sigma;
    j["F0_xis"] = F0;
    j["F0_xis_over_h1"] = F0 / h1_norm_sq(k.xi_s, g);
    j["xis_rho0_integral"] = integrate(prod, g);
    j["xi5_sup"] = sup5;
    j["xi6_left_of_mask"] = k.xi6[k.masked_node - 1];
    j["xi6_right_of_mask"] = k.xi6[k.masked_node + 1];
    j["masked_theta"] = g.nodes[k.masked_node];
    j["constants"] = {k.constants[0], k.constants[1], k.constants[2], k.constants[3]};
    write_json(at(out, "kernel.json"), j);
    if (plots) {
        write_line_svg(at(out, "kernel.svg"),
                       {{g.nodes, k.xi5, "xi5"}, {g.nodes, x6, "xi6"}, {g.nodes, k.xi_s, "xi_s"}},
                       {"kernel construction", "theta", "value"});
    }
    return kOk;
}

int cmd_recentre(const RunConfig& cfg, const std::string& out, bool plots) {
    const auto sol = solve_equilibrium(cfg);
    const auto p = perturbed(sol.profile, cfg);
    auto curve = to_cartesian(p);
    for (auto& pt : curve.points) pt.first += cfg.shift;
    const auto st = recentre(curve, sol.profile);
    Json j = header("recentre", cfg);
    j["pole_x"] = st.pole_x;
    j["lambda"] = num(st.lambda);
    j["ortho_residual"] = st.ortho_residual;
    j["l2_perturbation"] = st.l2_perturbation;
    j["shift"] = cfg.shift;
    j["ortho_relative"] = st.ortho_relative;
    j["objective_slope"] = st.objective_slope;
    j["scan_minima"] = num_array(st.scan_minima);
    write_json(at(out, "frame.json"), j);
    if (plots) profile_svg(at(out, "frame.svg"), st.profile_in_frame, "profile in the recentred frame");
    return kOk;
}

int cmd_relax(const RunConfig& cfg, const std::string& out, bool plots) {
    const auto sol = solve_equilibrium(cfg);
    const auto start = perturbed(sol.profile, cfg);
    RelaxOptions opt;
    opt.snapshots = cfg.snapshots;
    const auto tr = run(start, cfg.params, cfg.t_end, cfg.dt0, sol.profile, opt);
    std::vector<double> lo, hi;
    for (const auto& [a, b] : tr.contact_rhos) {
        lo.push_back(a);
        hi.push_back(b);
    }
    write_csv(at(out, "trace.csv"), {"t", "E", "V", "pole_x", "rho_lo", "rho_hi", "dist"},
              {tr.times, tr.energies, tr.volumes, tr.pole_positions, lo, hi, tr.l2_distance_to_equilibrium});
    Json j = header("relax", cfg);
    j["decay_rate"] = tr.decay_rate;
    j["fit_r2"] = tr.fit_r2;
    j["final_pole"] = num(tr.final_pole);
    j["final_err"] = tr.final_err;
    j["accepted_steps"] = tr.accepted_steps;
    j["rejected_steps"] = tr.rejected_steps;
    j["max_volume_drift"] = tr.max_volume_drift;
    j["max_energy_increase"] = tr.max_energy_increase;
    j["max_dissipation_mismatch"] = tr.max_dissipation_mismatch;
    write_json(at(out, "relax.json"), j);
    if (plots) {
        std::vector<double> dE;
        for (double e : tr.energies) dE.push_back(e - tr.energies.back());
        write_line_svg(at(out, "energy.svg"), {{tr.times, tr.energies, "E(t)"}},
                       {"energy along the flow", "t", "E"});
        write_line_svg(at(out, "distance.svg"), {{tr.times, tr.l2_distance_to_equilibrium, "||xi||"}},
                       {"distance to the shifted equilibrium", "t", "log10 L2", true});
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& out, bool) {
    bool ok = false;
    Json j = verify_suite(cfg, ok);
    write_json(at(out, "verify.json"), j);
    return ok ? kOk : kNumerical;
}

void diagnostic(const std::string& out, const std::string& type, const std::exception& e, const Json& extra) {
    Json j{{"schema_version", kSchemaVersion}, {"error_type", type}, {"message", e.what()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    try {
        write_json(at(out, "diagnostic.json"), j);
    } catch (const std::exception&) {
    }
}

}  // namespace

EquilibriumSolution solve_equilibrium(const RunConfig& cfg) {
    if (cfg.solver == "shoot") return shoot_symmetric(cfg.params, cfg.grid_n);
    return continuation(cfg.params, cfg.eps_schedule, initial_profile(cfg.params, cfg.grid_n)).first;
}

SurfaceProfile perturbed(const SurfaceProfile& rho0, const RunConfig& cfg) {
    const auto& g = rho0.grid;
    Field r = rho0.rho;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (const auto& t : cfg.perturb) {
        if (t.kind == "rand") {
            double a[7];
            for (int k = 1; k <= 6; ++k) a[k] = uni(rng) / (k * k);
            for (std::size_t j = 0; j < r.size(); ++j)
                for (int k = 1; k <= 6; ++k) r[j] += t.amp * a[k] * std::cos(k * g.nodes[j]);
        } else {
            for (std::size_t j = 0; j < r.size(); ++j)
                r[j] += t.amp * (t.kind == "cos" ? std::cos(t.k * g.nodes[j]) : std::sin(t.k * g.nodes[j]));
        }
    }
    for (double v : r)
        if (!(v > 0.0)) throw ValidationError("perturb: perturbed profile is not positive");
    rescale_to_volume(r, g, cfg.params.volume);
    return SurfaceProfile(g, r);
}

int dispatch(const std::string& command, const RunConfig& cfg, const std::string& out, bool plots) {
    try {
        fs::create_directories(out);
        if (command == "equilibrate") return cmd_equilibrate(cfg, out, plots);
        if (command == "sweep-eps") return cmd_sweep(cfg, out, plots);
        if (command == "spectrum") return cmd_spectrum(cfg, out, plots);
        if (command == "kernel") return cmd_kernel(cfg, out, plots);
        if (command == "recentre") return cmd_recentre(cfg, out, plots);
        if (command == "relax") return cmd_relax(cfg, out, plots);
        if (command == "verify") return cmd_verify(cfg, out, plots);
        std::cerr << "unknown command '" << command << "'\n";
        return kUsage;
    } catch (const ConvergenceFailure& e) {
        diagnostic(out, "convergence-failure", e, Json{{"eps", e.eps()}, {"residual", num(e.residual())}});
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const ShootingFailure& e) {
        diagnostic(out, "shooting-failure", e, Json{{"residual", num_array(e.residual())}});
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const InvalidGrid& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const Error& e) {
        diagnostic(out, "numerical-failure", e, Json::object());
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "cannot create output directory: " << e.what() << "\n";
        return kValidation;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"capdrop: 2-D sessile capillary droplet equilibria, spectra and relaxation"};
    std::string command, config, out = ".";
    bool plots = false;
    std::uint64_t seed = 0;
    app.add_option("command", command, "equilibrate | sweep-eps | spectrum | kernel | recentre | relax | verify")
        ->required()
        ->check(CLI::IsMember({"equilibrate", "sweep-eps", "spectrum", "kernel", "recentre", "relax", "verify"}));
    app.add_option("--config", config, "key=value configuration file")->required();
    app.add_option("--out", out, "output directory");
    app.add_flag("--plots", plots, "also write static SVG plots");
    auto* seed_opt = app.add_option("--seed", seed, "seed for random perturbations (overrides [run] seed)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    RunConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kValidation;
    }
    if (seed_opt->count() > 0) cfg.seed = seed;
    return dispatch(command, cfg, out, plots);
}

}  // namespace capdrop::cli
