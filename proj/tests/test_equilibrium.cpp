#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "capdrop/equilibrium.hpp"
#include "capdrop/errors.hpp"
#include "support.hpp"

using namespace capdrop;
using namespace capdrop::testing;

TEST_CASE("flat cap from a fat start") {
    const auto par = flat_params();
    const auto s = minimize_eps(par, 1e-4, constant(par.grid(400), 1.2));
    CHECK(sup_diff(s.profile.rho, Field(s.profile.size(), 1.0)) < 1e-6);
    CHECK(s.multiplier == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(volume_functional(s.profile) - par.volume) <= 1e-10 * par.volume);
}

TEST_CASE("circular cap against the analytic arc") {
    const auto par = cap_params();
    const auto [s, rep] = continuation(par, default_eps_schedule(), initial_profile(par, 400));
    const auto cap = circular_cap(par);
    CHECK(cap.R == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cap.b == doctest::Approx(0.5).epsilon(1e-14));
    const Field exact = sample(s.profile.grid, [&](double t) { return cap.radius_at(t); });
    CHECK(sup_diff(s.profile.rho, exact) < 1e-4);
    const double young = std::acos(0.5);
    CHECK(std::abs(s.young_angles.first - young) < 1e-4);
    CHECK(std::abs(s.young_angles.second - young) < 1e-4);
    CHECK(s.multiplier > 0.0);
}

TEST_CASE("continuation bounds for g = 1") {
    const auto par = g1_params();
    const auto [s, rep] = continuation(par, default_eps_schedule(), initial_profile(par, 400));
    REQUIRE(rep.energies.size() == 5);
    const auto [lo, hi] = std::minmax_element(rep.sup_rho_prime.begin(), rep.sup_rho_prime.end());
    CHECK((*hi - *lo) / *hi < 0.05);
    for (double P : rep.multipliers) CHECK(P > 0.0);
    for (std::size_t i = 1; i < rep.energies.size(); ++i) CHECK(rep.energies[i] <= rep.energies[i - 1]);
    CHECK(std::abs(s.young_angles.first - std::acos(0.3)) < 1e-3);
    CHECK(std::abs(s.young_angles.second - std::acos(0.3)) < 1e-3);

    const auto& shot = g1_shot(400);
    CHECK(sup_diff(shot.profile.rho, s.profile.rho) < 1e-4);
}

TEST_CASE("continuation rejects bad schedules") {
    const auto par = flat_params();
    const auto init = initial_profile(par, 50);
    CHECK_THROWS_AS(continuation(par, {}, init), ValidationError);
    CHECK_THROWS_AS(continuation(par, {1e-3, 1e-2}, init), ValidationError);
    CHECK_THROWS_AS(continuation(par, {1e-2, -1.0}, init), ValidationError);
}

TEST_CASE("non-convergence carries the last iterate and eps") {
    const auto par = g1_params();
    MinimizeOptions opt;
    opt.descent_iters = 1;
    opt.newton_iters = 0;
    opt.rounds = 1;
    try {
        continuation(par, {1e-2, 1e-3}, initial_profile(par, 100), opt);
        FAIL("expected a convergence failure");
    } catch (const ConvergenceFailure& f) {
        CHECK(f.eps() == 1e-2);
        CHECK(f.last_iterate().size() == 101);
        CHECK(f.residual() > 0.0);
    }
}

TEST_CASE("shooting: flat, cap and g = 1") {
    const auto flat = shoot_symmetric(flat_params(), 400);
    CHECK(sup_diff(flat.profile.rho, Field(flat.profile.size(), 1.0)) < 1e-10);
    CHECK(flat.multiplier == doctest::Approx(1.0).epsilon(1e-10));

    const auto par = cap_params();
    const auto cap = circular_cap(par);
    const auto s = shoot_symmetric(par, 400);
    CHECK(sup_diff(s.profile.rho, sample(s.profile.grid, [&](double t) { return cap.radius_at(t); })) < 1e-6);

    const auto& g1 = g1_shot(400);
    CHECK(std::abs(volume_functional(g1.profile) - g1_params().volume) <= 1e-10 * g1_params().volume);
    CHECK(g1.multiplier > 0.0);
}

TEST_CASE("shooting needs the sessile case") {
    auto par = flat_params();
    par.theta1 = 0.2;
    CHECK_THROWS_AS(shoot_symmetric(par, 100), ValidationError);
}

TEST_CASE("symmetry reports") {
    const auto flat = minimize_eps(flat_params(), 1e-6, initial_profile(flat_params(), 400));
    CHECK(verify_symmetry(flat).max_asymmetry == 0.0);

    const auto par = cap_params();
    EquilibriumSolution arc;
    const auto cap = circular_cap(par);
    const auto g = par.grid(400);
    arc.profile = SurfaceProfile(g, sample(g, [&](double t) { return cap.radius_at(t); }));
    CHECK(verify_symmetry(arc).max_asymmetry <= 1e-10);

    const auto rep = verify_symmetry(g1_shot(400));
    CHECK(rep.max_asymmetry <= 1e-8);
    CHECK(rep.passed);
}
