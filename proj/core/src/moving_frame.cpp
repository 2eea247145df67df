#include "capdrop/moving_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "capdrop/errors.hpp"
#include "capdrop/spectral.hpp"

namespace capdrop {

namespace {

double l2(const Field& f, const AngularGrid& g) {
    Field sq(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) sq[j] = f[j] * f[j];
    return std::sqrt(integrate(sq, g));
}

double weighted(const Field& a, const Field& b, const AngularGrid& g) {
    Field p(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) p[j] = a[j] * b[j];
    return integrate(p, g);
}

double objective(const CartesianCurve& curve, const SurfaceProfile& rho0, double c) {
    const SurfaceProfile rc = from_cartesian(curve, c, rho0.grid);
    Field d(rc.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = (rho0.rho[j] - rc.rho[j]) * (rho0.rho[j] - rc.rho[j]);
    return integrate(d, rho0.grid);
}

}  // namespace

MovingFrameState frame_at(const CartesianCurve& curve, const SurfaceProfile& rho0, double c) {
    const auto& g = rho0.grid;
    MovingFrameState s;
    s.pole_x = c;
    s.profile_in_frame = from_cartesian(curve, c, g);
    s.perturbation.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) s.perturbation[j] = s.profile_in_frame.rho[j] - rho0.rho[j];
    const Field xs = shift_function(rho0);
    const Field d = derivative(s.profile_in_frame);
    s.xi3.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        s.xi3[j] = std::cos(g.nodes[j]) + d[j] / s.profile_in_frame.rho[j] * std::sin(g.nodes[j]);
    s.l2_perturbation = l2(s.perturbation, g);
    const double xs_norm = l2(xs, g);
    s.ortho_abs = std::abs(weighted(s.perturbation, xs, g));
    s.ortho_residual = s.ortho_abs / (l2(rho0.rho, g) * xs_norm);
    s.ortho_relative = s.l2_perturbation > 0.0 ? s.ortho_abs / (s.l2_perturbation * xs_norm) : 0.0;
    s.objective = s.l2_perturbation * s.l2_perturbation;
    const double denom = weighted(xs, s.xi3, g);
    s.lambda = std::abs(denom) < 1e-8 ? std::numeric_limits<double>::quiet_NaN() : 1.0 / denom;
    return s;
}

MovingFrameState recentre(const CartesianCurve& curve, const SurfaceProfile& rho0, const RecentreOptions& opt) {
    if (curve.points.size() < 4) throw RecentreDomainError("curve has too few points");
    const double xa = curve.points.front().first, xb = curve.points.back().first;
    const double x1 = std::min(xa, xb), x2 = std::max(xa, xb);
    if (!(x2 > x1)) throw RecentreDomainError("contact points coincide");

    auto f = [&](double c) {
        try {
            return objective(curve, rho0, c);
        } catch (const RecentreDomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const int n = std::max(opt.scan_points, 5);
    std::vector<double> cs(n), fs(n);
    for (int i = 0; i < n; ++i) {
        cs[i] = x1 + (x2 - x1) * (i + 0.5) / n;
        fs[i] = f(cs[i]);
    }
    std::vector<int> minima;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(fs[i])) continue;
        const bool left = i == 0 || fs[i] <= fs[i - 1];
        const bool right = i == n - 1 || fs[i] <= fs[i + 1];
        if (left && right) minima.push_back(i);
    }
    if (minima.empty()) throw RecentreDomainError("no admissible pole between the contact points");
    int best = minima.front();
    for (int i : minima)
        if (fs[i] < fs[best]) best = i;
    const double lo = best > 0 ? cs[best - 1] : x1 + 1e-9 * (x2 - x1);
    const double hi = best < n - 1 ? cs[best + 1] : x2 - 1e-9 * (x2 - x1);
    const auto br = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2);
    double c = br.first;
    if (!std::isfinite(br.second)) throw RecentreDomainError("objective is not finite at the minimizer");

    if (opt.orthogonal_polish) {
        // int (rho_c - rho0) xi_s = 0 is the frame condition itself; its root
        // sits within O(||xi||^2) of the least-squares minimizer
        const Field xs = shift_function(rho0);
        auto G = [&](double x) {
            const SurfaceProfile rc = from_cartesian(curve, x, rho0.grid);
            Field d(rc.size());
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = (rc.rho[j] - rho0.rho[j]) * xs[j];
            return integrate(d, rho0.grid);
        };
        try {
            const double step = (hi - lo) / 2;
            double a = std::max(c - step, x1 + 1e-9 * (x2 - x1)), b = std::min(c + step, x2 - 1e-9 * (x2 - x1));
            const double ga = G(a), gb = G(b);
            if (ga == 0.0) {
                c = a;
            } else if (gb == 0.0) {
                c = b;
            } else if ((ga < 0.0) != (gb < 0.0)) {
                std::uintmax_t iters = 200;
                const auto r = boost::math::tools::toms748_solve(
                    G, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52), iters);
                const double root = 0.5 * (r.first + r.second);
                // accept only if it does not worsen the fit noticeably
                if (f(root) <= f(c) + 1e-12 * (1.0 + f(c))) c = root;
            }
        } catch (const RecentreDomainError&) {
        }
    }

    MovingFrameState s = frame_at(curve, rho0, c);
    for (int i : minima) s.scan_minima.push_back(cs[i]);
    const double dc = 1e-6 * std::max(1.0, x2 - x1);
    const double fp = f(c + dc), fm = f(c - dc);
    if (std::isfinite(fp) && std::isfinite(fm)) s.objective_slope = (fp - fm) / (2 * dc);
    return s;
}

double lambda_factor(const MovingFrameState& state, const SurfaceProfile& rho0) {
    const Field xs = shift_function(rho0);
    const double denom = weighted(xs, state.xi3, rho0.grid);
    if (std::abs(denom) < 1e-8) throw DegenerateFrame("integral of xi_s xi_3 vanishes; perturbation too large");
    return 1.0 / denom;
}

double pole_velocity(const MovingFrameState& state, const SurfaceProfile& rho0, const Field& normal_speed) {
    if (normal_speed.size() != rho0.size()) throw DimensionError("normal speed length does not match grid");
    const Field xs = shift_function(rho0);
    return lambda_factor(state, rho0) * weighted(normal_speed, xs, rho0.grid);
}

}  // namespace capdrop
