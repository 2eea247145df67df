#include "capdrop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

// boost 1.74 pchip calls unqualified isnan
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "capdrop/errors.hpp"

namespace capdrop {

AngularGrid::AngularGrid(double lo, double hi, int n)
    : theta_lo(lo), theta_hi(hi), n_cells(n) {
    if (n < 2) throw InvalidGrid("grid needs at least 3 nodes");
    if (!(lo >= 0.0 && lo < hi && hi <= std::numbers::pi + 1e-14))
        throw InvalidGrid("grid interval must satisfy 0 <= lo < hi <= pi");
    nodes.resize(n + 1);
    weights.assign(n + 1, 0.0);
    const double step = (hi - lo) / n;
    for (int j = 0; j <= n; ++j) nodes[j] = lo + step * j;
    nodes[n] = hi;
    if (n % 2 == 0) {
        for (int k = 0; k < n; k += 2) {
            weights[k] += step / 3.0;
            weights[k + 1] += 4.0 * step / 3.0;
            weights[k + 2] += step / 3.0;
        }
    } else {
        for (int k = 0; k < n; ++k) {
            weights[k] += 0.5 * step;
            weights[k + 1] += 0.5 * step;
        }
    }
}

SurfaceProfile::SurfaceProfile(AngularGrid g, Field r) : grid(std::move(g)), rho(std::move(r)) {
    if (rho.size() != grid.size()) throw DimensionError("profile length does not match grid");
    for (double v : rho)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DegenerateProfile("profile must be strictly positive and finite");
}

std::vector<QuadPoint> element_quadrature(const AngularGrid& grid) {
    const int n = grid.n_cells;
    const double h = grid.h();
    std::vector<QuadPoint> q;
    if (grid.simpson()) {
        q.reserve(3 * n / 2);
        const double c = 1.0 / (2.0 * h);
        for (int a = 0; a < n; a += 2) {
            q.push_back({a, h / 3.0, 3, {a, a + 1, a + 2}, {-3.0 * c, 4.0 * c, -c}});
            q.push_back({a + 1, 4.0 * h / 3.0, 2, {a, a + 2, 0}, {-c, c, 0.0}});
            q.push_back({a + 2, h / 3.0, 3, {a, a + 1, a + 2}, {c, -4.0 * c, 3.0 * c}});
        }
    } else {
        q.reserve(2 * n);
        for (int a = 0; a < n; ++a) {
            q.push_back({a, h / 2.0, 2, {a, a + 1, 0}, {-1.0 / h, 1.0 / h, 0.0}});
            q.push_back({a + 1, h / 2.0, 2, {a, a + 1, 0}, {-1.0 / h, 1.0 / h, 0.0}});
        }
    }
    return q;
}

Field derivative(const Field& f, const AngularGrid& grid) {
    const std::size_t m = grid.size();
    if (m < 3) throw InvalidGrid("derivative needs at least 3 nodes");
    if (f.size() != m) throw DimensionError("field length does not match grid");
    const double h = grid.h();
    Field d(m);
    for (std::size_t j = 1; j + 1 < m; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    if (m < 4) {
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
        return d;
    }
    // third-order one-sided ends; the 2nd-order ones carry a large constant
    d[0] = (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h);
    d[m - 1] = (11.0 * f[m - 1] - 18.0 * f[m - 2] + 9.0 * f[m - 3] - 2.0 * f[m - 4]) / (6.0 * h);
    return d;
}

Field derivative(const SurfaceProfile& p) { return derivative(p.rho, p.grid); }

Field second_derivative(const Field& f, const AngularGrid& grid) {
    const std::size_t m = grid.size();
    if (m < 3) throw InvalidGrid("second derivative needs at least 3 nodes");
    if (f.size() != m) throw DimensionError("field length does not match grid");
    const double h2 = grid.h() * grid.h();
    Field d(m);
    for (std::size_t j = 1; j + 1 < m; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
    if (m < 4) {
        d[0] = d[1];
        d[2] = d[1];
        return d;
    }
    if (m < 5) {
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        d[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / h2;
        return d;
    }
    d[0] = (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / (12.0 * h2);
    d[m - 1] = (35.0 * f[m - 1] - 104.0 * f[m - 2] + 114.0 * f[m - 3] - 56.0 * f[m - 4] + 11.0 * f[m - 5]) / (12.0 * h2);
    return d;
}

double integrate(const Field& f, const AngularGrid& grid) {
    if (f.size() != grid.size()) throw DimensionError("field length does not match grid");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += grid.weights[j] * f[j];
    return s;
}

CartesianCurve to_cartesian(const SurfaceProfile& p) {
    CartesianCurve c;
    c.points.reserve(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double t = p.grid.nodes[j];
        c.points.emplace_back(p.rho[j] * std::cos(t), p.rho[j] * std::sin(t));
    }
    return c;
}

SurfaceProfile from_cartesian(const CartesianCurve& curve, double pole_x, const AngularGrid& grid) {
    const std::size_t m = curve.points.size();
    if (m < 4) throw RecentreDomainError("curve has too few points to resample");
    std::vector<double> ang(m), rad(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = curve.points[i].first - pole_x;
        const double y = std::max(curve.points[i].second, 0.0);
        ang[i] = std::atan2(y, dx);
        rad[i] = std::hypot(dx, y);
    }
    if (ang.front() > ang.back()) {
        std::reverse(ang.begin(), ang.end());
        std::reverse(rad.begin(), rad.end());
    }
    for (std::size_t i = 1; i < m; ++i)
        if (!(ang[i] > ang[i - 1]))
            throw RecentreDomainError("curve is not star-shaped about the pole");
    // the angle sequence must cover the grid interval
    const double tol = 1e-9;
    if (ang.front() > grid.theta_lo + tol || ang.back() < grid.theta_hi - tol)
        throw RecentreDomainError("curve does not span the grid's angular interval about the pole");
    for (double r : rad)
        if (!(r > 0.0)) throw RecentreDomainError("pole lies on the curve");

    const double a0 = ang.front(), a1 = ang.back();
    boost::math::interpolators::pchip<std::vector<double>> interp(std::move(ang), std::move(rad));
    Field rho(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = std::clamp(grid.nodes[j], a0, a1);
        rho[j] = interp(t);
    }
    return SurfaceProfile(grid, std::move(rho));
}

}  // namespace capdrop
