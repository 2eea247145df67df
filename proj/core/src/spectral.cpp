#include "capdrop/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "capdrop/errors.hpp"

namespace capdrop {

namespace {

constexpr double kPi = std::numbers::pi;

void check_len(const Field& f, const AngularGrid& g) {
    if (f.size() != g.size()) throw DimensionError("field length does not match grid");
}

void require_sessile(const AngularGrid& g) {
    if (std::abs(g.theta_lo) > 1e-14 || std::abs(g.theta_hi - kPi) > 1e-12)
        throw ValidationError("kernel theory needs the sessile interval (0, pi)");
}

}  // namespace

Field shift_function(const SurfaceProfile& rho0) {
    const Field d = derivative(rho0);
    Field xs(rho0.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double t = rho0.grid.nodes[j];
        xs[j] = std::cos(t) + d[j] / rho0.rho[j] * std::sin(t);
    }
    return xs;
}

double h1_norm_sq(const Field& xi, const AngularGrid& grid) {
    const Field d = derivative(xi, grid);
    Field f(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) f[j] = xi[j] * xi[j] + d[j] * d[j];
    return integrate(f, grid);
}

namespace {

// integrand of the polarized second variation at one point
inline double h_density(double g, double sigma, double sn, double r, double p, double pp, double a, double ap,
                        double b, double bp) {
    const double s = r * r + p * p;
    const double root = std::sqrt(s);
    const double s32 = s * root;
    const double H = (2.0 * p * p - r * pp + r * r) / s32;
    return g * r * a * b * sn +
           sigma * (-H * a * b + (a * b + ap * bp) / root - (a * r + p * ap) * (b * r + p * bp) / s32);
}

}  // namespace

double second_variation(const SurfaceProfile& rho0, const PhysicalParams& params, const Field& xi,
                        const Field& xt, Evaluation how) {
    const auto& grid = rho0.grid;
    check_len(xi, grid);
    check_len(xt, grid);
    const Field r1 = derivative(rho0.rho, grid);
    const Field r2 = second_derivative(rho0.rho, grid);
    if (how == Evaluation::nodal) {
        const Field a1 = derivative(xi, grid);
        const Field b1 = derivative(xt, grid);
        Field f(grid.size());
        for (std::size_t j = 0; j < f.size(); ++j)
            f[j] = h_density(params.g, params.sigma, std::sin(grid.nodes[j]), rho0.rho[j], r1[j], r2[j], xi[j],
                             a1[j], xt[j], b1[j]);
        return integrate(f, grid);
    }
    double sum = 0.0;
    for (const auto& q : element_quadrature(grid)) {
        const int n = q.node;
        sum += q.weight * h_density(params.g, params.sigma, std::sin(grid.nodes[n]), rho0.rho[n],
                                    qp_derivative(q, rho0.rho.data()), r2[n], xi[n], qp_derivative(q, xi.data()),
                                    xt[n], qp_derivative(q, xt.data()));
    }
    return sum;
}

double SigmaForm::evaluate(const Field& a, const Field& b) const {
    const Eigen::Map<const Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
    const Eigen::Map<const Eigen::VectorXd> vb(b.data(), static_cast<Eigen::Index>(b.size()));
    return va.dot(stiffness * vb);
}

SigmaForm sigma_form(const SurfaceProfile& rho0, const PhysicalParams& params) {
    const auto& grid = rho0.grid;
    require_sessile(grid);
    if (params.theta1 != 0.0 || params.theta2 != 0.0)
        throw ValidationError("sigma form needs theta1 = theta2 = 0");
    const auto m = static_cast<Eigen::Index>(grid.size());
    const Field r2 = second_derivative(rho0.rho, grid);
    SigmaForm f;
    f.stiffness = Eigen::MatrixXd::Zero(m, m);
    const double sg = params.sigma;
    // products of nodal values and element derivatives, weighted by the
    // quadrature; a: xi' xi~', b: xi xi~' + xi' xi~, c: xi xi~
    for (const auto& q : element_quadrature(grid)) {
        const int n = q.node;
        const double r = rho0.rho[n];
        const double p = qp_derivative(q, rho0.rho.data());
        const double s = r * r + p * p;
        const double s32 = s * std::sqrt(s);
        const double a = sg * r * r / s32;
        const double b = -sg * r * p / s32;
        const double c = params.g * r * std::sin(grid.nodes[n]) + sg * (r2[n] * r - p * p - r * r) / s32;
        f.stiffness(n, n) += q.weight * c;
        for (int k = 0; k < q.count; ++k) {
            const double cb = q.weight * b * q.coef[k];
            f.stiffness(n, q.idx[k]) += cb;
            f.stiffness(q.idx[k], n) += cb;
            for (int l = 0; l < q.count; ++l)
                f.stiffness(q.idx[k], q.idx[l]) += q.weight * a * q.coef[k] * q.coef[l];
        }
    }
    f.stiffness = 0.5 * (f.stiffness + f.stiffness.transpose()).eval();
    f.mass = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) f.mass(j, j) = grid.weights[j];
    const Field xs = shift_function(rho0);
    f.constraint_rho0.resize(m);
    f.constraint_xis.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        f.constraint_rho0[j] = grid.weights[j] * rho0.rho[j];
        f.constraint_xis[j] = grid.weights[j] * xs[j];
    }
    return f;
}

std::string to_string(Subspace s) {
    switch (s) {
        case Subspace::unconstrained: return "unconstrained";
        case Subspace::mass_constrained: return "mass-constrained";
        case Subspace::doubly_constrained: return "doubly-constrained";
    }
    return "unknown";
}

Subspace subspace_from_string(const std::string& s) {
    if (s == "unconstrained" || s == "none") return Subspace::unconstrained;
    if (s == "mass-constrained" || s == "mass") return Subspace::mass_constrained;
    if (s == "doubly-constrained" || s == "doubly") return Subspace::doubly_constrained;
    throw ValidationError("unknown subspace '" + s + "'");
}

SpectralDecomposition constrained_eigen(const SigmaForm& form, Subspace subspace) {
    const Eigen::Index m = form.mass.rows();
    Eigen::MatrixXd cons(m, 0);
    if (subspace != Subspace::unconstrained) {
        cons.conservativeResize(m, subspace == Subspace::doubly_constrained ? 2 : 1);
        cons.col(0) = form.constraint_rho0;
        if (subspace == Subspace::doubly_constrained) cons.col(1) = form.constraint_xis;
    }
    SpectralDecomposition d;
    d.subspace = subspace;
    d.mass = form.mass;
    if (cons.cols() == 0) {
        d.basis = Eigen::MatrixXd::Identity(m, m);
    } else {
        // orthonormal complement of the constraint columns
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(cons);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
        d.basis = Q.rightCols(m - cons.cols());
    }
    const Eigen::MatrixXd Kz = d.basis.transpose() * form.stiffness * d.basis;
    Eigen::MatrixXd Mz = d.basis.transpose() * form.mass * d.basis;
    Mz = 0.5 * (Mz + Mz.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> me(Mz, Eigen::EigenvaluesOnly);
    const double lo = me.eigenvalues().minCoeff(), hi = me.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) throw ConditioningError("mass matrix is ill-conditioned");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Kz + Kz.transpose()), Mz);
    if (es.info() != Eigen::Success) throw ConditioningError("generalized eigensolver failed");
    d.eigenvalues = es.eigenvalues();
    d.eigenvectors = d.basis * es.eigenvectors();
    return d;
}

Field kernel_ode_residual(const SurfaceProfile& rho0, const PhysicalParams& params, const Field& xi, double C) {
    const auto& grid = rho0.grid;
    check_len(xi, grid);
    const Field r1 = derivative(rho0.rho, grid);
    const Field r2 = second_derivative(rho0.rho, grid);
    const Field x1 = derivative(xi, grid);
    const Field x2 = second_derivative(xi, grid);
    const double sg = params.sigma;
    Field res(grid.size());
    for (std::size_t j = 0; j < res.size(); ++j) {
        const double r = rho0.rho[j], p = r1[j], pp = r2[j];
        const double s = r * r + p * p;
        const double s32 = s * std::sqrt(s);
        const double s52 = s32 * s;
        res[j] = params.g * xi[j] * std::sin(grid.nodes[j]) - sg * r * x2[j] / s32 +
                 sg * (p * r * r - 2.0 * p * p * p + 3.0 * r * p * pp) / s52 * x1[j] +
                 sg * (2.0 * r * r * pp - r * r * r - 4.0 * r * p * p - pp * p * p) / s52 * xi[j] - C;
    }
    return res;
}

KernelConstruction build_Q(const SurfaceProfile& rho0) {
    const auto& grid = rho0.grid;
    require_sessile(grid);
    KernelConstruction k;
    k.xi_s = shift_function(rho0);
    const Field dx = derivative(k.xi_s, grid);
    const Field r1 = derivative(rho0.rho, grid);
    const Field r2 = second_derivative(rho0.rho, grid);
    const std::size_t m = grid.size();
    const double a = kPi / 2;
    int near = 0;
    for (std::size_t j = 1; j < m; ++j)
        if (std::abs(grid.nodes[j] - a) < std::abs(grid.nodes[near] - a)) near = static_cast<int>(j);
    k.masked_node = near;
    k.masked.assign(m, false);
    k.masked[near] = true;
    k.Q_values.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (k.masked[j]) continue;
        const double r = rho0.rho[j], p = r1[j], pp = r2[j];
        const double T = (r * r * p + 3.0 * r * p * pp - 2.0 * p * p * p) / (r * (r * r + p * p));
        k.Q_values[j] = 2.0 * dx[j] / k.xi_s[j] - T;
    }
    return k;
}

namespace {

// quadratic through (t[i], f[i]) for the last three entries, value and
// slope at x
void extrapolate(const std::vector<double>& t, const std::vector<double>& f, double x, double& v, double& d) {
    const std::size_t n = t.size();
    const double t0 = t[n - 3], t1 = t[n - 2], t2 = t[n - 1];
    const double f0 = f[n - 3], f1 = f[n - 2], f2 = f[n - 1];
    const double l0 = (x - t1) * (x - t2) / ((t0 - t1) * (t0 - t2));
    const double l1 = (x - t0) * (x - t2) / ((t1 - t0) * (t1 - t2));
    const double l2 = (x - t0) * (x - t1) / ((t2 - t0) * (t2 - t1));
    v = l0 * f0 + l1 * f1 + l2 * f2;
    const double d0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
    const double d1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
    const double d2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
    d = d0 * f0 + d1 * f1 + d2 * f2;
}

// int_0^{t_i} psi(u) / (ts - u)^2 du with the double pole at ts removed analytically
std::vector<double> singular_cumulative(const std::vector<double>& t, const std::vector<double>& psi, double ts) {
    double p0, p1;
    extrapolate(t, psi, ts, p0, p1);
    std::vector<double> out(t.size(), 0.0);
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double u = ts - t[i];
        const double rem = (psi[i] - p0 + p1 * u) / (u * u);
        if (i > 0) acc += 0.5 * (t[i] - t[i - 1]) * (rem + prev);
        prev = rem;
        out[i] = p0 * (1.0 / u - 1.0 / ts) + p1 * std::log(u / ts) + acc;
    }
    return out;
}

}  // namespace

KernelConstruction build_xi56(const SurfaceProfile& rho0, std::array<double, 4> constants) {
    KernelConstruction k = build_Q(rho0);
    k.constants = constants;
    const auto& grid = rho0.grid;
    const std::size_t m = grid.size();
    const double a = kPi / 2;
    const int mid = k.masked_node;
    // smooth part of Q after removing 2/(theta - pi/2)
    Field K(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        if (!k.masked[j]) K[j] = k.Q_values[j] - 2.0 / (grid.nodes[j] - a);
    if (mid > 0 && mid + 1 < static_cast<int>(m)) K[mid] = 0.5 * (K[mid - 1] + K[mid + 1]);

    k.xi5.assign(m, 0.0);
    k.xi6.assign(m, 0.0);
    auto half = [&](const std::vector<int>& ord, double start, double sign, double C, double D) {
        const double ts = std::abs(a - start);
        const std::size_t n = ord.size();
        if (n < 3) throw InvalidGrid("grid too coarse for the kernel construction");
        std::vector<double> t(n), L(n, 0.0), phi(n), E(n), J(n, 0.0), jp(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = std::abs(grid.nodes[ord[i]] - start);
        for (std::size_t i = 1; i < n; ++i)
            L[i] = L[i - 1] + sign * 0.5 * (t[i] - t[i - 1]) * (K[ord[i]] + K[ord[i - 1]]);
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] = ts * ts * std::exp(-L[i]);
            E[i] = std::exp(L[i]) * (ts - t[i]) * (ts - t[i]) / (ts * ts);
        }
        for (std::size_t i = 1; i < n; ++i) J[i] = J[i - 1] + sign * 0.5 * (t[i] - t[i - 1]) * (E[i] + E[i - 1]);
        for (std::size_t i = 0; i < n; ++i) jp[i] = J[i] * phi[i];
        const auto I5 = singular_cumulative(t, phi, ts);
        const auto I6 = singular_cumulative(t, jp, ts);
        for (std::size_t i = 0; i < n; ++i) {
            const int j = ord[i];
            k.xi5[j] = (sign * C * I5[i] + D) * k.xi_s[j];
            k.xi6[j] = sign * I6[i] * k.xi_s[j];
        }
    };
    std::vector<int> left, right;
    for (int j = 0; j < mid; ++j) left.push_back(j);
    for (int j = static_cast<int>(m) - 1; j > mid; --j) right.push_back(j);
    half(left, grid.theta_lo, 1.0, constants[0], constants[2]);
    half(right, grid.theta_hi, -1.0, constants[1], constants[3]);
    // xi5 is continuous through pi/2; xi6 jumps there and is left at 0 on the mask
    k.xi5[mid] = 0.5 * (k.xi5[mid - 1] + k.xi5[mid + 1]);
    k.xi6[mid] = 0.0;
    return k;
}

Field functional_calculus(const SpectralDecomposition& d, const std::function<double(double)>& f, const Field& u) {
    const Eigen::Map<const Eigen::VectorXd> vu(u.data(), static_cast<Eigen::Index>(u.size()));
    if (vu.size() != d.mass.rows()) throw DimensionError("field length does not match decomposition");
    const Eigen::VectorXd coef = d.eigenvectors.transpose() * (d.mass * vu);
    Eigen::VectorXd scaled(coef.size());
    for (Eigen::Index k = 0; k < coef.size(); ++k) scaled[k] = f(d.eigenvalues[k]) * coef[k];
    const Eigen::VectorXd out = d.eigenvectors * scaled;
    return Field(out.data(), out.data() + out.size());
}

Field truncated_power(const SpectralDecomposition& d, int j, double s, const Field& u) {
    const Eigen::Map<const Eigen::VectorXd> vu(u.data(), static_cast<Eigen::Index>(u.size()));
    if (vu.size() != d.mass.rows()) throw DimensionError("field length does not match decomposition");
    const Eigen::Index top = std::min<Eigen::Index>(j, d.eigenvalues.size());
    const bool fractional = s != std::floor(s);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(vu.size());
    for (Eigen::Index k = 0; k < top; ++k) {
        const double lam = d.eigenvalues[k];
        if (fractional && !(lam > 0.0))
            throw DomainError("fractional power of a nonpositive eigenvalue");
        const double c = d.eigenvectors.col(k).dot(d.mass * vu);
        out += std::pow(lam, s) * c * d.eigenvectors.col(k);
    }
    return Field(out.data(), out.data() + out.size());
}

ACoefficients a_coefficients(const SurfaceProfile& rho0, const Field& xi, const Field& xt, const Field& xtt) {
    const auto& g = rho0.grid;
    check_len(xi, g);
    check_len(xt, g);
    check_len(xtt, g);
    const double c = volume_functional(rho0);
    Field a(g.size()), b(g.size()), e(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        a[j] = xi[j] * xi[j];
        b[j] = xi[j] * xt[j];
        e[j] = xt[j] * xt[j] + xtt[j] * xi[j];
    }
    return {-0.5 * integrate(a, g) / c, -integrate(b, g) / c, -integrate(e, g) / c};
}

}  // namespace capdrop
