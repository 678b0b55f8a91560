#include "spectator/analytic_oracles.h"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectator/errors.h"
#include "spectator/pulse_control.h"

namespace spectator {

namespace {

constexpr double kPi = std::numbers::pi;

struct Gaussian2 {
    double mean_u, mean_v, var_u, var_v, cov;
};

double fourth_moment(double m, double v) {
    return m * m * m * m + 6 * m * m * v + 3 * v * v;
}

/// E[U^2 V^2] for jointly Gaussian U, V.
double cross_moment(const Gaussian2 &g) {
    return (g.mean_u * g.mean_u + g.var_u) * (g.mean_v * g.mean_v + g.var_v) + 2 * g.cov * g.cov +
           4 * g.mean_u * g.mean_v * g.cov;
}

Gaussian2 project(const Vec3 &mean, const Vec3 &var, const Vec3 &a, const Vec3 &b) {
    return {
        a.dot(mean),
        b.dot(mean),
        a.x * a.x * var.x + a.y * a.y * var.y + a.z * a.z * var.z,
        b.x * b.x * var.x + b.y * b.y * var.y + b.z * b.z * var.z,
        a.x * b.x * var.x + a.y * b.y * var.y + a.z * b.z * var.z,
    };
}

/// Any orthonormal pair spanning the plane orthogonal to unit vector n.
std::pair<Vec3, Vec3> plane_basis(const Vec3 &n) {
    Vec3 helper = std::abs(n.x) < 0.9 ? kAxisX : kAxisY;
    Vec3 p = n.cross(helper).normalized();
    Vec3 q = n.cross(p).normalized();
    return {p, q};
}

double second_derivative(const std::function<double(double)> &f, double x, double h) {
    auto d = [&](double s) { return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

double third_derivative(const std::function<double(double)> &f, double x, double h) {
    auto d = [&](double s) { return (f(x + 2 * s) - 2 * f(x + s) + 2 * f(x - s) - f(x - 2 * s)) / (2 * s * s * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

}  // namespace

double fidelity_delta_pointwise(double delta, double delta_bar) {
    double db2 = delta_bar * delta_bar;
    return 0.5 + 0.5 * std::cos(kPi * (db2 - delta * delta) / (1 - db2));
}

double fidelity_sk1_pointwise(double a) {
    double c2 = std::cos(a) * std::cos(a);
    double w = 7.0 / 8 + c2 / 8;
    double half_c = std::cos(a / 2);
    double half_s = std::sin(a / 2);
    double s2a = std::sin(2 * a);
    return w * w * half_c * half_c + 0.25 * s2a * std::sin(a) * w + s2a * s2a * half_s * half_s / 16;
}

double fidelity_plain_pointwise(double a) {
    double c = std::cos(a / 2);
    return c * c;
}

double fidelity_xy4_closed(const Vec3 &field, const Vec3 &ex, const Vec3 &ey, double tau) {
    double b = field.norm();
    if (b == 0) {
        return 1;
    }
    double px = ex.dot(field);
    double py = ey.dot(field);
    double s = std::sin(b * tau) / b;
    double inner = 1 - 8 * px * px * py * py * s * s * s * s;
    return inner * inner;
}

double avg_F_nospec_delta(int64_t N, double delta0, double ddelta, double delta_bar) {
    using C = std::complex<double>;
    double a = 1 - delta_bar * delta_bar;
    C denom{a, 2 * static_cast<double>(N) * ddelta * ddelta * kPi};
    C root = std::sqrt(C{a} / denom);
    C phase = std::exp(C{0, -delta0 * delta0 * kPi} / denom + C{0, delta_bar * delta_bar * kPi / a});
    return 0.5 + 0.5 * (root * phase).real();
}

double sk1_harmonic(int q, int64_t N, double eps0, double deps, double eps_bar) {
    double one_minus = 1 - eps_bar;
    double damping = std::exp(-static_cast<double>(q * q) * static_cast<double>(N) * kPi * kPi * deps * deps /
                              (2 * one_minus * one_minus));
    return damping * std::cos(q * kPi * (eps_bar - eps0) / one_minus);
}

double avg_F_nospec_eps(int64_t N, double eps0, double deps, double eps_bar) {
    auto C = [&](int q) { return sk1_harmonic(q, N, eps0, deps, eps_bar); };
    return 9.0 / 2048 * C(5) - 15.0 / 1024 * C(4) - 155.0 / 2048 * C(3) + 15.0 / 256 * C(2) + 585.0 / 1024 * C(1) +
           467.0 / 1024;
}

MomentSet field_moments(const Vec3 &mean, const Vec3 &var, const Vec3 &axis, const Vec3 &estimate) {
    MomentSet m;
    Gaussian2 par = project(mean, var, axis, axis);
    m.par2 = par.mean_u * par.mean_u + par.var_u;
    m.par4 = fourth_moment(par.mean_u, par.var_u);
    const Vec3 basis[3] = {kAxisX, kAxisY, kAxisZ};
    for (const Vec3 &e : basis) {
        m.par2_b2 += cross_moment(project(mean, var, axis, e));
    }
    auto [p, q] = plane_basis(estimate.normalized());
    Gaussian2 perp = project(mean, var, p, q);
    m.perp4 = fourth_moment(perp.mean_u, perp.var_u) + 2 * cross_moment(perp) + fourth_moment(perp.mean_v, perp.var_v);
    return m;
}

OracleValue avg_F_nospec_bfield(int64_t N, DdScheme scheme, const Vec3 &b0_data, const Vec3 &steps, double tau,
                                const Vec3 &estimate) {
    double n = static_cast<double>(N);
    Vec3 var{n * steps.x * steps.x, n * steps.y * steps.y, n * steps.z * steps.z};
    OracleValue out;
    double rms = std::sqrt(b0_data.dot(b0_data) + var.x + var.y + var.z);
    out.out_of_regime = rms * tau > 0.2;
    double t2 = tau * tau;
    double t4 = t2 * t2;

    if (scheme == DdScheme::Xy4) {
        MomentSet m = field_moments(b0_data, var, kAxisX, estimate);
        out.value = 1 - 2 * m.perp4 * t4;
        return out;
    }

    // Average over the random pulse axis: u by Gauss-Legendre, phi by the
    // periodic trapezoid rule.
    constexpr int kPhiNodes = 32;
    auto over_phi = [&](double u) {
        double acc = 0;
        for (int j = 0; j < kPhiNodes; j++) {
            double phi = 2 * kPi * (j + 0.5) / kPhiNodes;
            Vec3 axis = perp_axis_from(estimate, u, phi);
            MomentSet m = field_moments(b0_data, var, axis, estimate);
            acc += 1 - 16 * m.par2 * t2 + 16.0 / 3 * m.par2_b2 * t4 + 16 * m.par4 * t4;
        }
        return acc / kPhiNodes;
    };
    out.value = boost::math::quadrature::gauss<double, 32>::integrate(over_phi, -1.0, 1.0) / 2;
    return out;
}

TaylorSides taylor_condition_sides(const std::function<double(double)> &F, double phi) {
    double h = 1e-4 * std::max(std::abs(phi), 1e-3);
    double curvature = second_derivative(F, 0, h);
    if (std::abs(curvature) < 1e-12) {
        throw SimError(ErrorKind::DegenerateCurvature, "taylor_condition_sides: F''(0) vanishes");
    }
    // F''' needs a much wider stencil than F'': at h the rounding error grows as 1/h^3.
    // The width follows the curvature scale, where F varies by O(1).
    double h3 = 0.05 * std::min(std::max(std::abs(phi), 1e-3), 1 / std::sqrt(std::abs(curvature)));
    auto integrand = [&](double x) { return (x - phi) * (x - phi) * third_derivative(F, x, h3); };
    double integral = 0;
    if (phi != 0) {
        integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, phi, 12, 1e-12);
    }
    return {phi * phi, std::abs(integral / curvature)};
}

double remainder_linear(int64_t N, double phi_s) {
    if (N < 1) {
        throw SimError(ErrorKind::Domain, "remainder_linear: N must be >= 1");
    }
    double n = static_cast<double>(N);
    return std::abs(phi_s * phi_s + (std::cos(2 * n * phi_s) - 1) / (2 * n * n));
}

}  // namespace spectator
