#include "spectator/pulse_control.h"

#include <cmath>
#include <string>

#include "spectator/errors.h"

namespace spectator {

namespace {
constexpr double kPi = std::numbers::pi;
}

Unitary2 dd_block(const Vec3 &field, const PulseBlock &block) {
    Unitary2 free = field_evolution(field, block.spacing_tau);
    Unitary2 u;
    for (const Vec3 &axis : block.axes) {
        u = rotation(axis, block.pulse_angle) * free * u;
    }
    return u;
}

Vec3 perp_axis_from(const Vec3 &estimate, double u, double phi) {
    double s = std::sqrt(std::max(0.0, 1 - u * u));
    Vec3 r{s * std::cos(phi), s * std::sin(phi), u};
    Vec3 e = estimate.cross(r);
    double n = e.norm();
    if (!(n >= 1e-12 * std::max(1.0, estimate.norm()))) {
        throw SimError(ErrorKind::InvalidAxis, "random direction parallel to the field estimate");
    }
    return e / n;
}

Vec3 choose_perp_axis(const Vec3 &estimate, RngStream &rng) {
    if (!(estimate.norm() > 0)) {
        throw SimError(ErrorKind::InvalidAxis, "choose_perp_axis: field estimate must be nonzero");
    }
    for (int attempt = 0; attempt < 1000; attempt++) {
        double u = rng.uniform(-1, 1);
        double phi = rng.uniform(0, 2 * kPi);
        double s = std::sqrt(std::max(0.0, 1 - u * u));
        Vec3 r{s * std::cos(phi), s * std::sin(phi), u};
        Vec3 e = estimate.cross(r);
        double n = e.norm();
        if (n >= 1e-12 * estimate.norm()) {
            return e / n;
        }
    }
    throw SimError(ErrorKind::InvalidAxis, "choose_perp_axis: could not draw a non-degenerate direction");
}

std::pair<Vec3, Vec3> choose_xy4_axes(const Vec3 &estimate, RngStream &rng) {
    Vec3 ex = choose_perp_axis(estimate, rng);
    Vec3 ey = estimate.cross(ex).normalized();
    return {ex, ey};
}

void BeamGateSpec::validate() const {
    if (!(c > 1)) {
        throw SimError(ErrorKind::InvalidArgument, "beam gate: c = exp(x0^2) must exceed 1");
    }
    if (!(std::abs(delta_bar) < 1)) {
        throw SimError(ErrorKind::Domain, "beam gate: |delta_bar| must be < 1");
    }
    if (!(eps_bar < 1)) {
        throw SimError(ErrorKind::Domain, "beam gate: eps_bar must be < 1");
    }
}

double BeamGateSpec::x0() const {
    return std::sqrt(std::log(c));
}

double beam_scale(const BeamGateSpec &spec, BeamSite site, SpectatorProfile profile) {
    spec.validate();
    double calibration = 1 / ((1 - spec.eps_bar) * (1 - spec.delta_bar * spec.delta_bar));
    double amplitude = 1 - spec.eps;
    switch (site) {
        case BeamSite::Data:
            return amplitude * (1 - spec.delta * spec.delta) * calibration;
        case BeamSite::SpectatorPlus:
        case BeamSite::SpectatorMinus: {
            double side = site == BeamSite::SpectatorPlus ? 1.0 : -1.0;
            if (profile == SpectatorProfile::ExactGaussian) {
                double d = side * spec.x0() - spec.delta;
                return amplitude * std::exp(-d * d) * calibration;
            }
            return amplitude * (1 + side * 2 * spec.delta * std::sqrt(std::log(spec.c))) / spec.c * calibration;
        }
    }
    return 0;
}

double checked_angle(double target, double scale) {
    double angle = target * scale;
    if (!std::isfinite(angle) || std::abs(angle) > 20 * kPi) {
        throw SimError(ErrorKind::RunawayParameter,
                       "gate angle " + std::to_string(angle) + " left the model's validity region");
    }
    return angle;
}

Unitary2 beam_gate_plain(const BeamGateSpec &spec, BeamSite site, SpectatorProfile profile) {
    return rotation(kAxisX, checked_angle(spec.target_angle, beam_scale(spec, site, profile)));
}

Unitary2 beam_gate_sk1(const BeamGateSpec &spec) {
    double ratio = spec.target_angle / (4 * kPi);
    if (!(std::abs(ratio) <= 1)) {
        throw SimError(ErrorKind::InvalidTarget, "SK1 target angle must satisfy |theta| <= 4 pi");
    }
    double s = beam_scale(spec, BeamSite::Data);
    double phi1 = std::acos(-ratio);
    Vec3 plus{std::cos(phi1), std::sin(phi1), 0};
    Vec3 minus{std::cos(phi1), -std::sin(phi1), 0};
    double full = checked_angle(2 * kPi, s);
    return rotation(minus, full) * rotation(plus, full) * rotation(kAxisX, checked_angle(spec.target_angle, s));
}

}  // namespace spectator
