#ifndef SPECTATOR_PULSE_CONTROL_H
#define SPECTATOR_PULSE_CONTROL_H

#include <numbers>
#include <utility>
#include <vector>

#include "spectator/rng.h"
#include "spectator/su2.h"

namespace spectator {

/// Instantaneous pulses, each preceded by a free evolution of `spacing_tau`.
struct PulseBlock {
    std::vector<Vec3> axes;
    double spacing_tau = 1;
    double pulse_angle = std::numbers::pi;

    static PulseBlock perpendicular(const Vec3 &axis, double tau) { return {{axis, axis, axis, axis}, tau}; }
    static PulseBlock xy4(const Vec3 &ex, const Vec3 &ey, double tau) { return {{ex, ey, ex, ey}, tau}; }
};

/// Product over the block of rotation(axis_i, pulse_angle) * field_evolution(B, tau),
/// the first listed pulse acting first.
Unitary2 dd_block(const Vec3 &field, const PulseBlock &block);

/// Unit axis orthogonal to `estimate`: normalize(estimate x r), with r drawn from
/// u ~ U[-1,1], phi ~ U[0, 2pi). Degenerate draws are resampled.
Vec3 choose_perp_axis(const Vec3 &estimate, RngStream &rng);

/// Same construction with the random direction supplied explicitly.
Vec3 perp_axis_from(const Vec3 &estimate, double u, double phi);

/// (ex, ey): ex from choose_perp_axis, ey = normalize(estimate x ex).
std::pair<Vec3, Vec3> choose_xy4_axes(const Vec3 &estimate, RngStream &rng);

enum class BeamSite { Data, SpectatorPlus, SpectatorMinus };
enum class SpectatorProfile { Linear, ExactGaussian };

/// Laser-beam gate parameters: true pointing offset / amplitude error and the
/// calibration estimates currently folded into the Rabi frequency.
struct BeamGateSpec {
    double delta = 0;
    double eps = 0;
    double delta_bar = 0;
    double eps_bar = 0;
    double c = 2;  // exp(x0^2), x0 the spectator distance
    double target_angle = std::numbers::pi;

    void validate() const;
    double x0() const;
};

/// Ratio of the applied rotation angle to the target angle at `site`.
double beam_scale(const BeamGateSpec &spec, BeamSite site, SpectatorProfile profile = SpectatorProfile::Linear);

/// Plain X rotation under pointing and amplitude miscalibration.
Unitary2 beam_gate_plain(const BeamGateSpec &spec, BeamSite site,
                         SpectatorProfile profile = SpectatorProfile::Linear);

/// SK1 composite X gate for the data qubit: base rotation, then 2pi rotations about
/// in-plane axes at azimuth +phi1 and -phi1, phi1 = arccos(-theta/(4pi)). Every
/// constituent angle carries the same amplitude scale.
Unitary2 beam_gate_sk1(const BeamGateSpec &spec);

/// Rotation angle actually applied; throws RunawayParameter beyond 20 pi.
double checked_angle(double target, double scale);

}  // namespace spectator

#endif
