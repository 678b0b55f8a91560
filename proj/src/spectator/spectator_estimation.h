#ifndef SPECTATOR_SPECTATOR_ESTIMATION_H
#define SPECTATOR_SPECTATOR_ESTIMATION_H

#include <cstdint>

#include "spectator/rng.h"
#include "spectator/su2.h"

namespace spectator {

/// Running sum of +-1 outcomes.
struct MeasurementTally {
    double sum_outcomes = 0;
    int64_t count = 0;

    void add(int outcome) {
        sum_outcomes += outcome;
        count++;
    }
    void clear() { *this = {}; }
    double mean() const;
    /// Mean clamped into [-1, 1]; throws when the tally is empty.
    double clamped_mean() const;
};

struct FisherSpec {
    double value = 0;
    bool includes_M = false;
};

/// One projective measurement of axis.sigma: +1 with probability (1 + <axis.sigma>)/2.
int measure_pauli(const PureState &state, const Vec3 &axis, RngStream &rng);

/// 1 - (prep . generator)^2 for a preparation with Bloch vector `prep_bloch`.
double fisher_pure(const Vec3 &prep_bloch, const Vec3 &gen_axis);

/// Fisher information about the pointing offset from M measurements of both
/// spectators: 2 M ln c (8 pi / c)^2 / (1 - delta_bar^2)^2.
FisherSpec fisher_delta(int64_t M, double c, double delta_bar);

/// Fisher information about the amplitude error from M measurements of both
/// spectators: 2 M (pi / c)^2 / (1 - eps_bar)^2.
FisherSpec fisher_eps(int64_t M, double c, double eps_bar);

/// Fisher information about one field component from `shots` single-shot probes
/// of n decoupling pulses spaced by tau: each shot carries (2 n tau)^2.
FisherSpec fisher_field(int64_t shots, int n, double tau);

/// (1/(2 x0)) (acos m1 - acos m2) / (acos m1 + acos m2); t1 is the +x0 spectator.
double estimate_delta(const MeasurementTally &t1, const MeasurementTally &t2, double x0);

struct EpsEstimate {
    double value = 0;
    /// An average sat on the +-1 boundary, where the arccos inversion is ambiguous.
    bool branch_warning = false;
};

/// 1 - c (acos m1 + acos m2) / (2 pi / (1 - eps_prev)).
EpsEstimate estimate_eps(const MeasurementTally &t1, const MeasurementTally &t2, double c, double eps_prev);

enum class FieldComponent { X = 0, Y = 1, Z = 2 };

/// How one field component is probed: pulses about the component axis, the
/// preparation, the measured Pauli axis and the sign of the inversion.
struct FieldProbe {
    Vec3 pulse_axis;
    PureState prep;
    Vec3 measure_axis;
    double sign;
};

FieldProbe field_probe(FieldComponent component);

/// Spectator evolution over n pi-pulses about the probed axis, each preceded by
/// a free evolution of tau under `field`.
Unitary2 probe_sequence(const Vec3 &field, int n, double tau, FieldComponent component);

/// Noiseless expectation that a probe of `component` returns under `field`.
double probe_expectation(const Vec3 &field, int n, double tau, FieldComponent component);

/// Inversion constant g with B_c = sign * g * asin(<measured>), obtained by
/// forward-simulating a pure single-component probe field.
double field_inversion_gain(int n, double tau, FieldComponent component);

/// Estimate of one field component from a tally of probe outcomes.
double estimate_B_component(const MeasurementTally &tally, int n, double tau, FieldComponent component);

}  // namespace spectator

#endif
