#include "spectator/spectator_estimation.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectator/errors.h"

namespace spectator {

namespace {

constexpr double kPi = std::numbers::pi;

void require_counts(const MeasurementTally &t) {
    if (t.count <= 0) {
        throw SimError(ErrorKind::InvalidArgument, "estimator needs a nonempty measurement tally");
    }
}

}  // namespace

double MeasurementTally::mean() const {
    require_counts(*this);
    return sum_outcomes / static_cast<double>(count);
}

double MeasurementTally::clamped_mean() const {
    return std::clamp(mean(), -1.0, 1.0);
}

int measure_pauli(const PureState &state, const Vec3 &axis, RngStream &rng) {
    double p_plus = (1 + expect(state, axis)) / 2;
    return rng.bernoulli(p_plus) ? +1 : -1;
}

double fisher_pure(const Vec3 &prep_bloch, const Vec3 &gen_axis) {
    double e = prep_bloch.dot(gen_axis);
    return 1 - e * e;
}

FisherSpec fisher_delta(int64_t M, double c, double delta_bar) {
    if (M < 1 || !(c > 1)) {
        throw SimError(ErrorKind::Domain, "fisher_delta: need M >= 1 and c > 1");
    }
    if (!(std::abs(delta_bar) < 1)) {
        throw SimError(ErrorKind::Domain, "fisher_delta: |delta_bar| must be < 1");
    }
    double g = 8 * kPi / c / (1 - delta_bar * delta_bar);
    return {2 * static_cast<double>(M) * std::log(c) * g * g, true};
}

FisherSpec fisher_eps(int64_t M, double c, double eps_bar) {
    if (M < 1 || !(c > 1)) {
        throw SimError(ErrorKind::Domain, "fisher_eps: need M >= 1 and c > 1");
    }
    if (!(eps_bar < 0.99)) {
        throw SimError(ErrorKind::Domain, "fisher_eps: eps_bar must be < 0.99");
    }
    double g = kPi / c / (1 - eps_bar);
    return {2 * static_cast<double>(M) * g * g, true};
}

FisherSpec fisher_field(int64_t shots, int n, double tau) {
    if (shots < 1 || n < 1 || !(tau > 0)) {
        throw SimError(ErrorKind::Domain, "fisher_field: need shots >= 1, n >= 1, tau > 0");
    }
    double g = 2 * n * tau;
    return {static_cast<double>(shots) * g * g, true};
}

double estimate_delta(const MeasurementTally &t1, const MeasurementTally &t2, double x0) {
    double a1 = std::acos(t1.clamped_mean());
    double a2 = std::acos(t2.clamped_mean());
    double denom = a1 + a2;
    if (denom < 1e-12) {
        throw SimError(ErrorKind::DegenerateMeasurement, "estimate_delta: both spectator angles vanish");
    }
    return (a1 - a2) / denom / (2 * x0);
}

EpsEstimate estimate_eps(const MeasurementTally &t1, const MeasurementTally &t2, double c, double eps_prev) {
    double m1 = t1.clamped_mean();
    double m2 = t2.clamped_mean();
    double angles = std::acos(m1) + std::acos(m2);
    EpsEstimate out;
    out.value = 1 - c * angles * (1 - eps_prev) / (2 * kPi);
    out.branch_warning = std::abs(m1) >= 1 || std::abs(m2) >= 1;
    return out;
}

FieldProbe field_probe(FieldComponent component) {
    switch (component) {
        case FieldComponent::X:
            return {kAxisX, PureState::zero(), kAxisY, -1};
        case FieldComponent::Y:
            return {kAxisY, PureState::zero(), kAxisX, +1};
        case FieldComponent::Z:
            return {kAxisZ, PureState::plus(), kAxisY, +1};
    }
    throw SimError(ErrorKind::InvalidArgument, "unknown field component");
}

Unitary2 probe_sequence(const Vec3 &field, int n, double tau, FieldComponent component) {
    FieldProbe probe = field_probe(component);
    Unitary2 step = rotation(probe.pulse_axis, kPi) * field_evolution(field, tau);
    return step.pow(static_cast<unsigned>(n));
}

double probe_expectation(const Vec3 &field, int n, double tau, FieldComponent component) {
    FieldProbe probe = field_probe(component);
    return expect(probe_sequence(field, n, tau, component) * probe.prep, probe.measure_axis);
}

double field_inversion_gain(int n, double tau, FieldComponent component) {
    if (n < 2 || n % 2 != 0 || !(tau > 0)) {
        throw SimError(ErrorKind::InvalidArgument, "field probe needs an even pulse count >= 2 and tau > 0");
    }
    // Probe field sized so the accumulated phase stays well inside asin's range.
    double probe_field = 0.1 / (2 * n * tau);
    Vec3 field;
    switch (component) {
        case FieldComponent::X:
            field = {probe_field, 0, 0};
            break;
        case FieldComponent::Y:
            field = {0, probe_field, 0};
            break;
        case FieldComponent::Z:
            field = {0, 0, probe_field};
            break;
    }
    FieldProbe probe = field_probe(component);
    double response = probe.sign * std::asin(probe_expectation(field, n, tau, component));
    return probe_field / response;
}

double estimate_B_component(const MeasurementTally &tally, int n, double tau, FieldComponent component) {
    double m = tally.mean();
    if (std::abs(m) > 1 + 1e-9) {
        throw SimError(ErrorKind::TallyCorruption, "field tally average outside [-1, 1]");
    }
    m = std::clamp(m, -1.0, 1.0);
    return field_probe(component).sign * field_inversion_gain(n, tau, component) * std::asin(m);
}

}  // namespace spectator
