#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spectator/analytic_oracles.h"
#include "spectator/errors.h"
#include "spectator/pulse_control.h"

using namespace spectator;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_unit(std::mt19937_64 &rng) {
    std::normal_distribution<double> n;
    return Vec3{n(rng), n(rng), n(rng)}.normalized();
}

double slope(const std::vector<double> &x, const std::vector<double> &y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double infidelity_vs_x(const Unitary2 &u) {
    return 1 - process_fidelity(rotation(kAxisX, kPi), u);
}

}  // namespace

TEST(PulseControl, ZeroFieldBlockIsIdentity) {
    std::mt19937_64 rng(1);
    Vec3 e = random_unit(rng);
    EXPECT_NEAR(process_fidelity(Unitary2::identity(), dd_block(Vec3{}, PulseBlock::perpendicular(e, 1))), 1, 1e-15);
}

TEST(PulseControl, PerpendicularFieldIsEchoedExactly) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; i++) {
        Vec3 e = random_unit(rng);
        Vec3 b = e.cross(random_unit(rng)) * 0.3;
        Unitary2 u = dd_block(b, PulseBlock::perpendicular(e, 0.7));
        EXPECT_NEAR(process_fidelity(Unitary2::identity(), u), 1, 1e-12);
    }
}

TEST(PulseControl, Xy4DiagonalFieldMatchesClosedForm) {
    for (int i = 1; i <= 50; i++) {
        double btau = 0.01 * i;
        Vec3 b = Vec3{1, 1, 0} * (btau / std::sqrt(2.0));
        double s = std::sin(btau);
        double closed = std::pow(1 - 2 * s * s * s * s, 2);
        double f = process_fidelity(Unitary2::identity(), dd_block(b, PulseBlock::xy4(kAxisX, kAxisY, 1)));
        EXPECT_NEAR(f, closed, 1e-12) << "B tau = " << btau;
    }
}

TEST(PulseControl, PerpAxisExample) {
    Vec3 e = perp_axis_from(kAxisZ, 0, 0);
    EXPECT_NEAR(std::abs(e.y), 1, 1e-15);
    EXPECT_NEAR(e.x, 0, 1e-15);
    EXPECT_NEAR(e.z, 0, 1e-15);
}

TEST(PulseControl, PerpAxisIsOrthogonalToEstimate) {
    std::mt19937_64 seed_rng(3);
    RngStream rng(4);
    for (int i = 0; i < 500; i++) {
        Vec3 est = random_unit(seed_rng) * 0.01;
        Vec3 e = choose_perp_axis(est, rng);
        EXPECT_NEAR(e.dot(est) / est.norm(), 0, 1e-12);
        EXPECT_NEAR(e.norm(), 1, 1e-12);
    }
}

TEST(PulseControl, PerpAxisRejectsZeroEstimate) {
    RngStream rng(1);
    EXPECT_THROW(choose_perp_axis(Vec3{}, rng), SimError);
    EXPECT_THROW(perp_axis_from(kAxisZ, 1, 0), SimError);
}

TEST(PulseControl, PerpAxisAzimuthIsUniformOnEquator) {
    RngStream rng(2024);
    const int n = 10000;
    std::vector<double> u(n);
    for (int i = 0; i < n; i++) {
        Vec3 e = choose_perp_axis(kAxisZ, rng);
        ASSERT_NEAR(e.z, 0, 1e-12);
        double az = std::atan2(e.y, e.x);
        u[i] = (az < 0 ? az + 2 * kPi : az) / (2 * kPi);
    }
    std::sort(u.begin(), u.end());
    double d = 0;
    for (int i = 0; i < n; i++) {
        d = std::max({d, (i + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
    }
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));  // KS critical value, alpha = 0.01
}

TEST(PulseControl, Xy4AxesExample) {
    // ex = y gives ey = z x y = -x.
    Vec3 ey = kAxisZ.cross(kAxisY).normalized();
    EXPECT_NEAR(ey.x, -1, 1e-15);
}

TEST(PulseControl, Xy4AxesAreOrthonormalAndPerpendicular) {
    std::mt19937_64 seed_rng(6);
    RngStream rng(7);
    for (int i = 0; i < 300; i++) {
        Vec3 est = random_unit(seed_rng) * 0.05;
        auto [ex, ey] = choose_xy4_axes(est, rng);
        EXPECT_NEAR(ex.dot(ey), 0, 1e-12);
        EXPECT_NEAR(ex.dot(est), 0, 1e-12);
        EXPECT_NEAR(ey.dot(est), 0, 1e-12);
    }
}

TEST(PulseControl, Xy4PerfectEstimateGivesUnitFidelity) {
    std::mt19937_64 seed_rng(8);
    RngStream rng(9);
    for (int i = 0; i < 50; i++) {
        Vec3 b = random_unit(seed_rng) * 0.2;
        auto [ex, ey] = choose_xy4_axes(b, rng);
        EXPECT_NEAR(process_fidelity(Unitary2::identity(), dd_block(b, PulseBlock::xy4(ex, ey, 1.3))), 1, 1e-12);
    }
}

TEST(PulseControl, Xy4BlockMatchesClosedFormForRandomFields) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> mag(0.01, 0.5);
    for (int i = 0; i < 200; i++) {
        Vec3 b = random_unit(rng) * mag(rng);
        Vec3 ex = random_unit(rng);
        Vec3 ey = ex.cross(random_unit(rng)).normalized();
        double f = process_fidelity(Unitary2::identity(), dd_block(b, PulseBlock::xy4(ex, ey, 0.9)));
        EXPECT_NEAR(f, fidelity_xy4_closed(b, ex, ey, 0.9), 1e-12);
    }
}

TEST(PulseControl, PerfectCalibrationGivesTargetRotation) {
    BeamGateSpec spec;
    spec.delta = spec.delta_bar = 0.013;
    spec.eps = spec.eps_bar = 0.004;
    spec.c = 12;
    EXPECT_NEAR(infidelity_vs_x(beam_gate_plain(spec, BeamSite::Data)), 0, 1e-15);
    EXPECT_NEAR(infidelity_vs_x(beam_gate_sk1(spec)), 0, 1e-14);
}

TEST(PulseControl, PointingOffsetMatchesClosedForm) {
    BeamGateSpec spec;
    spec.delta = 0.02;
    spec.c = 12;
    double f = process_fidelity(rotation(kAxisX, kPi), beam_gate_plain(spec, BeamSite::Data));
    double closed = 0.5 + 0.5 * std::cos(kPi * (0 - 0.02 * 0.02) / 1);
    EXPECT_NEAR(f, closed, 1e-12);
    EXPECT_NEAR(1 - f, 3.947e-7, 1e-10);
}

TEST(PulseControl, PointingOffsetClosedFormOnGrid) {
    for (int i = 0; i < 100; i++) {
        BeamGateSpec spec;
        spec.delta = -0.05 + 0.001 * i;
        spec.delta_bar = 0.03 - 0.0004 * i;
        spec.c = 12;
        double f = process_fidelity(rotation(kAxisX, kPi), beam_gate_plain(spec, BeamSite::Data));
        EXPECT_NEAR(f, fidelity_delta_pointwise(spec.delta, spec.delta_bar), 1e-10);
    }
}

TEST(PulseControl, SpectatorSidesEncodeOffsetLinearly) {
    for (double delta : {-0.03, 0.0, 0.004, 0.02}) {
        BeamGateSpec spec;
        spec.delta = delta;
        spec.delta_bar = 0.0198;
        spec.c = 12;
        double ap = beam_scale(spec, BeamSite::SpectatorPlus);
        double am = beam_scale(spec, BeamSite::SpectatorMinus);
        EXPECT_NEAR((ap - am) / (ap + am), 2 * delta * std::sqrt(std::log(12.0)), 1e-15);
    }
}

TEST(PulseControl, ExactProfileIsGaussianAtSpectators) {
    BeamGateSpec spec;
    spec.c = 12;
    EXPECT_NEAR(beam_scale(spec, BeamSite::SpectatorPlus, SpectatorProfile::ExactGaussian), 1.0 / 12, 1e-15);
    spec.delta = 0.01;
    double x0 = spec.x0();
    EXPECT_NEAR(beam_scale(spec, BeamSite::SpectatorMinus, SpectatorProfile::ExactGaussian),
                std::exp(-(x0 + 0.01) * (x0 + 0.01)), 1e-15);
}

TEST(PulseControl, Sk1MatchesClosedForm) {
    BeamGateSpec spec;
    spec.eps = 0.01;
    double a = kPi * (spec.eps_bar - spec.eps) / (1 - spec.eps_bar);
    double f = process_fidelity(rotation(kAxisX, kPi), beam_gate_sk1(spec));
    EXPECT_NEAR(f, fidelity_sk1_pointwise(a), 1e-10);
}

TEST(PulseControl, Sk1ClosedFormOnGrid) {
    for (int i = 0; i < 100; i++) {
        BeamGateSpec spec;
        spec.eps = -0.05 + 0.001 * i;
        spec.eps_bar = 0.002 * std::sin(i);
        double a = kPi * (spec.eps_bar - spec.eps) / (1 - spec.eps_bar);
        double f = process_fidelity(rotation(kAxisX, kPi), beam_gate_sk1(spec));
        EXPECT_NEAR(f, fidelity_sk1_pointwise(a), 1e-10) << "eps = " << spec.eps;
        double fp = process_fidelity(rotation(kAxisX, kPi), beam_gate_plain(spec, BeamSite::Data));
        EXPECT_NEAR(fp, fidelity_plain_pointwise(a), 1e-10);
    }
}

TEST(PulseControl, Sk1CancelsFirstOrderAmplitudeError) {
    std::vector<double> eps, sk1, plain;
    for (int i = 0; i <= 10; i++) {
        double e = std::pow(10.0, -3 + 0.1 * i);
        BeamGateSpec spec;
        spec.eps = e;
        eps.push_back(e);
        sk1.push_back(infidelity_vs_x(beam_gate_sk1(spec)));
        plain.push_back(infidelity_vs_x(beam_gate_plain(spec, BeamSite::Data)));
    }
    EXPECT_NEAR(slope(eps, sk1), 4.0, 0.1);
    EXPECT_NEAR(slope(eps, plain), 2.0, 0.1);
}

TEST(PulseControl, Sk1RejectsTargetsBeyondFourPi) {
    BeamGateSpec spec;
    spec.target_angle = 5 * kPi;
    EXPECT_THROW(beam_gate_sk1(spec), SimError);
}

TEST(PulseControl, RunawayAngleIsReported) {
    EXPECT_THROW(checked_angle(kPi, 25), SimError);
    try {
        checked_angle(kPi, 1e9);
    } catch (const SimError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::RunawayParameter);
    }
}

TEST(PulseControl, InvalidBeamSpecIsRejected) {
    BeamGateSpec spec;
    spec.c = 1;
    EXPECT_THROW(beam_scale(spec, BeamSite::Data), SimError);
    spec.c = 2;
    spec.delta_bar = 1;
    EXPECT_THROW(beam_scale(spec, BeamSite::Data), SimError);
}
