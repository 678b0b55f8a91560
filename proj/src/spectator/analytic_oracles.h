#ifndef SPECTATOR_ANALYTIC_ORACLES_H
#define SPECTATOR_ANALYTIC_ORACLES_H

#include <complex>
#include <cstdint>
#include <functional>

#include "spectator/su2.h"

namespace spectator {

/// A value together with a flag raised when inputs fall outside the regime the
/// expression was derived for.
struct OracleValue {
    double value = 0;
    bool out_of_regime = false;
};

// ---- pointwise fidelities -------------------------------------------------

/// X gate with pointing offset `delta` calibrated as `delta_bar`:
/// 1/2 + 1/2 cos(pi (delta_bar^2 - delta^2) / (1 - delta_bar^2)).
double fidelity_delta_pointwise(double delta, double delta_bar);

/// SK1-protected X gate at effective argument a = pi (eps_bar - eps) / (1 - eps_bar).
double fidelity_sk1_pointwise(double a);

/// Plain X gate at the same argument: cos^2(a / 2).
double fidelity_plain_pointwise(double a);

/// Tailored XY-4 block: |1 - 8 (ex.B)^2 (ey.B)^2 sin^4(|B| tau) / |B|^4|^2.
double fidelity_xy4_closed(const Vec3 &field, const Vec3 &ex, const Vec3 &ey, double tau);

// ---- fidelities averaged over the random walk, no recalibration ----------

/// Pointing offset after N steps: Gaussian average of fidelity_delta_pointwise,
/// with the real part taken of the full complex product.
double avg_F_nospec_delta(int64_t N, double delta0, double ddelta, double delta_bar);

/// C_q = Re{exp(-q^2 N pi^2 deps^2 / (2 (1 - eps_bar)^2)) exp(-i q pi (eps_bar - eps0)/(1 - eps_bar))}.
double sk1_harmonic(int q, int64_t N, double eps0, double deps, double eps_bar);

/// SK1 amplitude error after N steps: five harmonics plus constant.
double avg_F_nospec_eps(int64_t N, double eps0, double deps, double eps_bar);

/// Gaussian moments of a field component projected on one axis.
struct MomentSet {
    double par2 = 0;       // <B_par^2>
    double par4 = 0;       // <B_par^4>
    double par2_b2 = 0;    // <B_par^2 |B|^2>
    double perp4 = 0;      // <|B - n (n.B)|^4> with n the unit estimate direction
};

/// Moments for independent components B_i ~ N(mean_i, var_i). `axis` is the pulse
/// axis for the parallel terms; `estimate` sets the plane for the perpendicular term.
MomentSet field_moments(const Vec3 &mean, const Vec3 &var, const Vec3 &axis, const Vec3 &estimate);

enum class DdScheme { Perpendicular, Xy4 };

/// Block fidelity after N walk steps with the control frozen at `estimate`.
/// Perpendicular: series in <B_par^2>, <B_par^2 B^2>, <B_par^4>, averaged over the
/// random choice of pulse axis by 32x32 quadrature. XY-4: 1 - 2 <|B_perp|^4> tau^4.
OracleValue avg_F_nospec_bfield(int64_t N, DdScheme scheme, const Vec3 &b0_data, const Vec3 &steps, double tau,
                                const Vec3 &estimate);

// ---- Taylor-condition machinery ------------------------------------------

struct TaylorSides {
    double lhs = 0;  // phi^2
    double rhs = 0;  // |(1/F''(0)) int_0^phi (x - phi)^2 F'''(x) dx|
};

/// Both sides of the sufficient condition, with derivatives by Richardson-extrapolated
/// central differences and adaptive Gauss-Kronrod quadrature.
TaylorSides taylor_condition_sides(const std::function<double(double)> &F, double phi);

/// |phi_s^2 + (cos(2 N phi_s) - 1) / (2 N^2)|: the remainder side for F = cos^2(N phi).
double remainder_linear(int64_t N, double phi_s);

}  // namespace spectator

#endif
