#include "spectator/su2.h"

#include <algorithm>
#include <cmath>

#include "spectator/errors.h"

namespace spectator {

double Vec3::norm() const {
    return std::sqrt(dot(*this));
}

Vec3 Vec3::normalized() const {
    double n = norm();
    if (!(n > 0) || !std::isfinite(n)) {
        throw SimError(ErrorKind::InvalidAxis, "cannot normalize a zero or non-finite vector");
    }
    return *this / n;
}

Unitary2 Unitary2::operator*(const Unitary2 &o) const {
    const auto &a = m_;
    const auto &b = o.m_;
    return {
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    };
}

Unitary2 Unitary2::operator*(cplx s) const {
    return {m_[0] * s, m_[1] * s, m_[2] * s, m_[3] * s};
}

Unitary2 Unitary2::adjoint() const {
    return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

Unitary2 Unitary2::pow(unsigned k) const {
    Unitary2 result;
    Unitary2 base = *this;
    while (k) {
        if (k & 1) {
            result = result * base;
        }
        k >>= 1;
        if (k) {
            base = base * base;
        }
    }
    return result;
}

double Unitary2::unitarity_error() const {
    Unitary2 p = adjoint() * *this;
    double err = 0;
    for (int r = 0; r < 2; r++) {
        for (int c = 0; c < 2; c++) {
            cplx expected = r == c ? cplx{1} : cplx{0};
            err = std::max(err, std::abs(p(r, c) - expected));
        }
    }
    return err;
}

PureState PureState::plus() {
    double h = 1 / std::sqrt(2.0);
    return {cplx{h}, cplx{h}};
}

double PureState::norm() const {
    return std::sqrt(std::norm(a0) + std::norm(a1));
}

PureState operator*(const Unitary2 &u, const PureState &s) {
    return {u(0, 0) * s.a0 + u(0, 1) * s.a1, u(1, 0) * s.a0 + u(1, 1) * s.a1};
}

Unitary2 rotation(const Vec3 &axis, double angle) {
    double n = axis.norm();
    if (!(std::abs(n - 1) <= 1e-9)) {
        throw SimError(ErrorKind::InvalidAxis, "rotation axis must be unit norm (|n| = " + std::to_string(n) + ")");
    }
    double c = std::cos(angle / 2);
    double s = std::sin(angle / 2);
    // c I - i s (nx X + ny Y + nz Z)
    return {
        cplx{c, -s * axis.z},
        cplx{-s * axis.y, -s * axis.x},
        cplx{s * axis.y, -s * axis.x},
        cplx{c, s * axis.z},
    };
}

Unitary2 field_evolution(const Vec3 &field, double t) {
    double b = field.norm();
    if (b == 0 || t == 0) {
        return Unitary2::identity();
    }
    return rotation(field / b, 2 * b * t);
}

double process_fidelity(const Unitary2 &ideal, const Unitary2 &actual) {
    const auto &a = ideal.entries();
    const auto &b = actual.entries();
    cplx tr = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2] + std::conj(a[3]) * b[3];
    return std::min(1.0, std::norm(tr) / 4);
}

Vec3 bloch_vector(const PureState &s) {
    cplx c = std::conj(s.a0) * s.a1;
    return {2 * c.real(), 2 * c.imag(), std::norm(s.a0) - std::norm(s.a1)};
}

double expect(const PureState &state, const Vec3 &pauli_axis) {
    return bloch_vector(state).dot(pauli_axis);
}

}  // namespace spectator
