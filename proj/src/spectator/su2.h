#ifndef SPECTATOR_SU2_H
#define SPECTATOR_SU2_H

#include <array>
#include <complex>

namespace spectator {

using cplx = std::complex<double>;

struct Vec3 {
    double x = 0;
    double y = 0;
    double z = 0;

    constexpr Vec3() = default;
    constexpr Vec3(double x, double y, double z) : x(x), y(y), z(z) {}

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr bool operator==(const Vec3 &) const = default;

    constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3 &o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    /// Throws InvalidAxis when the vector is (numerically) zero.
    Vec3 normalized() const;
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

inline constexpr Vec3 kAxisX{1, 0, 0};
inline constexpr Vec3 kAxisY{0, 1, 0};
inline constexpr Vec3 kAxisZ{0, 0, 1};

/// 2x2 complex matrix, row-major. Every value produced by this module is unitary.
class Unitary2 {
   public:
    constexpr Unitary2() : m_{cplx{1}, cplx{0}, cplx{0}, cplx{1}} {}
    constexpr Unitary2(cplx a, cplx b, cplx c, cplx d) : m_{a, b, c, d} {}

    static constexpr Unitary2 identity() { return Unitary2{}; }

    constexpr const cplx &operator()(int row, int col) const { return m_[2 * row + col]; }
    constexpr const std::array<cplx, 4> &entries() const { return m_; }

    Unitary2 operator*(const Unitary2 &o) const;
    Unitary2 operator*(cplx s) const;
    Unitary2 adjoint() const;
    cplx trace() const { return m_[0] + m_[3]; }
    cplx det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    /// U^k by repeated squaring.
    Unitary2 pow(unsigned k) const;

    /// Largest elementwise deviation of U^dagger U from the identity.
    double unitarity_error() const;

   private:
    std::array<cplx, 4> m_;
};

struct PureState {
    cplx a0{1};
    cplx a1{0};

    static PureState zero() { return {cplx{1}, cplx{0}}; }
    static PureState plus();
    double norm() const;
};

PureState operator*(const Unitary2 &u, const PureState &s);

/// cos(angle/2) I - i sin(angle/2) (axis . sigma). Axis must be unit norm to 1e-9.
Unitary2 rotation(const Vec3 &axis, double angle);

/// exp(-i t B.sigma): a rotation by 2|B|t about B/|B|.
Unitary2 field_evolution(const Vec3 &field, double t);

/// |Tr(ideal^dagger actual)|^2 / 4.
double process_fidelity(const Unitary2 &ideal, const Unitary2 &actual);

/// <psi| axis.sigma |psi>.
double expect(const PureState &state, const Vec3 &pauli_axis);

/// Bloch vector of a pure state.
Vec3 bloch_vector(const PureState &state);

}  // namespace spectator

#endif
