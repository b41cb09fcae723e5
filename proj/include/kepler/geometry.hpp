#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "kepler/interval.hpp"

namespace kepler {

using Vec3 = Eigen::Vector3d;
using IVec3 = Eigen::Matrix<Interval, 3, 1>;

/// Lift a floating point to an interval point of the given half-width
/// per coordinate.
inline IVec3 inflate(const Vec3& p, double halfwidth) {
    IVec3 out;
    for (int k = 0; k < 3; ++k)
        out[k] = Interval(detail::sub_down(p[k], halfwidth), detail::add_up(p[k], halfwidth));
    return out;
}

inline IVec3 exact(const Vec3& p) {
    return IVec3(Interval(p.x()), Interval(p.y()), Interval(p.z()));
}

inline Interval iv_dot(const IVec3& u, const IVec3& v) {
    return u.x() * v.x() + u.y() * v.y() + u.z() * v.z();
}

inline IVec3 iv_cross(const IVec3& u, const IVec3& v) {
    return IVec3(u.y() * v.z() - u.z() * v.y(),
                 u.z() * v.x() - u.x() * v.z(),
                 u.x() * v.y() - u.y() * v.x());
}

/// Signed volume of the tetrahedron (p0, p1, p2, p3): det/6 with rows
/// p1-p0, p2-p0, p3-p0.
inline Interval signed_tetra_volume(const IVec3& p0, const IVec3& p1,
                                    const IVec3& p2, const IVec3& p3) {
    IVec3 u = p1 - p0, v = p2 - p0, w = p3 - p0;
    return iv_dot(u, iv_cross(v, w)) / Interval(6.0);
}

/// Unsigned tetrahedron volume |det|/6; degenerate inputs contain 0.
inline Interval tetra_volume(const IVec3& p0, const IVec3& p1,
                             const IVec3& p2, const IVec3& p3) {
    return abs(signed_tetra_volume(p0, p1, p2, p3));
}

inline Interval tetra_volume(const Vec3& p0, const Vec3& p1,
                             const Vec3& p2, const Vec3& p3) {
    return tetra_volume(exact(p0), exact(p1), exact(p2), exact(p3));
}

namespace detail {

template <class T, std::size_t N>
using SqMat = std::array<std::array<T, N>, N>;

template <class T>
T det2(const SqMat<T, 2>& m) {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

template <class T, std::size_t N>
SqMat<T, N - 1> minor_of(const SqMat<T, N>& m, std::size_t col) {
    SqMat<T, N - 1> out;
    for (std::size_t i = 1; i < N; ++i) {
        std::size_t jj = 0;
        for (std::size_t j = 0; j < N; ++j) {
            if (j == col) continue;
            out[i - 1][jj++] = m[i][j];
        }
    }
    return out;
}

template <class T>
T det3(const SqMat<T, 3>& m) {
    T r = m[0][0] * det2(minor_of(m, std::size_t(0)));
    r = r - m[0][1] * det2(minor_of(m, std::size_t(1)));
    r = r + m[0][2] * det2(minor_of(m, std::size_t(2)));
    return r;
}

template <class T>
T det4(const SqMat<T, 4>& m) {
    T r = m[0][0] * det3(minor_of(m, std::size_t(0)));
    r = r - m[0][1] * det3(minor_of(m, std::size_t(1)));
    r = r + m[0][2] * det3(minor_of(m, std::size_t(2)));
    r = r - m[0][3] * det3(minor_of(m, std::size_t(3)));
    return r;
}

template <class T>
T det5(const SqMat<T, 5>& m) {
    T r = m[0][0] * det4(minor_of(m, std::size_t(0)));
    r = r - m[0][1] * det4(minor_of(m, std::size_t(1)));
    r = r + m[0][2] * det4(minor_of(m, std::size_t(2)));
    r = r - m[0][3] * det4(minor_of(m, std::size_t(3)));
    r = r + m[0][4] * det4(minor_of(m, std::size_t(4)));
    return r;
}

} // namespace detail

/// Cayley-Menger determinant of a tetrahedron from its six edge lengths
/// (d01, d02, d03, d12, d13, d23). For realizable lengths the determinant
/// equals 288 * volume^2. Works for any scalar supporting +,-,* and
/// construction from double (Interval, forward-mode duals, plain double).
template <class T>
T cayley_menger_det(const std::array<T, 6>& lengths) {
    std::array<T, 6> q;
    for (int k = 0; k < 6; ++k) q[k] = lengths[k] * lengths[k];
    const T zero(0.0), one(1.0);
    detail::SqMat<T, 5> m;
    m[0] = {zero, one, one, one, one};
    m[1] = {one, zero, q[0], q[1], q[2]};
    m[2] = {one, q[0], zero, q[3], q[4]};
    m[3] = {one, q[1], q[3], zero, q[5]};
    m[4] = {one, q[2], q[4], q[5], zero};
    return detail::det5(m);
}

/// Tetrahedron volume from edge lengths via the Cayley-Menger determinant.
/// Degenerate configurations yield an interval containing 0. Throws
/// std::domain_error when the lengths are provably non-realizable (the
/// whole determinant interval is negative).
inline Interval cayley_menger_volume(const std::array<Interval, 6>& lengths) {
    Interval det = cayley_menger_det(lengths);
    if (det.hi() < 0.0)
        throw std::domain_error("edge lengths do not realize a tetrahedron");
    Interval v2 = Interval(std::max(0.0, det.lo()), det.hi()) / Interval(288.0);
    return sqrt(v2);
}

inline Interval cayley_menger_volume(double d01, double d02, double d03,
                                     double d12, double d13, double d23) {
    return cayley_menger_volume({Interval(d01), Interval(d02), Interval(d03),
                                 Interval(d12), Interval(d13), Interval(d23)});
}

} // namespace kepler
