// Independent test oracles. Everything here recomputes expected values by a
// different route than the library (conventional-cell enumeration instead of
// the integer lattice walk, integer determinants, closed-form volumes), so a
// shared bug cannot hide.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kepler/packing.hpp"
#include "kepler/random.hpp"

namespace oracles {

using kepler::PackingPatch;
using kepler::Vec3;

// FCC points within `radius` of the origin, via the conventional cubic cell
// (4 offsets per cube) and floating comparisons with a small boundary fuzz.
inline std::vector<Vec3> fcc_points(double radius, double fuzz = 1e-9) {
    const double s = std::sqrt(2.0);
    const double a = 2 * s;
    const int m = static_cast<int>(std::ceil(radius / a)) + 1;
    const Vec3 offs[4] = {Vec3(0, 0, 0), Vec3(0, s, s), Vec3(s, 0, s), Vec3(s, s, 0)};
    std::vector<Vec3> out;
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j)
            for (int k = -m; k <= m; ++k)
                for (const Vec3& o : offs) {
                    Vec3 p = Vec3(i * a, j * a, k * a) + o;
                    if (p.squaredNorm() <= radius * radius + fuzz) out.push_back(p);
                }
    return out;
}

// HCP points by explicit ABAB layer stacking.
inline std::vector<Vec3> hcp_points(double radius, double fuzz = 1e-9) {
    const double sy = std::sqrt(3.0);
    const double h = std::sqrt(8.0 / 3.0);
    const int m = static_cast<int>(std::ceil(radius)) + 2;
    std::vector<Vec3> out;
    for (int layer = -m; layer <= m; ++layer) {
        double z = layer * h;
        bool b_layer = ((layer % 2) + 2) % 2 == 1;
        for (int i = -2 * m; i <= 2 * m; ++i)
            for (int j = -2 * m; j <= 2 * m; ++j) {
                Vec3 p(2 * i + j + (b_layer ? 1.0 : 0.0),
                       sy * j + (b_layer ? 1.0 / sy : 0.0), z);
                if (p.squaredNorm() <= radius * radius + fuzz) out.push_back(p);
            }
    }
    return out;
}

// True when two point sets coincide as sets within tol.
inline bool same_point_set(std::vector<Vec3> a, std::vector<Vec3> b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    auto key = [](const Vec3& u, const Vec3& v) {
        return std::tie(u.x(), u.y(), u.z()) < std::tie(v.x(), v.y(), v.z());
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((a[i] - b[i]).norm() > tol) return false;
    return true;
}

// Count indices at distance within [d - tol, d + tol] of point p.
inline int count_at_distance(const std::vector<Vec3>& pts, const Vec3& p, double d,
                             double tol = 1e-9) {
    int n = 0;
    for (const Vec3& q : pts) {
        double dist = (q - p).norm();
        if (std::fabs(dist - d) <= tol && dist > tol) ++n;
    }
    return n;
}

// Sorted histogram of all pair distances below cutoff.
inline std::vector<double> pair_distances(const std::vector<Vec3>& pts, double cutoff) {
    std::vector<double> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = (pts[i] - pts[j]).norm();
            if (d <= cutoff) out.push_back(d);
        }
    std::sort(out.begin(), out.end());
    return out;
}

// Direct O(n^2) triangle count at one center: both other vertices and all
// three edges within max_edge, no neighbor-list machinery.
inline int triangle_count_at(const std::vector<Vec3>& pts, std::size_t i, double max_edge) {
    int n = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == i) continue;
        if ((pts[j] - pts[i]).norm() > max_edge) continue;
        for (std::size_t k = j + 1; k < pts.size(); ++k) {
            if (k == i) continue;
            if ((pts[k] - pts[i]).norm() > max_edge) continue;
            if ((pts[k] - pts[j]).norm() > max_edge) continue;
            ++n;
        }
    }
    return n;
}

// 5x5 integer determinant by cofactor expansion; exact for the small
// Cayley-Menger entries used in tests.
inline std::int64_t int_det(const std::array<std::array<std::int64_t, 5>, 5>& m, int n = 5) {
    if (n == 1) return m[0][0];
    std::int64_t det = 0, sign = 1;
    for (int c = 0; c < n; ++c) {
        std::array<std::array<std::int64_t, 5>, 5> sub{};
        for (int i = 1; i < n; ++i) {
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == c) continue;
                sub[i - 1][jj++] = m[i][j];
            }
        }
        det += sign * m[0][c] * int_det(sub, n - 1);
        sign = -sign;
    }
    return det;
}

inline std::int64_t cayley_menger_int(std::int64_t q) {  // all squared edges equal q
    std::array<std::array<std::int64_t, 5>, 5> m{};
    for (int i = 1; i < 5; ++i) {
        m[0][i] = m[i][0] = 1;
        for (int j = 1; j < 5; ++j) m[i][j] = (i == j) ? 0 : q;
    }
    return int_det(m);
}

// Rigid motion from a seeded generator: rotation (normalized quaternion) and
// translation with entries in [-5, 5].
struct RigidMotion {
    Eigen::Matrix3d rot;
    Vec3 shift;

    Vec3 operator()(const Vec3& p) const { return rot * p + shift; }
};

inline RigidMotion random_rigid_motion(kepler::SplitMix64& rng) {
    Eigen::Vector4d q;
    for (int i = 0; i < 4; ++i) q[i] = rng.uniform(-1.0, 1.0);
    while (q.norm() < 1e-3) {
        for (int i = 0; i < 4; ++i) q[i] = rng.uniform(-1.0, 1.0);
    }
    q.normalize();
    Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
    RigidMotion m;
    m.rot = quat.toRotationMatrix();
    m.shift = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    return m;
}

inline PackingPatch transformed(const PackingPatch& p, const RigidMotion& m) {
    PackingPatch out = p;
    for (Vec3& c : out.centers) c = m(c);
    if (out.lattice) {
        out.lattice->basis = m.rot * out.lattice->basis;
        for (Vec3& o : out.lattice->offsets) o = m(o);
    }
    return out;
}

// Periodic FCC cell scaled up slightly and with jittered offsets; the scale
// headroom keeps the minimum pair distance at 2 or more.
inline PackingPatch jittered_fcc_cell(std::uint64_t seed, double scale = 1.02,
                                      double jitter = 0.01) {
    PackingPatch cell = kepler::fcc_conventional_cell();
    kepler::SplitMix64 rng(seed);
    const double j = jitter / std::sqrt(3.0);
    kepler::Lattice lat;
    lat.basis = cell.lattice->basis * scale;
    PackingPatch out;
    for (const Vec3& o : cell.centers) {
        Vec3 moved = o * scale + Vec3(rng.uniform(-j, j), rng.uniform(-j, j), rng.uniform(-j, j));
        out.centers.push_back(moved);
        lat.offsets.push_back(moved);
    }
    out.lattice = lat;
    kepler::validate_patch(out);
    return out;
}

// Non-periodic jittered ball patch (scaled so jitter cannot violate the
// minimum distance).
inline PackingPatch jittered_fcc_ball(double radius, std::uint64_t seed, double scale = 1.02,
                                      double jitter = 0.01) {
    PackingPatch base = kepler::gen_fcc(radius);
    kepler::SplitMix64 rng(seed);
    const double j = jitter / std::sqrt(3.0);
    PackingPatch out;
    for (const Vec3& c : base.centers)
        out.centers.push_back(c * scale + Vec3(rng.uniform(-j, j), rng.uniform(-j, j),
                                               rng.uniform(-j, j)));
    kepler::validate_patch(out);
    return out;
}

} // namespace oracles
