#include <doctest.h>

#include "kepler/geometry.hpp"
#include "oracles.hpp"

using namespace kepler;

TEST_CASE("unit right-corner tetrahedron has volume 1/6") {
    Interval v = tetra_volume(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1));
    CHECK(v.contains(1.0 / 6.0));
    CHECK(v.width() <= 1e-14);
}

TEST_CASE("coplanar points give a volume interval containing 0") {
    Interval v = tetra_volume(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0));
    CHECK(v.contains(0.0));
    CHECK(v.hi() <= 1e-14);
}

TEST_CASE("regular tetrahedron of edge 2 via Cayley-Menger") {
    Interval v = cayley_menger_volume(2, 2, 2, 2, 2, 2);
    // Exact integer oracle: the bordered determinant with all squared edges 4
    // equals 288 * volume^2.
    std::int64_t det = oracles::cayley_menger_int(4);
    CHECK(det == 256);
    long double exact = std::sqrt((long double)det / 288.0L);
    CHECK(v.contains((double)exact));
    CHECK(v.width() <= 1e-10);
    CHECK(v.contains(2.0 * std::sqrt(2.0) / 3.0));
}

TEST_CASE("coordinate form and length form agree on random tetrahedra") {
    SplitMix64 rng(4242);
    for (int iter = 0; iter < 500; ++iter) {
        Vec3 p[4];
        for (auto& q : p)
            q = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        Interval coord = tetra_volume(p[0], p[1], p[2], p[3]);
        std::array<Interval, 6> len;
        int idx = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) len[idx++] = Interval((p[i] - p[j]).norm());
        // The measured lengths are nearest-rounded, so widen them slightly
        // before demanding the two routes overlap.
        for (auto& l : len) {
            double pad = 1e-12;
            l = Interval(l.lo() - pad, l.hi() + pad);
        }
        Interval cm = cayley_menger_volume(len);
        CHECK(intersects(coord, cm));
    }
}

TEST_CASE("non-realizable lengths are rejected") {
    // One edge far too long for the others.
    CHECK_THROWS_AS(cayley_menger_volume(1, 1, 1, 1, 1, 10), std::domain_error);
}

TEST_CASE("degenerate (flat) lengths contain zero") {
    // Four collinear points at x = 0, 2, 4, 6: a genuinely flat simplex.
    Interval v = cayley_menger_volume(2, 4, 6, 2, 4, 2);
    CHECK(v.contains(0.0));
    CHECK(v.hi() <= 1e-10);
}

TEST_CASE("inflate produces containing interval vectors") {
    Vec3 p(1.5, -2.25, 0.125);
    IVec3 iv = inflate(p, 1e-11);
    for (int k = 0; k < 3; ++k) {
        CHECK(iv[k].contains(p[k]));
        CHECK(iv[k].width() >= 2e-11);
        CHECK(iv[k].width() <= 3e-11);
    }
}
