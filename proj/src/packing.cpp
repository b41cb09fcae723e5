#include "kepler/packing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kepler {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_index(const PackingPatch& p, int i) {
    if (i < 0 || i >= p.size()) throw std::out_of_range("center index out of range");
}

double dist(const PackingPatch& p, int i, int j) {
    return (p.centers[j] - p.centers[i]).norm();
}

std::array<int, 3> sorted_ids(int i, int j, int k) {
    std::array<int, 3> v{i, j, k};
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

void validate_patch(const PackingPatch& p, double tol_geom) {
    const double min_dist = 2.0 - tol_geom;
    const int n = p.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = dist(p, i, j);
            if (d < min_dist) {
                std::ostringstream msg;
                msg << "centers " << i << " and " << j
                    << " are at distance " << format_double(d)
                    << " (minimum is 2)";
                throw std::runtime_error(msg.str());
            }
        }
    if (p.lattice) {
        Eigen::Matrix3d inv = p.lattice->basis.inverse();
        for (int i = 0; i < n; ++i) {
            bool on_lattice = false;
            for (const Vec3& o : p.lattice->offsets) {
                Vec3 frac = inv * (p.centers[i] - o);
                Vec3 steps = frac.array().round().matrix();
                Vec3 resid = p.centers[i] - (p.lattice->basis * steps + o);
                if (resid.norm() <= 1e-9) {
                    on_lattice = true;
                    break;
                }
            }
            if (!on_lattice)
                throw std::runtime_error("center " + std::to_string(i) +
                                         " is not on the declared lattice");
        }
    }
}

PackingPatch gen_fcc(double radius) {
    if (!(radius > 0)) throw std::domain_error("patch radius must be positive");
    const double s = std::sqrt(2.0);
    const double r2 = radius * radius;
    // Centers are sqrt(2) * (u, v, w) with u + v + w even, so the squared
    // distance from the origin is exactly 2(u^2 + v^2 + w^2) and membership
    // can be decided in integers. Boundary radii therefore behave exactly
    // (radius 2 admits the whole first shell).
    const int nmax = static_cast<int>(std::floor(radius / s)) + 1;
    struct Row { long m; int u, v, w; };
    std::vector<Row> rows;
    for (int u = -nmax; u <= nmax; ++u)
        for (int v = -nmax; v <= nmax; ++v)
            for (int w = -nmax; w <= nmax; ++w) {
                if (((u + v + w) % 2 + 2) % 2 != 0) continue;
                long m = long(u) * u + long(v) * v + long(w) * w;
                if (2.0 * double(m) <= r2) rows.push_back({m, u, v, w});
            }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.m, a.u, a.v, a.w) < std::tie(b.m, b.u, b.v, b.w);
    });
    PackingPatch p;
    p.centers.reserve(rows.size());
    for (const Row& r : rows) p.centers.emplace_back(r.u * s, r.v * s, r.w * s);

    const double a = 2.0 * s;
    Lattice lat;
    lat.basis = Eigen::Matrix3d::Identity() * a;
    lat.offsets = {Vec3(0, 0, 0), Vec3(0, s, s), Vec3(s, 0, s), Vec3(s, s, 0)};
    p.lattice = lat;
    return p;
}

PackingPatch gen_hcp(double radius) {
    if (!(radius > 0)) throw std::domain_error("patch radius must be positive");
    const double sy = std::sqrt(3.0);
    const double h = std::sqrt(8.0 / 3.0);
    const Vec3 a1(2, 0, 0), a2(1, sy, 0), a3(0, 0, 2 * h);
    const Vec3 boff(1, 1.0 / sy, h);
    const double r2 = radius * radius;

    const int n3 = static_cast<int>(std::ceil((radius + 2 * h) / (2 * h)));
    const int n2 = static_cast<int>(std::ceil((radius + 2) / sy));
    const int n1 = static_cast<int>(std::ceil(radius / 2)) + n2 + 2;
    struct Row { double m; double x, y, z; };
    std::vector<Row> rows;
    for (int i = -n1; i <= n1; ++i)
        for (int j = -n2; j <= n2; ++j)
            for (int k = -n3; k <= n3; ++k) {
                Vec3 base = double(i) * a1 + double(j) * a2 + double(k) * a3;
                for (const Vec3& off : {Vec3(0, 0, 0), boff}) {
                    Vec3 c = base + off;
                    double m = c.squaredNorm();
                    if (m <= r2) rows.push_back({m, c.x(), c.y(), c.z()});
                }
            }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.m, a.x, a.y, a.z) < std::tie(b.m, b.x, b.y, b.z);
    });
    PackingPatch p;
    p.centers.reserve(rows.size());
    for (const Row& r : rows) p.centers.emplace_back(r.x, r.y, r.z);

    Lattice lat;
    lat.basis.col(0) = a1;
    lat.basis.col(1) = a2;
    lat.basis.col(2) = a3;
    lat.offsets = {Vec3(0, 0, 0), boff};
    p.lattice = lat;
    return p;
}

PackingPatch fcc_conventional_cell() {
    const double s = std::sqrt(2.0);
    PackingPatch p;
    p.centers = {Vec3(0, 0, 0), Vec3(0, s, s), Vec3(s, 0, s), Vec3(s, s, 0)};
    Lattice lat;
    lat.basis = Eigen::Matrix3d::Identity() * (2.0 * s);
    lat.offsets = p.centers;
    p.lattice = lat;
    return p;
}

std::vector<int> neighbors(const PackingPatch& p, int i, double cutoff) {
    check_index(p, i);
    if (!(cutoff > 0)) throw std::domain_error("cutoff must be positive");
    std::vector<std::pair<double, int>> found;
    for (int j = 0; j < p.size(); ++j) {
        if (j == i) continue;
        double d = dist(p, i, j);
        if (d <= cutoff) found.emplace_back(d, j);
    }
    std::sort(found.begin(), found.end());
    std::vector<int> out;
    out.reserve(found.size());
    for (const auto& [d, j] : found) out.push_back(j);
    return out;
}

std::vector<Triangle> anchored_triangles(const PackingPatch& p, int i, double max_edge) {
    check_index(p, i);
    if (!(max_edge >= 2.0) || max_edge > sqrt8().hi())
        throw std::domain_error("triangle edge cutoff must lie in [2, sqrt(8)]");
    std::vector<int> nb = neighbors(p, i, max_edge);
    std::vector<Triangle> out;
    for (std::size_t x = 0; x < nb.size(); ++x)
        for (std::size_t y = x + 1; y < nb.size(); ++y) {
            int j = std::min(nb[x], nb[y]);
            int k = std::max(nb[x], nb[y]);
            double djk = dist(p, j, k);
            if (djk > max_edge) continue;
            Triangle t;
            t.v0 = i;
            t.v1 = j;
            t.v2 = k;
            t.a = dist(p, i, j);
            t.b = dist(p, i, k);
            t.c = djk;
            t.anchored = true;
            out.push_back(t);
        }
    std::sort(out.begin(), out.end(), [](const Triangle& s, const Triangle& t) {
        return sorted_ids(s.v0, s.v1, s.v2) < sorted_ids(t.v0, t.v1, t.v2);
    });
    return out;
}

SRule make_s_rule(const std::string& name, double r, double tol_geom) {
    SRule rule;
    rule.name = name;
    rule.r = r;
    if (name == "none") {
        rule.accept = [](const std::array<int, 3>&, const std::array<double, 3>&)
            -> std::optional<SEdge> { return std::nullopt; };
        return rule;
    }
    if (name != "default") throw std::domain_error("unknown S-rule: " + name);
    const double upper = sqrt8().hi() + tol_geom;
    rule.accept = [r, upper](const std::array<int, 3>& v, const std::array<double, 3>& len)
        -> std::optional<SEdge> {
        // len = {l01, l02, l12} over the sorted vertex triple.
        int longest = 0;
        for (int e = 1; e < 3; ++e)
            if (len[e] > len[longest]) longest = e;
        int ties = 0;
        for (int e = 0; e < 3; ++e)
            if (len[e] == len[longest]) ++ties;
        if (ties > 1) return std::nullopt;
        if (!(len[longest] > r && len[longest] <= upper)) return std::nullopt;
        for (int e = 0; e < 3; ++e)
            if (e != longest && len[e] > r) return std::nullopt;
        static constexpr int kEnds[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        return SEdge{v[kEnds[longest][0]], v[kEnds[longest][1]], len[longest]};
    };
    return rule;
}

std::vector<Triangle> distinguished_triangles(const PackingPatch& p, int i, const SRule& rule) {
    check_index(p, i);
    if (!rule.accept) throw std::domain_error("S-rule has no membership function");
    const double reach = sqrt8().hi() + 1e-12;
    std::vector<int> nb = neighbors(p, i, reach);
    std::vector<Triangle> out;
    for (std::size_t x = 0; x < nb.size(); ++x)
        for (std::size_t y = x + 1; y < nb.size(); ++y) {
            std::array<int, 3> v = sorted_ids(i, nb[x], nb[y]);
            std::array<double, 3> len = {dist(p, v[0], v[1]), dist(p, v[0], v[2]),
                                         dist(p, v[1], v[2])};
            if (len[0] > reach || len[1] > reach || len[2] > reach) continue;
            auto edge = rule.accept(v, len);
            if (!edge) continue;
            int j = std::min(nb[x], nb[y]);
            int k = std::max(nb[x], nb[y]);
            Triangle t;
            t.v0 = i;
            t.v1 = j;
            t.v2 = k;
            t.a = dist(p, i, j);
            t.b = dist(p, i, k);
            t.c = dist(p, j, k);
            t.anchored = true;
            t.distinguished = std::make_pair(edge->e0, edge->e1);
            t.w = edge->w;
            out.push_back(t);
        }
    std::sort(out.begin(), out.end(), [](const Triangle& s, const Triangle& t) {
        return sorted_ids(s.v0, s.v1, s.v2) < sorted_ids(t.v0, t.v1, t.v2);
    });
    return out;
}

Triangle reanchor(const Triangle& t, int vertex) {
    if (!t.has_vertex(vertex)) throw std::domain_error("vertex is not part of the triangle");
    Triangle r = t;
    if (vertex == t.v0) return r;
    if (vertex == t.v1) {
        r.v0 = t.v1; r.v1 = t.v0; r.v2 = t.v2;
        r.a = t.a; r.b = t.c; r.c = t.b;
    } else {
        r.v0 = t.v2; r.v1 = t.v0; r.v2 = t.v1;
        r.a = t.b; r.b = t.c; r.c = t.a;
    }
    return r;
}

namespace {

ordered_json vec3_to_json(const Vec3& v) {
    return ordered_json::array({v.x(), v.y(), v.z()});
}

Vec3 vec3_from_json(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw std::runtime_error(std::string("expected a numeric [x, y, z] triple for ") + what);
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

} // namespace

void save_patch(const PackingPatch& p, std::ostream& out) {
    ordered_json doc;
    doc["radius_unit"] = "ball_radius";
    doc["centers"] = ordered_json::array();
    for (const Vec3& c : p.centers) doc["centers"].push_back(vec3_to_json(c));
    if (p.lattice) {
        ordered_json lat;
        lat["basis"] = ordered_json::array();
        for (int k = 0; k < 3; ++k)
            lat["basis"].push_back(vec3_to_json(p.lattice->basis.col(k)));
        lat["offsets"] = ordered_json::array();
        for (const Vec3& o : p.lattice->offsets) lat["offsets"].push_back(vec3_to_json(o));
        doc["lattice"] = lat;
    }
    out << doc.dump(2) << "\n";
}

PackingPatch load_patch(std::istream& in, double tol_geom) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("malformed patch document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("centers"))
        throw std::runtime_error("malformed patch document: missing \"centers\"");
    if (doc.value("radius_unit", "") != std::string("ball_radius"))
        throw std::runtime_error("patch document must declare \"radius_unit\": \"ball_radius\"");
    PackingPatch p;
    for (const auto& c : doc["centers"]) p.centers.push_back(vec3_from_json(c, "center"));
    if (doc.contains("lattice")) {
        const auto& lj = doc["lattice"];
        if (!lj.contains("basis") || !lj.contains("offsets") || lj["basis"].size() != 3)
            throw std::runtime_error("malformed lattice block");
        Lattice lat;
        for (int k = 0; k < 3; ++k)
            lat.basis.col(k) = vec3_from_json(lj["basis"][k], "basis vector");
        for (const auto& o : lj["offsets"]) lat.offsets.push_back(vec3_from_json(o, "offset"));
        if (lat.offsets.empty()) throw std::runtime_error("lattice has no offsets");
        if (std::fabs(lat.basis.determinant()) < 1e-9)
            throw std::runtime_error("lattice basis is singular");
        p.lattice = lat;
    }
    validate_patch(p, tol_geom);
    return p;
}

PackingPatch load_patch_file(const std::string& path, double tol_geom) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open patch file: " + path);
    return load_patch(in, tol_geom);
}

} // namespace kepler
