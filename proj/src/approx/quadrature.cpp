#include "hhoplast/approx/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hhoplast {

double QuadRule::total_weight() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

std::vector<std::pair<double, double>> gauss_legendre_01(int npoints)
{
    if (npoints < 1)
        throw std::invalid_argument("gauss_legendre_01: need at least one point");
    // Newton iteration on Legendre polynomials over [-1,1], then map to [0,1]
    std::vector<std::pair<double, double>> rule(npoints);
    const int n = npoints;
    for (int i = 0; i < (n + 1) / 2; i++) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; it++) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; k++) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = { 0.5 * (1.0 - x), 0.5 * w };
        rule[n - 1 - i] = { 0.5 * (1.0 + x), 0.5 * w };
    }
    return rule;
}

QuadRule segment_rule(const Vec3& a, const Vec3& b, int order)
{
    const int npts = order / 2 + 1;
    const auto gl = gauss_legendre_01(npts);
    const double len = (b - a).norm();
    QuadRule rule;
    rule.order = order;
    for (const auto& [t, w] : gl) {
        rule.points.push_back(a + t * (b - a));
        rule.weights.push_back(w * len);
    }
    return rule;
}

namespace {

struct BaryPoint {
    double l0, l1, l2, w; // barycentric coordinates and weight on the unit triangle
};

// symmetric triangle rules, weights normalised to sum to 1
std::vector<BaryPoint> triangle_reference_rule(int order)
{
    std::vector<BaryPoint> pts;
    auto add1 = [&](double w) { pts.push_back({ 1.0 / 3, 1.0 / 3, 1.0 / 3, w }); };
    auto add3 = [&](double w, double a) {
        const double b = 1.0 - 2.0 * a;
        pts.push_back({ b, a, a, w });
        pts.push_back({ a, b, a, w });
        pts.push_back({ a, a, b, w });
    };
    if (order <= 1) {
        add1(1.0);
    } else if (order == 2) {
        add3(1.0 / 3, 1.0 / 6);
    } else if (order <= 4) {
        add3(0.223381589678011, 0.445948490915965);
        add3(0.109951743655322, 0.091576213509771);
    } else if (order == 5) {
        add1(0.225);
        add3(0.132394152788506, 0.470142064105115);
        add3(0.125939180544827, 0.101286507323456);
    }
    return pts;
}

} // namespace

QuadRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c, int order)
{
    const double area2 = (b - a).cross(c - a).norm();
    QuadRule rule;
    rule.order = order;
    if (order <= 5) {
        for (const auto& p : triangle_reference_rule(order)) {
            rule.points.push_back(p.l0 * a + p.l1 * b + p.l2 * c);
            rule.weights.push_back(p.w * 0.5 * area2);
        }
        return rule;
    }
    // Duffy: collapse a tensor Gauss rule onto the triangle; the collapsed
    // direction picks up an extra polynomial degree from the jacobian
    const int npts = order / 2 + 2;
    const auto gl = gauss_legendre_01(npts);
    for (const auto& [u, wu] : gl)
        for (const auto& [v, wv] : gl) {
            const double x = u, y = v * (1.0 - u);
            rule.points.push_back(a + x * (b - a) + y * (c - a));
            rule.weights.push_back(wu * wv * (1.0 - u) * area2);
        }
    return rule;
}

QuadRule tet_rule(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, int order)
{
    const double vol = std::abs((b - a).cross(c - a).dot(d - a)) / 6.0;
    QuadRule rule;
    rule.order = order;
    if (order <= 1) {
        rule.points.push_back(0.25 * (a + b + c + d));
        rule.weights.push_back(vol);
        return rule;
    }
    if (order == 2) {
        const double alpha = 0.585410196624969, beta = 0.138196601125011;
        for (int i = 0; i < 4; i++) {
            double l[4] = { beta, beta, beta, beta };
            l[i] = alpha;
            rule.points.push_back(l[0] * a + l[1] * b + l[2] * c + l[3] * d);
            rule.weights.push_back(vol / 4.0);
        }
        return rule;
    }
    // Duffy on the tetrahedron
    const int npts = order / 2 + 2;
    const auto gl = gauss_legendre_01(npts);
    for (const auto& [u, wu] : gl)
        for (const auto& [v, wv] : gl)
            for (const auto& [t, wt] : gl) {
                const double x = u;
                const double y = v * (1.0 - u);
                const double z = t * (1.0 - u) * (1.0 - v);
                const double jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                rule.points.push_back(a + x * (b - a) + y * (c - a) + z * (d - a));
                rule.weights.push_back(wu * wv * wt * jac * 6.0 * vol);
            }
    return rule;
}

namespace {

void append(QuadRule& dst, const QuadRule& src)
{
    dst.points.insert(dst.points.end(), src.points.begin(), src.points.end());
    dst.weights.insert(dst.weights.end(), src.weights.begin(), src.weights.end());
}

bool star_shaped_2d(const Mesh& mesh, const Cell& cell, const Vec3& center)
{
    const int n = static_cast<int>(cell.vertices.size());
    for (int i = 0; i < n; i++) {
        const Vec3& a = mesh.nodes[cell.vertices[i]];
        const Vec3& b = mesh.nodes[cell.vertices[(i + 1) % n]];
        const double cross = (b.x() - a.x()) * (center.y() - a.y())
                             - (b.y() - a.y()) * (center.x() - a.x());
        if (cross >= -1e-14 * cell.diameter * cell.diameter)
            continue; // center lies on the interior side (loop is CCW)
        return false;
    }
    return true;
}

Vec3 star_center_2d(const Mesh& mesh, const Cell& cell)
{
    if (star_shaped_2d(mesh, cell, cell.centroid))
        return cell.centroid;
    // try midpoints between the centroid and each vertex, then the vertices'
    // average; general kernels are not needed for the mild shapes we build
    const Vec3 vavg = [&]() {
        Vec3 s = Vec3::Zero();
        for (int v : cell.vertices)
            s += mesh.nodes[v];
        return Vec3(s / static_cast<double>(cell.vertices.size()));
    }();
    if (star_shaped_2d(mesh, cell, vavg))
        return vavg;
    for (int v : cell.vertices) {
        const Vec3 mid = 0.5 * (cell.centroid + mesh.nodes[v]);
        if (star_shaped_2d(mesh, cell, mid))
            return mid;
    }
    throw std::runtime_error("make_cell_quadrature: no star center found");
}

} // namespace

QuadRule make_cell_quadrature(const Mesh& mesh, int cell_id, int order)
{
    const Cell& cell = mesh.cells[cell_id];
    QuadRule rule;
    rule.order = order;
    if (mesh.dim == 2) {
        const int n = static_cast<int>(cell.vertices.size());
        if (n == 3) {
            return triangle_rule(mesh.nodes[cell.vertices[0]], mesh.nodes[cell.vertices[1]],
                                 mesh.nodes[cell.vertices[2]], order);
        }
        const Vec3 center = star_center_2d(mesh, cell);
        for (int i = 0; i < n; i++) {
            const Vec3& a = mesh.nodes[cell.vertices[i]];
            const Vec3& b = mesh.nodes[cell.vertices[(i + 1) % n]];
            if (((b - a).cross(center - a)).norm() < 1e-14 * cell.diameter * cell.diameter)
                continue; // degenerate fan triangle (center on the edge line)
            append(rule, triangle_rule(a, b, center, order));
        }
        return rule;
    }
    // 3D: fan each face from the cell centroid; faces are fanned from their own
    // centroid, giving tetrahedra (face fan apex, edge, cell center)
    for (int f : cell.faces) {
        const Face& face = mesh.faces[f];
        const int nv = static_cast<int>(face.vertices.size());
        if (nv == 3) {
            append(rule, tet_rule(mesh.nodes[face.vertices[0]], mesh.nodes[face.vertices[1]],
                                  mesh.nodes[face.vertices[2]], cell.centroid, order));
            continue;
        }
        for (int i = 0; i < nv; i++) {
            const Vec3& a = mesh.nodes[face.vertices[i]];
            const Vec3& b = mesh.nodes[face.vertices[(i + 1) % nv]];
            append(rule, tet_rule(a, b, face.centroid, cell.centroid, order));
        }
    }
    return rule;
}

QuadRule make_face_quadrature(const Mesh& mesh, int face_id, int order)
{
    const Face& face = mesh.faces[face_id];
    if (mesh.dim == 2)
        return segment_rule(mesh.nodes[face.vertices[0]], mesh.nodes[face.vertices[1]], order);
    const int nv = static_cast<int>(face.vertices.size());
    if (nv == 3)
        return triangle_rule(mesh.nodes[face.vertices[0]], mesh.nodes[face.vertices[1]],
                             mesh.nodes[face.vertices[2]], order);
    QuadRule rule;
    rule.order = order;
    for (int i = 0; i < nv; i++) {
        const Vec3& a = mesh.nodes[face.vertices[i]];
        const Vec3& b = mesh.nodes[face.vertices[(i + 1) % nv]];
        append(rule, triangle_rule(a, b, face.centroid, order));
    }
    return rule;
}

} // namespace hhoplast
