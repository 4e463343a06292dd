#include "curv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "curv/detail/model3.hpp"

namespace curv {

using detail::Vec3;

namespace {

double clamp01m(double v) { return std::clamp(v, -1.0, 1.0); }

// Klein radius of the point at geodesic distance d from the chart origin.
double klein_radius(Curvature k, double d) {
    if (k.flat()) return d;
    const double s = std::sqrt(std::abs(k.kappa));
    if (k.negative()) return std::tanh(s * d) / s;
    if (s * d >= M_PI / 2.0)
        throw DomainError("spherical point at or beyond the equator of the chart pole");
    return std::tan(s * d) / s;
}

// Scaled-disk radius rho = sqrt(|ell|) * r_P as a function of q = sqrt(|kappa|) * r_K.
double poin_rho_from_klein_q(Curvature k, double q) {
    if (k.negative()) return q / (1.0 + std::sqrt(std::max(0.0, 1.0 - q * q)));
    return q / (1.0 + std::sqrt(1.0 + q * q));
}

Vec2 klein_to_poincare(Curvature k, const Vec2& p) {
    if (k.flat()) return p;
    const double r = p.norm();
    if (r == 0.0) return p;
    const double q = std::sqrt(std::abs(k.kappa)) * r;
    const double rho = poin_rho_from_klein_q(k, q);
    const double rp = rho / std::sqrt(std::abs(k.ell()));
    return p * (rp / r);
}

Vec2 poincare_to_klein(Curvature k, const Vec2& p) {
    if (k.flat()) return p;
    const double r = p.norm();
    if (r == 0.0) return p;
    const double rho = std::sqrt(std::abs(k.ell())) * r;
    const double q = k.negative() ? 2.0 * rho / (1.0 + rho * rho) : 2.0 * rho / (1.0 - rho * rho);
    const double rk = q / std::sqrt(std::abs(k.kappa));
    return p * (rk / r);
}

// Radial stretch ratios of the Klein -> Poincare map at Klein radius r:
// tangential factor f/r and radial factor f'. Both tend to the common
// conformal value sqrt(4-3|kappa|)/2 at the origin.
void klein_to_poin_stretch(Curvature k, double r, double& tangential, double& radial) {
    if (k.flat()) {
        tangential = radial = 1.0;
        return;
    }
    const double c0 = std::sqrt(4.0 - 3.0 * std::abs(k.kappa)) / 2.0;
    if (r == 0.0) {
        tangential = radial = c0;
        return;
    }
    const double q = std::sqrt(std::abs(k.kappa)) * r;
    const double rho = poin_rho_from_klein_q(k, q);
    tangential = (rho / q) * std::sqrt(std::abs(k.kappa) / std::abs(k.ell()));
    const double root = k.negative() ? std::sqrt(std::max(1e-300, 1.0 - q * q)) : std::sqrt(1.0 + q * q);
    radial = tangential / root;
}

std::complex<double> cplx(const Vec2& v) { return {v.x, v.y}; }
Vec2 vec(const std::complex<double>& z) { return {z.real(), z.imag()}; }

// Poincare disk (kappa = -1) <-> upper half-plane Cayley maps.
Vec2 disk_to_halfplane(const Vec2& z) {
    const std::complex<double> i(0.0, 1.0);
    return vec(i * (1.0 - cplx(z)) / (1.0 + cplx(z)));
}
Vec2 halfplane_to_disk(const Vec2& w) {
    const std::complex<double> i(0.0, 1.0);
    return vec((i - cplx(w)) / (i + cplx(w)));
}
Vec2 disk_to_halfplane_vector(const Vec2& z, const Vec2& v) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> dwdz = -2.0 * i / std::pow(1.0 + cplx(z), 2);
    return vec(dwdz * cplx(v));
}
Vec2 halfplane_to_disk_vector(const Vec2& w, const Vec2& v) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> dzdw = -2.0 * i / std::pow(i + cplx(w), 2);
    return vec(dzdw * cplx(v));
}

Vec2 to_klein_xy(Curvature k, const ChartPoint& p) {
    return chart_convert(p, Chart::Klein, k).xy();
}

} // namespace

Vec2 Vec2::normalized() const {
    const double n = norm();
    if (n == 0.0) throw ZeroVector("cannot normalize zero vector");
    return *this / n;
}

Curvature::Curvature(double k) : kappa(k) {
    if (!(k > -4.0 / 3.0 && k < 4.0 / 3.0))
        throw DomainError("curvature outside (-4/3, 4/3): Poincare chart undefined");
}

bool point_in_domain(Curvature k, const ChartPoint& p) {
    const double r2 = p.xy().squaredNorm();
    switch (p.chart) {
        case Chart::Klein:
            return !k.negative() || r2 < 1.0 / std::abs(k.kappa);
        case Chart::PoincareDisk:
            if (k.flat()) return true;
            return r2 < 1.0 / std::abs(k.ell()); // kappa>0: open hemisphere image
        case Chart::HalfPlane:
            return k.kappa == -1.0 && p.y > 0.0;
    }
    return false;
}

void validate_point(Curvature k, const ChartPoint& p) {
    if (p.chart == Chart::HalfPlane && k.kappa != -1.0)
        throw UnsupportedConversion("half-plane chart is defined only for kappa = -1");
    if (!point_in_domain(k, p)) throw DomainError("chart point outside the valid chart domain");
}

double conformal_factor(Curvature k, const ChartPoint& p) {
    if (p.chart != Chart::PoincareDisk)
        throw DomainError("conformal_factor expects a Poincare-disk point");
    validate_point(k, p);
    const double l = k.ell();
    const double d = 1.0 + l * p.xy().squaredNorm();
    return (3.0 * std::abs(l) + 1.0) / (d * d);
}

MetricTensor klein_metric(Curvature k, const ChartPoint& p) {
    if (p.chart != Chart::Klein) throw DomainError("klein_metric expects a Klein-chart point");
    validate_point(k, p);
    const double r2 = p.xy().squaredNorm();
    const double d = 1.0 + k.kappa * r2;
    const double a = 1.0 / (d * d); // radial
    const double b = 1.0 / d;       // tangential
    if (r2 < 1e-30) return {b, 0.0, b};
    const double nx = p.x * p.x / r2, ny = p.y * p.y / r2, nxy = p.x * p.y / r2;
    return {a * nx + b * (1.0 - nx), (a - b) * nxy, a * ny + b * (1.0 - ny)};
}

MetricTensor metric_tensor(Curvature k, const ChartPoint& p) {
    switch (p.chart) {
        case Chart::Klein:
            return klein_metric(k, p);
        case Chart::PoincareDisk: {
            const double rho = conformal_factor(k, p);
            return {rho, 0.0, rho};
        }
        case Chart::HalfPlane: {
            validate_point(k, p);
            const double w = 1.0 / (p.y * p.y);
            return {w, 0.0, w};
        }
    }
    throw DomainError("unknown chart");
}

ChartPoint chart_convert(const ChartPoint& p, Chart target, Curvature k) {
    validate_point(k, p);
    if ((p.chart == Chart::HalfPlane || target == Chart::HalfPlane) && k.kappa != -1.0)
        throw UnsupportedConversion("half-plane chart conversions require kappa = -1");
    if (p.chart == target) return p;
    // route through the Poincare disk
    Vec2 z;
    switch (p.chart) {
        case Chart::PoincareDisk: z = p.xy(); break;
        case Chart::Klein: z = klein_to_poincare(k, p.xy()); break;
        case Chart::HalfPlane: z = halfplane_to_disk(p.xy()); break;
    }
    switch (target) {
        case Chart::PoincareDisk: return {target, z};
        case Chart::Klein: return {target, poincare_to_klein(k, z)};
        case Chart::HalfPlane: return {target, disk_to_halfplane(z)};
    }
    throw UnsupportedConversion("unknown target chart");
}

Vec2 chart_convert_vector(const ChartPoint& p, const Vec2& v, Chart target, Curvature k) {
    validate_point(k, p);
    if (p.chart == target) return v;
    if ((p.chart == Chart::HalfPlane || target == Chart::HalfPlane) && k.kappa != -1.0)
        throw UnsupportedConversion("half-plane chart conversions require kappa = -1");
    // to disk
    Vec2 z, vz;
    switch (p.chart) {
        case Chart::PoincareDisk:
            z = p.xy();
            vz = v;
            break;
        case Chart::Klein: {
            z = klein_to_poincare(k, p.xy());
            double tg, rad;
            const double r = p.xy().norm();
            klein_to_poin_stretch(k, r, tg, rad);
            if (r == 0.0) {
                vz = v * tg;
            } else {
                const Vec2 rhat = p.xy() / r;
                const double vr = v.dot(rhat);
                vz = (v - rhat * vr) * tg + rhat * (vr * rad);
            }
            break;
        }
        case Chart::HalfPlane:
            z = halfplane_to_disk(p.xy());
            vz = halfplane_to_disk_vector(p.xy(), v);
            break;
    }
    switch (target) {
        case Chart::PoincareDisk: return vz;
        case Chart::Klein: {
            const Vec2 pk = poincare_to_klein(k, z);
            double tg, rad;
            const double r = pk.norm();
            klein_to_poin_stretch(k, r, tg, rad);
            if (r == 0.0) return vz / tg;
            const Vec2 rhat = pk / r;
            const double vr = vz.dot(rhat);
            return (vz - rhat * vr) / tg + rhat * (vr / rad);
        }
        case Chart::HalfPlane: return disk_to_halfplane_vector(z, vz);
    }
    throw UnsupportedConversion("unknown target chart");
}

double geodesic_distance(Curvature k, const ChartPoint& p, const ChartPoint& q) {
    if (p.chart != q.chart) throw DomainError("geodesic_distance expects points in the same chart");
    validate_point(k, p);
    validate_point(k, q);
    const Vec2 a = p.xy(), b = q.xy();
    const double s = std::sqrt(std::abs(k.kappa));
    // chord forms: cosh d = 1 + x <=> d = 2 asinh(sqrt(x/2));
    // |A - B| = 2 sin(d/2) on the sphere. Both stay accurate for tiny d.
    const auto hyp_d = [](double x) { return 2.0 * std::asinh(std::sqrt(std::max(0.0, x) / 2.0)); };
    switch (p.chart) {
        case Chart::Klein: {
            if (k.flat()) return (a - b).norm();
            const Vec3 A = detail::to_model(k, a), B = detail::to_model(k, b);
            const Vec3 d = A - B;
            if (k.negative()) return hyp_d(detail::form(k, d, d) / 2.0) / s;
            const double c = std::sqrt(d.dot(d));
            return 2.0 * std::asin(std::min(1.0, c / 2.0)) / s;
        }
        case Chart::PoincareDisk: {
            if (k.flat()) return (a - b).norm();
            const double sl = std::sqrt(std::abs(k.ell()));
            const Vec2 wa = a * sl, wb = b * sl;
            if (k.negative()) {
                const double x = 2.0 * (wa - wb).squaredNorm() /
                                 ((1.0 - wa.squaredNorm()) * (1.0 - wb.squaredNorm()));
                return hyp_d(x) / s;
            }
            // inverse stereographic projection to the unit sphere
            auto lift = [](const Vec2& w) {
                const double d = 1.0 + w.squaredNorm();
                return Vec3{2.0 * w.x / d, 2.0 * w.y / d, (1.0 - w.squaredNorm()) / d};
            };
            const Vec3 dn = lift(wa) - lift(wb);
            return 2.0 * std::asin(std::min(1.0, std::sqrt(dn.dot(dn)) / 2.0)) / s;
        }
        case Chart::HalfPlane:
            return hyp_d((a - b).squaredNorm() / (2.0 * a.y * b.y));
    }
    throw DomainError("unknown chart");
}

ChartPoint geodesic_lerp(Curvature k, const ChartPoint& p, const ChartPoint& q, double t) {
    const Vec2 a = to_klein_xy(k, p), b = to_klein_xy(k, q);
    const ChartPoint m{Chart::Klein, a * (1.0 - t) + b * t};
    return chart_convert(m, p.chart, k);
}

ChartPoint geodesic_point_at_arclength(Curvature k, const ChartPoint& p, const ChartPoint& q,
                                       double s) {
    const Vec2 kp = to_klein_xy(k, p), kq = to_klein_xy(k, q);
    if ((kq - kp).norm() < 1e-15) throw DegenerateGeodesic("geodesic defined by coincident points");
    if (k.flat())
        return chart_convert({Chart::Klein, kp + (kq - kp).normalized() * s}, p.chart, k);
    const double sc = std::sqrt(std::abs(k.kappa));
    const Vec3 P = detail::to_model(k, kp);
    Vec3 T = detail::to_model_vector(k, kp, kq - kp);
    T = T / std::sqrt(detail::form(k, T, T));
    const double u = sc * s;
    const Vec3 X = k.negative() ? P * std::cosh(u) + T * std::sinh(u)
                                : P * std::cos(u) + T * std::sin(u);
    if (k.positive() && X.z <= 1e-12)
        throw DomainError("arc-length point leaves the open-hemisphere chart");
    return chart_convert({Chart::Klein, detail::from_model(k, X)}, p.chart, k);
}

ChartPoint project_to_geodesic(Curvature k, const ChartPoint& a, const ChartPoint& b,
                               const ChartPoint& p) {
    const Vec2 ka = to_klein_xy(k, a), kb = to_klein_xy(k, b), kp = to_klein_xy(k, p);
    const Vec2 d = kb - ka;
    const double dd = d.squaredNorm();
    if (dd == 0.0) throw DegenerateGeodesic("geodesic defined by coincident points");
    const double t = (kp - ka).dot(d) / dd;
    return chart_convert({Chart::Klein, ka + d * t}, p.chart, k);
}

Vec2 geodesic_tangent(Curvature k, const ChartPoint& a, const ChartPoint& b, const ChartPoint& p) {
    const Vec2 ka = to_klein_xy(k, a), kb = to_klein_xy(k, b);
    const Vec2 d = kb - ka;
    if (d.norm() == 0.0) throw DegenerateGeodesic("geodesic defined by coincident points");
    const ChartPoint pk = chart_convert(p, Chart::Klein, k);
    Vec2 v = chart_convert_vector(pk, d, p.chart, k);
    const MetricTensor g = metric_tensor(k, p);
    return v / g.norm(v);
}

GeodesicTriangle::GeodesicTriangle(Curvature k, std::array<ChartPoint, 3> v,
                                   std::array<EdgeBC, 3> bc)
    : kappa(k), vertices(v), edge_bc(bc) {
    if (v[0].chart != v[1].chart || v[1].chart != v[2].chart)
        throw DomainError("triangle vertices must share a chart");
    std::array<Vec2, 3> kl;
    for (int i = 0; i < 3; ++i) {
        validate_point(k, v[i]);
        kl[i] = to_klein_xy(k, v[i]);
    }
    const double area2 = (kl[1] - kl[0]).cross(kl[2] - kl[0]);
    double scale = std::max({(kl[1] - kl[0]).norm(), (kl[2] - kl[0]).norm(), 1e-300});
    if (std::abs(area2) < 1e-14 * scale * scale)
        throw DegenerateTriangle("triangle vertices are collinear in the Klein chart");
}

TriangleMetrics triangle_angles_and_sides(const GeodesicTriangle& t) {
    std::array<Vec2, 3> kl;
    for (int i = 0; i < 3; ++i) kl[i] = to_klein_xy(t.kappa, t.vertices[i]);
    TriangleMetrics m{};
    double ang[3];
    for (int i = 0; i < 3; ++i) {
        const Vec2 u = kl[(i + 1) % 3] - kl[i];
        const Vec2 w = kl[(i + 2) % 3] - kl[i];
        const MetricTensor g = klein_metric(t.kappa, {Chart::Klein, kl[i]});
        const double c = g.inner(u, w) / (g.norm(u) * g.norm(w));
        ang[i] = std::acos(clamp01m(c));
        if (ang[i] < 1e-9 || ang[i] > M_PI - 1e-9)
            throw DegenerateTriangle("triangle has a near-degenerate vertex angle");
    }
    m.alpha = ang[0];
    m.beta = ang[1];
    m.gamma = ang[2];
    m.a = geodesic_distance(t.kappa, t.vertices[1], t.vertices[2]);
    m.b = geodesic_distance(t.kappa, t.vertices[2], t.vertices[0]);
    m.c = geodesic_distance(t.kappa, t.vertices[0], t.vertices[1]);
    return m;
}

double triangle_area(const GeodesicTriangle& t) {
    if (t.kappa.flat()) {
        std::array<Vec2, 3> kl;
        for (int i = 0; i < 3; ++i) kl[i] = to_klein_xy(t.kappa, t.vertices[i]);
        return 0.5 * std::abs((kl[1] - kl[0]).cross(kl[2] - kl[0]));
    }
    const TriangleMetrics m = triangle_angles_and_sides(t);
    const double sum = m.alpha + m.beta + m.gamma;
    return t.kappa.negative() ? (M_PI - sum) / std::abs(t.kappa.kappa)
                              : (sum - M_PI) / t.kappa.kappa;
}

ChartPoint reflect_across_geodesic(Curvature k, const ChartPoint& a, const ChartPoint& b,
                                   const ChartPoint& p) {
    const Vec2 ka = to_klein_xy(k, a), kb = to_klein_xy(k, b);
    if ((kb - ka).norm() < 1e-15) throw DegenerateGeodesic("reflection axis degenerate");
    if (k.flat()) {
        const Vec2 kp = to_klein_xy(k, p);
        const Vec2 d = (kb - ka).normalized();
        const Vec2 rel = kp - ka;
        const Vec2 out = ka + d * (2.0 * rel.dot(d)) - rel;
        return chart_convert({Chart::Klein, out}, p.chart, k);
    }
    const Vec3 A = detail::to_model(k, ka), B = detail::to_model(k, kb);
    const Vec3 n = detail::geodesic_normal(k, A, B);
    const Vec3 P = detail::to_model(k, to_klein_xy(k, p));
    const Vec3 R = detail::reflect(k, n, P);
    if (k.positive() && R.z <= 1e-12)
        throw DomainError("reflected image leaves the open-hemisphere chart");
    return chart_convert({Chart::Klein, detail::from_model(k, R)}, p.chart, k);
}

TriangleClass classify_triangle(const GeodesicTriangle& t) {
    const TriangleMetrics m = triangle_angles_and_sides(t);
    const double mx = std::max({m.alpha, m.beta, m.gamma});
    if (std::abs(mx - M_PI / 2.0) <= kRightAngleTol) return TriangleClass::Right;
    return mx > M_PI / 2.0 ? TriangleClass::Obtuse : TriangleClass::Acute;
}

GeodesicTriangle make_triangle_sas(Curvature k, double side_c, double side_b, double alpha,
                                   std::array<EdgeBC, 3> bc) {
    if (side_c <= 0.0 || side_b <= 0.0 || alpha <= 0.0 || alpha >= M_PI)
        throw DegenerateTriangle("make_triangle_sas requires positive sides and angle in (0,pi)");
    if (!k.positive()) {
        const double rc = klein_radius(k, side_c);
        const double rb = klein_radius(k, side_b);
        return GeodesicTriangle(
            k,
            {ChartPoint{Chart::Klein, 0.0, 0.0}, ChartPoint{Chart::Klein, rc, 0.0},
             ChartPoint{Chart::Klein, rb * std::cos(alpha), rb * std::sin(alpha)}},
            bc);
    }
    // spherical: build on the unit sphere and recentre on the vertex centroid
    const double s = std::sqrt(k.kappa);
    const double c = s * side_c, b = s * side_b;
    if (c >= M_PI || b >= M_PI) throw DomainError("spherical side exceeds the model scale");
    const Vec3 v0{0.0, 0.0, 1.0};
    const Vec3 v1{std::sin(c), 0.0, std::cos(c)};
    const Vec3 v2{std::sin(b) * std::cos(alpha), std::sin(b) * std::sin(alpha), std::cos(b)};
    Vec3 m = v0 + v1 + v2;
    const double mn = std::sqrt(m.dot(m));
    if (mn < 1e-12) throw DomainError("spherical triangle too large for the open hemisphere");
    m = m / mn;
    // rotation taking m to the pole (0,0,1)
    const Vec3 pole{0.0, 0.0, 1.0};
    Vec3 axis = m.cross(pole);
    const double sa = std::sqrt(axis.dot(axis));
    const double ca = m.dot(pole);
    auto rotate = [&](const Vec3& v) {
        if (sa < 1e-15) return ca > 0 ? v : Vec3{v.x, -v.y, -v.z};
        const Vec3 u = axis / sa;
        // Rodrigues
        return v * ca + u.cross(v) * sa + u * (u.dot(v) * (1.0 - ca));
    };
    std::array<ChartPoint, 3> verts;
    const Vec3 vv[3] = {rotate(v0), rotate(v1), rotate(v2)};
    for (int i = 0; i < 3; ++i) {
        if (vv[i].z <= 1e-12)
            throw DomainError("spherical triangle does not fit inside the open hemisphere");
        verts[i] = ChartPoint{Chart::Klein, vv[i].x / (s * vv[i].z), vv[i].y / (s * vv[i].z)};
    }
    return GeodesicTriangle(k, verts, bc);
}

GeodesicTriangle make_triangle_from_angles(Curvature k, double alpha, double beta, double gamma,
                                           std::array<EdgeBC, 3> bc) {
    const double sum = alpha + beta + gamma;
    if (k.flat()) throw DomainError("angles do not determine a flat triangle's size");
    if (k.negative() && sum >= M_PI)
        throw DegenerateTriangle("hyperbolic triangle requires angle sum < pi");
    if (k.positive() && (sum <= M_PI || sum >= 3.0 * M_PI))
        throw DegenerateTriangle("spherical triangle requires angle sum in (pi, 3pi)");
    const double s = std::sqrt(std::abs(k.kappa));
    auto side = [&](double A, double B, double C) {
        // length of the side opposite angle A
        const double v = (std::cos(A) + std::cos(B) * std::cos(C)) / (std::sin(B) * std::sin(C));
        if (k.negative()) return std::acosh(std::max(1.0, v)) / s;
        return std::acos(clamp01m(v)) / s;
    };
    const double b = side(beta, gamma, alpha);
    const double c = side(gamma, alpha, beta);
    return make_triangle_sas(k, c, b, alpha, bc);
}

// --- ChartIsometry ----------------------------------------------------------

namespace {
Vec3 matmul(const std::array<double, 9>& m, const Vec3& v) {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}
} // namespace

ChartIsometry ChartIsometry::to_origin(Curvature k, const ChartPoint& p, const ChartPoint& q) {
    ChartIsometry iso;
    iso.kappa_ = k.kappa;
    const Vec2 kp = to_klein_xy(k, p);
    const Vec2 kq = to_klein_xy(k, q);
    if ((kq - kp).norm() < 1e-15) throw DegenerateGeodesic("direction point coincides with base");
    if (k.flat()) {
        const Vec2 d = (kq - kp).normalized();
        iso.c_ = d.x;
        iso.s_ = -d.y; // rotate d onto +x
        iso.t_ = Vec2{-(iso.c_ * kp.x - iso.s_ * kp.y), -(iso.s_ * kp.x + iso.c_ * kp.y)};
        return iso;
    }
    const Vec3 P = detail::to_model(k, kp);
    Vec3 T1 = detail::to_model_vector(k, kp, kq - kp);
    T1 = T1 / std::sqrt(detail::form(k, T1, T1));
    Vec3 T2 = detail::jconj(k, P.cross(T1));
    T2 = T2 / std::sqrt(detail::form(k, T2, T2));
    // G = F^{-1} with F = [T1 T2 P]; form-orthonormal, so F^{-1} = J F^T J
    // (J = I on the sphere, diag(1,1,-1) on the hyperboloid).
    if (k.negative())
        iso.m_ = {T1.x, T1.y, -T1.z, T2.x, T2.y, -T2.z, -P.x, -P.y, P.z};
    else
        iso.m_ = {T1.x, T1.y, T1.z, T2.x, T2.y, T2.z, P.x, P.y, P.z};
    return iso;
}

ChartPoint ChartIsometry::apply(const ChartPoint& p) const {
    const Curvature k(kappa_);
    const Vec2 kp = to_klein_xy(k, p);
    if (k.flat()) {
        const Vec2 out{c_ * kp.x - s_ * kp.y + t_.x, s_ * kp.x + c_ * kp.y + t_.y};
        return chart_convert({Chart::Klein, out}, p.chart, k);
    }
    const Vec3 P = detail::to_model(k, kp);
    const Vec3 Q = matmul(m_, P);
    if (k.positive() && Q.z <= 1e-12)
        throw DomainError("isometry image leaves the open-hemisphere chart");
    return chart_convert({Chart::Klein, detail::from_model(k, Q)}, p.chart, k);
}

Vec2 ChartIsometry::apply_vector(const ChartPoint& p, const Vec2& v) const {
    const Curvature k(kappa_);
    const ChartPoint pk = chart_convert(p, Chart::Klein, k);
    const Vec2 vk = chart_convert_vector(p, v, Chart::Klein, k);
    if (k.flat()) {
        const Vec2 out{c_ * vk.x - s_ * vk.y, s_ * vk.x + c_ * vk.y};
        const ChartPoint ip = apply(pk);
        return chart_convert_vector(ip, out, p.chart, k);
    }
    const Vec3 P = detail::to_model(k, pk.xy());
    const Vec3 V = detail::to_model_vector(k, pk.xy(), vk);
    const Vec3 Q = matmul(m_, P), W = matmul(m_, V);
    const ChartPoint ip{Chart::Klein, detail::from_model(k, Q)};
    const Vec2 wk = detail::from_model_vector(k, Q, W);
    return chart_convert_vector(ip, wk, p.chart, k);
}

ChartIsometry ChartIsometry::inverse() const {
    ChartIsometry inv;
    inv.kappa_ = kappa_;
    const Curvature k(kappa_);
    if (k.flat()) {
        inv.c_ = c_;
        inv.s_ = -s_;
        inv.t_ = Vec2{-(inv.c_ * t_.x - inv.s_ * t_.y), -(inv.s_ * t_.x + inv.c_ * t_.y)};
        return inv;
    }
    const auto& m = m_;
    if (k.positive()) {
        inv.m_ = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    } else {
        // (J M^T J)
        inv.m_ = {m[0], m[3], -m[6], m[1], m[4], -m[7], -m[2], -m[5], m[8]};
    }
    return inv;
}

} // namespace curv
