#include "curv/killing.hpp"

#include <algorithm>
#include <cmath>

#include "curv/detail/model3.hpp"

namespace curv {

using detail::Vec3;

namespace {

// generator = u * (J v)^T - v * (J u)^T, so gen * X = u <v,X> - v <u,X>.
std::array<double, 9> antisym_generator(Curvature k, const Vec3& u, const Vec3& v) {
    const double j = k.positive() ? 1.0 : -1.0;
    std::array<double, 9> m{};
    const double uu[3] = {u.x, u.y, u.z};
    const double vv[3] = {v.x, v.y, v.z};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double jc = (c == 2) ? j : 1.0;
            m[3 * r + c] = jc * (uu[r] * vv[c] - vv[r] * uu[c]);
        }
    return m;
}

Vec3 matmul(const std::array<double, 9>& m, const Vec3& v) {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Vec2 klein_of(Curvature k, const ChartPoint& p) { return chart_convert(p, Chart::Klein, k).xy(); }

} // namespace

KillingField KillingField::loxodromic(Curvature k, const ChartPoint& a, const ChartPoint& b,
                                      int orientation) {
    KillingField X(k);
    X.kind_ = Kind::Loxodromic;
    X.orientation_ = orientation >= 0 ? +1 : -1;
    const Vec2 ka = klein_of(k, a), kb = klein_of(k, b);
    if ((kb - ka).norm() < 1e-15) throw DegenerateGeodesic("loxodromic axis is degenerate");
    if (k.flat()) {
        X.flat_dir_ = (kb - ka).normalized();
        return X;
    }
    const Vec3 A = detail::to_model(k, ka);
    Vec3 T = detail::to_model_vector(k, ka, kb - ka);
    T = T / std::sqrt(detail::form(k, T, T));
    // model is unit-size; metric distances scale by 1/sqrt(|kappa|), so the
    // generator needs a sqrt(|kappa|) factor for unit speed on the axis
    X.scale_ = std::sqrt(std::abs(k.kappa));
    if (k.negative()) {
        // gen X = A <T,X> - T <A,X>: unit-speed translation along the axis
        X.gen_ = antisym_generator(k, A, T);
    } else {
        // rotation about the axis's polar point n: gen X = n x X
        Vec3 n = A.cross(detail::to_model(k, kb));
        n = n / std::sqrt(n.dot(n));
        // verify orientation: at A the value n x A should align with T
        const Vec3 v = n.cross(A);
        if (v.dot(T) < 0.0) n = n * -1.0;
        X.gen_ = {0, -n.z, n.y, n.z, 0, -n.x, -n.y, n.x, 0};
    }
    return X;
}

KillingField KillingField::elliptic(Curvature k, const ChartPoint& center, int orientation) {
    KillingField X(k);
    X.kind_ = Kind::Elliptic;
    X.orientation_ = orientation >= 0 ? +1 : -1;
    const Vec2 kc = klein_of(k, center);
    if (k.flat()) {
        X.flat_center_ = kc;
        return X;
    }
    const Vec3 C = detail::to_model(k, kc);
    if (k.positive()) {
        // rotation about C: gen X = C x X (counterclockwise in the chart)
        X.gen_ = {0, -C.z, C.y, C.z, 0, -C.x, -C.y, C.x, 0};
        return X;
    }
    // hyperbolic rotation about C: gen X = T2 <T1,X> - T1 <T2,X> with an
    // orthonormal tangent frame (T1, T2) at C, T2 = jconj(C x T1)
    Vec2 dir{1.0, 0.0};
    if (std::abs(kc.x) > 0.5 / std::sqrt(-k.kappa)) dir = Vec2{0.0, 1.0};
    Vec3 T1 = detail::to_model_vector(k, kc, dir);
    T1 = T1 / std::sqrt(detail::form(k, T1, T1));
    Vec3 T2 = detail::jconj(k, C.cross(T1));
    T2 = T2 / std::sqrt(detail::form(k, T2, T2));
    X.gen_ = antisym_generator(k, T2, T1);
    return X;
}

Vec2 KillingField::evaluate(const ChartPoint& p) const {
    const Curvature k = kappa_;
    validate_point(k, p);
    const double s = scale_ * orientation_;
    if (k.flat()) {
        const Vec2 kp = klein_of(k, p);
        const Vec2 v = (kind_ == Kind::Loxodromic) ? flat_dir_ : (kp - flat_center_).perp();
        // kappa = 0: Klein and Poincare charts coincide, components carry over
        return v * s;
    }
    const ChartPoint pk = chart_convert(p, Chart::Klein, k);
    const Vec3 P = detail::to_model(k, pk.xy());
    const Vec3 V = matmul(gen_, P);
    const Vec2 vk = detail::from_model_vector(k, P, V);
    return chart_convert_vector(pk, vk, p.chart, k) * s;
}

KillingField KillingField::normalized_at(const ChartPoint& p) const {
    const Vec2 v = evaluate(p);
    const double n = metric_tensor(kappa_, p).norm(v);
    if (n < 1e-14) throw ZeroVector("Killing field vanishes at the reference point");
    KillingField X = *this;
    X.scale_ /= n;
    return X;
}

double angle_with_geodesic(const KillingField& X, const ChartPoint& a, const ChartPoint& b,
                           const ChartPoint& p) {
    const Curvature k = X.kappa();
    const ChartPoint proj = project_to_geodesic(k, a, b, p);
    if (geodesic_distance(k, proj, p) > 1e-9)
        throw PointNotOnGeodesic("angle_with_geodesic: point not on the geodesic");
    const Vec2 t = geodesic_tangent(k, a, b, p);
    const Vec2 v = X.evaluate(p);
    const MetricTensor g = metric_tensor(k, p);
    const double nv = g.norm(v);
    if (nv < 1e-14) throw ZeroVector("Killing field vanishes at the sample point");
    const double c = g.inner(v, t) / (nv * g.norm(t));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double killing_residual(Curvature k, const std::function<Vec2(const ChartPoint&)>& X,
                        const ChartPoint& p, double h) {
    if (!(h > 0.0 && h <= 1e-3)) throw DomainError("killing_residual: step h must be in (0, 1e-3]");
    validate_point(k, p);
    const Chart ch = p.chart;
    auto metric = [&](double x, double y) { return metric_tensor(k, {ch, x, y}); };
    auto field = [&](double x, double y) { return X({ch, x, y}); };

    const MetricTensor g = metric(p.x, p.y);
    const Vec2 Xp = field(p.x, p.y);

    // chart derivatives by central differences
    const MetricTensor gxp = metric(p.x + h, p.y), gxm = metric(p.x - h, p.y);
    const MetricTensor gyp = metric(p.x, p.y + h), gym = metric(p.x, p.y - h);
    const double dg[2][3] = {
        {(gxp.g11 - gxm.g11) / (2 * h), (gxp.g12 - gxm.g12) / (2 * h), (gxp.g22 - gxm.g22) / (2 * h)},
        {(gyp.g11 - gym.g11) / (2 * h), (gyp.g12 - gym.g12) / (2 * h), (gyp.g22 - gym.g22) / (2 * h)}};

    const Vec2 Xxp = field(p.x + h, p.y), Xxm = field(p.x - h, p.y);
    const Vec2 Xyp = field(p.x, p.y + h), Xym = field(p.x, p.y - h);
    const double dX[2][2] = {{(Xxp.x - Xxm.x) / (2 * h), (Xyp.x - Xym.x) / (2 * h)},
                             {(Xxp.y - Xxm.y) / (2 * h), (Xyp.y - Xym.y) / (2 * h)}};

    const double gm[2][2] = {{g.g11, g.g12}, {g.g12, g.g22}};
    const double Xc[2] = {Xp.x, Xp.y};
    double L[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const int sym = (i == 0 && j == 0) ? 0 : ((i == 1 && j == 1) ? 2 : 1);
            double v = Xc[0] * dg[0][sym] + Xc[1] * dg[1][sym];
            for (int m = 0; m < 2; ++m) v += gm[m][j] * dX[m][i] + gm[i][m] * dX[m][j];
            L[i][j] = v;
        }
    return std::sqrt(L[0][0] * L[0][0] + 2 * L[0][1] * L[0][1] + L[1][1] * L[1][1]);
}

double killing_residual(const KillingField& X, const ChartPoint& p, double h) {
    return killing_residual(X.kappa(), [&](const ChartPoint& q) { return X.evaluate(q); }, p, h);
}

} // namespace curv
