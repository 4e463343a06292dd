#include "curv/killing.hpp"

#include <cmath>
#include <random>

#include "curv/detail/model3.hpp"

#include "doctest.h"

using namespace curv;

namespace {

ChartPoint random_inner_point(std::mt19937& rng, Curvature k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double rmax = k.negative() ? 0.7 / std::sqrt(-k.kappa)
                                     : (k.positive() ? 0.5 / std::sqrt(k.kappa) : 1.0);
    for (;;) {
        const double x = u(rng) * rmax, y = u(rng) * rmax;
        if (x * x + y * y < rmax * rmax) return {Chart::Klein, x, y};
    }
}

} // namespace

TEST_CASE("canonical elliptic field in the disk") {
    const Curvature k(-1.0);
    const KillingField R = KillingField::elliptic(k, {Chart::PoincareDisk, 0.0, 0.0});

    const Vec2 z = R.evaluate({Chart::PoincareDisk, 0.0, 0.0});
    CHECK(z.norm() < 1e-14);

    // R = -y dx + x dy in the disk chart
    const Vec2 v = R.evaluate({Chart::PoincareDisk, 0.3, 0.2});
    CHECK(v.x == doctest::Approx(-0.2).epsilon(1e-10));
    CHECK(v.y == doctest::Approx(0.3).epsilon(1e-10));

    // orientation flip
    const KillingField Rm = KillingField::elliptic(k, {Chart::PoincareDisk, 0.0, 0.0}, -1);
    const Vec2 vm = Rm.evaluate({Chart::PoincareDisk, 0.3, 0.2});
    CHECK(vm.x == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(vm.y == doctest::Approx(-0.3).epsilon(1e-10));
}

TEST_CASE("canonical loxodromic field in the half-plane") {
    const Curvature k(-1.0);
    // axis = the y-axis of H, oriented upward: L = x dx + y dy
    const KillingField L =
        KillingField::loxodromic(k, {Chart::HalfPlane, 0.0, 0.5}, {Chart::HalfPlane, 0.0, 2.0});
    const Vec2 on = L.evaluate({Chart::HalfPlane, 0.0, 1.0});
    CHECK(on.x == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(on.y == doctest::Approx(1.0).epsilon(1e-10));
    const Vec2 off = L.evaluate({Chart::HalfPlane, 0.5, 1.5});
    CHECK(off.x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(off.y == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("loxodromic tangency and unit speed on the axis") {
    std::mt19937 rng(17);
    for (double kv : {-1.0, -0.4, 0.0, 0.8}) {
        const Curvature k(kv);
        for (int i = 0; i < 10; ++i) {
            const ChartPoint a = random_inner_point(rng, k);
            const ChartPoint b = random_inner_point(rng, k);
            if (geodesic_distance(k, a, b) < 0.1) continue;
            const KillingField X = KillingField::loxodromic(k, a, b);
            for (double t : {0.0, 0.3, 0.8}) {
                const ChartPoint p = geodesic_lerp(k, a, b, t);
                const Vec2 v = X.evaluate(p);
                const Vec2 tangent = geodesic_tangent(k, a, b, p);
                const MetricTensor g = metric_tensor(k, p);
                CHECK(metric_tensor(k, p).norm(v) == doctest::Approx(1.0).epsilon(1e-9));
                CHECK(g.inner(v, tangent) == doctest::Approx(1.0).epsilon(1e-9));
                CHECK(angle_with_geodesic(X, a, b, p) == doctest::Approx(0.0).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("elliptic field is orthogonal to geodesics through its center") {
    std::mt19937 rng(23);
    for (double kv : {-1.0, 0.0, 0.8}) {
        const Curvature k(kv);
        const ChartPoint c = random_inner_point(rng, k);
        const KillingField X = KillingField::elliptic(k, c);
        CHECK(X.evaluate(c).norm() < 1e-12);
        for (int i = 0; i < 10; ++i) {
            const ChartPoint q = random_inner_point(rng, k);
            if (geodesic_distance(k, c, q) < 0.1) continue;
            for (double t : {0.2, 0.6, 0.9}) {
                const ChartPoint p = geodesic_lerp(k, c, q, t);
                CHECK(angle_with_geodesic(X, c, q, p) == doctest::Approx(M_PI / 2).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("everywhere-or-nowhere orthogonality along a geodesic") {
    std::mt19937 rng(31);
    for (double kv : {-1.0, 0.8}) {
        const Curvature k(kv);
        for (int rep = 0; rep < 5; ++rep) {
            const ChartPoint a = random_inner_point(rng, k);
            const ChartPoint b = random_inner_point(rng, k);
            const ChartPoint c = random_inner_point(rng, k);
            const ChartPoint d = random_inner_point(rng, k);
            if (geodesic_distance(k, a, b) < 0.2 || geodesic_distance(k, c, d) < 0.2) continue;
            const KillingField X = KillingField::loxodromic(k, a, b);
            int orth = 0, total = 0;
            for (int i = 0; i <= 200; ++i) {
                const ChartPoint p = geodesic_lerp(k, c, d, i / 200.0);
                try {
                    const double ang = angle_with_geodesic(X, c, d, p);
                    orth += std::abs(ang - M_PI / 2) < 1e-9 ? 1 : 0;
                    ++total;
                } catch (const ZeroVector&) {
                }
            }
            CHECK((orth == 0 || orth == total));
        }
    }
}

TEST_CASE("killing residual oracles") {
    const Curvature k(-1.0);
    const KillingField R = KillingField::elliptic(k, {Chart::PoincareDisk, 0.0, 0.0});
    CHECK(killing_residual(R, {Chart::PoincareDisk, 0.3, 0.2}, 1e-4) < 1e-6);

    const KillingField L =
        KillingField::loxodromic(k, {Chart::HalfPlane, 0.0, 0.5}, {Chart::HalfPlane, 0.0, 2.0});
    CHECK(killing_residual(L, {Chart::HalfPlane, 0.5, 1.0}, 1e-4) < 1e-6);

    // non-Killing control: x^2 dx
    const auto bad = [](const ChartPoint& p) { return Vec2{p.x * p.x, 0.0}; };
    CHECK(killing_residual(k, bad, {Chart::PoincareDisk, 0.4, 0.1}, 1e-4) > 1e-2);

    CHECK_THROWS_AS(killing_residual(R, {Chart::PoincareDisk, 0.1, 0.1}, 1e-2), DomainError);
}

TEST_CASE("killing residual is small for generic fields across curvatures") {
    std::mt19937 rng(41);
    for (double kv : {-1.0, -0.3, 0.0, 0.9}) {
        const Curvature k(kv);
        const ChartPoint a = random_inner_point(rng, k);
        const ChartPoint b = random_inner_point(rng, k);
        const KillingField lox = KillingField::loxodromic(k, a, b);
        const KillingField ell = KillingField::elliptic(k, a);
        for (int i = 0; i < 10; ++i) {
            const ChartPoint p = random_inner_point(rng, k);
            CHECK(killing_residual(lox, p, 1e-4) < 1e-6);
            CHECK(killing_residual(ell, p, 1e-4) < 1e-6);
        }
    }
}

TEST_CASE("loxodromic flow preserves distance to the axis") {
    std::mt19937 rng(53);
    for (double kv : {-1.0, 0.7}) {
        const Curvature k(kv);
        const ChartPoint a = random_inner_point(rng, k);
        ChartPoint b = random_inner_point(rng, k);
        while (geodesic_distance(k, a, b) < 0.3) b = random_inner_point(rng, k);
        const KillingField X = KillingField::loxodromic(k, a, b);
        const double h = 1e-4;
        // exact distance to the axis via the model normal: sinh d = |<P,n>|
        // (sin d on the sphere)
        const detail::Vec3 n = detail::geodesic_normal(
            k, detail::to_model(k, a.xy()), detail::to_model(k, b.xy()));
        const double s = std::sqrt(std::abs(k.kappa));
        auto axis_dist = [&](const ChartPoint& q) {
            const double f = detail::form(k, detail::to_model(k, q.xy()), n);
            return (k.negative() ? std::asinh(std::abs(f)) : std::asin(std::abs(f))) / s;
        };
        for (int i = 0; i < 10; ++i) {
            const ChartPoint p = random_inner_point(rng, k);
            const double d0 = axis_dist(p);
            auto drift = [&](double step) {
                const ChartPoint q{p.chart, p.xy() + X.evaluate(p) * step};
                return std::abs(axis_dist(q) - d0);
            };
            // second order in the step: no linear drift away from the axis
            const double e1 = drift(h), e2 = drift(h / 2);
            CHECK(e1 < 1e-4); // well below the h * |X| a transverse field would give
            if (e1 > 1e-10) CHECK(e1 / e2 > 2.5);
        }
    }
}

TEST_CASE("normalization at a reference point") {
    const Curvature k(-0.6);
    const KillingField X =
        KillingField::loxodromic(k, {Chart::Klein, -0.2, 0.1}, {Chart::Klein, 0.3, 0.25});
    const ChartPoint p{Chart::Klein, 0.1, 0.4};
    const KillingField Xn = X.normalized_at(p);
    CHECK(metric_tensor(k, p).norm(Xn.evaluate(p)) == doctest::Approx(1.0).epsilon(1e-12));

    const KillingField E = KillingField::elliptic(k, p);
    CHECK_THROWS_AS(E.normalized_at(p), ZeroVector);
}

TEST_CASE("point off the geodesic is rejected") {
    const Curvature k(-1.0);
    const KillingField X =
        KillingField::loxodromic(k, {Chart::Klein, 0.0, 0.0}, {Chart::Klein, 0.5, 0.0});
    CHECK_THROWS_AS(angle_with_geodesic(X, {Chart::Klein, 0.0, 0.0}, {Chart::Klein, 0.5, 0.0},
                                        {Chart::Klein, 0.2, 0.1}),
                    PointNotOnGeodesic);
}
