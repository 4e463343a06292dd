#include <cmath>

#include "curv/continuation.hpp"
#include "curv/fem.hpp"
#include "curv/theorems.hpp"
#include "doctest.h"

using namespace curv;

namespace {

const std::array<ChartPoint, 3> kNonAcute{ChartPoint{Chart::Klein, 0.0, 0.0},
                                          ChartPoint{Chart::Klein, 0.5, 0.0},
                                          ChartPoint{Chart::Klein, -0.15, 0.35}};
const std::array<EdgeBC, 3> kAllNeumann{EdgeBC::Neumann, EdgeBC::Neumann, EdgeBC::Neumann};

} // namespace

TEST_CASE("non-acute sweep 0 to -1: simple mu2 branch, no crossings") {
    const BranchData b = sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 10, 4);
    REQUIRE(b.steps.size() >= 11);
    CHECK(b.tracked == 1);

    for (const auto& e : b.events) {
        CAPTURE(e.t);
        CHECK(e.what != "order_swap");
    }
    for (size_t s = 0; s < b.steps.size(); ++s) {
        const BranchStep& st = b.steps[s];
        // kappa monotone along the path
        if (s > 0) CHECK(st.kappa < b.steps[s - 1].kappa);
        // matched overlaps stay high and the mu2 branch stays gapped
        for (double o : st.overlaps) CHECK(o >= 0.9);
        CHECK(st.values[2] - st.values[1] > 0.01 * st.values[1]);
        // branch values, re-sorted, equal the sorted spectrum order
        std::vector<double> v = st.values;
        CHECK(std::is_sorted(v.begin(), v.end())); // no swap ever happened
    }
}

TEST_CASE("critical count stays zero along the non-acute path") {
    const BranchData b = sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 8, 3);
    const auto rows = track_critical_points(b);
    REQUIRE(rows.size() == b.steps.size());
    for (const auto& r : rows) {
        CAPTURE(r.t);
        CHECK(r.count == 0);
        CHECK(!r.event);
    }
}

TEST_CASE("mixed single-D path also keeps zero critical points") {
    const std::array<EdgeBC, 3> bc{EdgeBC::Dirichlet, EdgeBC::Neumann, EdgeBC::Neumann};
    // Dirichlet on the edge opposite vertex 0; that vertex stays acute
    const std::array<ChartPoint, 3> tri{ChartPoint{Chart::Klein, 0.0, 0.0},
                                        ChartPoint{Chart::Klein, 0.45, 0.0},
                                        ChartPoint{Chart::Klein, 0.1, 0.4}};
    const BranchData b = sweep(tri, bc, 0.0, -1.0, 6, 2);
    CHECK(b.tracked == 0);
    for (const auto& r : track_critical_points(b)) {
        CAPTURE(r.t);
        CHECK(r.count == 0);
    }
}

TEST_CASE("constant path keeps every branch constant") {
    const BranchData b = sweep(kNonAcute, kAllNeumann, 0.0, 0.0, 5, 3);
    REQUIRE(b.steps.size() >= 6);
    for (const auto& st : b.steps)
        for (int i = 0; i < 3; ++i)
            CHECK(st.values[i] == doctest::Approx(b.steps[0].values[i]).epsilon(1e-9));
    CHECK(b.events.empty());
}

TEST_CASE("step-halving consistency of the mu2 branch") {
    const BranchData a = sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 5, 3);
    const BranchData b = sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 10, 3);
    // values at shared t agree far beyond the continuity bound, and the
    // consecutive jumps scale like the step size
    double jump_a = 0.0, jump_b = 0.0;
    for (size_t s = 1; s < a.steps.size(); ++s)
        jump_a = std::max(jump_a, std::abs(a.steps[s].values[1] - a.steps[s - 1].values[1]));
    for (size_t s = 1; s < b.steps.size(); ++s)
        jump_b = std::max(jump_b, std::abs(b.steps[s].values[1] - b.steps[s - 1].values[1]));
    CHECK(jump_b < 0.75 * jump_a);
    for (const auto& sa : a.steps) {
        for (const auto& sb : b.steps)
            if (sa.t == sb.t)
                CHECK(sa.values[1] == doctest::Approx(sb.values[1]).epsilon(1e-9));
    }
}

TEST_CASE("branch symmetry under path reversal") {
    const BranchData fwd = sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 5, 3);
    const BranchData rev = sweep(kNonAcute, kAllNeumann, -1.0, 0.0, 5, 3);
    for (const auto& sf : fwd.steps)
        for (const auto& sr : rev.steps)
            if (std::abs(sf.kappa - sr.kappa) < 1e-12)
                for (int i = 0; i < 3; ++i)
                    CHECK(sf.values[i] == doctest::Approx(sr.values[i]).epsilon(1e-8));
}

TEST_CASE("sweep fails with the offending t when the domain is left") {
    // vertex at Klein radius 1.3 is valid only for |kappa| < 1/1.69
    const std::array<ChartPoint, 3> tri{ChartPoint{Chart::Klein, 0.0, 0.0},
                                        ChartPoint{Chart::Klein, 1.3, 0.0},
                                        ChartPoint{Chart::Klein, 0.0, 0.6}};
    try {
        sweep(tri, kAllNeumann, 0.0, -1.0, 10, 2);
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.t > 0.3);
        CHECK(e.t <= 1.0);
    }
}

TEST_CASE("sweep argument validation") {
    CHECK_THROWS_AS(sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 0, 3), DomainError);
    CHECK_THROWS_AS(sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 5, 0), DomainError);
    CHECK_THROWS_AS(sweep(kNonAcute, kAllNeumann, 0.0, -1.0, 5, 1), DomainError);
    const std::array<ChartPoint, 3> bad{ChartPoint{Chart::PoincareDisk, 0.0, 0.0},
                                        ChartPoint{Chart::Klein, 0.5, 0.0},
                                        ChartPoint{Chart::Klein, 0.0, 0.5}};
    CHECK_THROWS_AS(sweep(bad, kAllNeumann, 0.0, -1.0, 5, 3), DomainError);
}
