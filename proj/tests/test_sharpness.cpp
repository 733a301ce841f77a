#include "doctest.h"

#include <cmath>

#include "bundlechoice/rng.hpp"
#include "bundlechoice/sharpness.hpp"
#include "oracle/discrete.hpp"

using namespace bundlechoice;

namespace {
constexpr int iO = 0, iA = 1, iB = 2, iAB = 3;

bool point_in(const Region& r, double ea, double eb, double slack = 0.0) {
    for (const auto& h : r.constraints)
        if (h.a1 * ea + h.a2 * eb > h.b + slack) return false;
    return true;
}
}  // namespace

TEST_CASE("choice regions at zero indices") {
    auto regions = choice_regions(0.0, 0.0, 0.0);
    // region(A) = {eps_A >= 0, eps_A >= eps_B, eps_B <= 0}
    CHECK(point_in(regions[iA], 1.0, -1.0));
    CHECK(point_in(regions[iA], 0.0, 0.0));
    CHECK_FALSE(point_in(regions[iA], -0.5, -1.0));
    CHECK_FALSE(point_in(regions[iA], 1.0, 0.5));
    CHECK(point_in(regions[iO], -1.0, -1.0));
    CHECK(point_in(regions[iAB], 1.0, 1.0));
    CHECK(point_in(regions[iB], -1.0, 1.0));
}

TEST_CASE("regions tile the plane") {
    RngStream rs(31);
    for (int rep = 0; rep < 20; ++rep) {
        double da = rs.uniform(-3, 3), db = rs.uniform(-3, 3), g = rs.uniform(-3, 3);
        auto regions = choice_regions(da, db, g);
        for (int gx = 0; gx < 100; ++gx)
            for (int gy = 0; gy < 100; ++gy) {
                double ea = -10.0 + 20.0 * gx / 99.0, eb = -10.0 + 20.0 * gy / 99.0;
                int weak = 0, strict = 0;
                for (int j = 0; j < 4; ++j) {
                    if (point_in(regions[j], ea, eb)) ++weak;
                    if (point_in(regions[j], ea, eb, -1e-9)) ++strict;
                }
                CHECK(weak >= 1);
                CHECK(strict <= 1);
            }
    }
}

TEST_CASE("bundle region empty in a box when Gamma very negative") {
    auto regions = choice_regions(0.0, 0.0, -1e6);
    for (int gx = 0; gx < 50; ++gx)
        for (int gy = 0; gy < 50; ++gy) {
            double ea = -10.0 + 20.0 * gx / 49.0, eb = -10.0 + 20.0 * gy / 49.0;
            CHECK_FALSE(point_in(regions[iAB], ea, eb));
        }
}

TEST_CASE("self intersection with identical covariates is nonempty") {
    RngStream rs(32);
    for (int rep = 0; rep < 50; ++rep) {
        double da = rs.uniform(-2, 2), db = rs.uniform(-2, 2), g = rs.uniform(-2, 2);
        for (int j = 0; j < 4; ++j)
            CHECK_FALSE(intersection_empty(static_cast<Choice>(j), static_cast<Choice>(j), da, db,
                                           da, db, g));
    }
}

TEST_CASE("case 1 pattern empties the listed cells") {
    // d_A >= d_AB >= 0 >= d_B and Gamma >= min(d_A, -d_B):
    // deltas at s vs t with differences (2, -0.5) -> d_AB = 1.5 >= 0.
    double da_s = 1.0, db_s = 0.0, da_t = -1.0, db_t = 0.5, g = 1.0;
    // J_{k,A} empty for k != A
    for (int k : {iO, iB, iAB})
        CHECK(intersection_empty(static_cast<Choice>(k), Choice::OnlyA, da_s, db_s, da_t, db_t, g));
    // J_{k,AB} empty for k in {B, O}
    for (int k : {iO, iB})
        CHECK(intersection_empty(static_cast<Choice>(k), Choice::Bundle, da_s, db_s, da_t, db_t,
                                 g));
    CHECK(intersection_empty(Choice::OnlyB, Choice::O, da_s, db_s, da_t, db_t, g));
    CHECK(intersection_empty(Choice::OnlyA, Choice::OnlyB, da_s, db_s, da_t, db_t, g));
    // and the construction-bearing cells are nonempty
    CHECK_FALSE(intersection_empty(Choice::OnlyA, Choice::OnlyA, da_s, db_s, da_t, db_t, g));
    CHECK_FALSE(intersection_empty(Choice::O, Choice::OnlyB, da_s, db_s, da_t, db_t, g));
    CHECK_FALSE(intersection_empty(Choice::Bundle, Choice::Bundle, da_s, db_s, da_t, db_t, g));
}

TEST_CASE("emptiness verdict matches a dense grid oracle") {
    RngStream rs(33);
    for (int rep = 0; rep < 100; ++rep) {
        double da_s, db_s, da_t, db_t, g;
        // keep margins away from degeneracy so 0.05-resolution grids are conclusive
        do {
            da_s = rs.uniform(-2, 2);
            db_s = rs.uniform(-2, 2);
            da_t = rs.uniform(-2, 2);
            db_t = rs.uniform(-2, 2);
            g = rs.uniform(-2, 2);
        } while (std::abs(g) < 0.3 || std::abs(da_s - da_t) < 0.3 || std::abs(db_s - db_t) < 0.3 ||
                 std::abs((da_s - da_t) + (db_s - db_t)) < 0.3 ||
                 std::abs((da_s - da_t) - (db_s - db_t)) < 0.3 ||
                 std::abs(std::abs(g) - std::abs(da_s - da_t)) < 0.3 ||
                 std::abs(std::abs(g) - std::abs(db_s - db_t)) < 0.3);
        auto regions_s = choice_regions(da_s, db_s, g);
        auto regions_t = choice_regions(da_t, db_t, g);
        bool grid_nonempty[4][4] = {};
        const double span = 50.0, step = 0.05;
        const int m = static_cast<int>(2 * span / step) + 1;
        for (int gx = 0; gx < m; ++gx) {
            double ea = -span + gx * step;
            int in_s = 0, in_t = 0;  // bitmasks
            for (int gy = 0; gy < m; ++gy) {
                double eb = -span + gy * step;
                in_s = in_t = 0;
                for (int j = 0; j < 4; ++j) {
                    if (point_in(regions_s[j], ea, eb)) in_s |= 1 << j;
                    if (point_in(regions_t[j], ea, eb)) in_t |= 1 << j;
                }
                for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k)
                        if ((in_s >> j & 1) && (in_t >> k & 1)) grid_nonempty[j][k] = true;
            }
        }
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                bool empty = intersection_empty(static_cast<Choice>(j), static_cast<Choice>(k),
                                                da_s, db_s, da_t, db_t, g);
                CHECK(empty == !grid_nonempty[j][k]);
            }
    }
}

TEST_CASE("feasible_transport basics") {
    TransportProblem uniform;
    uniform.row_marginals = {0.25, 0.25, 0.25, 0.25};
    uniform.col_marginals = {0.25, 0.25, 0.25, 0.25};
    auto plan = feasible_transport(uniform);
    REQUIRE(plan.has_value());
    auto rows = plan->row_sums();
    auto cols = plan->col_sums();
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(rows[j] - 0.25) < 1e-10);
        CHECK(std::abs(cols[j] - 0.25) < 1e-10);
    }

    TransportProblem cut;
    cut.row_marginals = {0.1, 0.5, 0.2, 0.2};
    cut.col_marginals = {0.25, 0.25, 0.25, 0.25};
    for (int k = 0; k < 4; ++k) cut.forbidden[iA][k] = true;  // row A fully forbidden
    CHECK_FALSE(feasible_transport(cut).has_value());

    TransportProblem bad;
    bad.row_marginals = {0.5, 0.5, 0.5, 0.5};
    bad.col_marginals = {0.25, 0.25, 0.25, 0.25};
    CHECK_THROWS_AS(feasible_transport(bad), std::invalid_argument);
}

TEST_CASE("closed form case 1 example") {
    std::array<double, 4> ps{0.2, 0.4, 0.1, 0.3};  // (O, A, B, AB)
    std::array<double, 4> pt{0.3, 0.3, 0.2, 0.2};
    TransportPlan plan = construct_r_closed_form(1, ps, pt);
    auto rows = plan.row_sums();
    auto cols = plan.col_sums();
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(rows[j] - ps[j]) < 1e-12);
        CHECK(std::abs(cols[j] - pt[j]) < 1e-12);
        for (int k = 0; k < 4; ++k) CHECK(plan.r[j][k] >= 0.0);
    }
}

TEST_CASE("closed form case 2 with equal marginals is diagonal") {
    std::array<double, 4> p{0.3, 0.25, 0.25, 0.2};
    TransportPlan plan = construct_r_closed_form(2, p, p);
    CHECK(plan.r[iB][iB] == doctest::Approx(p[iB]));
    CHECK(plan.r[iA][iA] == doctest::Approx(p[iA]));
    CHECK(plan.r[iO][iO] == doctest::Approx(p[iO]));
    CHECK(plan.r[iAB][iAB] == doctest::Approx(p[iAB]));
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            if (j != k) CHECK(plan.r[j][k] == doctest::Approx(0.0));
}

TEST_CASE("closed form precondition errors name the inequality") {
    std::array<double, 4> ps{0.3, 0.2, 0.2, 0.3};
    std::array<double, 4> pt{0.2, 0.4, 0.2, 0.2};  // P_t(A) > P_s(A)
    CHECK_THROWS_WITH_AS(construct_r_closed_form(1, ps, pt),
                         doctest::Contains("P_t(A) <= P_s(A)"), std::invalid_argument);
    CHECK_THROWS_AS(construct_r_closed_form(3, ps, pt), std::invalid_argument);
}

TEST_CASE("marginal and plan permutation round trip") {
    std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
    auto q = permute_marginals(p, true, true);
    CHECK(q == std::array<double, 4>{0.4, 0.3, 0.2, 0.1});
    CHECK(permute_marginals(q, true, true) == p);
    TransportPlan plan;
    plan.r[iO][iA] = 0.5;
    TransportPlan back = permute_plan(permute_plan(plan, true, false), true, false);
    CHECK(back.r[iO][iA] == 0.5);
}

TEST_CASE("rationalizable: stationary single pair accepts any theta") {
    RngStream rs(35);
    for (int rep = 0; rep < 20; ++rep) {
        CcpPair pr;
        pr.x_s = {Vec{rs.normal(), rs.normal()}, Vec{rs.normal(), rs.normal()}};
        pr.x_t = pr.x_s;
        pr.z = {rs.normal(), rs.normal()};
        double sum = 0.0;
        for (int j = 0; j < 4; ++j) {
            pr.p_s[j] = rs.u01() + 0.05;
            sum += pr.p_s[j];
        }
        for (int j = 0; j < 4; ++j) pr.p_s[j] /= sum;
        pr.p_t = pr.p_s;
        Theta theta{{rs.bernoulli(0.5) ? 1.0 : -1.0, rs.normal()},
                    {rs.bernoulli(0.5) ? 1.0 : -1.0, rs.normal()},
                    true};
        CHECK(rationalizable({pr}, theta).rationalizable);
    }
}

TEST_CASE("rationalizable rejects an ID1 violation") {
    CcpPair pr;
    // beta = (1, 0): d_A = -2, d_B = +1 -> Delta delta_A <= all others
    pr.x_s = {Vec{0.0, 0.0}, Vec{1.0, 0.0}};
    pr.x_t = {Vec{2.0, 0.0}, Vec{0.0, 0.0}};
    pr.z = {0.3, 0.0};
    pr.p_s = {0.1, 0.6, 0.2, 0.1};  // P_s(A) = 0.6
    pr.p_t = {0.4, 0.2, 0.3, 0.1};  // P_t(A) = 0.2 < P_s(A): ID1 violated
    Theta theta{{1.0, 0.0}, {1.0, 0.0}, true};
    auto rep = rationalizable({pr}, theta);
    CHECK_FALSE(rep.rationalizable);
    CHECK(rep.first_infeasible_pair == 0);
}

TEST_CASE("rationalizable accepts theta0 on discrete instances") {
    for (uint64_t seed = 100; seed < 110; ++seed) {
        auto inst = oracle::random_discrete_instance(seed);
        auto pairs = oracle::instance_pairs(inst);
        CHECK(rationalizable(pairs, inst.theta0).rationalizable);
    }
}

TEST_CASE("oracle equivalence: moments nonpositive iff rationalizable") {
    RngStream rs(36);
    int checked = 0;
    for (uint64_t seed = 200; seed < 230; ++seed) {
        auto inst = oracle::random_discrete_instance(seed);
        auto pairs = oracle::instance_pairs(inst);
        for (int cand = 0; cand < 4; ++cand) {
            Theta theta = inst.theta0;
            if (cand > 0) {
                theta.beta[1] += rs.uniform(-1.5, 1.5);
                theta.gamma[1] += rs.uniform(-1.5, 1.5);
            }
            double worst = oracle::max_moment_violation(inst, theta);
            if (worst > 0.0 && worst < 1e-6) continue;  // numerically ambiguous boundary
            bool ok = rationalizable(pairs, theta).rationalizable;
            CHECK(ok == (worst <= 1e-10));
            ++checked;
        }
    }
    CHECK(checked >= 100);
}
