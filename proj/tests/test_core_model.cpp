#include "doctest.h"

#include <cmath>

#include "bundlechoice/core_model.hpp"
#include "bundlechoice/rng.hpp"

using namespace bundlechoice;

TEST_CASE("gamma_value inner products") {
    CHECK(gamma_value({0, 0}, {1, 1}) == 0.0);
    CHECK(gamma_value({1, 1}, {1, 1}) == 2.0);
    CHECK(gamma_value({2, -3}, {1, 1}) == -1.0);
    CHECK_THROWS_AS(gamma_value({1, 2, 3}, {1, 1}), std::invalid_argument);
}

TEST_CASE("utilities structure") {
    Theta th{{1.0, 0.0}, {1.0, 0.0}, false};
    auto u0 = utilities({0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, th);
    CHECK(u0 == std::array<double, 4>{0, 0, 0, 0});

    auto u1 = utilities({1, 0}, {2, 0}, {0, 0}, {0, 0}, {0, 0}, th);
    CHECK(u1[1] == 1.0);
    CHECK(u1[2] == 2.0);
    CHECK(u1[3] == 3.0);  // additive when Gamma = 0

    auto u2 = utilities({1, 0}, {2, 0}, {-1, 0}, {0, 0}, {0, 0}, th);
    CHECK(u2[3] == 2.0);  // shifted by Gamma = -1
}

TEST_CASE("utilities bundle identity holds exactly") {
    RngStream rs(7);
    for (int rep = 0; rep < 200; ++rep) {
        Theta th{{rs.normal(), rs.normal()}, {rs.normal(), rs.normal()}, false};
        Vec xa{rs.normal(), rs.normal()}, xb{rs.normal(), rs.normal()}, z{rs.normal(), rs.normal()};
        std::array<double, 2> al{rs.normal(), rs.normal()}, ep{rs.normal(), rs.normal()};
        auto u = utilities(xa, xb, z, al, ep, th);
        double gap = u[3] - u[1] - u[2] - gamma_value(z, th.gamma);
        double scale = 1.0 + std::abs(u[1]) + std::abs(u[2]) + std::abs(u[3]);
        CHECK(std::abs(gap) <= 1e-14 * scale);  // defining identity, up to roundoff
    }
}

TEST_CASE("choose argmax and tie order") {
    CHECK(choose({0, 0.5, 0.2, 0.9}) == Choice::Bundle);
    CHECK(choose({0, 0, 0, 0}) == Choice::O);
    CHECK(choose({0, 1, -1, -1}) == Choice::OnlyA);
    CHECK(choose({0, 1, 1, 1}) == Choice::OnlyA);
    CHECK_THROWS_AS(choose({0, std::nan(""), 0, 0}), std::invalid_argument);
}

TEST_CASE("choose invariant to location and positive scale") {
    RngStream rs(9);
    for (int rep = 0; rep < 500; ++rep) {
        std::array<double, 4> u{rs.normal(), rs.normal(), rs.normal(), rs.normal()};
        double c = rs.normal(0.0, 3.0);
        double k = std::exp(rs.normal());
        std::array<double, 4> shifted, scaled;
        for (int j = 0; j < 4; ++j) {
            shifted[j] = u[j] + c;
            scaled[j] = k * u[j];
        }
        CHECK(choose(shifted) == choose(u));
        CHECK(choose(scaled) == choose(u));
    }
}

TEST_CASE("normalize rescales leading coordinates") {
    Theta th{{-2.0, 4.0}, {0.5, 1.5}, false};
    Theta n = normalize(th);
    CHECK(n.beta[0] == -1.0);
    CHECK(n.beta[1] == 2.0);
    CHECK(n.gamma[0] == 1.0);
    CHECK(n.gamma[1] == 3.0);
    CHECK(n.normalized);
    CHECK_THROWS_AS(normalize(Theta{{0.0, 1.0}, {1.0}, false}), std::invalid_argument);
}

TEST_CASE("demand set membership") {
    CHECK(in_demand_set(Choice::OnlyA, Good::A));
    CHECK(in_demand_set(Choice::Bundle, Good::A));
    CHECK(in_demand_set(Choice::Bundle, Good::B));
    CHECK_FALSE(in_demand_set(Choice::OnlyB, Good::A));
    CHECK_FALSE(in_demand_set(Choice::O, Good::B));
}
