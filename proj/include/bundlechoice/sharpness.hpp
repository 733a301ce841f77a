#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

// Half-plane a1*eps_A + a2*eps_B <= b.  Region normals are always integer
// (drawn from {0,+-1}), so parallelism tests below are exact.
struct HalfPlane {
    double a1 = 0.0, a2 = 0.0, b = 0.0;
};

// A choice region in the (eps_A, eps_B) plane: intersection of <= 3
// half-planes, with fixed effects folded to zero.
struct Region {
    std::vector<HalfPlane> constraints;
};

// Regions indexed by Choice; closed, they tile the plane.
std::array<Region, 4> choice_regions(double delta_a, double delta_b, double gamma);
std::array<Region, 4> choice_regions(const std::array<Vec, 2>& x, const Vec& z,
                                     const Theta& theta);

// Exact infeasibility of a closed half-plane system (Farkas certificates over
// singles, antiparallel pairs and triples; complete in the plane by Helly).
bool half_plane_system_infeasible(const std::vector<HalfPlane>& constraints);

// J_{j,k} = region_j(x_s) cap region_k(x_t) empty?
bool intersection_empty(Choice j, Choice k, const std::array<Vec, 2>& x_s,
                        const std::array<Vec, 2>& x_t, const Vec& z, const Theta& theta);
bool intersection_empty(Choice j, Choice k, double da_s, double db_s, double da_t, double db_t,
                        double gamma);

struct TransportProblem {
    std::array<double, 4> row_marginals{};  // P_s over choices
    std::array<double, 4> col_marginals{};  // P_t over choices
    std::array<std::array<bool, 4>, 4> forbidden{};

    void validate() const;  // nonnegative, each side sums to 1 within 1e-10
};

struct TransportPlan {
    std::array<std::array<double, 4>, 4> r{};

    std::array<double, 4> row_sums() const;
    std::array<double, 4> col_sums() const;
};

// Max-flow feasibility of the 4x4 transportation polytope with forbidden
// cells; returns a plan iff the polytope is nonempty.
std::optional<TransportPlan> feasible_transport(const TransportProblem& problem);

// Closed-form construction for the two printed sign-pattern cases.  Throws
// std::invalid_argument naming the violated inequality when the case's
// marginal system does not hold.
TransportPlan construct_r_closed_form(int case_id, const std::array<double, 4>& p_s,
                                      const std::array<double, 4>& p_t);

// Relabel a marginal vector / plan under the two symmetry generators used to
// reach the remaining sign patterns: swap_ab exchanges A and B, swap_bundle
// exchanges AB and O.
std::array<double, 4> permute_marginals(const std::array<double, 4>& p, bool swap_ab,
                                        bool swap_bundle);
TransportPlan permute_plan(const TransportPlan& plan, bool swap_ab, bool swap_bundle);

// One covariate pair of a discrete instance plus its observed marginal CCPs.
struct CcpPair {
    std::array<Vec, 2> x_s;
    std::array<Vec, 2> x_t;
    Vec z;
    std::array<double, 4> p_s{};
    std::array<double, 4> p_t{};
};

struct RationalizeReport {
    bool rationalizable = false;
    int first_infeasible_pair = -1;  // -1 when rationalizable
};

// Sharp-set membership oracle: theta is rationalizable iff for every ordered
// pair the transport problem with the emptiness mask is feasible.
RationalizeReport rationalizable(const std::vector<CcpPair>& pairs, const Theta& theta);

}  // namespace bundlechoice
