#include "bundlechoice/sharpness.hpp"

#include <cmath>
#include <cstring>
#include <queue>
#include <stdexcept>

#include "bundlechoice/core_model.hpp"

namespace bundlechoice {

namespace {
constexpr int iO = 0, iA = 1, iB = 2, iAB = 3;
constexpr double kTol = 1e-12;

double dot2(const Vec& x, const Vec& b) {
    double s = 0.0;
    for (size_t k = 0; k < b.size(); ++k) s += x[k] * b[k];
    return s;
}
}  // namespace

std::array<Region, 4> choice_regions(double da, double db, double gamma) {
    std::array<Region, 4> r;
    // O beats A, B, AB
    r[iO].constraints = {{1, 0, -da}, {0, 1, -db}, {1, 1, -da - db - gamma}};
    // A beats O, B, AB (A vs AB reduces to db + eps_B + gamma <= 0)
    r[iA].constraints = {{-1, 0, da}, {-1, 1, da - db}, {0, 1, -db - gamma}};
    // B beats O, A, AB
    r[iB].constraints = {{0, -1, db}, {1, -1, db - da}, {1, 0, -da - gamma}};
    // AB beats O, A, B
    r[iAB].constraints = {{-1, -1, da + db + gamma}, {0, -1, db + gamma}, {-1, 0, da + gamma}};
    return r;
}

std::array<Region, 4> choice_regions(const std::array<Vec, 2>& x, const Vec& z,
                                     const Theta& theta) {
    return choice_regions(dot2(x[0], theta.beta), dot2(x[1], theta.beta),
                          gamma_value(z, theta.gamma));
}

bool half_plane_system_infeasible(const std::vector<HalfPlane>& cs) {
    const int n = static_cast<int>(cs.size());
    auto cross = [](const HalfPlane& p, const HalfPlane& q) { return p.a1 * q.a2 - p.a2 * q.a1; };
    auto norm = [](const HalfPlane& p) { return std::sqrt(p.a1 * p.a1 + p.a2 * p.a2); };

    for (int i = 0; i < n; ++i)
        if (cs[i].a1 == 0.0 && cs[i].a2 == 0.0 && cs[i].b < 0.0) return true;

    // Antiparallel pair with a gap: a_j = -k a_i, k > 0, and k*b_i + b_j < 0.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (cross(cs[i], cs[j]) != 0.0) continue;
            double d = cs[i].a1 * cs[j].a1 + cs[i].a2 * cs[j].a2;
            if (d >= 0.0) continue;
            if (cs[i].b * norm(cs[j]) + cs[j].b * norm(cs[i]) < 0.0) return true;
        }

    // Farkas triple: lambda_p a_p + lambda_q a_q = -a_r with lambda >= 0 and
    // lambda_p b_p + lambda_q b_q + b_r < 0.  By Helly/Caratheodory in the
    // plane this certificate family is complete.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const int tri[3] = {i, j, k};
                for (int rpos = 0; rpos < 3; ++rpos) {
                    const HalfPlane& r = cs[tri[rpos]];
                    const HalfPlane& p = cs[tri[(rpos + 1) % 3]];
                    const HalfPlane& q = cs[tri[(rpos + 2) % 3]];
                    double det = cross(p, q);
                    if (det == 0.0) continue;
                    double lp = (-r.a1 * q.a2 + r.a2 * q.a1) / det;
                    double lq = (p.a1 * -r.a2 + p.a2 * r.a1) / det;
                    if (lp >= 0.0 && lq >= 0.0 && lp * p.b + lq * q.b + r.b < 0.0) return true;
                }
            }
    return false;
}

bool intersection_empty(Choice j, Choice k, double da_s, double db_s, double da_t, double db_t,
                        double gamma) {
    auto regions_s = choice_regions(da_s, db_s, gamma);
    auto regions_t = choice_regions(da_t, db_t, gamma);
    std::vector<HalfPlane> sys = regions_s[static_cast<int>(j)].constraints;
    const auto& rt = regions_t[static_cast<int>(k)].constraints;
    sys.insert(sys.end(), rt.begin(), rt.end());
    return half_plane_system_infeasible(sys);
}

bool intersection_empty(Choice j, Choice k, const std::array<Vec, 2>& x_s,
                        const std::array<Vec, 2>& x_t, const Vec& z, const Theta& theta) {
    return intersection_empty(j, k, dot2(x_s[0], theta.beta), dot2(x_s[1], theta.beta),
                              dot2(x_t[0], theta.beta), dot2(x_t[1], theta.beta),
                              gamma_value(z, theta.gamma));
}

void TransportProblem::validate() const {
    double rs = 0.0, cs = 0.0;
    for (int j = 0; j < 4; ++j) {
        if (row_marginals[j] < -kTol || col_marginals[j] < -kTol)
            throw std::invalid_argument("transport: negative marginal");
        rs += row_marginals[j];
        cs += col_marginals[j];
    }
    if (std::abs(rs - 1.0) > 1e-10 || std::abs(cs - 1.0) > 1e-10)
        throw std::invalid_argument("transport: marginals must sum to 1");
}

std::array<double, 4> TransportPlan::row_sums() const {
    std::array<double, 4> s{};
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) s[j] += r[j][k];
    return s;
}

std::array<double, 4> TransportPlan::col_sums() const {
    std::array<double, 4> s{};
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) s[k] += r[j][k];
    return s;
}

std::optional<TransportPlan> feasible_transport(const TransportProblem& problem) {
    problem.validate();
    // Nodes: 0 source, 1..4 rows, 5..8 cols, 9 sink.
    constexpr int kNodes = 10;
    double cap[kNodes][kNodes];
    std::memset(cap, 0, sizeof(cap));
    for (int j = 0; j < 4; ++j) cap[0][1 + j] = std::max(0.0, problem.row_marginals[j]);
    for (int k = 0; k < 4; ++k) cap[5 + k][9] = std::max(0.0, problem.col_marginals[k]);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            if (!problem.forbidden[j][k]) cap[1 + j][5 + k] = 2.0;

    double flow = 0.0;
    while (true) {
        int parent[kNodes];
        std::fill(parent, parent + kNodes, -1);
        parent[0] = 0;
        std::queue<int> q;
        q.push(0);
        while (!q.empty() && parent[9] < 0) {
            int u = q.front();
            q.pop();
            for (int v = 0; v < kNodes; ++v)
                if (parent[v] < 0 && cap[u][v] > kTol) {
                    parent[v] = u;
                    q.push(v);
                }
        }
        if (parent[9] < 0) break;
        double push = 2.0;
        for (int v = 9; v != 0; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
        for (int v = 9; v != 0; v = parent[v]) {
            cap[parent[v]][v] -= push;
            cap[v][parent[v]] += push;
        }
        flow += push;
    }
    if (flow < 1.0 - 1e-10) return std::nullopt;
    TransportPlan plan;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            plan.r[j][k] = problem.forbidden[j][k] ? 0.0 : cap[5 + k][1 + j];  // residual = flow
    return plan;
}

namespace {
void require_leq(double lhs, double rhs, const char* label) {
    if (lhs > rhs + 1e-12)
        throw std::invalid_argument(std::string("closed form precondition violated: ") + label);
}
}  // namespace

TransportPlan construct_r_closed_form(int case_id, const std::array<double, 4>& p_s,
                                      const std::array<double, 4>& p_t) {
    TransportPlan plan;
    auto& r = plan.r;
    if (case_id == 1) {
        require_leq(p_t[iA], p_s[iA], "P_t(A) <= P_s(A)");
        require_leq(p_s[iB], p_t[iB], "P_s(B) <= P_t(B)");
        require_leq(p_t[iA] + p_t[iAB], p_s[iA] + p_s[iAB],
                    "P_t(A)+P_t(AB) <= P_s(A)+P_s(AB)");
        require_leq(p_t[iB] + p_s[iA], 1.0, "P_t(B)+P_s(A) <= 1");
        r[iO][iB] = std::min(p_t[iB] - p_s[iB], p_s[iO]);
        r[iAB][iB] = p_t[iB] - p_s[iB] - r[iO][iB];
        r[iO][iO] = p_s[iO] - r[iO][iB];
        r[iA][iAB] = std::min(p_s[iA] - p_t[iA], p_t[iAB]);
        r[iA][iO] = p_s[iA] - p_t[iA] - r[iA][iAB];
        r[iAB][iAB] = p_t[iAB] - r[iA][iAB];
        r[iA][iA] = p_t[iA];
        r[iB][iB] = p_s[iB];
        r[iAB][iO] = p_s[iAB] - r[iAB][iB] - r[iAB][iAB];
    } else if (case_id == 2) {
        require_leq(p_t[iA], p_s[iA], "P_t(A) <= P_s(A)");
        require_leq(p_s[iB], p_t[iB], "P_s(B) <= P_t(B)");
        require_leq(p_t[iA] + p_t[iAB], p_s[iA] + p_s[iAB],
                    "P_t(A)+P_t(AB) <= P_s(A)+P_s(AB)");
        require_leq(p_s[iB] + p_s[iAB], p_t[iB] + p_t[iAB],
                    "P_s(B)+P_s(AB) <= P_t(B)+P_t(AB)");
        r[iB][iB] = p_s[iB];
        r[iA][iA] = p_t[iA];
        r[iO][iO] = std::min(p_t[iO], p_s[iO]);
        r[iO][iB] = p_s[iO] - r[iO][iO];
        r[iA][iO] = p_t[iO] - r[iO][iO];
        r[iAB][iAB] = std::min(p_t[iAB], p_s[iAB]);
        r[iAB][iB] = p_s[iAB] - r[iAB][iAB];
        r[iA][iAB] = p_t[iAB] - r[iAB][iAB];
        r[iA][iB] = p_s[iA] + p_t[iB] - 1.0 + r[iAB][iAB] + r[iO][iO];
    } else {
        throw std::invalid_argument("construct_r_closed_form: case must be 1 or 2");
    }
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            if (r[j][k] < -1e-12)
                throw std::invalid_argument("closed form produced a negative probability");
            if (r[j][k] < 0.0) r[j][k] = 0.0;
        }
    return plan;
}

std::array<double, 4> permute_marginals(const std::array<double, 4>& p, bool swap_ab,
                                        bool swap_bundle) {
    std::array<double, 4> q = p;
    if (swap_ab) std::swap(q[iA], q[iB]);
    if (swap_bundle) std::swap(q[iO], q[iAB]);
    return q;
}

TransportPlan permute_plan(const TransportPlan& plan, bool swap_ab, bool swap_bundle) {
    auto perm = [&](int idx) {
        if (swap_ab && (idx == iA || idx == iB)) idx = (idx == iA) ? iB : iA;
        if (swap_bundle && (idx == iO || idx == iAB)) idx = (idx == iO) ? iAB : iO;
        return idx;
    };
    TransportPlan out;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) out.r[perm(j)][perm(k)] = plan.r[j][k];
    return out;
}

RationalizeReport rationalizable(const std::vector<CcpPair>& pairs, const Theta& theta) {
    for (size_t idx = 0; idx < pairs.size(); ++idx) {
        const CcpPair& pr = pairs[idx];
        double da_s = dot2(pr.x_s[0], theta.beta), db_s = dot2(pr.x_s[1], theta.beta);
        double da_t = dot2(pr.x_t[0], theta.beta), db_t = dot2(pr.x_t[1], theta.beta);
        double gm = gamma_value(pr.z, theta.gamma);
        TransportProblem problem;
        problem.row_marginals = pr.p_s;
        problem.col_marginals = pr.p_t;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                problem.forbidden[j][k] =
                    intersection_empty(static_cast<Choice>(j), static_cast<Choice>(k), da_s, db_s,
                                       da_t, db_t, gm);
        if (!feasible_transport(problem)) return {false, static_cast<int>(idx)};
    }
    return {true, -1};
}

}  // namespace bundlechoice
