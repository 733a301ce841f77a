#include "bundlechoice/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace bundlechoice {

IndexDelta index_delta(const std::array<Vec, 2>& x_s, const std::array<Vec, 2>& x_t,
                       const Vec& beta) {
    if (x_s[0].size() != beta.size() || x_s[1].size() != beta.size() ||
        x_t[0].size() != beta.size() || x_t[1].size() != beta.size())
        throw std::invalid_argument("index_delta: dimension mismatch");
    IndexDelta d;
    for (size_t k = 0; k < beta.size(); ++k) {
        d.d_a += (x_s[0][k] - x_t[0][k]) * beta[k];
        d.d_b += (x_s[1][k] - x_t[1][k]) * beta[k];
    }
    return d;
}

bool lambda_id1(const IndexDelta& delta, Choice j) {
    double dj = delta.of(j);
    for (int k = 0; k < kNumChoices; ++k) {
        if (k == static_cast<int>(j)) continue;
        if (dj > delta.of(static_cast<Choice>(k))) return true;
    }
    return false;
}

bool lambda_id2(const IndexDelta& delta, double gamma_z, Good l) {
    double dl = (l == Good::A) ? delta.d_a : delta.d_b;
    double dother = (l == Good::A) ? delta.d_b : delta.d_a;
    if (dl > 0.0) return true;
    return dl + sign_of(gamma_z) * dother > 0.0 && std::abs(gamma_z) > -dl;
}

std::pair<bool, bool> lambda_id3(const IndexDelta& delta, double gamma_z) {
    bool lam_l = gamma_z > -std::min(delta.d_a, delta.d_b) && delta.d_a + delta.d_b > 0.0;
    bool lam_u = gamma_z < std::min(delta.d_a, -delta.d_b) && delta.d_a - delta.d_b > 0.0;
    return {lam_l, lam_u};
}

MomentVector moment_vector(const std::array<double, 4>& ccp_s, const std::array<double, 4>& ccp_t,
                           const IndexDelta& delta, double gamma_z) {
    MomentVector m;
    for (int j = 0; j < kNumChoices; ++j) {
        m.g[j] = lambda_id1(delta, static_cast<Choice>(j)) ? 0.0 : ccp_s[j] - ccp_t[j];
    }
    constexpr int iA = static_cast<int>(Choice::OnlyA);
    constexpr int iB = static_cast<int>(Choice::OnlyB);
    constexpr int iAB = static_cast<int>(Choice::Bundle);
    constexpr int iO = static_cast<int>(Choice::O);
    m.g[4] = lambda_id2(delta, gamma_z, Good::A)
                 ? 0.0
                 : (ccp_s[iA] + ccp_s[iAB]) - (ccp_t[iA] + ccp_t[iAB]);
    m.g[5] = lambda_id2(delta, gamma_z, Good::B)
                 ? 0.0
                 : (ccp_s[iB] + ccp_s[iAB]) - (ccp_t[iB] + ccp_t[iAB]);
    auto [lam_l, lam_u] = lambda_id3(delta, gamma_z);
    m.g[6] = lam_l ? 0.0 : ccp_s[iAB] + ccp_t[iO] - 1.0;
    m.g[7] = lam_u ? 0.0 : ccp_s[iA] + ccp_t[iB] - 1.0;
    return m;
}

bool variant_lambda(ModelVariant variant, const std::vector<double>& deltas, double gamma_ab,
                    const VariantTarget& target) {
    const int num_goods = static_cast<int>(deltas.size());
    auto base_delta = [&]() {
        if (num_goods != 2)
            throw std::invalid_argument("variant_lambda: this variant needs exactly 2 goods");
        return IndexDelta{deltas[0], deltas[1]};
    };

    switch (variant) {
        case ModelVariant::Base:
        case ModelVariant::CrossSectional: {
            // Cross-sectional restrictions are ID1-ID3 with value pairs in
            // place of time pairs, so both route through the base indicators.
            IndexDelta d = base_delta();
            switch (target.kind) {
                case VariantTarget::SingleChoice:
                    return lambda_id1(d, static_cast<Choice>(target.j1));
                case VariantTarget::DemandSet:
                    return lambda_id2(d, gamma_ab, static_cast<Good>(target.j1));
                case VariantTarget::LowerBound: return lambda_id3(d, gamma_ab).first;
                case VariantTarget::UpperBound: return lambda_id3(d, gamma_ab).second;
                default:
                    throw std::invalid_argument("variant_lambda: unsupported target for base");
            }
        }
        case ModelVariant::Nonseparable: {
            IndexDelta d = base_delta();
            if (target.kind == VariantTarget::SingleChoice) {
                Choice c = static_cast<Choice>(target.j1);
                int sa = in_demand_set(c, Good::A) ? -1 : 1;
                int sb = in_demand_set(c, Good::B) ? -1 : 1;
                return sa * d.d_a < 0.0 || sb * d.d_b < 0.0;
            }
            if (target.kind == VariantTarget::DemandSet) {
                double dl = target.j1 == 0 ? d.d_a : d.d_b;
                double dother = target.j1 == 0 ? d.d_b : d.d_a;
                return dl > 0.0 || sign_of(gamma_ab) * dother > 0.0;
            }
            throw std::invalid_argument("variant_lambda: unsupported target for nonseparable");
        }
        case ModelVariant::Multigood: {
            if (num_goods < 2)
                throw std::invalid_argument("variant_lambda: multigood needs >= 2 goods");
            switch (target.kind) {
                case VariantTarget::SingleGood: {
                    if (deltas[target.j1] > 0.0) return true;
                    for (int k = 0; k < num_goods; ++k)
                        if (k != target.j1 && deltas[k] < 0.0) return true;
                    return false;
                }
                case VariantTarget::BundlePair: {
                    if (deltas[target.j1] > 0.0 || deltas[target.j2] > 0.0) return true;
                    for (int k = 0; k < num_goods; ++k)
                        if (k != target.j1 && k != target.j2 && deltas[k] < 0.0) return true;
                    return false;
                }
                case VariantTarget::DemandSet: {
                    // D_l = {l, AB} for l in {A=0, B=1}; other bundles carry
                    // nonpositive incremental utility by assumption.
                    int l = target.j1;
                    int other = 1 - l;
                    if (deltas[l] > 0.0) return true;
                    if (deltas[l] + sign_of(gamma_ab) * deltas[other] > 0.0) return true;
                    for (int k = 2; k < num_goods; ++k) {
                        if (deltas[other] - deltas[k] > 0.0) return true;
                        if (deltas[k] < 0.0) return true;
                    }
                    return false;
                }
                default:
                    throw std::invalid_argument("variant_lambda: unsupported target for multigood");
            }
        }
    }
    throw std::logic_error("variant_lambda: unreachable");
}

void CriterionData::require_valid() const {
    if (pairs.empty()) throw std::invalid_argument("criterion: no fitted period pairs");
    if (static_cast<int>(z.size()) != n) throw std::invalid_argument("criterion: bad z length");
    for (const auto& pb : pairs) {
        if (static_cast<int>(pb.p_s.size()) != n || static_cast<int>(pb.p_t.size()) != n ||
            static_cast<int>(pb.dx_a.size()) != n || static_cast<int>(pb.dx_b.size()) != n)
            throw std::invalid_argument("criterion: pair block not fitted for all individuals");
    }
}

double criterion(const CriterionData& data, const Theta& theta) {
    data.require_valid();
    if (data.n == 0) return 0.0;
    const Vec& beta = theta.beta;
    const Vec& gm = theta.gamma;
    double total = 0.0;
    for (const auto& pb : data.pairs) {
        for (int i = 0; i < data.n; ++i) {
            double da = 0.0, db = 0.0;
            for (size_t k = 0; k < beta.size(); ++k) {
                da += pb.dx_a[i][k] * beta[k];
                db += pb.dx_b[i][k] * beta[k];
            }
            double gz = 0.0;
            for (size_t k = 0; k < gm.size(); ++k) gz += data.z[i][k] * gm[k];
            // ordered pair (s, t) then (t, s); both are distinct restrictions
            total += moment_vector(pb.p_s[i], pb.p_t[i], {da, db}, gz).positive_part_l1();
            total += moment_vector(pb.p_t[i], pb.p_s[i], {-da, -db}, gz).positive_part_l1();
        }
    }
    return total / data.n;
}

}  // namespace bundlechoice
