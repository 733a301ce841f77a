#include "bundlechoice/ccp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bundlechoice/rng.hpp"

#include "json.hpp"

namespace bundlechoice {

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmax4(const double* logits, double* out) {
    double m = logits[0];
    for (int j = 1; j < 4; ++j) m = std::max(m, logits[j]);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        out[j] = std::exp(logits[j] - m);
        sum += out[j];
    }
    for (int j = 0; j < 4; ++j) out[j] /= sum;
}
}  // namespace

Vec CcpModel::make_w(const ObservationPanel& panel, int i, int s, int t) {
    if (s > t) std::swap(s, t);
    Vec w;
    w.reserve(4 * panel.d_x + panel.d_z);
    for (int period : {s, t})
        for (int g = 0; g < 2; ++g)
            for (int k = 0; k < panel.d_x; ++k) w.push_back(panel.x[i][period][g][k]);
    for (int k = 0; k < panel.d_z; ++k) w.push_back(panel.z[i][k]);
    return w;
}

Vec CcpModel::make_w(const ObservationPanel& panel, int i) const {
    return make_w(panel, i, s_, t_);
}

std::vector<double> CcpModel::standardize(const Vec& w) const {
    if (static_cast<int>(w.size()) != din_)
        throw std::invalid_argument("ccp eval: conditioning vector has wrong length");
    std::vector<double> out(din_);
    for (int d = 0; d < din_; ++d) out[d] = (w[d] - mu_[d]) / sd_[d];
    return out;
}

std::array<double, 4> CcpModel::floor_and_renorm(std::array<double, 4> p) const {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        p[j] = std::min(1.0, std::max(hyper_.prob_floor, p[j]));
        sum += p[j];
    }
    for (int j = 0; j < 4; ++j) p[j] /= sum;
    return p;
}

std::array<double, 4> CcpModel::eval_net(const Net& net, const std::vector<double>& w_std) const {
    std::vector<double> h(net.hidden);
    for (int u = 0; u < net.hidden; ++u) {
        double acc = net.b1[u];
        const double* row = &net.w1[static_cast<size_t>(u) * net.din];
        for (int d = 0; d < net.din; ++d) acc += row[d] * w_std[d];
        h[u] = logistic(acc);
    }
    double logits[4];
    for (int j = 0; j < 4; ++j) {
        double acc = net.b2[j];
        const double* row = &net.w2[static_cast<size_t>(j) * net.hidden];
        for (int u = 0; u < net.hidden; ++u) acc += row[u] * h[u];
        logits[j] = acc;
    }
    std::array<double, 4> p;
    softmax4(logits, p.data());
    return p;
}

std::array<double, 4> CcpModel::eval(const Vec& w, int period) const {
    if (period != s_ && period != t_)
        throw std::invalid_argument("ccp eval: model not fitted for this period");
    auto w_std = standardize(w);
    if (hyper_.method == CcpMethod::Neural)
        return floor_and_renorm(eval_net(period == s_ ? net_s_ : net_t_, w_std));

    const KernelData& kd = kernel_;
    std::array<double, 4> acc{};
    double total = 0.0;
    for (int c = 0; c < kd.nd; ++c) {
        double q = 0.0;
        const double* row = &kd.rows[static_cast<size_t>(c) * din_];
        for (int d = 0; d < din_; ++d) {
            double u = (w_std[d] - row[d]) / kd.bandwidth[d];
            q += u * u;
        }
        double k = kd.weight[c] * std::exp(-0.5 * q);
        const auto& tgt = (period == s_) ? kd.target_s[c] : kd.target_t[c];
        for (int j = 0; j < 4; ++j) acc[j] += k * tgt[j];
        total += k;
    }
    if (total <= 0.0) return floor_and_renorm(period == s_ ? kd.global_s : kd.global_t);
    for (int j = 0; j < 4; ++j) acc[j] /= total;
    return floor_and_renorm(acc);
}

double CcpModel::eval_set(const Vec& w, int period, const std::vector<Choice>& k) const {
    if (k.empty()) return 0.0;
    auto p = eval(w, period);
    bool seen[4] = {false, false, false, false};
    double sum = 0.0;
    for (Choice c : k) {
        int idx = static_cast<int>(c);
        if (!seen[idx]) {
            sum += p[idx];
            seen[idx] = true;
        }
    }
    return std::min(1.0, sum);
}

CcpModel fit_ccp(const ObservationPanel& panel, int s, int t, const CcpHyper& hyper) {
    if (s == t) throw std::invalid_argument("fit_ccp: periods must differ");
    if (s > t) std::swap(s, t);
    if (s < 0 || t >= panel.t_len) throw std::invalid_argument("fit_ccp: period out of range");
    if (panel.n < 10) throw std::invalid_argument("fit_ccp: insufficient data (n < 10)");

    CcpModel model;
    model.hyper_ = hyper;
    model.s_ = s;
    model.t_ = t;
    model.din_ = 4 * panel.d_x + panel.d_z;
    const int din = model.din_;
    const int n = panel.n;

    // Group identical conditioning vectors; the weighted-cell gradient equals
    // the per-sample gradient, and discrete designs collapse to a few rows.
    std::map<Vec, int> index;
    std::vector<Vec> rows;
    std::vector<double> weight;
    std::vector<std::array<double, 4>> target_s, target_t;
    for (int i = 0; i < n; ++i) {
        Vec w = CcpModel::make_w(panel, i, s, t);
        auto [it, inserted] = index.try_emplace(std::move(w), static_cast<int>(rows.size()));
        if (inserted) {
            rows.push_back(it->first);
            weight.push_back(0.0);
            target_s.push_back({});
            target_t.push_back({});
        }
        int c = it->second;
        weight[c] += 1.0;
        target_s[c][static_cast<int>(panel.y[i][s])] += 1.0;
        target_t[c][static_cast<int>(panel.y[i][t])] += 1.0;
    }
    const int nd = static_cast<int>(rows.size());
    for (int c = 0; c < nd; ++c) {
        for (int j = 0; j < 4; ++j) {
            target_s[c][j] /= weight[c];
            target_t[c][j] /= weight[c];
        }
        weight[c] /= n;
    }

    model.mu_.assign(din, 0.0);
    model.sd_.assign(din, 0.0);
    for (int c = 0; c < nd; ++c)
        for (int d = 0; d < din; ++d) model.mu_[d] += weight[c] * rows[c][d];
    for (int c = 0; c < nd; ++c)
        for (int d = 0; d < din; ++d) {
            double diff = rows[c][d] - model.mu_[d];
            model.sd_[d] += weight[c] * diff * diff;
        }
    for (int d = 0; d < din; ++d) model.sd_[d] = std::max(std::sqrt(model.sd_[d]), 1e-12);

    std::vector<double> x_std(static_cast<size_t>(nd) * din);
    for (int c = 0; c < nd; ++c)
        for (int d = 0; d < din; ++d)
            x_std[static_cast<size_t>(c) * din + d] = (rows[c][d] - model.mu_[d]) / model.sd_[d];

    if (hyper.method == CcpMethod::Kernel) {
        auto& kd = model.kernel_;
        kd.rows = std::move(x_std);
        kd.target_s = std::move(target_s);
        kd.target_t = std::move(target_t);
        kd.weight = std::move(weight);
        kd.nd = nd;
        // Rule of thumb on standardized inputs: h = 1.06 * n^(-1/(4+din)).
        double h = 1.06 * std::pow(static_cast<double>(n), -1.0 / (4.0 + din));
        kd.bandwidth.assign(din, h * hyper.bandwidth_scale);
        for (int c = 0; c < nd; ++c)
            for (int j = 0; j < 4; ++j) {
                kd.global_s[j] += kd.weight[c] * kd.target_s[c][j];
                kd.global_t[j] += kd.weight[c] * kd.target_t[c][j];
            }
        return model;
    }

    const int hidden = std::min(static_cast<int>(std::ceil(std::pow(n, 0.25))), hyper.width_cap);
    auto train = [&](const std::vector<std::array<double, 4>>& target, uint64_t net_seed) {
        std::array<double, 4> prior{};
        for (int c = 0; c < nd; ++c)
            for (int j = 0; j < 4; ++j) prior[j] += weight[c] * target[c][j];
        CcpModel::Net net;
        net.din = din;
        net.hidden = hidden;
        net.w1.resize(static_cast<size_t>(hidden) * din);
        net.b1.assign(hidden, 0.0);
        net.w2.resize(static_cast<size_t>(4) * hidden);
        net.b2.assign(4, 0.0);
        RngStream rs(net_seed);
        // wide enough to break hidden-unit symmetry quickly on standardized inputs
        double a1 = 2.0 / std::sqrt(static_cast<double>(din));
        double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (auto& v : net.b1) v = rs.uniform(-0.5, 0.5);
        for (auto& v : net.w1) v = rs.uniform(-a1, a1);
        for (auto& v : net.w2) v = rs.uniform(-a2, a2);
        // log-prior output bias: start at the marginal class distribution
        for (int j = 0; j < 4; ++j) net.b2[j] = std::log(std::max(prior[j], hyper.prob_floor));

        std::vector<double> h(static_cast<size_t>(nd) * hidden);
        std::vector<double> gw1(net.w1.size()), gb1(hidden), gw2(net.w2.size()), gb2(4);
        for (int iter = 0; iter < hyper.iterations; ++iter) {
            std::fill(gw1.begin(), gw1.end(), 0.0);
            std::fill(gb1.begin(), gb1.end(), 0.0);
            std::fill(gw2.begin(), gw2.end(), 0.0);
            std::fill(gb2.begin(), gb2.end(), 0.0);
            for (int c = 0; c < nd; ++c) {
                const double* xr = &x_std[static_cast<size_t>(c) * din];
                double* hr = &h[static_cast<size_t>(c) * hidden];
                for (int u = 0; u < hidden; ++u) {
                    double acc = net.b1[u];
                    const double* wrow = &net.w1[static_cast<size_t>(u) * din];
                    for (int d = 0; d < din; ++d) acc += wrow[d] * xr[d];
                    hr[u] = logistic(acc);
                }
                double logits[4], p[4];
                for (int j = 0; j < 4; ++j) {
                    double acc = net.b2[j];
                    const double* wrow = &net.w2[static_cast<size_t>(j) * hidden];
                    for (int u = 0; u < hidden; ++u) acc += wrow[u] * hr[u];
                    logits[j] = acc;
                }
                softmax4(logits, p);
                double dlogit[4];
                for (int j = 0; j < 4; ++j) dlogit[j] = weight[c] * (p[j] - target[c][j]);
                for (int j = 0; j < 4; ++j) {
                    double* grow = &gw2[static_cast<size_t>(j) * hidden];
                    for (int u = 0; u < hidden; ++u) grow[u] += dlogit[j] * hr[u];
                    gb2[j] += dlogit[j];
                }
                for (int u = 0; u < hidden; ++u) {
                    double back = 0.0;
                    for (int j = 0; j < 4; ++j)
                        back += dlogit[j] * net.w2[static_cast<size_t>(j) * hidden + u];
                    double dz = back * hr[u] * (1.0 - hr[u]);
                    double* grow = &gw1[static_cast<size_t>(u) * din];
                    for (int d = 0; d < din; ++d) grow[d] += dz * xr[d];
                    gb1[u] += dz;
                }
            }
            double lr = hyper.learning_rate;
            for (size_t k = 0; k < net.w1.size(); ++k) net.w1[k] -= lr * gw1[k];
            for (int u = 0; u < hidden; ++u) net.b1[u] -= lr * gb1[u];
            for (size_t k = 0; k < net.w2.size(); ++k) net.w2[k] -= lr * gw2[k];
            for (int j = 0; j < 4; ++j) net.b2[j] -= lr * gb2[j];
        }
        return net;
    };

    model.net_s_ = train(target_s, mix_seed(hyper.seed, 101, s, t));
    model.net_t_ = train(target_t, mix_seed(hyper.seed, 102, s, t));
    return model;
}

std::string CcpModel::dump_json() const {
    nlohmann::ordered_json j;
    j["method"] = hyper_.method == CcpMethod::Neural ? "neural" : "kernel";
    j["period_s"] = s_;
    j["period_t"] = t_;
    j["din"] = din_;
    j["hyper"] = {{"seed", hyper_.seed},
                  {"iterations", hyper_.iterations},
                  {"learning_rate", hyper_.learning_rate},
                  {"width_cap", hyper_.width_cap},
                  {"prob_floor", hyper_.prob_floor},
                  {"bandwidth_scale", hyper_.bandwidth_scale}};
    j["mu"] = mu_;
    j["sd"] = sd_;
    if (hyper_.method == CcpMethod::Neural) {
        for (auto [name, net] : {std::pair<const char*, const Net*>{"net_s", &net_s_},
                                 std::pair<const char*, const Net*>{"net_t", &net_t_}}) {
            j[name] = {{"hidden", net->hidden}, {"w1", net->w1},  {"b1", net->b1},
                       {"w2", net->w2},         {"b2", net->b2}};
        }
    } else {
        j["kernel"] = {{"nd", kernel_.nd},
                       {"rows", kernel_.rows},
                       {"weight", kernel_.weight},
                       {"bandwidth", kernel_.bandwidth},
                       {"target_s", kernel_.target_s},
                       {"target_t", kernel_.target_t},
                       {"global_s", kernel_.global_s},
                       {"global_t", kernel_.global_t}};
    }
    return j.dump();
}

CcpModel CcpModel::load_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CcpModel m;
    m.hyper_.method = j.at("method") == "neural" ? CcpMethod::Neural : CcpMethod::Kernel;
    m.s_ = j.at("period_s");
    m.t_ = j.at("period_t");
    m.din_ = j.at("din");
    const auto& h = j.at("hyper");
    m.hyper_.seed = h.at("seed");
    m.hyper_.iterations = h.at("iterations");
    m.hyper_.learning_rate = h.at("learning_rate");
    m.hyper_.width_cap = h.at("width_cap");
    m.hyper_.prob_floor = h.at("prob_floor");
    m.hyper_.bandwidth_scale = h.at("bandwidth_scale");
    m.mu_ = j.at("mu").get<std::vector<double>>();
    m.sd_ = j.at("sd").get<std::vector<double>>();
    if (m.hyper_.method == CcpMethod::Neural) {
        auto load_net = [&](const char* name) {
            Net net;
            const auto& nj = j.at(name);
            net.hidden = nj.at("hidden");
            net.din = m.din_;
            net.w1 = nj.at("w1").get<std::vector<double>>();
            net.b1 = nj.at("b1").get<std::vector<double>>();
            net.w2 = nj.at("w2").get<std::vector<double>>();
            net.b2 = nj.at("b2").get<std::vector<double>>();
            return net;
        };
        m.net_s_ = load_net("net_s");
        m.net_t_ = load_net("net_t");
    } else {
        const auto& kj = j.at("kernel");
        m.kernel_.nd = kj.at("nd");
        m.kernel_.rows = kj.at("rows").get<std::vector<double>>();
        m.kernel_.weight = kj.at("weight").get<std::vector<double>>();
        m.kernel_.bandwidth = kj.at("bandwidth").get<std::vector<double>>();
        m.kernel_.target_s = kj.at("target_s").get<std::vector<std::array<double, 4>>>();
        m.kernel_.target_t = kj.at("target_t").get<std::vector<std::array<double, 4>>>();
        m.kernel_.global_s = kj.at("global_s").get<std::array<double, 4>>();
        m.kernel_.global_t = kj.at("global_t").get<std::array<double, 4>>();
    }
    return m;
}

}  // namespace bundlechoice
