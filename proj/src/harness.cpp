#include "bundlechoice/harness.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <mutex>
#include <optional>
#include <stdexcept>

#include "bundlechoice/io.hpp"
#include "bundlechoice/parallel.hpp"
#include "bundlechoice/rng.hpp"
#include "bundlechoice/sharpness.hpp"

#include "json.hpp"

namespace bundlechoice {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json theta_to_json(const Theta& theta) {
    return ordered_json{{"beta", theta.beta}, {"gamma", theta.gamma}};
}

Theta theta_from_json(const nlohmann::json& j) {
    Theta th;
    th.beta = j.at("beta").get<Vec>();
    th.gamma = j.at("gamma").get<Vec>();
    return th;
}

ordered_json dgp_to_json(const DgpConfig& dgp) {
    ordered_json j;
    j["design"] = dgp.design;
    j["n"] = dgp.n;
    j["t_len"] = dgp.t_len;
    j["d_x"] = dgp.d_x;
    j["d_z"] = dgp.d_z;
    j["scheme"] = dgp.covariate_scheme == CovariateScheme::Gaussian ? "gaussian" : "bounded";
    j["theta_true"] = theta_to_json(dgp.theta_true);
    j["seed"] = dgp.seed;
    j["x_variance_dx"] = dgp.x_variance_dx;
    if (dgp.latent_gamma)
        j["latent_gamma"] = {{"g_plus", dgp.latent_gamma->g_plus},
                             {"g_minus", dgp.latent_gamma->g_minus},
                             {"eta", dgp.latent_gamma->eta}};
    return j;
}

DgpConfig dgp_from_json(const nlohmann::json& j) {
    DgpConfig dgp;
    dgp.design = j.value("design", 1);
    dgp.n = j.value("n", 0);
    dgp.t_len = j.value("t_len", 2);
    dgp.d_x = j.value("d_x", 2);
    dgp.d_z = j.value("d_z", 2);
    std::string scheme = j.value("scheme", "gaussian");
    if (scheme != "gaussian" && scheme != "bounded")
        throw std::invalid_argument("config: scheme must be gaussian or bounded");
    dgp.covariate_scheme =
        scheme == "gaussian" ? CovariateScheme::Gaussian : CovariateScheme::Bounded;
    if (j.contains("theta_true")) dgp.theta_true = theta_from_json(j.at("theta_true"));
    else dgp.theta_true = Theta{Vec(dgp.d_x, 1.0), Vec(dgp.d_z, 1.0), false};
    dgp.seed = j.value("seed", uint64_t{0});
    dgp.x_variance_dx = j.value("x_variance_dx", true);
    if (j.contains("latent_gamma")) {
        LatentGammaSpec lg;
        lg.g_plus = j.at("latent_gamma").value("g_plus", 1.0);
        lg.g_minus = j.at("latent_gamma").value("g_minus", 1.0);
        lg.eta = j.at("latent_gamma").value("eta", 0.5);
        dgp.latent_gamma = lg;
    }
    return dgp;
}

struct EstimatorOutput {
    Vec beta;                  // normalized
    std::optional<Vec> gamma;  // normalized; absent for beta-only estimators
};

EstimatorOutput run_estimator(const std::string& tag, const ObservationPanel& panel,
                              uint64_t rep_seed, int sim_draws) {
    if (tag == "two-step") {
        TwoStepOptions opt;
        opt.ccp.seed = mix_seed(rep_seed, 21);
        opt.seed = mix_seed(rep_seed, 22);
        PointEstimate pe = estimate_two_step(panel, opt);
        return {pe.theta_hat.beta, pe.theta_hat.gamma};
    }
    if (tag == "msm") {
        ParametricEstimate pe = estimate_msm_parametric(panel, sim_draws, mix_seed(rep_seed, 23));
        return {pe.theta_hat.beta, pe.theta_hat.gamma};
    }
    if (tag == "fe-logit") {
        PointEstimate pe = estimate_fe_logit(panel);
        return {pe.theta_hat.beta, std::nullopt};
    }
    if (tag == "semi-nb") {
        SemiNoBundleOptions opt;
        opt.two_step.ccp.seed = mix_seed(rep_seed, 24);
        opt.two_step.seed = mix_seed(rep_seed, 25);
        PointEstimate pe = estimate_semi_nobundle(panel, opt);
        return {pe.theta_hat.beta, std::nullopt};
    }
    throw std::invalid_argument("unknown estimator tag: " + tag);
}

}  // namespace

void RunConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
}

std::string run_config_to_json(const RunConfig& c) {
    ordered_json j;
    j["task"] = c.task;
    j["dgp"] = dgp_to_json(c.dgp);
    j["estimators"] = c.estimators;
    j["replications"] = c.replications;
    j["base_seed"] = c.base_seed;
    j["out"] = c.out;
    j["data"] = c.data_path;
    j["instance"] = c.instance_path;
    j["method"] = c.method;
    j["grid"] = {{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"points", c.grid.points}};
    j["hypothesis"] = c.hypothesis;
    j["alpha"] = c.alpha;
    j["sim_draws"] = c.sim_draws;
    j["err_draws"] = c.err_draws;
    j["timing"] = c.timing;
    return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunConfig c;
    c.task = j.value("task", "montecarlo");
    if (j.contains("dgp")) c.dgp = dgp_from_json(j.at("dgp"));
    if (j.contains("estimators")) c.estimators = j.at("estimators").get<std::vector<std::string>>();
    c.replications = j.value("replications", 1);
    c.base_seed = j.value("base_seed", uint64_t{0});
    c.out = j.value("out", std::string{});
    c.data_path = j.value("data", std::string{});
    c.instance_path = j.value("instance", std::string{});
    c.method = j.value("method", "two-step");
    if (j.contains("grid")) {
        c.grid.lo = j.at("grid").value("lo", -5.0);
        c.grid.hi = j.at("grid").value("hi", 5.0);
        c.grid.points = j.at("grid").value("points", 100);
    }
    c.hypothesis = j.value("hypothesis", "comp");
    c.alpha = j.value("alpha", 0.05);
    c.sim_draws = j.value("sim_draws", 100);
    c.err_draws = j.value("err_draws", 10000);
    c.timing = j.value("timing", false);
    return c;
}

MonteCarloResult run_monte_carlo(const RunConfig& config) {
    config.dgp.validate();
    const int b_total = config.replications;

    struct RepResult {
        std::vector<std::optional<EstimatorOutput>> by_estimator;
        std::string error;
    };
    std::vector<RepResult> results(b_total);
    const auto& tags = config.estimators;

    std::mutex log_mutex;
    parallel_for(b_total, [&](int b) {
        RepResult& rr = results[b];
        rr.by_estimator.resize(tags.size());
        uint64_t rep_seed = mix_seed(config.base_seed, static_cast<uint64_t>(b));
        DgpConfig dgp = config.dgp;
        dgp.seed = rep_seed;
        SimulatedPanel sim = simulate(dgp);
        for (size_t e = 0; e < tags.size(); ++e) {
            try {
                rr.by_estimator[e] = run_estimator(tags[e], sim.panel, rep_seed, config.sim_draws);
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "[montecarlo] replication " << b << " estimator " << tags[e]
                          << " failed: " << ex.what() << "\n";
            }
        }
    });

    Theta truth = normalize(config.dgp.theta_true);
    MonteCarloResult out;
    for (size_t e = 0; e < tags.size(); ++e) {
        std::vector<Vec> betas, gammas;
        int failures = 0;
        for (int b = 0; b < b_total; ++b) {
            const auto& res = results[b].by_estimator[e];
            if (!res) {
                ++failures;
                continue;
            }
            betas.push_back(res->beta);
            if (res->gamma) gammas.push_back(*res->gamma);
        }
        if (!betas.empty()) {
            MetricsRow row = metrics_block(betas, truth.beta, tags[e], "beta");
            row.design = config.dgp.design;
            row.n = config.dgp.n;
            row.t_len = config.dgp.t_len;
            row.failures = failures;
            out.rows.push_back(row);
        }
        if (!gammas.empty()) {
            MetricsRow row = metrics_block(gammas, truth.gamma, tags[e], "gamma");
            row.design = config.dgp.design;
            row.n = config.dgp.n;
            row.t_len = config.dgp.t_len;
            row.failures = failures;
            row.err = err_metric(gammas, truth.gamma, config.dgp.covariate_scheme, config.dgp.d_z,
                                 config.err_draws, mix_seed(config.base_seed, 9000));
            out.rows.push_back(row);
        }
    }
    return out;
}

std::string MonteCarloResult::to_json() const {
    ordered_json rows_json = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["estimator"] = r.estimator;
        j["parameter"] = r.parameter;
        j["design"] = r.design;
        j["n"] = r.n;
        j["t_len"] = r.t_len;
        if (r.err) j["err"] = *r.err;
        else j["err"] = nullptr;
        j["sd"] = r.sd;
        j["rmse"] = r.rmse;
        j["mad"] = r.mad;
        j["replications"] = r.replications;
        j["failures"] = r.failures;
        rows_json.push_back(j);
    }
    return ordered_json{{"rows", rows_json}}.dump(2);
}

std::string MonteCarloResult::to_csv() const {
    std::string s = "estimator,parameter,design,n,t_len,err,sd,rmse,mad,replications,failures\n";
    char buf[64];
    for (const auto& r : rows) {
        s += r.estimator + "," + r.parameter + "," + std::to_string(r.design) + "," +
             std::to_string(r.n) + "," + std::to_string(r.t_len) + ",";
        if (r.err) {
            std::snprintf(buf, sizeof(buf), "%.17g", *r.err);
            s += buf;
        }
        auto add = [&](double v) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            s += buf;
        };
        add(r.sd);
        add(r.rmse);
        add(r.mad);
        s += "," + std::to_string(r.replications) + "," + std::to_string(r.failures) + "\n";
    }
    return s;
}

namespace {

std::string task_estimate(const RunConfig& config) {
    ObservationPanel panel = panel_from_csv(read_file(config.data_path));
    auto start = std::chrono::steady_clock::now();

    EstimatorOutput res;
    double crit = 0.0;
    if (config.method == "two-step") {
        TwoStepOptions opt;
        opt.ccp.seed = mix_seed(config.base_seed, 21);
        opt.seed = mix_seed(config.base_seed, 22);
        PointEstimate pe = estimate_two_step(panel, opt);
        res = {pe.theta_hat.beta, pe.theta_hat.gamma};
        crit = pe.criterion_value;
    } else {
        res = run_estimator(config.method, panel, config.base_seed, config.sim_draws);
    }
    auto stop = std::chrono::steady_clock::now();
    long ms = config.timing
                  ? std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count()
                  : 0;
    ordered_json j;
    j["method"] = config.method;
    j["theta"] = ordered_json{{"beta", res.beta},
                              {"gamma", res.gamma ? ordered_json(*res.gamma) : ordered_json()}};
    j["criterion"] = crit;
    j["seed"] = config.base_seed;
    j["runtime_ms"] = ms;
    return j.dump(2);
}

std::string task_set(const RunConfig& config) {
    ObservationPanel panel = panel_from_csv(read_file(config.data_path));
    CcpHyper hyper;
    hyper.seed = mix_seed(config.base_seed, 21);
    SetEstimate est = estimate_set(panel, config.grid, hyper);
    int accepted = 0;
    for (bool a : est.accepted) accepted += a ? 1 : 0;
    ordered_json j;
    j["grid"] = {{"lo", est.grid.lo}, {"hi", est.grid.hi}, {"points", est.grid.points}};
    j["free_dims"] = est.free_dims;
    j["c_hat"] = est.c_hat;
    j["a_n"] = est.a_n;
    j["min_criterion"] = est.min_criterion;
    j["accepted_count"] = accepted;
    j["free_lower"] = est.free_lower;
    j["free_upper"] = est.free_upper;
    j["seed"] = config.base_seed;
    return j.dump(2);
}

std::string task_test(const RunConfig& config) {
    ObservationPanel panel = panel_from_csv(read_file(config.data_path));
    TestOptions opt;
    opt.alpha = config.alpha;
    opt.seed = config.base_seed;
    ZCell all;
    TestResult res = config.hypothesis == "sub" ? test_substitutability(panel, all, opt)
                                                : test_complementarity(panel, all, opt);
    ordered_json j;
    j["hypothesis"] = res.hypothesis;
    j["statistic"] = res.statistic;
    j["critical_value"] = res.critical_value;
    j["alpha"] = res.alpha;
    j["reject"] = res.reject;
    j["n_cells"] = res.cells_used;
    j["seed"] = res.seed;
    return j.dump(2);
}

std::string task_bounds(const RunConfig& config) {
    ObservationPanel panel = panel_from_csv(read_file(config.data_path));
    EtaBoundsOptions opt;
    opt.ccp.seed = mix_seed(config.base_seed, 21);
    EtaBounds eb = eta_bounds(panel, opt);
    ordered_json j;
    j["lower"] = eb.lower;
    j["upper"] = eb.upper;
    j["lower_trivial"] = eb.lower_trivial;
    j["upper_trivial"] = eb.upper_trivial;
    j["valid"] = eb.valid;
    j["seed"] = config.base_seed;
    return j.dump(2);
}

std::string task_rationalize(const RunConfig& config) {
    nlohmann::json inst = nlohmann::json::parse(read_file(config.instance_path));
    Theta theta = theta_from_json(inst.at("theta"));
    std::vector<CcpPair> pairs;
    for (const auto& pj : inst.at("pairs")) {
        CcpPair p;
        auto xs = pj.at("x_s");
        auto xt = pj.at("x_t");
        p.x_s = {xs.at(0).get<Vec>(), xs.at(1).get<Vec>()};
        p.x_t = {xt.at(0).get<Vec>(), xt.at(1).get<Vec>()};
        p.z = pj.at("z").get<Vec>();
        p.p_s = pj.at("P_s").get<std::array<double, 4>>();
        p.p_t = pj.at("P_t").get<std::array<double, 4>>();
        pairs.push_back(std::move(p));
    }
    RationalizeReport rep = rationalizable(pairs, theta);
    ordered_json j;
    j["rationalizable"] = rep.rationalizable;
    j["first_infeasible_pair"] = rep.first_infeasible_pair;
    return j.dump(2);
}

}  // namespace

std::string run_task(const RunConfig& config_in) {
    RunConfig config = config_in;
    if (config.dgp.theta_true.beta.empty())
        config.dgp.theta_true = Theta{Vec(config.dgp.d_x, 1.0), Vec(config.dgp.d_z, 1.0), false};
    std::string payload;
    if (config.task == "simulate") {
        SimulatedPanel sim = simulate(config.dgp);
        std::string csv = panel_to_csv(sim.panel);
        if (config.out.empty()) throw std::invalid_argument("simulate: --out is required");
        write_file(config.out, csv);
        ordered_json j;
        j["task"] = "simulate";
        j["n"] = sim.panel.n;
        j["t_len"] = sim.panel.t_len;
        j["out"] = config.out;
        j["seed"] = config.dgp.seed;
        payload = j.dump(2);
    } else if (config.task == "estimate") {
        payload = task_estimate(config);
    } else if (config.task == "set") {
        payload = task_set(config);
    } else if (config.task == "test") {
        payload = task_test(config);
    } else if (config.task == "bounds") {
        payload = task_bounds(config);
    } else if (config.task == "montecarlo") {
        MonteCarloResult res = run_monte_carlo(config);
        payload = res.to_json();
        if (!config.out.empty()) {
            std::string csv_path = config.out;
            auto dot = csv_path.rfind('.');
            if (dot != std::string::npos) csv_path = csv_path.substr(0, dot);
            csv_path += ".csv";
            write_file(csv_path, res.to_csv());
        }
    } else if (config.task == "rationalize") {
        payload = task_rationalize(config);
    } else {
        throw std::invalid_argument("unknown task: " + config.task);
    }
    if (!config.out.empty() && config.task != "simulate") write_file(config.out, payload);
    return payload;
}

}  // namespace bundlechoice
