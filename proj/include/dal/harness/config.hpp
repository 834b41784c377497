#pragma once
// Flat key=value experiment configs with dotted keys, e.g.
//
//   env.variant = lb
//   dal.delta_F = 0.001
//
// '#' starts a comment; blank lines are skipped. Unknown keys are rejected so
// typos fail loudly. Numeric values of 0 mean "derive the default" where the
// comment says so.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dal/agent.hpp"
#include "dal/covering.hpp"
#include "dal/envs/environment.hpp"

namespace dal::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PolicyKind {
    linucb,
    glmucb,
    gpucb,
    squarecb,
    ucb1,
    ducb,
    uniform,
    oracle
};

enum class CoverModeChoice { automatic, linear, kernel, full };
enum class TriState { automatic, on, off };

struct ExperimentConfig {
    // run
    long T = 10000;
    int trials = 15;
    std::uint64_t base_seed = 1;
    int parallelism = 1;
    long thin = 1;

    // env
    envs::SyntheticEnvConfig env;
    std::string replay_path;
    bool replay_logged = false;
    bool replay_bernoulli = false;  // matrix replay reward draw
    bool is_replay = false;

    // algo
    PolicyKind policy = PolicyKind::linucb;
    double lambda = 1.0;
    double delta = 0.0;        // 0 -> 1/T
    double fixed_beta = 0.0;   // 0 -> confidence schedule
    double width_scale = 1.0;  // glmucb
    double lengthscale = 0.0;  // 0 -> env kernel lengthscale
    double gp_delta = 0.1;
    long gp_max_points = 2000;
    double lr = 0.05;           // squarecb
    double gamma_scale = 1.0;   // squarecb
    double gamma = 0.99;        // ducb discount
    double ucb_xi = 2.0;

    // dal
    bool dal_enabled = true;
    DetectorKind detector = DetectorKind::glr;
    TriState family = TriState::automatic;  // on = bernoulli, off = gaussian
    double dal_sigma2 = 0.0;                // 0 -> env noise variance, else 0.25
    double delta_F = 0.0;                   // 0 -> 1/T
    double delta_D = 0.0;                   // 0 -> 1/T
    long max_history = 0;
    int scan_stride = 1;
    TriState monitor_all = TriState::automatic;  // auto -> on (finite actions)

    // cover
    CoverModeChoice cover_mode = CoverModeChoice::automatic;
    double cover_tol = 1e-8;
    double cover_R = 0.0;  // 0 -> normalized domain edge
    double cover_p = 0.0;
    double cover_q = 0.5;
    double cover_C = 1.0;
    double cover_gamma_T = 0.0;  // 0 -> log(T)^(d+1) proxy
};

namespace internal {

class KeyValues {
public:
    void insert(const std::string& key, const std::string& value, long line) {
        if (map_.count(key))
            throw ConfigError("duplicate config key '" + key + "' (line " +
                              std::to_string(line) + ")");
        map_[key] = value;
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return map_.count(key) > 0;
    }

    std::string str(const std::string& key, const std::string& dflt) {
        used_.insert(key);
        const auto it = map_.find(key);
        return it == map_.end() ? dflt : it->second;
    }

    double real(const std::string& key, double dflt) {
        used_.insert(key);
        const auto it = map_.find(key);
        if (it == map_.end()) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' expects a number, got '" +
                              it->second + "'");
        }
    }

    long integer(const std::string& key, long dflt) {
        const double v = real(key, static_cast<double>(dflt));
        const long r = static_cast<long>(v);
        if (static_cast<double>(r) != v)
            throw ConfigError("config key '" + key + "' expects an integer");
        return r;
    }

    bool boolean(const std::string& key, bool dflt) {
        used_.insert(key);
        const auto it = map_.find(key);
        if (it == map_.end()) return dflt;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config key '" + key + "' expects true or false");
    }

    std::vector<long> integer_list(const std::string& key) {
        used_.insert(key);
        const auto it = map_.find(key);
        std::vector<long> out;
        if (it == map_.end()) return out;
        std::istringstream in(it->second);
        std::string tok;
        while (std::getline(in, tok, ';')) {
            try {
                out.push_back(std::stol(tok));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key +
                                  "' expects semicolon-separated integers");
            }
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : map_)
            if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }

private:
    std::map<std::string, std::string> map_;
    std::set<std::string> used_;
};

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline KeyValues read_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not key = value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              " has an empty key or value");
        kv.insert(key, value, line_no);
    }
    return kv;
}

template <typename Enum>
Enum parse_choice(const std::string& key, const std::string& value,
                  const std::vector<std::pair<std::string, Enum>>& table) {
    for (const auto& [name, v] : table)
        if (value == name) return v;
    std::string names;
    for (const auto& [name, v] : table)
        names += (names.empty() ? "" : ", ") + name;
    throw ConfigError("config key '" + key + "' must be one of {" + names +
                      "}, got '" + value + "'");
}

}  // namespace internal

inline ExperimentConfig parse_config_stream(std::istream& in) {
    using internal::parse_choice;
    auto kv = internal::read_key_values(in);
    ExperimentConfig cfg;

    cfg.T = kv.integer("T", cfg.T);
    cfg.trials = static_cast<int>(kv.integer("trials", cfg.trials));
    cfg.base_seed = static_cast<std::uint64_t>(kv.integer("base_seed", 1));
    cfg.parallelism = static_cast<int>(kv.integer("parallelism", cfg.parallelism));
    cfg.thin = kv.integer("thin", cfg.thin);

    const std::string variant = kv.str("env.variant", "lb");
    if (variant == "replay_matrix" || variant == "replay_logged") {
        cfg.is_replay = true;
        cfg.replay_logged = variant == "replay_logged";
        cfg.replay_path = kv.str("env.replay_path", "");
        if (cfg.replay_path.empty())
            throw ConfigError("replay variants require env.replay_path");
        cfg.replay_bernoulli =
            kv.str("env.rewards", "gaussian") == "bernoulli";
    } else {
        cfg.env.variant = parse_choice<envs::Variant>(
            "env.variant", variant,
            {{"lb", envs::Variant::lb},
             {"glb", envs::Variant::glb},
             {"scb", envs::Variant::scb},
             {"kb", envs::Variant::kb},
             {"cb", envs::Variant::cb}});
    }
    cfg.env.T = cfg.T;
    cfg.env.d = static_cast<int>(kv.integer("env.d", cfg.env.d));
    cfg.env.n_actions =
        static_cast<std::size_t>(kv.integer("env.n_actions", 100));
    const double default_S = cfg.env.variant == envs::Variant::scb ? 3.0 : 1.0;
    cfg.env.S = kv.real("env.S", default_S);
    cfg.env.L = kv.real("env.L", cfg.env.L);
    cfg.env.noise_sigma2 = kv.real("env.noise_sigma2", cfg.env.noise_sigma2);
    cfg.env.kernel_terms =
        static_cast<int>(kv.integer("env.kernel_terms", cfg.env.kernel_terms));
    cfg.env.kernel_lengthscale =
        kv.real("env.kernel_lengthscale", cfg.env.kernel_lengthscale);
    cfg.env.n_contexts =
        static_cast<std::size_t>(kv.integer("env.n_contexts", 1000));
    cfg.env.context_dim =
        static_cast<int>(kv.integer("env.context_dim", cfg.env.context_dim));
    cfg.env.cb_redraw_weights =
        kv.boolean("env.cb_redraw_weights", cfg.env.cb_redraw_weights);

    const std::string sched = kv.str("env.schedule", "none");
    cfg.env.schedule.kind = parse_choice<envs::ScheduleSpec::Kind>(
        "env.schedule", sched,
        {{"none", envs::ScheduleSpec::Kind::none},
         {"ps", envs::ScheduleSpec::Kind::piecewise},
         {"drift_linear", envs::ScheduleSpec::Kind::drift_linear},
         {"drift_walk", envs::ScheduleSpec::Kind::drift_walk}});
    const std::string ps_mode = kv.str("env.ps_mode", "geometric");
    parse_choice<int>("env.ps_mode", ps_mode, {{"geometric", 0}, {"fixed", 1}});
    cfg.env.schedule.geometric = ps_mode == "geometric";
    cfg.env.schedule.xi = kv.real("env.ps_xi", cfg.env.schedule.xi);
    cfg.env.schedule.change_points = kv.integer_list("env.ps_points");
    if (!cfg.env.schedule.change_points.empty()) cfg.env.schedule.geometric = false;
    cfg.env.schedule.change = parse_choice<envs::ScheduleSpec::ChangeKind>(
        "env.ps_change", kv.str("env.ps_change", "redraw"),
        {{"redraw", envs::ScheduleSpec::ChangeKind::redraw},
         {"flip", envs::ScheduleSpec::ChangeKind::flip}});
    cfg.env.schedule.walk_delta = kv.real("env.walk_delta", 0.0);

    cfg.policy = parse_choice<PolicyKind>(
        "algo.policy", kv.str("algo.policy", "linucb"),
        {{"linucb", PolicyKind::linucb},
         {"glmucb", PolicyKind::glmucb},
         {"gpucb", PolicyKind::gpucb},
         {"squarecb", PolicyKind::squarecb},
         {"ucb1", PolicyKind::ucb1},
         {"ducb", PolicyKind::ducb},
         {"uniform", PolicyKind::uniform},
         {"oracle", PolicyKind::oracle}});
    cfg.lambda = kv.real("algo.lambda", cfg.lambda);
    cfg.delta = kv.real("algo.delta", cfg.delta);
    cfg.fixed_beta = kv.real("algo.fixed_beta", cfg.fixed_beta);
    cfg.width_scale = kv.real("algo.width_scale", cfg.width_scale);
    cfg.lengthscale = kv.real("algo.lengthscale", cfg.lengthscale);
    cfg.gp_delta = kv.real("algo.gp_delta", cfg.gp_delta);
    cfg.gp_max_points = kv.integer("algo.gp_max_points", cfg.gp_max_points);
    cfg.lr = kv.real("algo.lr", cfg.lr);
    cfg.gamma_scale = kv.real("algo.gamma_scale", cfg.gamma_scale);
    cfg.gamma = kv.real("algo.gamma", cfg.gamma);
    cfg.ucb_xi = kv.real("algo.xi", cfg.ucb_xi);

    cfg.dal_enabled = kv.boolean("dal.enabled", cfg.dal_enabled);
    cfg.detector = parse_choice<DetectorKind>(
        "dal.detector", kv.str("dal.detector", "glr"),
        {{"glr", DetectorKind::glr},
         {"never", DetectorKind::never_fire},
         {"oracle", DetectorKind::oracle}});
    cfg.family = parse_choice<TriState>(
        "dal.family", kv.str("dal.family", "auto"),
        {{"auto", TriState::automatic},
         {"bernoulli", TriState::on},
         {"gaussian", TriState::off}});
    cfg.dal_sigma2 = kv.real("dal.sigma2", cfg.dal_sigma2);
    cfg.delta_F = kv.real("dal.delta_F", cfg.delta_F);
    cfg.delta_D = kv.real("dal.delta_D", cfg.delta_D);
    cfg.max_history = kv.integer("dal.max_history", cfg.max_history);
    cfg.scan_stride = static_cast<int>(kv.integer("dal.scan_stride", cfg.scan_stride));
    cfg.monitor_all = parse_choice<TriState>(
        "dal.monitor_all", kv.str("dal.monitor_all", "auto"),
        {{"auto", TriState::automatic},
         {"true", TriState::on},
         {"false", TriState::off}});

    cfg.cover_mode = parse_choice<CoverModeChoice>(
        "cover.mode", kv.str("cover.mode", "auto"),
        {{"auto", CoverModeChoice::automatic},
         {"linear", CoverModeChoice::linear},
         {"kernel", CoverModeChoice::kernel},
         {"full", CoverModeChoice::full}});
    cfg.cover_tol = kv.real("cover.tol", cfg.cover_tol);
    cfg.cover_R = kv.real("cover.R", cfg.cover_R);
    cfg.cover_p = kv.real("cover.p", cfg.cover_p);
    cfg.cover_q = kv.real("cover.q", cfg.cover_q);
    cfg.cover_C = kv.real("cover.C", cfg.cover_C);
    cfg.cover_gamma_T = kv.real("cover.gamma_T", cfg.cover_gamma_T);

    kv.reject_unknown();

    // validation
    if (cfg.T < 3) throw ConfigError("T must be at least 3");
    if (cfg.trials < 1) throw ConfigError("trials must be positive");
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be positive");
    if (cfg.thin < 1) throw ConfigError("thin must be positive");
    if (cfg.env.d < 1) throw ConfigError("env.d must be positive");
    if (cfg.env.n_actions < 1) throw ConfigError("env.n_actions must be positive");
    if (!(cfg.env.S > 0.0) || !(cfg.env.L > 0.0))
        throw ConfigError("env.S and env.L must be positive");
    if (cfg.env.noise_sigma2 < 0.0)
        throw ConfigError("env.noise_sigma2 must be nonnegative");
    if (cfg.env.schedule.kind == envs::ScheduleSpec::Kind::drift_walk &&
        !(cfg.env.schedule.walk_delta > 0.0))
        throw ConfigError("drift_walk requires env.walk_delta > 0");
    if (cfg.env.schedule.kind == envs::ScheduleSpec::Kind::piecewise &&
        !cfg.env.schedule.geometric && cfg.env.schedule.change_points.empty())
        throw ConfigError("fixed ps schedule requires env.ps_points");
    if (cfg.delta_F < 0.0 || cfg.delta_F >= 1.0)
        throw ConfigError("dal.delta_F must lie in [0, 1)");
    if (cfg.scan_stride < 1) throw ConfigError("dal.scan_stride must be positive");
    if (cfg.max_history < 0) throw ConfigError("dal.max_history must be >= 0");
    if (!(cfg.lambda > 0.0)) throw ConfigError("algo.lambda must be positive");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
        throw ConfigError("algo.gamma must lie in (0, 1]");
    if (cfg.is_replay && cfg.policy == PolicyKind::oracle && cfg.replay_logged)
        throw ConfigError("oracle policy is undefined for logged replay");
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config_stream(in);
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    return parse_config_stream(in);
}

}  // namespace dal::harness
