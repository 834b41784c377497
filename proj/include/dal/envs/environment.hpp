#pragma once
// Synthetic non-stationary environments.
//
// A fixed action set is drawn once (N(0,I) columns, rescaled into the action
// ball); the reward model then evolves per schedule. All environment
// randomness (model draws, schedule, contexts, reward noise) comes from the
// environment's own stream, and the per-round noise value is drawn before the
// action is known, so the realized environment is identical across policies
// sharing a seed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dal/envs/reward_model.hpp"
#include "dal/envs/schedule.hpp"
#include "dal/rng.hpp"
#include "dal/types.hpp"

namespace dal::envs {

struct NoiseSpec {
    enum class Kind { gaussian, bernoulli_of_mean };
    Kind kind = Kind::gaussian;
    double sigma2 = 0.01;
};

struct ContextPool {
    std::vector<Eigen::VectorXd> vectors;  // unit norm
    std::vector<double> cumulative;        // categorical CDF

    static ContextPool make(SplitMix64& rng, std::size_t n, int dim) {
        if (n < 1 || dim < 1) throw std::domain_error("ContextPool: invalid size");
        ContextPool pool;
        pool.vectors.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::VectorXd v = normal_vector(rng, dim);
            while (v.norm() == 0.0) v = normal_vector(rng, dim);
            pool.vectors.push_back(v / v.norm());
        }
        // Dirichlet(1,...,1) weights: normalized Exp(1) draws.
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& x : w) {
            x = -std::log1p(-uniform01(rng));
            total += x;
        }
        pool.cumulative.resize(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i] / total;
            pool.cumulative[i] = acc;
        }
        pool.cumulative.back() = 1.0;
        return pool;
    }

    int sample(SplitMix64& rng) const {
        const double u = uniform01(rng);
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        return static_cast<int>(it - cumulative.begin());
    }
};

enum class Variant { lb, glb, scb, kb, cb };

struct SyntheticEnvConfig {
    Variant variant = Variant::lb;
    long T = 0;
    int d = 10;
    std::size_t n_actions = 100;
    double S = 1.0;  // parameter norm (3 for scb)
    double L = 1.0;  // action ball radius (scaled by sqrt(d) for kb)
    double noise_sigma2 = 0.01;
    int kernel_terms = 200;
    double kernel_lengthscale = 0.2;
    std::size_t n_contexts = 1000;
    int context_dim = 10;
    bool cb_redraw_weights = true;  // redraw context distribution at changes
    ScheduleSpec schedule;
};

// Environment with oracle-known means. Implemented by the synthetic families
// and by matrix replay.
class MeanRewardEnv {
public:
    virtual ~MeanRewardEnv() = default;

    virtual long horizon() const = 0;
    virtual const ActionSet& actions() const = 0;
    virtual long n_contexts() const = 0;

    // Advances to round t (consecutive from 1) and returns its context.
    virtual StepContext begin_round(long t) = 0;
    virtual double true_mean(std::size_t action_id) const = 0;
    virtual double sample_reward(std::size_t action_id) = 0;

    virtual const std::vector<long>& change_points() const = 0;
    virtual bool rewards_binary() const = 0;

    std::pair<std::size_t, double> oracle_best() const {
        std::size_t best = 0;
        double best_v = true_mean(0);
        for (std::size_t a = 1; a < actions().size(); ++a) {
            const double v = true_mean(a);
            if (v > best_v) {
                best_v = v;
                best = a;
            }
        }
        return {best, best_v};
    }
};

class SyntheticEnv final : public MeanRewardEnv {
public:
    SyntheticEnv(SyntheticEnvConfig cfg, SplitMix64 rng)
        : cfg_(std::move(cfg)), rng_(rng) {
        if (cfg_.T < 1) throw std::domain_error("SyntheticEnv: T must be >= 1");
        if (cfg_.n_actions < 1)
            throw std::domain_error("SyntheticEnv: need at least one action");

        noise_.kind = (cfg_.variant == Variant::scb || cfg_.variant == Variant::cb)
                          ? NoiseSpec::Kind::bernoulli_of_mean
                          : NoiseSpec::Kind::gaussian;
        noise_.sigma2 = cfg_.noise_sigma2;

        make_actions();
        if (cfg_.variant == Variant::cb)
            pool_ = ContextPool::make(rng_, cfg_.n_contexts, cfg_.context_dim);

        model_ = draw_model();
        if (cfg_.schedule.kind == ScheduleSpec::Kind::drift_linear) {
            drift_final_ = draw_model();
        } else if (cfg_.schedule.kind == ScheduleSpec::Kind::piecewise) {
            if (cfg_.schedule.geometric)
                change_points_ =
                    sample_geometric_changepoints(cfg_.T, cfg_.schedule.xi, rng_);
            else
                change_points_ = cfg_.schedule.change_points;
            for (std::size_t i = 0; i < change_points_.size(); ++i) {
                if (change_points_[i] <= 1 || change_points_[i] > cfg_.T ||
                    (i > 0 && change_points_[i] <= change_points_[i - 1]))
                    throw std::domain_error(
                        "SyntheticEnv: change points must be strictly increasing in (1, T]");
            }
        }
        drift_init_ = model_;
    }

    long horizon() const override { return cfg_.T; }
    const ActionSet& actions() const override { return actions_; }
    long n_contexts() const override {
        return cfg_.variant == Variant::cb ? static_cast<long>(pool_.vectors.size())
                                           : 1L;
    }

    StepContext begin_round(long t) override {
        if (t != last_t_ + 1)
            throw std::logic_error("SyntheticEnv: rounds must advance in order");
        last_t_ = t;
        advance_model(t);
        StepContext ctx;
        if (cfg_.variant == Variant::cb) {
            ctx.context_id = pool_.sample(rng_);
            ctx.context = &pool_.vectors[static_cast<std::size_t>(ctx.context_id)];
            context_ = ctx.context;
        }
        // Per-round noise draw, shared by whichever action gets played.
        noise_value_ = noise_.kind == NoiseSpec::Kind::gaussian
                           ? std::sqrt(noise_.sigma2) * normal(rng_)
                           : uniform01(rng_);
        return ctx;
    }

    double true_mean(std::size_t action_id) const override {
        if (cfg_.schedule.kind == ScheduleSpec::Kind::drift_linear &&
            cfg_.variant == Variant::kb) {
            // Kernel drift interpolates function values, not parameters.
            const double w = drift_w_;
            return (1.0 - w) * model_mean(drift_init_, context_, actions_[action_id],
                                          action_id) +
                   w * model_mean(drift_final_, context_, actions_[action_id],
                                  action_id);
        }
        return model_mean(model_, context_, actions_[action_id], action_id);
    }

    double sample_reward(std::size_t action_id) override {
        const double mean = true_mean(action_id);
        if (noise_.kind == NoiseSpec::Kind::gaussian) return mean + noise_value_;
        return noise_value_ < mean ? 1.0 : 0.0;
    }

    const std::vector<long>& change_points() const override {
        return change_points_;
    }
    bool rewards_binary() const override {
        return noise_.kind == NoiseSpec::Kind::bernoulli_of_mean;
    }

    const RewardModel& model() const { return model_; }
    const ContextPool& context_pool() const { return pool_; }
    double noise_sigma2() const { return noise_.sigma2; }

private:
    void make_actions() {
        const bool cb = cfg_.variant == Variant::cb;
        if (cb) {
            // No arm features; identity embedding keeps the interface uniform.
            actions_.reserve(cfg_.n_actions);
            for (std::size_t a = 0; a < cfg_.n_actions; ++a) {
                Eigen::VectorXd e =
                    Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg_.n_actions));
                e[static_cast<Eigen::Index>(a)] = 1.0;
                actions_.push_back(std::move(e));
            }
            return;
        }
        const double radius = cfg_.variant == Variant::kb
                                  ? cfg_.L * std::sqrt(static_cast<double>(cfg_.d))
                                  : cfg_.L;
        actions_.reserve(cfg_.n_actions);
        double max_norm = 0.0;
        for (std::size_t a = 0; a < cfg_.n_actions; ++a) {
            Eigen::VectorXd v = normal_vector(rng_, cfg_.d);
            while (v.norm() == 0.0) v = normal_vector(rng_, cfg_.d);
            max_norm = std::max(max_norm, v.norm());
            actions_.push_back(std::move(v));
        }
        // One common rescale keeps the cloud's shape and puts it in the ball.
        for (auto& v : actions_) v *= radius / max_norm;
    }

    RewardModel draw_model() {
        switch (cfg_.variant) {
            case Variant::lb:
                return LinearModel{make_parameter(rng_, cfg_.d, cfg_.S)};
            case Variant::glb:
                return GlmModel{make_parameter(rng_, cfg_.d, cfg_.S)};
            case Variant::scb:
                return ScbModel{make_parameter(rng_, cfg_.d, cfg_.S)};
            case Variant::kb:
                return make_kernel_model(
                    rng_, cfg_.d, cfg_.L * std::sqrt(static_cast<double>(cfg_.d)),
                    cfg_.kernel_terms, cfg_.kernel_lengthscale);
            case Variant::cb:
                return make_contextual_model(rng_, cfg_.n_actions, cfg_.context_dim);
        }
        throw std::logic_error("SyntheticEnv: unknown variant");
    }

    void flip_model() {
        if (std::holds_alternative<LinearModel>(model_))
            std::get<LinearModel>(model_).theta *= -1.0;
        else if (std::holds_alternative<GlmModel>(model_))
            std::get<GlmModel>(model_).theta *= -1.0;
        else if (std::holds_alternative<ScbModel>(model_))
            std::get<ScbModel>(model_).theta *= -1.0;
        else if (std::holds_alternative<KernelModel>(model_))
            for (auto& w : std::get<KernelModel>(model_).weights) w = -w;
        else
            model_ = draw_model();  // no natural flip for the clipped family
    }

    void apply_change() {
        if (cfg_.schedule.change == ScheduleSpec::ChangeKind::flip) {
            flip_model();
            return;
        }
        model_ = draw_model();
        if (cfg_.variant == Variant::cb && cfg_.cb_redraw_weights)
            pool_ = ContextPool::make(rng_, cfg_.n_contexts, cfg_.context_dim);
    }

    void advance_model(long t) {
        switch (cfg_.schedule.kind) {
            case ScheduleSpec::Kind::none:
                return;
            case ScheduleSpec::Kind::piecewise:
                while (next_change_ < change_points_.size() &&
                       change_points_[next_change_] == t) {
                    apply_change();
                    ++next_change_;
                }
                return;
            case ScheduleSpec::Kind::drift_linear: {
                drift_w_ = static_cast<double>(t) / static_cast<double>(cfg_.T);
                interpolate_parametric(drift_w_);
                return;
            }
            case ScheduleSpec::Kind::drift_walk: {
                if (t == 1) return;
                walk_step();
                return;
            }
        }
    }

    void interpolate_parametric(double w) {
        auto lerp = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return ((1.0 - w) * a + w * b).eval();
        };
        if (std::holds_alternative<LinearModel>(model_))
            std::get<LinearModel>(model_).theta =
                lerp(std::get<LinearModel>(drift_init_).theta,
                     std::get<LinearModel>(drift_final_).theta);
        else if (std::holds_alternative<GlmModel>(model_))
            std::get<GlmModel>(model_).theta =
                lerp(std::get<GlmModel>(drift_init_).theta,
                     std::get<GlmModel>(drift_final_).theta);
        else if (std::holds_alternative<ScbModel>(model_))
            std::get<ScbModel>(model_).theta =
                lerp(std::get<ScbModel>(drift_init_).theta,
                     std::get<ScbModel>(drift_final_).theta);
        else if (std::holds_alternative<ContextualModel>(model_)) {
            auto& cur = std::get<ContextualModel>(model_);
            const auto& a = std::get<ContextualModel>(drift_init_);
            const auto& b = std::get<ContextualModel>(drift_final_);
            for (std::size_t i = 0; i < cur.arms.size(); ++i) {
                cur.arms[i].u = lerp(a.arms[i].u, b.arms[i].u);
                cur.arms[i].v = lerp(a.arms[i].v, b.arms[i].v);
                cur.arms[i].bias = (1.0 - w) * a.arms[i].bias + w * b.arms[i].bias;
                cur.arms[i].z_sig = (1.0 - w) * a.arms[i].z_sig + w * b.arms[i].z_sig;
                cur.arms[i].z_sin = (1.0 - w) * a.arms[i].z_sin + w * b.arms[i].z_sin;
                cur.arms[i].z_xpr = (1.0 - w) * a.arms[i].z_xpr + w * b.arms[i].z_xpr;
            }
        }
        // kernel drift handled in true_mean
    }

    // theta <- theta + zeta, zeta uniform in the walk_delta ball, rejected
    // (and redrawn) whenever the step would leave the S-ball.
    void walk_step() {
        Eigen::VectorXd* theta = nullptr;
        if (std::holds_alternative<LinearModel>(model_))
            theta = &std::get<LinearModel>(model_).theta;
        else if (std::holds_alternative<GlmModel>(model_))
            theta = &std::get<GlmModel>(model_).theta;
        else if (std::holds_alternative<ScbModel>(model_))
            theta = &std::get<ScbModel>(model_).theta;
        else
            throw std::domain_error(
                "SyntheticEnv: random-walk drift needs a parametric model");
        if (cfg_.schedule.walk_delta <= 0.0) return;
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const Eigen::VectorXd zeta =
                uniform_ball(rng_, cfg_.d, cfg_.schedule.walk_delta);
            if ((*theta + zeta).norm() <= cfg_.S) {
                *theta += zeta;
                return;
            }
        }
        throw std::runtime_error("SyntheticEnv: walk rejection did not terminate");
    }

    SyntheticEnvConfig cfg_;
    SplitMix64 rng_;
    NoiseSpec noise_;
    ActionSet actions_;
    ContextPool pool_;
    RewardModel model_;
    RewardModel drift_init_, drift_final_;
    std::vector<long> change_points_;
    std::size_t next_change_ = 0;
    const Eigen::VectorXd* context_ = nullptr;
    double noise_value_ = 0.0;
    double drift_w_ = 0.0;
    long last_t_ = 0;
};

}  // namespace dal::envs
