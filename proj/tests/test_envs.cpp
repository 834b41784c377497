#include <catch2/catch_amalgamated.hpp>

#include "dal/envs/environment.hpp"
#include "dal/envs/replay.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace envs = dal::envs;
using dal::SplitMix64;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

envs::SyntheticEnvConfig base_lb(long T) {
    envs::SyntheticEnvConfig cfg;
    cfg.variant = envs::Variant::lb;
    cfg.T = T;
    cfg.d = 4;
    cfg.n_actions = 12;
    return cfg;
}

}  // namespace

TEST_CASE("Geometric change points degenerate at xi zero", "[envs][schedule]") {
    SplitMix64 rng(1);
    const auto pts = envs::sample_geometric_changepoints(10, 0.0, rng);
    REQUIRE(pts == std::vector<long>{2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("Geometric change points are strictly increasing in range",
          "[envs][schedule]") {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pts = envs::sample_geometric_changepoints(5000, 0.6, rng);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            REQUIRE(pts[i] > 1);
            REQUIRE(pts[i] <= 5000);
            if (i > 0) REQUIRE(pts[i] > pts[i - 1]);
        }
    }
    REQUIRE_THROWS_AS(envs::sample_geometric_changepoints(0, 0.6, rng),
                      std::domain_error);
    REQUIRE_THROWS_AS(envs::sample_geometric_changepoints(10, -0.1, rng),
                      std::domain_error);
}

TEST_CASE("Geometric change count concentrates near T^(1-xi)", "[envs][schedule]") {
    SplitMix64 rng(3);
    const long T = 2000;
    const double xi = 0.6;
    double total = 0.0;
    const int seeds = 300;
    for (int s = 0; s < seeds; ++s)
        total += static_cast<double>(
            envs::sample_geometric_changepoints(T, xi, rng).size());
    const double mean = total / seeds;
    const double expected = std::pow(static_cast<double>(T), 1.0 - xi);
    REQUIRE(mean > 0.9 * expected);
    REQUIRE(mean < 1.1 * expected);
}

TEST_CASE("Parameters land exactly on the S-sphere", "[envs][model]") {
    SplitMix64 rng(4);
    for (double S : {1.0, 3.0}) {
        const Eigen::VectorXd theta = envs::make_parameter(rng, 10, S);
        REQUIRE(theta.norm() == Catch::Approx(S).margin(1e-12));
    }
    REQUIRE_THROWS_AS(envs::make_parameter(rng, 0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(envs::make_parameter(rng, 3, 0.0), std::domain_error);
}

TEST_CASE("Kernel model evaluates the weighted kernel sum", "[envs][model]") {
    envs::KernelModel m;
    m.lengthscale = 0.2;
    Eigen::VectorXd x1(2), x2(2);
    x1 << 0.0, 0.0;
    x2 << 1.0, 0.0;
    m.centers = {x1, x2};
    m.weights = {0.5, -0.25};
    // f(0,0) = 0.5 - 0.25 exp(-1 / (2 * 0.04))
    REQUIRE(m.evaluate(x1) ==
            Catch::Approx(0.5 - 0.25 * std::exp(-12.5)).margin(1e-15));
    Eigen::VectorXd mid(2);
    mid << 0.5, 0.0;
    const double k = std::exp(-0.25 / 0.08);
    REQUIRE(m.evaluate(mid) == Catch::Approx(0.5 * k - 0.25 * k).margin(1e-15));

    SplitMix64 rng(5);
    const envs::KernelModel drawn = envs::make_kernel_model(rng, 3, 1.5, 50, 0.3);
    REQUIRE(drawn.centers.size() == 50);
    for (const auto& c : drawn.centers) REQUIRE(c.norm() <= 1.5 + 1e-12);
    for (double w : drawn.weights) {
        REQUIRE(w >= -1.0);
        REQUIRE(w <= 1.0);
    }
    // Direct-sum recomputation at a random point.
    const Eigen::VectorXd x = dal::uniform_ball(rng, 3, 1.5);
    double want = 0.0;
    for (std::size_t i = 0; i < drawn.centers.size(); ++i)
        want += drawn.weights[i] *
                std::exp(-(x - drawn.centers[i]).squaredNorm() / (2.0 * 0.09));
    REQUIRE(drawn.evaluate(x) == Catch::Approx(want).margin(1e-12));
}

TEST_CASE("Contextual means assemble the four terms and clip", "[envs][model]") {
    envs::ContextualModel m;
    envs::ContextualArm arm;
    arm.u = Eigen::VectorXd::Zero(3);
    arm.v = Eigen::VectorXd::Zero(3);
    arm.bias = 0.4;
    arm.z_sig = 0.2;
    arm.z_sin = 0.0;
    arm.z_xpr = 0.0;
    m.arms.push_back(arm);
    Eigen::VectorXd c(3);
    c << 0.1, 0.5, 0.8;
    // sigmoid(0) = 1/2 -> 0.4 + 0.1
    REQUIRE(envs::contextual_mean(m, c, 0) == Catch::Approx(0.5).margin(1e-15));

    m.arms[0].z_xpr = 0.2;  // + 0.2 * 0.5 * 0.8
    REQUIRE(envs::contextual_mean(m, c, 0) == Catch::Approx(0.58).margin(1e-15));

    m.arms[0].bias = 0.9;
    m.arms[0].z_sig = 0.45;
    REQUIRE(envs::contextual_mean(m, c, 0) == 1.0);  // clipped

    REQUIRE_THROWS_AS(envs::contextual_mean(m, Eigen::VectorXd::Zero(5), 0),
                      std::domain_error);
    REQUIRE_THROWS_AS(envs::contextual_mean(m, c, 3), std::domain_error);
    SplitMix64 rng(6);
    REQUIRE_THROWS_AS(envs::make_contextual_model(rng, 4, 2), std::domain_error);
}

TEST_CASE("Synthetic actions stay in the variant's ball", "[envs]") {
    SplitMix64 rng(7);
    auto cfg = base_lb(100);
    cfg.n_actions = 50;
    envs::SyntheticEnv lb(cfg, rng);
    double max_norm = 0.0;
    for (const auto& a : lb.actions()) max_norm = std::max(max_norm, a.norm());
    REQUIRE(max_norm == Catch::Approx(cfg.L).margin(1e-12));

    cfg.variant = envs::Variant::kb;
    envs::SyntheticEnv kb(cfg, SplitMix64(8));
    max_norm = 0.0;
    for (const auto& a : kb.actions()) max_norm = std::max(max_norm, a.norm());
    REQUIRE(max_norm ==
            Catch::Approx(cfg.L * std::sqrt(static_cast<double>(cfg.d))).margin(1e-12));

    cfg.variant = envs::Variant::cb;
    cfg.n_actions = 6;
    cfg.context_dim = 5;
    cfg.n_contexts = 20;
    envs::SyntheticEnv cb(cfg, SplitMix64(9));
    REQUIRE(cb.actions().size() == 6);
    REQUIRE(cb.actions()[2][2] == 1.0);  // identity embedding
    REQUIRE(cb.n_contexts() == 20);
    REQUIRE(cb.rewards_binary());
    REQUIRE_FALSE(lb.rewards_binary());
}

TEST_CASE("Piecewise flip schedule negates segment means exactly", "[envs]") {
    auto cfg = base_lb(200);
    cfg.schedule.kind = envs::ScheduleSpec::Kind::piecewise;
    cfg.schedule.change_points = {50, 120};
    cfg.schedule.change = envs::ScheduleSpec::ChangeKind::flip;
    envs::SyntheticEnv env(cfg, SplitMix64(10));
    REQUIRE(env.change_points() == std::vector<long>{50, 120});

    std::vector<double> mean_at(201, 0.0);
    for (long t = 1; t <= 200; ++t) {
        env.begin_round(t);
        mean_at[static_cast<std::size_t>(t)] = env.true_mean(3);
    }
    REQUIRE(mean_at[49] == mean_at[1]);
    REQUIRE(mean_at[50] == -mean_at[1]);
    REQUIRE(mean_at[119] == -mean_at[1]);
    REQUIRE(mean_at[120] == mean_at[1]);
    REQUIRE(mean_at[200] == mean_at[1]);
}

TEST_CASE("Invalid change points are rejected", "[envs][edge]") {
    auto cfg = base_lb(100);
    cfg.schedule.kind = envs::ScheduleSpec::Kind::piecewise;
    cfg.schedule.change_points = {1};
    REQUIRE_THROWS_AS(envs::SyntheticEnv(cfg, SplitMix64(1)), std::domain_error);
    cfg.schedule.change_points = {50, 50};
    REQUIRE_THROWS_AS(envs::SyntheticEnv(cfg, SplitMix64(1)), std::domain_error);
    cfg.schedule.change_points = {101};
    REQUIRE_THROWS_AS(envs::SyntheticEnv(cfg, SplitMix64(1)), std::domain_error);
}

TEST_CASE("Rounds must advance consecutively", "[envs][edge]") {
    envs::SyntheticEnv env(base_lb(10), SplitMix64(11));
    env.begin_round(1);
    REQUIRE_THROWS_AS(env.begin_round(3), std::logic_error);
}

TEST_CASE("Linear drift interpolates means affinely in t", "[envs]") {
    auto check_affine = [](envs::Variant variant) {
        envs::SyntheticEnvConfig cfg;
        cfg.variant = variant;
        cfg.T = 300;
        cfg.d = 3;
        cfg.n_actions = 8;
        cfg.schedule.kind = envs::ScheduleSpec::Kind::drift_linear;
        envs::SyntheticEnv env(cfg, SplitMix64(12));
        std::vector<double> m(301, 0.0);
        for (long t = 1; t <= 300; ++t) {
            env.begin_round(t);
            m[static_cast<std::size_t>(t)] = env.true_mean(5);
        }
        // Means at rounds 50, 150, 250 are evenly spaced samples of an affine
        // function of t.
        const double lerped = m[50] + (m[250] - m[50]) * 0.5;
        REQUIRE(m[150] == Catch::Approx(lerped).margin(1e-12));
    };
    check_affine(envs::Variant::lb);   // parameter interpolation
    check_affine(envs::Variant::kb);   // function-value interpolation
}

TEST_CASE("Random walk keeps the parameter inside the S-ball", "[envs]") {
    auto cfg = base_lb(200);
    cfg.schedule.kind = envs::ScheduleSpec::Kind::drift_walk;
    cfg.schedule.walk_delta = 0.05;
    envs::SyntheticEnv env(cfg, SplitMix64(13));
    Eigen::VectorXd prev = std::get<envs::LinearModel>(env.model()).theta;
    for (long t = 1; t <= 200; ++t) {
        env.begin_round(t);
        const Eigen::VectorXd& theta = std::get<envs::LinearModel>(env.model()).theta;
        REQUIRE(theta.norm() <= cfg.S + 1e-12);
        REQUIRE((theta - prev).norm() <= cfg.schedule.walk_delta + 1e-12);
        prev = theta;
    }

    // delta = 0 freezes the parameter.
    cfg.schedule.walk_delta = 0.0;
    envs::SyntheticEnv frozen(cfg, SplitMix64(13));
    frozen.begin_round(1);
    const double m1 = frozen.true_mean(0);
    for (long t = 2; t <= 50; ++t) {
        frozen.begin_round(t);
        REQUIRE(frozen.true_mean(0) == m1);
    }
}

TEST_CASE("Environments with one seed are identical across policies", "[envs]") {
    // The per-round noise draw precedes action choice, so two consumers that
    // play different actions still see the same noise realization.
    const auto cfg = base_lb(60);
    envs::SyntheticEnv a(cfg, SplitMix64(14));
    envs::SyntheticEnv b(cfg, SplitMix64(14));
    for (long t = 1; t <= 60; ++t) {
        a.begin_round(t);
        b.begin_round(t);
        // Same action across instances: rewards match bit for bit even though
        // instance b has "answered" a different consumer's queries before.
        REQUIRE(a.sample_reward(t % 2 == 0 ? 0 : 7) ==
                b.sample_reward(t % 2 == 0 ? 0 : 7));
        // Different actions recover the same underlying draw up to rounding of
        // the mean-plus-noise sum.
        const double noise_a = a.sample_reward(0) - a.true_mean(0);
        const double noise_b = b.sample_reward(7) - b.true_mean(7);
        REQUIRE(noise_a == Catch::Approx(noise_b).margin(1e-12));
    }
}

TEST_CASE("Context pools are unit-norm with a proper sampling CDF", "[envs]") {
    SplitMix64 rng(15);
    const envs::ContextPool pool = envs::ContextPool::make(rng, 100, 10);
    REQUIRE(pool.vectors.size() == 100);
    for (const auto& v : pool.vectors)
        REQUIRE(v.norm() == Catch::Approx(1.0).margin(1e-12));
    for (std::size_t i = 1; i < pool.cumulative.size(); ++i)
        REQUIRE(pool.cumulative[i] > pool.cumulative[i - 1]);
    REQUIRE(pool.cumulative.back() == 1.0);
    for (int i = 0; i < 1000; ++i) {
        const int id = pool.sample(rng);
        REQUIRE(id >= 0);
        REQUIRE(id < 100);
    }
}

TEST_CASE("Matrix replay loads and serves exact means", "[envs][replay]") {
    const std::string path = write_temp(
        "dal_test_matrix.csv", "2,3\n0.1,0.2,0.3\n0.9,0.8,0.7\n");
    const envs::MatrixReplay data = envs::load_replay_matrix(path);
    REQUIRE(data.n_arms == 2);
    REQUIRE(data.T == 3);
    REQUIRE(data.means[1][2] == 0.7);

    envs::NoiseSpec noise;
    noise.kind = envs::NoiseSpec::Kind::bernoulli_of_mean;
    envs::MatrixReplayEnv env(data, noise, SplitMix64(16));
    REQUIRE(env.horizon() == 3);
    REQUIRE(env.rewards_binary());
    env.begin_round(1);
    REQUIRE(env.true_mean(0) == 0.1);
    const double r = env.sample_reward(0);
    REQUIRE((r == 0.0 || r == 1.0));
    env.begin_round(2);
    REQUIRE(env.true_mean(1) == 0.8);
}

TEST_CASE("Matrix replay rejects malformed inputs", "[envs][replay][edge]") {
    REQUIRE_THROWS_WITH(envs::load_replay_matrix("/nonexistent/replay.csv"),
                        Catch::Matchers::ContainsSubstring("cannot open replay file"));
    const std::string bad_header = write_temp("dal_test_bad1.csv", "2\n0.1\n");
    REQUIRE_THROWS_WITH(envs::load_replay_matrix(bad_header),
                        Catch::Matchers::ContainsSubstring("header must be K,T"));
    const std::string short_row =
        write_temp("dal_test_bad2.csv", "2,3\n0.1,0.2\n0.9,0.8,0.7\n");
    REQUIRE_THROWS_WITH(envs::load_replay_matrix(short_row),
                        Catch::Matchers::ContainsSubstring("replay dimension mismatch"));
    const std::string missing_row = write_temp("dal_test_bad3.csv", "2,3\n0.1,0.2,0.3\n");
    REQUIRE_THROWS_WITH(envs::load_replay_matrix(missing_row),
                        Catch::Matchers::ContainsSubstring("replay dimension mismatch"));
    const std::string bad_number =
        write_temp("dal_test_bad4.csv", "1,2\n0.1,zebra\n");
    REQUIRE_THROWS_WITH(envs::load_replay_matrix(bad_number),
                        Catch::Matchers::ContainsSubstring("bad number"));
    // Bernoulli noise requires unit-range means.
    const std::string big = write_temp("dal_test_bad5.csv", "1,1\n1.5\n");
    envs::NoiseSpec noise;
    noise.kind = envs::NoiseSpec::Kind::bernoulli_of_mean;
    REQUIRE_THROWS_AS(
        envs::MatrixReplayEnv(envs::load_replay_matrix(big), noise, SplitMix64(1)),
        std::domain_error);
}

TEST_CASE("Logged replay remaps ids densely", "[envs][replay]") {
    const std::string path = write_temp("dal_test_logged.csv",
                                        "t,candidates,displayed,reward\n"
                                        "1,7;3;9,3,1\n"
                                        "2,7;9,9,0\n"
                                        "5,3;9,3,1\n");
    const envs::LoggedReplay log = envs::load_replay_logged(path);
    REQUIRE(log.n_actions == 3);
    REQUIRE(log.raw_ids == std::vector<long>{3, 7, 9});
    REQUIRE(log.rows.size() == 3);
    REQUIRE(log.rows[0].candidates == std::vector<std::size_t>{1, 0, 2});
    REQUIRE(log.rows[0].displayed == 0);
    REQUIRE(log.rows[0].reward == 1.0);
    REQUIRE(log.rows[1].displayed == 2);
    REQUIRE(log.rows[2].t == 5);
}

TEST_CASE("Logged replay rejects malformed inputs", "[envs][replay][edge]") {
    const std::string nonmono = write_temp("dal_test_logged_bad1.csv",
                                           "t,candidates,displayed,reward\n"
                                           "2,1;2,1,0\n"
                                           "2,1;2,2,1\n");
    REQUIRE_THROWS_WITH(envs::load_replay_logged(nonmono),
                        Catch::Matchers::ContainsSubstring(
                            "non-monotone timestamps in replay file at line 3"));
    const std::string bad_reward = write_temp("dal_test_logged_bad2.csv",
                                              "t,candidates,displayed,reward\n"
                                              "1,1;2,1,0.5\n");
    REQUIRE_THROWS_WITH(envs::load_replay_logged(bad_reward),
                        Catch::Matchers::ContainsSubstring("reward must be 0 or 1"));
    const std::string stranger = write_temp("dal_test_logged_bad3.csv",
                                            "t,candidates,displayed,reward\n"
                                            "1,1;2,5,1\n");
    REQUIRE_THROWS_WITH(envs::load_replay_logged(stranger),
                        Catch::Matchers::ContainsSubstring(
                            "displayed id not among candidates"));
    const std::string empty_cand = write_temp("dal_test_logged_bad4.csv",
                                              "t,candidates,displayed,reward\n"
                                              "1,1;;2,1,1\n");
    REQUIRE_THROWS_WITH(envs::load_replay_logged(empty_cand),
                        Catch::Matchers::ContainsSubstring("empty candidate id"));
}
