#include <catch2/catch_amalgamated.hpp>

#include "dal/covering.hpp"
#include "dal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using dal::ActionSet;
using dal::CoveringConfig;
using dal::CoveringSet;

namespace {

ActionSet basis(int d) {
    ActionSet a;
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[i] = 1.0;
        a.push_back(v);
    }
    return a;
}

// Rank oracle independent of the greedy construction.
long rank_of(const ActionSet& actions) {
    Eigen::MatrixXd M(actions[0].size(), static_cast<Eigen::Index>(actions.size()));
    for (std::size_t i = 0; i < actions.size(); ++i)
        M.col(static_cast<Eigen::Index>(i)) = actions[i];
    return Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(M).rank();
}

}  // namespace

TEST_CASE("Linear cover keeps a full basis", "[cover][linear]") {
    const ActionSet actions = basis(6);
    const CoveringSet cover = dal::build_cover_linear(actions);
    REQUIRE(cover.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) REQUIRE(cover.source_indices[i] == i);
}

TEST_CASE("Linear cover drops dependent actions", "[cover][linear]") {
    ActionSet actions;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2), e2 = Eigen::VectorXd::Zero(2);
    e1[0] = 1.0;
    e2[1] = 1.0;
    actions.push_back(e1);
    actions.push_back(2.0 * e1);
    actions.push_back(e2);
    const CoveringSet cover = dal::build_cover_linear(actions);
    REQUIRE(cover.size() == 2);
    REQUIRE(cover.source_indices == std::vector<std::size_t>{0, 2});
    // Gram determinant of the kept pair is nonzero; adding the dropped action
    // cannot raise the rank.
    REQUIRE(rank_of(actions) == 2);
}

TEST_CASE("Gaussian actions in R^10 have full-rank covers", "[cover][linear][oracle]") {
    for (int seed = 0; seed < 10; ++seed) {
        dal::SplitMix64 rng(400 + seed);
        ActionSet actions;
        for (int i = 0; i < 200; ++i) actions.push_back(dal::normal_vector(rng, 10));
        const CoveringSet cover = dal::build_cover_linear(actions);
        REQUIRE(cover.size() == 10);
        REQUIRE(rank_of(actions) == 10);
        REQUIRE(rank_of(cover.actions) == 10);
    }
}

TEST_CASE("Rank-zero input degenerates to the first action", "[cover][linear][edge]") {
    ActionSet zeros(3, Eigen::VectorXd::Zero(4));
    const CoveringSet cover = dal::build_cover_linear(zeros);
    REQUIRE(cover.size() == 1);
    REQUIRE(cover.source_indices[0] == 0);
    REQUIRE_THROWS_AS(dal::build_cover_linear({}), std::domain_error);
    REQUIRE_THROWS_AS(dal::build_cover_linear(zeros, 0.0), std::domain_error);
}

TEST_CASE("delta_T reproduces the worked examples", "[cover][kernel]") {
    CoveringConfig cfg;
    cfg.R = 1.0;
    cfg.d = 2;
    cfg.p = 0.0;
    cfg.q = 0.5;
    cfg.C = 1.0;
    cfg.gamma_T = 100.0;
    REQUIRE(dal::delta_T(cfg) ==
            Catch::Approx(std::sqrt(2.0) / 20.0).margin(1e-12));

    // Cover-size bound ceil(sqrt(d) R / (2 delta_T))^d.
    const double dT = dal::delta_T(cfg);
    const long per_axis = dal::internal::safe_ceil(std::sqrt(2.0) * 1.0 / (2.0 * dT));
    REQUIRE(per_axis * per_axis == 100);

    CoveringConfig trivial;
    trivial.R = 2.5;
    trivial.d = 3;
    trivial.p = 0.0;
    trivial.q = 0.0;
    trivial.C = 1.0;
    trivial.gamma_T = 1.0;
    REQUIRE(dal::delta_T(trivial) ==
            Catch::Approx(2.5 * std::sqrt(3.0) / 2.0).margin(1e-12));

    CoveringConfig bad = cfg;
    bad.R = 0.0;
    REQUIRE_THROWS_AS(dal::delta_T(bad), std::domain_error);
}

TEST_CASE("One-dimensional grid places centers at cell midpoints", "[cover][kernel]") {
    // d=1, R=1, delta_T=0.25 needs spacing 0.5 and centers {0.25, 0.75}.
    CoveringConfig cfg;
    cfg.d = 1;
    cfg.R = 1.0;
    cfg.p = 0.0;
    cfg.q = 0.0;
    cfg.C = 2.0;  // delta_T = R sqrt(1) / (2 * 2) = 0.25
    cfg.gamma_T = 1.0;
    REQUIRE(dal::delta_T(cfg) == Catch::Approx(0.25).margin(1e-15));
    const auto centers = dal::cover_grid_centers(cfg);
    REQUIRE(centers.size() == 2);
    REQUIRE(centers[0][0] == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(centers[1][0] == Catch::Approx(0.75).margin(1e-12));

    ActionSet actions;
    for (double x : {0.1, 0.3, 0.6, 0.9}) {
        Eigen::VectorXd v(1);
        v[0] = x;
        actions.push_back(v);
    }
    const CoveringSet cover = dal::build_cover_kernel(actions, cfg);
    REQUIRE(cover.size() == 2);
    REQUIRE(cover.source_indices == std::vector<std::size_t>{1, 2});
}

TEST_CASE("Kernel cover is a delta_T net of the grid centers", "[cover][kernel][oracle]") {
    CoveringConfig cfg;
    cfg.d = 2;
    cfg.R = 1.0;
    cfg.p = 0.0;
    cfg.q = 0.5;
    cfg.C = 1.0;
    cfg.gamma_T = 16.0;  // delta_T = sqrt(2)/8, 4x4 grid = 16 centers
    const double dT = dal::delta_T(cfg);
    REQUIRE(dT == Catch::Approx(std::sqrt(2.0) / 8.0).margin(1e-12));
    const auto centers = dal::cover_grid_centers(cfg);
    REQUIRE(centers.size() == 16);

    // Every point of the cube is within delta_T of some center (half-diagonal
    // of a grid cell equals delta_T by construction).
    dal::SplitMix64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const Eigen::VectorXd x = dal::uniform_cube(rng, 2, 0.0, 1.0);
        double best = 1e300;
        for (const auto& c : centers) best = std::min(best, (x - c).norm());
        REQUIRE(best <= dT + 1e-12);
    }

    // A dense action set picks one action near each center.
    ActionSet dense;
    for (int i = 0; i < 400; ++i) dense.push_back(dal::uniform_cube(rng, 2, 0.0, 1.0));
    const CoveringSet cover = dal::build_cover_kernel(dense, cfg);
    REQUIRE(cover.size() <= 16);
    REQUIRE(cover.size() >= 10);  // dedupe can merge nearby centers only rarely
    for (const auto& c : centers) {
        double best = 1e300;
        for (const auto& a : cover.actions) best = std::min(best, (a - c).norm());
        // The chosen action is the nearest one to the center; with 400 dense
        // actions it sits well inside the cell.
        REQUIRE(best <= 2.0 * dT);
    }
}

TEST_CASE("Kernel cover falls back to the full set when the grid is too fine",
          "[cover][kernel][edge]") {
    CoveringConfig cfg;
    cfg.d = 3;
    cfg.R = 1.0;
    cfg.p = 0.0;
    cfg.q = 0.5;
    cfg.C = 1.0;
    cfg.gamma_T = 1e6;  // tiny delta_T, astronomically many centers
    ActionSet actions;
    dal::SplitMix64 rng(8);
    for (int i = 0; i < 30; ++i) actions.push_back(dal::uniform_cube(rng, 3, 0.0, 1.0));
    const CoveringSet cover = dal::build_cover_kernel(actions, cfg);
    REQUIRE(cover.size() == actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i)
        REQUIRE(cover.source_indices[i] == i);
}
