#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <sstream>

#include "spotkick/player_vectors.hpp"
#include "spotkick/rng.hpp"

using namespace spotkick;
using vectors::GridSpec;

namespace {

// Eight players (NMF rank 5 needs at least five rows), every action type
// present, deterministic coordinates.
std::vector<ActionEvent> demo_events() {
    std::vector<ActionEvent> events;
    spotkick::Rng rng(6);
    for (char suffix = 'a'; suffix < 'i'; ++suffix) {
        const std::string id = std::string("player_") + suffix;
        for (ActionType type : kActionTypes) {
            for (int i = 0; i < 25; ++i)
                events.push_back({id, type, rng.uniform(), rng.uniform()});
        }
    }
    return events;
}

}  // namespace

TEST_CASE("grid indices are row-major with half-open cells", "[vectors]") {
    const GridSpec grid;
    REQUIRE(grid.cells() == 2400);
    CHECK(grid.cell_index(0.0, 0.0) == 0);
    CHECK(grid.cell_index(0.5, 0.5) == 20 * 60 + 30);
    CHECK(grid.cell_index(0.999, 0.999) == 2399);
    CHECK(grid.cell_index(0.0166, 0.0) == 0);   // just inside the first column
    CHECK(grid.cell_index(0.0167, 0.0) == 1);   // one cell to the right
}

TEST_CASE("count matrix places events and shares row order across types", "[vectors]") {
    std::vector<ActionEvent> events = {
        {"zoe", ActionType::Shot, 0.5, 0.5},
        {"amy", ActionType::Pass, 0.1, 0.1},
        {"amy", ActionType::Shot, 0.5, 0.5},
        {"amy", ActionType::Shot, 0.5, 0.5},
    };
    const auto shots = vectors::build_count_matrix(events, ActionType::Shot);
    REQUIRE(shots.players == std::vector<std::string>{"amy", "zoe"});  // sorted ids
    REQUIRE(shots.matrix.rows() == 2);
    CHECK(shots.matrix(0, 1230) == 2.0);
    CHECK(shots.matrix(1, 1230) == 1.0);
    CHECK(shots.matrix.sum() == 3.0);

    // zoe has no passes but still gets a (zero) row in the pass matrix
    const auto passes = vectors::build_count_matrix(events, ActionType::Pass);
    REQUIRE(passes.players == shots.players);
    CHECK(passes.matrix.row(1).sum() == 0.0);
    CHECK(passes.matrix.sum() == 1.0);
}

TEST_CASE("count matrix is invariant to event order", "[vectors]") {
    auto events = demo_events();
    const auto before = vectors::build_count_matrix(events, ActionType::Cross);
    std::shuffle(events.begin(), events.end(), std::mt19937(99));
    const auto after = vectors::build_count_matrix(events, ActionType::Cross);
    REQUIRE(before.players == after.players);
    REQUIRE(before.matrix == after.matrix);
}

TEST_CASE("nmf validates its inputs", "[vectors]") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(4, 6, 1.0);
    REQUIRE_THROWS_AS(vectors::nmf(m, 0, 1), InvalidRank);
    REQUIRE_THROWS_AS(vectors::nmf(m, 5, 1), InvalidRank);
    m(1, 2) = -0.5;
    REQUIRE_THROWS_AS(vectors::nmf(m, 2, 1), ArgumentError);
    REQUIRE_THROWS_AS(vectors::nmf(Eigen::MatrixXd::Zero(4, 6), 2, 1), AllZeroMatrix);
}

TEST_CASE("nmf objective never increases", "[vectors]") {
    spotkick::Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 5 + static_cast<int>(rng.below(20));
        const int cols = 5 + static_cast<int>(rng.below(30));
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform() * 3.0;
        const int k = 1 + static_cast<int>(rng.below(4));
        const auto model = vectors::nmf(m, k, trial);
        REQUIRE(model.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < model.objective_trace.size(); ++i)
            CHECK(model.objective_trace[i] <= model.objective_trace[i - 1] + 1e-9);
        CHECK(model.W.minCoeff() >= 0.0);
        CHECK(model.H.minCoeff() >= 0.0);
        REQUIRE(model.W.rows() == rows);
        REQUIRE(model.W.cols() == k);
        REQUIRE(model.H.rows() == k);
        REQUIRE(model.H.cols() == cols);
    }
}

TEST_CASE("nmf recovers a rank-1 matrix", "[vectors]") {
    Eigen::VectorXd u(8), v(12);
    spotkick::Rng rng(13);
    for (int i = 0; i < 8; ++i) u[i] = 0.5 + rng.uniform();
    for (int j = 0; j < 12; ++j) v[j] = 0.5 + rng.uniform();
    const Eigen::MatrixXd m = u * v.transpose();
    const auto model = vectors::nmf(m, 1, 5, 2000, 1e-12);
    const double rel = (m - model.W * model.H).norm() / m.norm();
    CHECK(rel < 1e-3);
}

TEST_CASE("nmf is deterministic in the seed", "[vectors]") {
    Eigen::MatrixXd m(6, 9);
    spotkick::Rng rng(14);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 9; ++j) m(i, j) = rng.uniform();
    const auto a = vectors::nmf(m, 3, 77);
    const auto b = vectors::nmf(m, 3, 77);
    const auto c = vectors::nmf(m, 3, 78);
    REQUIRE(a.W == b.W);
    REQUIRE(a.H == b.H);
    CHECK(a.W != c.W);
}

TEST_CASE("zero rows stay zero through nmf", "[vectors]") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 10);
    spotkick::Rng rng(15);
    for (int i = 0; i < 5; ++i) {
        if (i == 2) continue;  // row 2 is a player with no actions of this type
        for (int j = 0; j < 10; ++j) m(i, j) = rng.uniform() + 0.2;
    }
    const auto model = vectors::nmf(m, 2, 3);
    CHECK(model.W.row(2).maxCoeff() < 1e-8);
}

TEST_CASE("player vectors concatenate four segments into 18 dims", "[vectors]") {
    const auto events = demo_events();
    const auto vecs = vectors::assemble_player_vectors(events, {}, 1);
    REQUIRE(vecs.size() == 8);
    CHECK(vecs[0].player_id == "player_a");
    CHECK(vecs[7].player_id == "player_h");
    for (const auto& v : vecs) {
        REQUIRE(v.concatenated.size() == 18);
        CHECK(v.concatenated.minCoeff() >= 0.0);
        REQUIRE(v.segments.at(ActionType::Pass).size() == 5);
        REQUIRE(v.segments.at(ActionType::Dribble).size() == 4);
        REQUIRE(v.segments.at(ActionType::Shot).size() == 4);
        REQUIRE(v.segments.at(ActionType::Cross).size() == 5);
        // concatenation order: pass, dribble, shot, cross
        CHECK(v.concatenated.segment(0, 5) == v.segments.at(ActionType::Pass));
        CHECK(v.concatenated.segment(5, 4) == v.segments.at(ActionType::Dribble));
        CHECK(v.concatenated.segment(9, 4) == v.segments.at(ActionType::Shot));
        CHECK(v.concatenated.segment(13, 5) == v.segments.at(ActionType::Cross));
    }

    const auto again = vectors::assemble_player_vectors(events, {}, 1);
    REQUIRE(again[0].concatenated == vecs[0].concatenated);
    const auto reseeded = vectors::assemble_player_vectors(events, {}, 2);
    CHECK(reseeded[0].concatenated != vecs[0].concatenated);
}

TEST_CASE("custom segment sizes change the dimension", "[vectors]") {
    const auto events = demo_events();
    const vectors::SegmentSizes sizes{2, 3, 1, 2};
    REQUIRE(sizes.total() == 8);
    const auto vecs = vectors::assemble_player_vectors(events, sizes, 1);
    REQUIRE(vecs[0].concatenated.size() == 8);
    vectors::SegmentSizes bad{0, 3, 1, 2};
    REQUIRE_THROWS_AS(vectors::assemble_player_vectors(events, bad, 1), ArgumentError);
}

TEST_CASE("a missing action type is reported with the affected players", "[vectors]") {
    std::vector<ActionEvent> events = {
        {"amy", ActionType::Pass, 0.5, 0.5},
        {"zoe", ActionType::Dribble, 0.5, 0.5},
        {"amy", ActionType::Shot, 0.5, 0.5},
    };
    try {
        vectors::assemble_player_vectors(events, {}, 0);
        FAIL("expected MissingActionType");
    } catch (const MissingActionType& e) {
        const std::string msg = e.what();
        CHECK(msg.find("Cross") != std::string::npos);
        CHECK(msg.find("amy") != std::string::npos);
        CHECK(msg.find("zoe") != std::string::npos);
    }
    REQUIRE_THROWS_AS(vectors::assemble_player_vectors({}, {}, 0), EmptyDataset);
}

TEST_CASE("column names follow the segment layout", "[vectors]") {
    const auto names = vectors::vector_column_names();
    REQUIRE(names.size() == 18);
    CHECK(names.front() == "pass_0");
    CHECK(names[4] == "pass_4");
    CHECK(names[5] == "dribble_0");
    CHECK(names[9] == "shot_0");
    CHECK(names[13] == "cross_0");
    CHECK(names.back() == "cross_4");
}

TEST_CASE("vector CSV export has one row per player", "[vectors]") {
    const auto events = demo_events();
    const auto vecs = vectors::assemble_player_vectors(events, {}, 1);
    std::ostringstream out;
    vectors::write_player_vectors_csv(out, vecs);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "player_id,pass_0,pass_1,pass_2,pass_3,pass_4,dribble_0,dribble_1,dribble_2,"
                  "dribble_3,shot_0,shot_1,shot_2,shot_3,cross_0,cross_1,cross_2,cross_3,cross_4");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.rfind("player_", 0) == 0);
        CHECK(std::count(line.begin(), line.end(), ',') == 18);
    }
    CHECK(rows == 8);
}

TEST_CASE("vectors_to_matrix stacks rows in player order", "[vectors]") {
    const auto events = demo_events();
    const auto vecs = vectors::assemble_player_vectors(events, {}, 1);
    const auto m = vectors::vectors_to_matrix(vecs);
    REQUIRE(m.rows() == 8);
    REQUIRE(m.cols() == 18);
    CHECK(m.row(0).transpose() == vecs[0].concatenated);
    CHECK(m.row(1).transpose() == vecs[1].concatenated);
    REQUIRE_THROWS_AS(vectors::vectors_to_matrix({}), EmptyDataset);
}

TEST_CASE("zscore standardizes columns and zeroes constant ones", "[vectors]") {
    Eigen::MatrixXd m(4, 3);
    m << 1, 5, 2,
         2, 5, 4,
         3, 5, 6,
         4, 5, 8;
    const auto z = vectors::zscore_columns(m);
    for (int j : {0, 2}) {
        CHECK(z.col(j).mean() == Catch::Approx(0.0).margin(1e-12));
        CHECK(z.col(j).squaredNorm() / 4.0 == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);
    // ordering within a column is preserved
    CHECK(z(0, 0) < z(1, 0));
    CHECK(z(3, 0) > z(2, 0));
}
