#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "spotkick/game.hpp"

using namespace spotkick;

namespace {

KickRecord kick(const std::string& id, Foot foot, Direction shot, Direction dive, Outcome outcome) {
    KickRecord r;
    r.kick_id = id;
    r.match_id = "M";
    r.league = "L";
    r.season = "2020";
    r.kicker_id = "p-" + id;
    r.keeper_id = "g-" + id;
    r.kicker_foot = foot;
    r.shot_direction = shot;
    r.keeper_action = dive;
    r.outcome = outcome;
    return r;
}

}  // namespace

TEST_CASE("natural classification follows the goalkeeper frame", "[game]") {
    struct Case {
        Foot foot;
        Direction shot;
        NaturalLabel expected;
    };
    // right foot -> natural side is the keeper's right; center is natural
    const Case kicker_cases[] = {
        {Foot::Right, Direction::Right, NaturalLabel::Natural},
        {Foot::Right, Direction::Center, NaturalLabel::Natural},
        {Foot::Right, Direction::Left, NaturalLabel::NonNatural},
        {Foot::Left, Direction::Left, NaturalLabel::Natural},
        {Foot::Left, Direction::Center, NaturalLabel::Natural},
        {Foot::Left, Direction::Right, NaturalLabel::NonNatural},
    };
    for (const auto& c : kicker_cases) {
        const auto r = kick("x", c.foot, c.shot, Direction::Left, Outcome::Goal);
        CHECK(classify_natural(r, KeeperCenterPolicy::CenterIsNatural).kicker == c.expected);
    }

    // keeper natural side mirrors the kicker's footedness
    const Case keeper_cases[] = {
        {Foot::Right, Direction::Right, NaturalLabel::Natural},
        {Foot::Right, Direction::Left, NaturalLabel::NonNatural},
        {Foot::Left, Direction::Left, NaturalLabel::Natural},
        {Foot::Left, Direction::Right, NaturalLabel::NonNatural},
    };
    for (const auto& c : keeper_cases) {
        const auto r = kick("x", c.foot, Direction::Center, c.shot, Outcome::Goal);
        CHECK(classify_natural(r, KeeperCenterPolicy::CenterIsNatural).keeper == c.expected);
    }

    // center dives depend on the policy
    const auto center = kick("x", Foot::Right, Direction::Right, Direction::Center, Outcome::Goal);
    CHECK(classify_natural(center, KeeperCenterPolicy::CenterIsNatural).keeper ==
          NaturalLabel::Natural);
    CHECK(classify_natural(center, KeeperCenterPolicy::CenterExcluded).keeper ==
          NaturalLabel::Excluded);
}

TEST_CASE("empirical game counts successes and attempts per cell", "[game]") {
    std::vector<KickRecord> records;
    // (N-S, N-G): 2 goals of 3; (N-S, NN-G): 1 of 1; (NN-S, N-G): 0 of 2; (NN-S, NN-G): 1 of 1
    records.push_back(kick("1", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal));
    records.push_back(kick("2", Foot::Right, Direction::Right, Direction::Right, Outcome::Saved));
    records.push_back(kick("3", Foot::Left, Direction::Left, Direction::Left, Outcome::Goal));
    records.push_back(kick("4", Foot::Right, Direction::Center, Direction::Left, Outcome::Goal));
    records.push_back(kick("5", Foot::Right, Direction::Left, Direction::Right, Outcome::Saved));
    records.push_back(kick("6", Foot::Left, Direction::Right, Direction::Left, Outcome::Missed));
    records.push_back(kick("7", Foot::Right, Direction::Left, Direction::Left, Outcome::Goal));

    const auto game = build_empirical_game(KickDataset::from_records(records), ActionAbstraction{});
    REQUIRE(game.row_actions == std::vector<std::string>{"N-S", "NN-S"});
    REQUIRE(game.col_actions == std::vector<std::string>{"N-G", "NN-G"});
    CHECK(game.counts[0][0] == CellCounts{2, 3});
    CHECK(game.counts[0][1] == CellCounts{1, 1});
    CHECK(game.counts[1][0] == CellCounts{0, 2});
    CHECK(game.counts[1][1] == CellCounts{1, 1});
    CHECK(game.payoff(0, 0) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(game.payoff(1, 0) == 0.0);
    CHECK(game.total_attempts() == 7);
    CHECK(game.fully_defined());
    CHECK(game.constant_sum == 1.0);

    const auto profile = empirical_profile(game);
    CHECK(profile.row[0] == Catch::Approx(4.0 / 7.0).margin(1e-12));
    CHECK(profile.col[0] == Catch::Approx(5.0 / 7.0).margin(1e-12));
}

TEST_CASE("undefined cells carry NaN, never zero", "[game]") {
    std::vector<KickRecord> records = {
        kick("1", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal),
        kick("2", Foot::Right, Direction::Left, Direction::Left, Outcome::Saved),
    };
    const auto game = build_empirical_game(KickDataset::from_records(records), ActionAbstraction{});
    CHECK(game.defined(0, 0));
    CHECK_FALSE(game.defined(0, 1));
    CHECK(std::isnan(game.payoff(0, 1)));
    CHECK_FALSE(game.fully_defined());
}

TEST_CASE("excluded center dives drop out of the natural game", "[game]") {
    std::vector<KickRecord> records = {
        kick("1", Foot::Right, Direction::Right, Direction::Center, Outcome::Goal),
        kick("2", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal),
    };
    const ActionAbstraction excl{AbstractionKind::NaturalNonNatural,
                                 KeeperCenterPolicy::CenterExcluded};
    const auto game = build_empirical_game(KickDataset::from_records(records), excl);
    CHECK(game.total_attempts() == 1);

    const ActionAbstraction keep{AbstractionKind::NaturalNonNatural,
                                 KeeperCenterPolicy::CenterIsNatural};
    CHECK(build_empirical_game(KickDataset::from_records(records), keep).total_attempts() == 2);

    std::vector<KickRecord> only_center = {
        kick("1", Foot::Right, Direction::Right, Direction::Center, Outcome::Goal)};
    REQUIRE_THROWS_AS(build_empirical_game(KickDataset::from_records(only_center), excl),
                      EmptyDataset);
}

TEST_CASE("direction abstraction uses R/C/L in the goalkeeper frame", "[game]") {
    std::vector<KickRecord> records = {
        kick("1", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal),
        kick("2", Foot::Left, Direction::Center, Direction::Left, Outcome::Saved),
        kick("3", Foot::Right, Direction::Left, Direction::Center, Outcome::Goal),
    };
    const ActionAbstraction lcr{AbstractionKind::LeftCenterRight,
                                KeeperCenterPolicy::CenterIsNatural};
    const auto game = build_empirical_game(KickDataset::from_records(records), lcr);
    REQUIRE(game.row_actions == std::vector<std::string>{"R-S", "C-S", "L-S"});
    REQUIRE(game.col_actions == std::vector<std::string>{"R-G", "C-G", "L-G"});
    CHECK(game.counts[0][0] == CellCounts{1, 1});  // right shot, right dive
    CHECK(game.counts[1][2] == CellCounts{0, 1});  // center shot, left dive
    CHECK(game.counts[2][1] == CellCounts{1, 1});  // left shot, center dive
    CHECK(game.total_attempts() == 3);
}

TEST_CASE("posterior tables are deterministic per sample index", "[game]") {
    const CountMatrix2D counts = {{{7, 10}, {0, 4}}, {{3, 3}, {5, 9}}};
    const auto five = sample_payoff_tables(counts, 5, 99);
    const auto two = sample_payoff_tables(counts, 2, 99);
    REQUIRE(five.size() == 5);
    // sample i depends only on (seed, i), not on how many tables were asked for
    CHECK(five[0] == two[0]);
    CHECK(five[1] == two[1]);
    CHECK(five[0] != five[1]);
    for (const auto& t : five) {
        REQUIRE(t.rows() == 2);
        REQUIRE(t.cols() == 2);
        CHECK(t.minCoeff() > 0.0);
        CHECK(t.maxCoeff() < 1.0);
    }
    REQUIRE_THROWS_AS(sample_payoff_tables(counts, 0, 99), ArgumentError);
}

TEST_CASE("posterior cell means approach (s+1)/(a+2)", "[game]") {
    const CountMatrix2D counts = {{{7, 10}, {0, 0}}, {{50, 60}, {0, 4}}};
    const auto tables = sample_payoff_tables(counts, 4000, 11);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& t : tables) mean += t;
    mean /= 4000.0;
    CHECK(mean(0, 0) == Catch::Approx(8.0 / 12.0).margin(0.01));
    CHECK(mean(0, 1) == Catch::Approx(0.5).margin(0.02));  // empty cell: Beta(1,1) prior
    CHECK(mean(1, 0) == Catch::Approx(51.0 / 62.0).margin(0.01));
    CHECK(mean(1, 1) == Catch::Approx(1.0 / 6.0).margin(0.02));
}

TEST_CASE("bootstrap Nash is thread-count invariant", "[game]") {
    SyntheticSpec spec;
    spec.cells = {{{{{160, 0.9, 0.9}, {160, 0.3, 0.3}}}, {{{160, 0.2, 0.2}, {160, 0.8, 0.8}}}}};
    const auto ds = generate_synthetic_kicks(spec, 21);
    const auto game = build_empirical_game(ds, ActionAbstraction{});

    const auto serial = bootstrap_nash(game, 40, 5, 1);
    const auto threaded = bootstrap_nash(game, 40, 5, 4);
    const auto threaded8 = bootstrap_nash(game, 40, 5, 8);
    REQUIRE(serial.row == threaded.row);
    REQUIRE(serial.col == threaded.col);
    REQUIRE(serial.row == threaded8.row);
    REQUIRE(serial.col == threaded8.col);
    CHECK(nash::is_distribution(serial.row));
    CHECK(nash::is_distribution(serial.col));

    const auto reseeded = bootstrap_nash(game, 40, 6, 1);
    CHECK(serial.row != reseeded.row);
}

TEST_CASE("bootstrap Nash concentrates near the point estimate", "[game]") {
    // large counts: the posterior collapses onto the empirical rates
    const long a = 200000;
    const CountMatrix2D counts = {
        {{static_cast<long>(0.9 * a), a}, {static_cast<long>(0.3 * a), a}},
        {{static_cast<long>(0.2 * a), a}, {static_cast<long>(0.8 * a), a}}};
    EmpiricalGame game;
    game.row_actions = {"N-S", "NN-S"};
    game.col_actions = {"N-G", "NN-G"};
    game.counts = counts;
    game.payoff = Eigen::MatrixXd(2, 2);
    game.payoff << 0.9, 0.3, 0.2, 0.8;

    const auto point = nash::solve_constant_sum(game.payoff);
    const auto boot = bootstrap_nash(game, 30, 3, 2);
    CHECK((boot.row - point.profile.row).lpNorm<Eigen::Infinity>() < 0.005);
    CHECK((boot.col - point.profile.col).lpNorm<Eigen::Infinity>() < 0.005);
}

TEST_CASE("game JSON round trip preserves counts and undefined cells", "[game]") {
    std::vector<KickRecord> records = {
        kick("1", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal),
        kick("2", Foot::Right, Direction::Right, Direction::Left, Outcome::Saved),
        kick("3", Foot::Left, Direction::Right, Direction::Left, Outcome::Goal),
    };
    const auto game = build_empirical_game(KickDataset::from_records(records), ActionAbstraction{});
    const auto j = game_to_json(game);
    CHECK(j.at("payoff")[1][0].is_null() == false);
    CHECK(j.at("payoff")[0][1].is_null() == false);
    CHECK(j.at("payoff")[1][1].is_null());
    CHECK(j.at("counts")[0][0].at("s") == 1);
    CHECK(j.at("counts")[0][0].at("a") == 1);

    const auto back = game_from_json(j);
    CHECK(back.row_actions == game.row_actions);
    CHECK(back.col_actions == game.col_actions);
    CHECK(back.counts == game.counts);
    CHECK(back.constant_sum == 1.0);
    CHECK(std::isnan(back.payoff(1, 1)));
    CHECK(back.payoff(0, 0) == game.payoff(0, 0));
}

TEST_CASE("game JSON defaults and validation", "[game]") {
    nlohmann::json j;
    j["row_actions"] = {"N-S", "NN-S"};
    j["col_actions"] = {"N-G", "NN-G"};
    j["counts"] = {{{{"s", 1}, {"a", 2}}, {{"s", 0}, {"a", 1}}},
                   {{{"s", 1}, {"a", 1}}, {{"s", 0}, {"a", 0}}}};
    j["payoff"] = {{0.5, 0.0}, {1.0, nullptr}};
    const auto game = game_from_json(j);  // constant_sum missing -> defaults to 1
    CHECK(game.constant_sum == 1.0);
    CHECK(game.counts[0][0] == CellCounts{1, 2});

    j["counts"][0][0]["s"] = 3;  // more successes than attempts
    REQUIRE_THROWS_AS(game_from_json(j), InvalidSpec);
}

TEST_CASE("event heatmap bins shots only", "[game]") {
    std::vector<ActionEvent> events = {
        {"p1", ActionType::Shot, 0.5, 0.5},
        {"p1", ActionType::Shot, 0.0, 0.0},
        {"p1", ActionType::Shot, 0.999, 0.999},
        {"p2", ActionType::Pass, 0.5, 0.5},  // not a shot: ignored
    };
    const auto grid = shot_heatmap(events, 60, 40);
    REQUIRE(grid.width == 60);
    REQUIRE(grid.height == 40);
    CHECK(grid.total() == 3);
    CHECK(grid.cells[20][30] == 1);  // (0.5, 0.5) -> column 30, row 20
    CHECK(grid.cells[0][0] == 1);
    CHECK(grid.cells[39][59] == 1);  // upper coordinates land in the last cell
    REQUIRE_THROWS_AS(shot_heatmap(events, 0, 40), ArgumentError);
}

TEST_CASE("direction heatmap falls back to three bins", "[game]") {
    std::vector<KickRecord> records = {
        kick("1", Foot::Right, Direction::Left, Direction::Right, Outcome::Goal),
        kick("2", Foot::Right, Direction::Left, Direction::Right, Outcome::Goal),
        kick("3", Foot::Right, Direction::Center, Direction::Right, Outcome::Goal),
        kick("4", Foot::Right, Direction::Right, Direction::Right, Outcome::Goal),
    };
    const auto grid = shot_heatmap(KickDataset::from_records(records));
    REQUIRE(grid.width == 3);
    REQUIRE(grid.height == 1);
    CHECK(grid.cells[0] == std::vector<long>{2, 1, 1});
    CHECK(grid.total() == 4);
}

TEST_CASE("heatmap CSV is row-major", "[game]") {
    HeatmapGrid grid;
    grid.width = 3;
    grid.height = 2;
    grid.cells = {{1, 2, 3}, {4, 5, 6}};
    std::ostringstream out;
    write_heatmap_csv(out, grid);
    CHECK(out.str() == "1,2,3\n4,5,6\n");
}
