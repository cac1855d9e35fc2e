#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spotkick/nash.hpp"
#include "spotkick/rng.hpp"

using namespace spotkick::nash;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
    MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

oracle::Matrix to_oracle(const MatrixXd& m) {
    oracle::Matrix out(static_cast<std::size_t>(m.rows()),
                       std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return out;
}

std::vector<double> to_vec(const VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

// Scoring probabilities of the 2x2 natural-side game published by
// Palacios-Huerta (2003) and of this data set's reproduction.
const MatrixXd kPalacios = mat2(0.670, 0.929, 0.950, 0.583);
const MatrixXd kReproduction = mat2(0.704, 0.907, 0.894, 0.640);

// Goalkeeper-frame right/center/left scoring probabilities.
MatrixXd lcr_payoffs() {
    MatrixXd m(3, 3);
    m << 0.684, 0.939, 0.969,
         0.964, 0.160, 0.953,
         0.964, 0.960, 0.633;
    return m;
}

MatrixXd random_payoff(spotkick::Rng& rng, int rows, int cols) {
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform();
    return m;
}

}  // namespace

TEST_CASE("bimatrix construction validates shapes", "[nash]") {
    REQUIRE_THROWS_AS(BimatrixGame(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 3)),
                      spotkick::DimensionMismatch);
    REQUIRE_THROWS_AS(BimatrixGame(MatrixXd(0, 0), MatrixXd(0, 0)), spotkick::DimensionMismatch);
    const auto g = BimatrixGame::constant_sum(kPalacios);
    CHECK((g.A + g.B - MatrixXd::Ones(2, 2)).norm() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("expected payoff is the bilinear form", "[nash]") {
    const auto g = BimatrixGame::constant_sum(kReproduction);
    MixedProfile p;
    p.row = VectorXd(2);
    p.row << 0.525, 0.475;
    p.col = VectorXd(2);
    p.col << 0.615, 0.385;
    // 0.525*(0.704*0.615 + 0.907*0.385) + 0.475*(0.894*0.615 + 0.640*0.385)
    const double direct = 0.525 * (0.704 * 0.615 + 0.907 * 0.385) +
                          0.475 * (0.894 * 0.615 + 0.640 * 0.385);
    CHECK(expected_payoff(g, p, Player::Row) == Catch::Approx(direct).margin(1e-12));
    CHECK(expected_payoff(g, p, Player::Col) == Catch::Approx(1.0 - direct).margin(1e-12));
    MixedProfile bad = p;
    bad.col = VectorXd::Ones(3) / 3.0;
    REQUIRE_THROWS_AS(expected_payoff(g, bad, Player::Row), spotkick::DimensionMismatch);
}

TEST_CASE("best response agrees with exhaustive search on random games", "[nash]") {
    spotkick::Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(3));
        const int n = 2 + static_cast<int>(rng.below(3));
        const auto g = BimatrixGame::constant_sum(random_payoff(rng, m, n));
        VectorXd col = VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) col[j] = rng.uniform() + 1e-3;
        col /= col.sum();

        const auto br = best_response(g, Player::Row, col);
        double best = -1.0;
        for (int i = 0; i < m; ++i) best = std::max(best, (g.A * col)[i]);
        CHECK(br.value == Catch::Approx(best).margin(1e-12));
        for (int action : br.actions)
            CHECK((g.A * col)[action] == Catch::Approx(best).margin(kTieTol * 2));
    }
}

TEST_CASE("epsilon of observed play in the reproduced table", "[nash]") {
    const auto g = BimatrixGame::constant_sum(kReproduction);
    MixedProfile empirical;
    empirical.row = VectorXd(2);
    empirical.row << 0.525, 0.475;
    empirical.col = VectorXd(2);
    empirical.col << 0.615, 0.385;
    const auto rep = epsilon_of_profile(g, empirical);
    const auto brute = oracle::brute_force_epsilon(to_oracle(kReproduction), 1.0,
                                                   to_vec(empirical.row), to_vec(empirical.col));
    CHECK(rep.row_gain == Catch::Approx(brute.row_gain).margin(1e-9));
    CHECK(rep.col_gain == Catch::Approx(brute.col_gain).margin(1e-9));
    CHECK(rep.epsilon == Catch::Approx(brute.epsilon).margin(1e-9));
    // the observed mix is nearly optimal: under one percentage point of value
    CHECK(rep.epsilon == Catch::Approx(0.008656125).margin(1e-9));
    CHECK(rep.mean_gain() == Catch::Approx(0.5 * (rep.row_gain + rep.col_gain)).margin(1e-15));
}

TEST_CASE("epsilon is zero exactly at equilibrium", "[nash]") {
    const auto sol = solve_constant_sum(kPalacios);
    const auto g = BimatrixGame::constant_sum(kPalacios);
    CHECK(epsilon_of_profile(g, sol.profile).epsilon <= 1e-10);
}

TEST_CASE("LP solver reproduces the 2x2 closed form", "[nash]") {
    const auto sol = solve_constant_sum(kPalacios);
    const auto closed = oracle::closed_form_2x2(0.670, 0.929, 0.950, 0.583);
    REQUIRE(is_distribution(sol.profile.row));
    REQUIRE(is_distribution(sol.profile.col));
    CHECK(sol.profile.row[0] == Catch::Approx(closed.row0).margin(1e-9));
    CHECK(sol.profile.col[0] == Catch::Approx(closed.col0).margin(1e-9));
    CHECK(sol.value == Catch::Approx(closed.value).margin(1e-9));
    CHECK(sol.value == Catch::Approx(0.7858466453674122).margin(1e-9));

    // published mixes, rounded to three decimals in the source table
    CHECK(sol.profile.row[0] == Catch::Approx(0.607).margin(0.03));
    CHECK(sol.profile.row[1] == Catch::Approx(0.393).margin(0.03));
    CHECK(sol.profile.col[0] == Catch::Approx(0.568).margin(0.03));
    CHECK(sol.profile.col[1] == Catch::Approx(0.432).margin(0.03));
}

TEST_CASE("reproduced table's Nash lands near the published mixes", "[nash]") {
    const auto sol = solve_constant_sum(kReproduction);
    const auto closed = oracle::closed_form_2x2(0.704, 0.907, 0.894, 0.640);
    CHECK(sol.profile.row[0] == Catch::Approx(closed.row0).margin(1e-9));
    CHECK(sol.profile.col[0] == Catch::Approx(closed.col0).margin(1e-9));
    CHECK(sol.profile.row[0] == Catch::Approx(0.569).margin(0.02));
    CHECK(sol.profile.row[1] == Catch::Approx(0.431).margin(0.02));
    CHECK(sol.profile.col[0] == Catch::Approx(0.592).margin(0.02));
    CHECK(sol.profile.col[1] == Catch::Approx(0.408).margin(0.02));
}

TEST_CASE("3x3 direction game solves to the exact interior equilibrium", "[nash]") {
    const auto sol = solve_constant_sum(lcr_payoffs());
    // exact solution of the indifference system, solved in rational arithmetic:
    // row = (1663/3598, 2379/16448, 45267/115136), col = (117/257, 40/257, 100/257)
    CHECK(sol.profile.row[0] == Catch::Approx(1663.0 / 3598.0).margin(1e-9));
    CHECK(sol.profile.row[1] == Catch::Approx(2379.0 / 16448.0).margin(1e-9));
    CHECK(sol.profile.row[2] == Catch::Approx(45267.0 / 115136.0).margin(1e-9));
    CHECK(sol.profile.col[0] == Catch::Approx(117.0 / 257.0).margin(1e-9));
    CHECK(sol.profile.col[1] == Catch::Approx(40.0 / 257.0).margin(1e-9));
    CHECK(sol.profile.col[2] == Catch::Approx(100.0 / 257.0).margin(1e-9));
    CHECK(sol.value == Catch::Approx(0.8345836575875486).margin(1e-9));

    const auto enumerated = solve_support_enumeration(BimatrixGame::constant_sum(lcr_payoffs()));
    REQUIRE_FALSE(enumerated.equilibria.empty());
    const auto* headline = select_headline(enumerated);
    REQUIRE(headline != nullptr);
    CHECK(headline->row_payoff == Catch::Approx(sol.value).margin(1e-9));
    CHECK((headline->profile.row - sol.profile.row).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((headline->profile.col - sol.profile.col).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("solver handles dominant strategies and degenerate shapes", "[nash]") {
    SECTION("dominant row and column") {
        const auto sol = solve_constant_sum(mat2(0.9, 0.8, 0.5, 0.1));
        CHECK(sol.profile.row[0] == Catch::Approx(1.0).margin(1e-9));
        CHECK(sol.profile.col[1] == Catch::Approx(1.0).margin(1e-9));
        CHECK(sol.value == Catch::Approx(0.8).margin(1e-9));
    }
    SECTION("1x1 game") {
        const auto sol = solve_constant_sum(MatrixXd::Constant(1, 1, 0.37));
        CHECK(sol.value == Catch::Approx(0.37).margin(1e-12));
        CHECK(sol.profile.row[0] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("single row: column player picks the minimum") {
        MatrixXd m(1, 3);
        m << 0.2, 0.9, 0.4;
        const auto sol = solve_constant_sum(m);
        CHECK(sol.value == Catch::Approx(0.2).margin(1e-9));
        CHECK(sol.profile.col[0] == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("single column: row player picks the maximum") {
        MatrixXd m(3, 1);
        m << 0.2, 0.9, 0.4;
        const auto sol = solve_constant_sum(m);
        CHECK(sol.value == Catch::Approx(0.9).margin(1e-9));
        CHECK(sol.profile.row[1] == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("constant matrix") {
        const auto sol = solve_constant_sum(MatrixXd::Constant(3, 3, 0.5));
        CHECK(sol.value == Catch::Approx(0.5).margin(1e-9));
        CHECK(is_distribution(sol.profile.row));
        CHECK(is_distribution(sol.profile.col));
    }
    SECTION("non-finite payoffs are rejected") {
        MatrixXd m = mat2(0.1, 0.2, 0.3, std::nan(""));
        REQUIRE_THROWS_AS(solve_constant_sum(m), spotkick::ArgumentError);
    }
}

TEST_CASE("equilibria are invariant under positive affine payoff maps", "[nash]") {
    spotkick::Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(3));
        const int n = 2 + static_cast<int>(rng.below(3));
        const MatrixXd payoff = random_payoff(rng, m, n);
        const double alpha = 0.5 + 2.0 * rng.uniform();
        const double beta = -1.0 + 2.0 * rng.uniform();

        const auto base = solve_constant_sum(payoff);
        const auto mapped = solve_constant_sum((alpha * payoff.array() + beta).matrix());
        CHECK(mapped.value == Catch::Approx(alpha * base.value + beta).margin(1e-8));
        // the mapped game's equilibrium must still be an equilibrium of the base game
        const auto g = BimatrixGame::constant_sum(payoff);
        CHECK(epsilon_of_profile(g, mapped.profile).epsilon < 1e-8);
    }
}

TEST_CASE("support enumeration finds the matching-pennies equilibrium", "[nash]") {
    MatrixXd a(2, 2);
    a << 1, -1, -1, 1;
    const BimatrixGame g(a, -a);
    const auto result = solve_support_enumeration(g);
    REQUIRE(result.equilibria.size() == 1);
    const auto& eq = result.equilibria.front();
    CHECK(eq.profile.row[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(eq.profile.col[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(eq.row_payoff == Catch::Approx(0.0).margin(1e-12));
    CHECK(eq.row_support == std::vector<int>{0, 1});
}

TEST_CASE("support enumeration flags degenerate games", "[nash]") {
    const auto g = BimatrixGame::constant_sum(MatrixXd::Constant(2, 2, 0.4));
    const auto result = solve_support_enumeration(g);
    CHECK(result.degenerate);
    CHECK(result.skipped_supports > 0);
    CHECK(result.equilibria.size() >= 4);  // every pure profile is an equilibrium
    for (const auto& eq : result.equilibria)
        CHECK(eq.row_payoff == Catch::Approx(0.4).margin(1e-12));
}

TEST_CASE("support enumeration respects the size cap", "[nash]") {
    const auto g = BimatrixGame::constant_sum(MatrixXd::Constant(6, 2, 0.5));
    REQUIRE_THROWS_AS(solve_support_enumeration(g, 5), spotkick::ArgumentError);
}

TEST_CASE("LP and support enumeration agree on random games", "[nash]") {
    spotkick::Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(3));
        const int n = 2 + static_cast<int>(rng.below(3));
        const MatrixXd payoff = random_payoff(rng, m, n);
        const auto lp = solve_constant_sum(payoff);
        const auto g = BimatrixGame::constant_sum(payoff);
        CHECK(epsilon_of_profile(g, lp.profile).epsilon <= 1e-9);

        const auto se = solve_support_enumeration(g);
        REQUIRE_FALSE(se.equilibria.empty());
        for (const auto& eq : se.equilibria) {
            CHECK(eq.row_payoff == Catch::Approx(lp.value).margin(1e-6));
            const auto brute = oracle::brute_force_epsilon(to_oracle(payoff), 1.0,
                                                           to_vec(eq.profile.row),
                                                           to_vec(eq.profile.col));
            CHECK(brute.epsilon <= 1e-8);
        }
    }
}

TEST_CASE("normalization helpers", "[nash]") {
    VectorXd v(3);
    v << 0.2, -1e-12, 0.3;
    const auto n = normalized(v);
    CHECK(n.sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(n.minCoeff() >= 0.0);
    VectorXd zero = VectorXd::Zero(2);
    REQUIRE_THROWS_AS(normalized(zero), spotkick::ArgumentError);
    CHECK_FALSE(is_distribution(zero));
    VectorXd ok(2);
    ok << 0.25, 0.75;
    CHECK(is_distribution(ok));
}
