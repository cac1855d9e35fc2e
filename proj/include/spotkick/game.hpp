#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/nash.hpp"
#include "spotkick/parallel.hpp"
#include "spotkick/rng.hpp"

// Mapping kicks to abstract actions and building empirical constant-sum games,
// with Beta-posterior resampling of payoff tables and goal-mouth heatmaps.

namespace spotkick {

enum class AbstractionKind { NaturalNonNatural, LeftCenterRight };
enum class KeeperCenterPolicy { CenterIsNatural, CenterExcluded };

struct ActionAbstraction {
  AbstractionKind kind = AbstractionKind::NaturalNonNatural;
  KeeperCenterPolicy keeper_center = KeeperCenterPolicy::CenterIsNatural;

  int num_actions() const { return kind == AbstractionKind::NaturalNonNatural ? 2 : 3; }

  // Published table order: N/NN for the natural game, R/C/L for the
  // direction game (directions in the goalkeeper's frame).
  std::vector<std::string> row_labels() const {
    return kind == AbstractionKind::NaturalNonNatural
               ? std::vector<std::string>{"N-S", "NN-S"}
               : std::vector<std::string>{"R-S", "C-S", "L-S"};
  }
  std::vector<std::string> col_labels() const {
    return kind == AbstractionKind::NaturalNonNatural
               ? std::vector<std::string>{"N-G", "NN-G"}
               : std::vector<std::string>{"R-G", "C-G", "L-G"};
  }
};

struct CellCounts {
  long successes = 0;
  long attempts = 0;

  bool operator==(const CellCounts&) const = default;
};

using CountMatrix2D = std::vector<std::vector<CellCounts>>;

// Empirical constant-sum game: per-cell success/attempt counts plus the
// derived scoring-probability matrix. Cells with zero attempts carry NaN and
// are reported as undefined, never silently zero.
struct EmpiricalGame {
  std::vector<std::string> row_actions;
  std::vector<std::string> col_actions;
  CountMatrix2D counts;
  Eigen::MatrixXd payoff;
  double constant_sum = 1.0;

  bool defined(int i, int j) const {
    return counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].attempts > 0;
  }

  bool fully_defined() const {
    for (Eigen::Index i = 0; i < payoff.rows(); ++i)
      for (Eigen::Index j = 0; j < payoff.cols(); ++j)
        if (!defined(static_cast<int>(i), static_cast<int>(j))) return false;
    return true;
  }

  long total_attempts() const {
    long total = 0;
    for (const auto& row : counts)
      for (const auto& cell : row) total += cell.attempts;
    return total;
  }
};

enum class NaturalLabel { Natural, NonNatural, Excluded };

struct NaturalClassification {
  NaturalLabel kicker = NaturalLabel::Natural;
  NaturalLabel keeper = NaturalLabel::Natural;
};

// The kicker's natural side is the keeper's right for right-footed players and
// the keeper's left for left-footed players; center kicks count as natural.
// The keeper's natural side mirrors the kicker's footedness; a center dive is
// governed by the policy.
inline NaturalClassification classify_natural(const KickRecord& kick, KeeperCenterPolicy policy) {
  const Direction natural = kick.kicker_foot == Foot::Right ? Direction::Right : Direction::Left;
  NaturalClassification out;
  out.kicker = (kick.shot_direction == natural || kick.shot_direction == Direction::Center)
                   ? NaturalLabel::Natural
                   : NaturalLabel::NonNatural;
  if (kick.keeper_action == natural) {
    out.keeper = NaturalLabel::Natural;
  } else if (kick.keeper_action == Direction::Center) {
    out.keeper = policy == KeeperCenterPolicy::CenterIsNatural ? NaturalLabel::Natural
                                                               : NaturalLabel::Excluded;
  } else {
    out.keeper = NaturalLabel::NonNatural;
  }
  return out;
}

namespace detail {

// row/col index of a kick under the abstraction, or false when excluded
inline bool classify_cell(const KickRecord& kick, const ActionAbstraction& abstraction, int& row,
                          int& col) {
  if (abstraction.kind == AbstractionKind::NaturalNonNatural) {
    const auto labels = classify_natural(kick, abstraction.keeper_center);
    if (labels.keeper == NaturalLabel::Excluded) return false;
    row = labels.kicker == NaturalLabel::Natural ? 0 : 1;
    col = labels.keeper == NaturalLabel::Natural ? 0 : 1;
    return true;
  }
  auto index = [](Direction d) {
    switch (d) {
      case Direction::Right: return 0;
      case Direction::Center: return 1;
      default: return 2;
    }
  };
  row = index(kick.shot_direction);
  col = index(kick.keeper_action);
  return true;
}

}  // namespace detail

inline EmpiricalGame build_empirical_game(const KickDataset& ds,
                                          const ActionAbstraction& abstraction) {
  EmpiricalGame game;
  game.row_actions = abstraction.row_labels();
  game.col_actions = abstraction.col_labels();
  const int n = abstraction.num_actions();
  game.counts.assign(static_cast<std::size_t>(n), std::vector<CellCounts>(static_cast<std::size_t>(n)));

  long classified = 0;
  for (const auto& kick : ds.records()) {
    int row = 0, col = 0;
    if (!detail::classify_cell(kick, abstraction, row, col)) continue;
    auto& cell = game.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    ++cell.attempts;
    if (kick.outcome == Outcome::Goal) ++cell.successes;
    ++classified;
  }
  if (classified == 0) throw EmptyDataset("no kicks remain under this abstraction");

  game.payoff.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& cell = game.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      game.payoff(i, j) = cell.attempts > 0
                              ? static_cast<double>(cell.successes) / static_cast<double>(cell.attempts)
                              : std::numeric_limits<double>::quiet_NaN();
    }
  return game;
}

// Marginal action frequencies of the observed play.
inline nash::MixedProfile empirical_profile(const EmpiricalGame& game) {
  const auto n_rows = static_cast<Eigen::Index>(game.counts.size());
  const auto n_cols = static_cast<Eigen::Index>(game.counts.front().size());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n_rows), col = Eigen::VectorXd::Zero(n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i)
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const auto a = static_cast<double>(
          game.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].attempts);
      row[i] += a;
      col[j] += a;
    }
  return {nash::normalized(row), nash::normalized(col)};
}

// ---------------------------------------------------------------------------
// Beta-posterior resampling
// ---------------------------------------------------------------------------

// One table per sample index: each cell drawn from Beta(1+s, 1+(a-s)).
// Sample i uses the sub-stream (seed, i), so a table depends only on the seed
// and its index, never on evaluation order.
inline std::vector<Eigen::MatrixXd> sample_payoff_tables(const CountMatrix2D& counts, int n,
                                                         std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample count must be >= 1");
  const auto rows = static_cast<Eigen::Index>(counts.size());
  const auto cols = static_cast<Eigen::Index>(counts.front().size());
  std::vector<Eigen::MatrixXd> tables(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Eigen::MatrixXd t(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        const auto& cell = counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        t(r, c) = rng.beta(1.0 + static_cast<double>(cell.successes),
                           1.0 + static_cast<double>(cell.attempts - cell.successes));
      }
    tables[static_cast<std::size_t>(i)] = std::move(t);
  }
  return tables;
}

// Mean of the Nash profiles of `n` resampled tables, renormalized. Undefined
// cells fall back to the Beta(1,1) prior through the (0,0) counts.
inline nash::MixedProfile bootstrap_nash(const EmpiricalGame& game, int n, std::uint64_t seed,
                                         int threads = 1) {
  const auto tables = sample_payoff_tables(game.counts, n, seed);
  const auto rows = static_cast<Eigen::Index>(game.counts.size());
  const auto cols = static_cast<Eigen::Index>(game.counts.front().size());
  std::vector<nash::MixedProfile> solved(tables.size());
  parallel_for(tables.size(), threads, [&](std::size_t i) {
    solved[i] = nash::solve_constant_sum(tables[i], game.constant_sum).profile;
  });
  Eigen::VectorXd row = Eigen::VectorXd::Zero(rows), col = Eigen::VectorXd::Zero(cols);
  for (const auto& p : solved) {
    row += p.row;
    col += p.col;
  }
  return {nash::normalized(row), nash::normalized(col)};
}

// ---------------------------------------------------------------------------
// Heatmaps
// ---------------------------------------------------------------------------

struct HeatmapGrid {
  int width = 0;
  int height = 0;
  std::vector<std::vector<long>> cells;  // [row][col], row 0 = y in [0, 1/h)

  long total() const {
    long t = 0;
    for (const auto& r : cells)
      for (long c : r) t += c;
    return t;
  }
};

inline HeatmapGrid shot_heatmap(const std::vector<ActionEvent>& events, int width, int height) {
  if (width < 1 || height < 1) throw ArgumentError("grid dimensions must be >= 1");
  HeatmapGrid grid;
  grid.width = width;
  grid.height = height;
  grid.cells.assign(static_cast<std::size_t>(height), std::vector<long>(static_cast<std::size_t>(width), 0));
  for (const auto& e : events) {
    if (e.action_type != ActionType::Shot) continue;
    const int cx = static_cast<int>(e.x * width);
    const int cy = static_cast<int>(e.y * height);
    ++grid.cells[static_cast<std::size_t>(cy)][static_cast<std::size_t>(cx)];
  }
  return grid;
}

// Fallback when only kick directions exist: a 3-bin histogram (L, C, R in the
// goalkeeper's frame).
inline HeatmapGrid shot_heatmap(const KickDataset& ds) {
  HeatmapGrid grid;
  grid.width = 3;
  grid.height = 1;
  grid.cells.assign(1, std::vector<long>(3, 0));
  for (const auto& kick : ds.records()) {
    const int bin = kick.shot_direction == Direction::Left ? 0
                    : kick.shot_direction == Direction::Center ? 1
                                                               : 2;
    ++grid.cells[0][static_cast<std::size_t>(bin)];
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json game_to_json(const EmpiricalGame& game) {
  nlohmann::json j;
  j["row_actions"] = game.row_actions;
  j["col_actions"] = game.col_actions;
  j["constant_sum"] = game.constant_sum;
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json payoff = nlohmann::json::array();
  for (std::size_t i = 0; i < game.counts.size(); ++i) {
    nlohmann::json crow = nlohmann::json::array();
    nlohmann::json prow = nlohmann::json::array();
    for (std::size_t jx = 0; jx < game.counts[i].size(); ++jx) {
      const auto& cell = game.counts[i][jx];
      crow.push_back({{"s", cell.successes}, {"a", cell.attempts}});
      if (cell.attempts > 0)
        prow.push_back(game.payoff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jx)));
      else
        prow.push_back(nullptr);
    }
    counts.push_back(std::move(crow));
    payoff.push_back(std::move(prow));
  }
  j["counts"] = std::move(counts);
  j["payoff"] = std::move(payoff);
  return j;
}

inline EmpiricalGame game_from_json(const nlohmann::json& j) {
  EmpiricalGame game;
  game.row_actions = j.at("row_actions").get<std::vector<std::string>>();
  game.col_actions = j.at("col_actions").get<std::vector<std::string>>();
  game.constant_sum = j.value("constant_sum", 1.0);
  const auto& counts = j.at("counts");
  const auto rows = counts.size();
  game.counts.resize(rows);
  game.payoff.resize(static_cast<Eigen::Index>(rows),
                     rows ? static_cast<Eigen::Index>(counts.front().size()) : 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t jx = 0; jx < counts[i].size(); ++jx) {
      CellCounts cell{counts[i][jx].at("s").get<long>(), counts[i][jx].at("a").get<long>()};
      if (cell.successes < 0 || cell.attempts < cell.successes)
        throw InvalidSpec("inconsistent cell counts in game JSON");
      game.counts[i].push_back(cell);
      const auto& p = j.at("payoff")[i][jx];
      game.payoff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jx)) =
          p.is_null() ? std::numeric_limits<double>::quiet_NaN() : p.get<double>();
    }
  }
  return game;
}

inline void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid) {
  for (const auto& row : grid.cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

}  // namespace spotkick
