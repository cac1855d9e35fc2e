#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spotkick/clustering.hpp"
#include "spotkick/config.hpp"
#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/game.hpp"
#include "spotkick/nash.hpp"
#include "spotkick/player_vectors.hpp"
#include "spotkick/stats.hpp"

// Publication-style outputs: payoff tables with count annotations, Nash vs
// empirical tables with divergence footers, p-value tables, and a full
// analysis document that is byte-identical across reruns with the same
// dataset, config, and seed.

namespace spotkick::report {

enum class TableFormat { Csv, Json, Markdown };

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

inline std::string general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

// payoffs carry 3 decimals; undefined cells render as an em dash
inline std::string payoff_cell(const EmpiricalGame& game, int i, int j) {
  return game.defined(i, j) ? fixed(game.payoff(i, j), 3) : "—";
}

inline double round3(double value) { return std::round(value * 1000.0) / 1000.0; }

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string markdown_table(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << "|";
    for (const auto& cell : rows[r]) out << " " << cell << " |";
    out << "\n";
    if (r == 0) {
      out << "|";
      for (std::size_t c = 0; c < rows[0].size(); ++c) out << "---|";
      out << "\n";
    }
  }
  return out.str();
}

inline std::string csv_table(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) csv::write_row(out, row);
  return out.str();
}

}  // namespace detail

// Percentage with two significant digits, truncated toward zero so published
// values like 0.049% survive instead of rounding up to 0.05%.
inline std::string format_jsd_percent(double jsd_nats) {
  const double pct = jsd_nats * 100.0;
  if (pct <= 0.0) return "0%";
  int decimals = 1 - static_cast<int>(std::floor(std::log10(pct)));
  decimals = std::clamp(decimals, 0, 9);
  const double scale = std::pow(10.0, decimals);
  return detail::fixed(std::floor(pct * scale) / scale, decimals) + "%";
}

// Six decimals, switching to scientific below 1e-6.
inline std::string format_p_value(double p) {
  if (p >= 1e-6 || p <= 0.0) return detail::fixed(p, 6);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", p);
  return buf;
}

// ---------------------------------------------------------------------------
// Table renderers
// ---------------------------------------------------------------------------

// Rows are kicker actions, columns keeper actions; the attempts table rides
// along so every payoff is traceable to its sample size.
inline std::string render_payoff_table(const EmpiricalGame& game, TableFormat format) {
  const int n_rows = static_cast<int>(game.row_actions.size());
  const int n_cols = static_cast<int>(game.col_actions.size());
  if (format == TableFormat::Json) {
    nlohmann::json j;
    j["row_actions"] = game.row_actions;
    j["col_actions"] = game.col_actions;
    nlohmann::json payoff = nlohmann::json::array();
    nlohmann::json attempts = nlohmann::json::array();
    for (int i = 0; i < n_rows; ++i) {
      nlohmann::json prow = nlohmann::json::array();
      nlohmann::json arow = nlohmann::json::array();
      for (int jx = 0; jx < n_cols; ++jx) {
        if (game.defined(i, jx))
          prow.push_back(detail::round3(game.payoff(i, jx)));
        else
          prow.push_back(nullptr);
        arow.push_back(game.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(jx)].attempts);
      }
      payoff.push_back(std::move(prow));
      attempts.push_back(std::move(arow));
    }
    j["payoff"] = std::move(payoff);
    j["attempts"] = std::move(attempts);
    return j.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> payoff_rows, attempt_rows;
  std::vector<std::string> header = {format == TableFormat::Csv ? "payoff" : ""};
  header.insert(header.end(), game.col_actions.begin(), game.col_actions.end());
  payoff_rows.push_back(header);
  header[0] = format == TableFormat::Csv ? "attempts" : "";
  attempt_rows.push_back(header);
  for (int i = 0; i < n_rows; ++i) {
    std::vector<std::string> prow = {game.row_actions[static_cast<std::size_t>(i)]};
    std::vector<std::string> arow = {game.row_actions[static_cast<std::size_t>(i)]};
    for (int jx = 0; jx < n_cols; ++jx) {
      prow.push_back(detail::payoff_cell(game, i, jx));
      arow.push_back(std::to_string(
          game.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(jx)].attempts));
    }
    payoff_rows.push_back(std::move(prow));
    attempt_rows.push_back(std::move(arow));
  }
  if (format == TableFormat::Csv)
    return detail::csv_table(payoff_rows) + "\n" + detail::csv_table(attempt_rows);
  return detail::markdown_table(payoff_rows) + "\nAttempts:\n\n" + detail::markdown_table(attempt_rows);
}

// Two rows (Nash, Empirical) spanning both players' actions, with the
// divergence footer quoted as a percentage.
inline std::string render_nash_table(const nash::MixedProfile& nash_profile,
                                     const nash::MixedProfile& empirical, double jsd,
                                     const std::vector<std::string>& row_labels,
                                     const std::vector<std::string>& col_labels,
                                     TableFormat format) {
  if (nash_profile.row.size() != empirical.row.size() ||
      nash_profile.col.size() != empirical.col.size() ||
      nash_profile.row.size() != static_cast<Eigen::Index>(row_labels.size()) ||
      nash_profile.col.size() != static_cast<Eigen::Index>(col_labels.size()))
    throw DimensionMismatch("profiles and labels differ in dimension");

  if (format == TableFormat::Json) {
    nlohmann::json j;
    j["actions"] = row_labels;
    for (const auto& label : col_labels) j["actions"].push_back(label);
    auto fill = [&](const nash::MixedProfile& p) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index i = 0; i < p.row.size(); ++i) row.push_back(detail::round3(p.row[i]));
      for (Eigen::Index i = 0; i < p.col.size(); ++i) row.push_back(detail::round3(p.col[i]));
      return row;
    };
    j["nash"] = fill(nash_profile);
    j["empirical"] = fill(empirical);
    j["jsd"] = jsd;
    j["jsd_percent"] = format_jsd_percent(jsd);
    return j.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {""};
  header.insert(header.end(), row_labels.begin(), row_labels.end());
  header.insert(header.end(), col_labels.begin(), col_labels.end());
  rows.push_back(header);
  auto fill = [&](const std::string& name, const nash::MixedProfile& p) {
    std::vector<std::string> row = {name};
    for (Eigen::Index i = 0; i < p.row.size(); ++i) row.push_back(detail::fixed(p.row[i], 3));
    for (Eigen::Index i = 0; i < p.col.size(); ++i) row.push_back(detail::fixed(p.col[i], 3));
    rows.push_back(std::move(row));
  };
  fill("Nash", nash_profile);
  fill("Empirical", empirical);
  const std::string footer = "Jensen–Shannon divergence: " + format_jsd_percent(jsd);
  if (format == TableFormat::Csv)
    return detail::csv_table(rows) + "\n" + footer + "\n";
  return detail::markdown_table(rows) + "\n" + footer + "\n";
}

// P-value table; untestable cells render as an em dash.
inline std::string render_p_value_table(const stats::PValueTable& table, TableFormat format) {
  if (format == TableFormat::Json) {
    nlohmann::json j;
    j["row_labels"] = table.row_labels;
    j["col_labels"] = table.col_labels;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& row : table.cells) {
      nlohmann::json jrow = nlohmann::json::array();
      for (const auto& cell : row) {
        if (cell)
          jrow.push_back({{"t", cell->t_statistic},
                          {"df", cell->degrees_of_freedom},
                          {"p", cell->p_value},
                          {"n_a", cell->n_a},
                          {"n_b", cell->n_b}});
        else
          jrow.push_back(nullptr);
      }
      cells.push_back(std::move(jrow));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {format == TableFormat::Csv ? "p_value" : ""};
  header.insert(header.end(), table.col_labels.begin(), table.col_labels.end());
  rows.push_back(header);
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    std::vector<std::string> row = {table.row_labels[i]};
    for (const auto& cell : table.cells[i])
      row.push_back(cell ? format_p_value(cell->p_value) : "—");
    rows.push_back(std::move(row));
  }
  return format == TableFormat::Csv ? detail::csv_table(rows) : detail::markdown_table(rows);
}

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

struct ReportSection {
  std::string id;
  std::string caption;
  nlohmann::json data;
  std::string markdown;
  std::vector<std::pair<std::string, std::string>> tables;   // filename -> CSV body
  std::vector<std::pair<std::string, std::string>> figures;  // filename -> CSV body
  std::optional<std::string> error;
};

struct AnalysisReport {
  std::string dataset_hash;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::vector<ReportSection> sections;
};

namespace detail {

inline nlohmann::json profile_json(const nash::MixedProfile& p) {
  nlohmann::json j;
  j["row"] = std::vector<double>(p.row.data(), p.row.data() + p.row.size());
  j["col"] = std::vector<double>(p.col.data(), p.col.data() + p.col.size());
  return j;
}

inline nlohmann::json p_table_json(const stats::PValueTable& table) {
  return nlohmann::json::parse(render_p_value_table(table, TableFormat::Json));
}

inline std::string dataset_hash(const KickDataset& ds, const std::vector<ActionEvent>* events) {
  std::ostringstream canonical;
  write_kick_records(canonical, ds);
  if (events) write_action_events(canonical, *events);
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.str())));
  return buf;
}

// One game section: payoff and counts tables, LP Nash, empirical profile,
// divergence, and (for the headline game) the epsilon of observed play.
inline ReportSection game_section(const std::string& id, const std::string& caption,
                                  const KickDataset& ds, const ActionAbstraction& abstraction,
                                  bool with_epsilon) {
  ReportSection section;
  section.id = id;
  section.caption = caption;
  const auto game = build_empirical_game(ds, abstraction);
  if (!game.fully_defined())
    throw MissingData("payoff table has undefined cells; cannot solve for Nash");
  const auto solution = nash::solve_constant_sum(game.payoff, game.constant_sum);
  const auto empirical = empirical_profile(game);
  const double divergence = stats::game_jsd(solution.profile, empirical);

  section.data["game"] = game_to_json(game);
  section.data["nash"] = profile_json(solution.profile);
  section.data["value"] = solution.value;
  section.data["empirical"] = profile_json(empirical);
  section.data["jsd"] = divergence;
  section.data["total_attempts"] = game.total_attempts();

  std::ostringstream md;
  md << "## " << caption << "\n\n";
  md << render_payoff_table(game, TableFormat::Markdown) << "\n";
  md << render_nash_table(solution.profile, empirical, divergence, game.row_actions,
                          game.col_actions, TableFormat::Markdown);
  if (with_epsilon) {
    nash::BimatrixGame bimatrix = nash::BimatrixGame::constant_sum(game.payoff, game.constant_sum);
    const auto eps = nash::epsilon_of_profile(bimatrix, empirical);
    section.data["epsilon"] = {{"epsilon", eps.epsilon},
                               {"row_gain", eps.row_gain},
                               {"col_gain", eps.col_gain}};
    md << "\nObserved play is an ε-Nash equilibrium with ε = " << fixed(eps.epsilon, 4)
       << " (" << format_jsd_percent(eps.epsilon) << " of the unit payoff): kicker gain "
       << fixed(eps.row_gain, 4) << ", keeper gain " << fixed(eps.col_gain, 4) << ".\n";
  }
  section.markdown = md.str();
  section.tables.emplace_back(id + "_payoff.csv", render_payoff_table(game, TableFormat::Csv));
  section.tables.emplace_back(id + "_nash.csv",
                              render_nash_table(solution.profile, empirical, divergence,
                                                game.row_actions, game.col_actions,
                                                TableFormat::Csv));
  return section;
}

inline ReportSection footedness_section(const KickDataset& ds, const RunConfig& cfg) {
  ReportSection section;
  section.id = "footedness";
  section.caption = "Footedness equivalence p-values";
  const ActionAbstraction nat{AbstractionKind::NaturalNonNatural, cfg.keeper_center};
  const ActionAbstraction lcr{AbstractionKind::LeftCenterRight, cfg.keeper_center};
  const auto nat_table = stats::footedness_p_table(ds, nat, cfg.test_kind());
  const auto lcr_table = stats::footedness_p_table(ds, lcr, cfg.test_kind());
  section.data["natural"] = p_table_json(nat_table);
  section.data["lcr"] = p_table_json(lcr_table);
  std::ostringstream md;
  md << "## " << section.caption << "\n\n";
  md << "Per-cell tests of equal scoring rates between left- and right-footed kickers.\n\n";
  md << "Natural / Non-Natural cells:\n\n" << render_p_value_table(nat_table, TableFormat::Markdown);
  md << "\nLeft / Center / Right cells:\n\n" << render_p_value_table(lcr_table, TableFormat::Markdown);
  section.markdown = md.str();
  section.tables.emplace_back("footedness_natural.csv",
                              render_p_value_table(nat_table, TableFormat::Csv));
  section.tables.emplace_back("footedness_lcr.csv",
                              render_p_value_table(lcr_table, TableFormat::Csv));
  return section;
}

inline ReportSection experience_section(const KickDataset& ds, const RunConfig& cfg) {
  ReportSection section;
  section.id = "experience";
  section.caption = "Footedness p-values by kicker experience";
  const ActionAbstraction nat{AbstractionKind::NaturalNonNatural, cfg.keeper_center};
  const auto sweep = stats::p_value_vs_min_experience(ds, nat, cfg.sweep_thresholds, cfg.test_kind());
  const auto bands = stats::p_value_by_experience_band(ds, nat, cfg.bands, cfg.test_kind());

  nlohmann::json jsweep = nlohmann::json::array();
  std::vector<std::vector<std::string>> fig;
  std::vector<std::string> fig_header = {"min_appearances", "kicks"};
  for (const auto& rl : nat.row_labels())
    for (const auto& cl : nat.col_labels()) fig_header.push_back(rl + "/" + cl);
  fig.push_back(fig_header);
  for (const auto& point : sweep) {
    nlohmann::json jp;
    jp["threshold"] = point.threshold;
    jp["kicks"] = point.dataset_size;
    jp["table"] = point.table ? p_table_json(*point.table) : nlohmann::json();
    jsweep.push_back(std::move(jp));
    std::vector<std::string> row = {std::to_string(point.threshold),
                                    std::to_string(point.dataset_size)};
    const auto n_rows = nat.row_labels().size(), n_cols = nat.col_labels().size();
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j) {
        const bool have = point.table && point.table->cells[i][j].has_value();
        row.push_back(have ? format_p_value(point.table->cells[i][j]->p_value) : "");
      }
    fig.push_back(std::move(row));
  }
  section.data["sweep"] = std::move(jsweep);

  nlohmann::json jbands = nlohmann::json::array();
  std::ostringstream md;
  md << "## " << section.caption << "\n\n";
  md << "Minimum-appearance sweep (thresholds";
  for (int t : cfg.sweep_thresholds) md << " " << t;
  md << ") is exported as figure data. Experience bands:\n";
  for (const auto& point : bands) {
    nlohmann::json jp;
    jp["lo"] = point.band.lo;
    jp["hi"] = point.band.hi;
    jp["kicks"] = point.dataset_size;
    jp["table"] = point.table ? p_table_json(*point.table) : nlohmann::json();
    jbands.push_back(std::move(jp));
    md << "\nKickers with " << point.band.lo << "–" << point.band.hi << " appearances ("
       << point.dataset_size << " kicks):\n\n";
    if (point.table)
      md << render_p_value_table(*point.table, TableFormat::Markdown);
    else
      md << "insufficient data\n";
  }
  section.data["bands"] = std::move(jbands);
  section.markdown = md.str();
  section.figures.emplace_back("p_value_by_min_experience.csv", csv_table(fig));
  return section;
}

inline ReportSection heatmap_section(const KickDataset& ds, const std::vector<ActionEvent>* events) {
  ReportSection section;
  section.id = "heatmap";
  section.caption = "Shot heatmap";
  HeatmapGrid grid;
  std::string source;
  if (events) {
    grid = shot_heatmap(*events, vectors::GridSpec{}.width, vectors::GridSpec{}.height);
    source = "events";
  } else {
    grid = shot_heatmap(ds);
    source = "directions";
  }
  section.data["width"] = grid.width;
  section.data["height"] = grid.height;
  section.data["total"] = grid.total();
  section.data["source"] = source;
  std::ostringstream csv;
  write_heatmap_csv(csv, grid);
  std::ostringstream md;
  md << "## " << section.caption << "\n\n";
  if (events)
    md << "Binned shot-event coordinates on the " << grid.width << "×" << grid.height
       << " grid (" << grid.total() << " shots); exported as figure data.\n";
  else
    md << "No event coordinates supplied; left/center/right direction histogram ("
       << grid.total() << " kicks) exported as figure data.\n";
  section.markdown = md.str();
  section.figures.emplace_back("shot_heatmap.csv", csv.str());
  return section;
}

inline ReportSection embeddings_section(const KickDataset& ds,
                                        const std::vector<ActionEvent>& events,
                                        const RunConfig& cfg) {
  ReportSection section;
  section.id = "embeddings";
  section.caption = "Player vectors and cluster analysis";

  const auto player_vectors = vectors::assemble_player_vectors(events, cfg.segments, cfg.seed);
  std::vector<std::string> ids;
  for (const auto& v : player_vectors) ids.push_back(v.player_id);
  const Eigen::MatrixXd raw = vectors::vectors_to_matrix(player_vectors);
  Eigen::MatrixXd features = vectors::zscore_columns(raw);

  std::vector<std::string> kept_ids = ids;
  if (cfg.remove_outliers && cfg.outlier_count > 0 &&
      cfg.outlier_count < static_cast<int>(ids.size())) {
    const auto drop = cluster::outlier_indices(features, cfg.outlier_count);
    Eigen::MatrixXd reduced(features.rows() - static_cast<Eigen::Index>(drop.size()),
                            features.cols());
    kept_ids.clear();
    Eigen::Index write = 0;
    std::size_t next_drop = 0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      if (next_drop < drop.size() && drop[next_drop] == static_cast<std::size_t>(i)) {
        ++next_drop;
        continue;
      }
      reduced.row(write++) = features.row(i);
      kept_ids.push_back(ids[static_cast<std::size_t>(i)]);
    }
    features = std::move(reduced);
  }

  const int k_hi = std::min<int>(cfg.k_hi, static_cast<int>(features.rows()));
  const int k_lo = std::min(cfg.k_lo, k_hi);
  const auto selection = cluster::select_k_by_inertia_drop(features, k_lo, k_hi, cfg.seed);
  const auto& model = selection.best;
  const auto projection = cluster::pca(features, 2);
  const auto stats_table = cluster::cluster_stats(model, kept_ids, ds);
  const ActionAbstraction nat{AbstractionKind::NaturalNonNatural, cfg.keeper_center};
  const cluster::BootstrapOptions boot{cfg.bootstrap_n, cfg.seed, cfg.threads,
                                       cfg.cluster_min_shots};
  const auto games = cluster::cluster_conditioned_games(model, kept_ids, ds, nat, boot);

  section.data["players"] = ids.size();
  section.data["clustered_players"] = kept_ids.size();
  section.data["k"] = selection.k;
  section.data["k_range"] = {k_lo, k_hi};
  section.data["inertia"] = selection.inertias;
  section.data["explained_variance_ratio"] =
      std::vector<double>(projection.explained_ratio.data(),
                          projection.explained_ratio.data() + projection.explained_ratio.size());

  // vectors export (raw weights, not the z-scored features)
  std::ostringstream vec_csv;
  vectors::write_player_vectors_csv(vec_csv, player_vectors, cfg.segments);
  section.tables.emplace_back("player_vectors.csv", vec_csv.str());

  // assignments and PCA coordinates
  std::vector<std::vector<std::string>> assign_rows = {{"player_id", "cluster"}};
  std::vector<std::vector<std::string>> pca_rows = {{"player_id", "pc1", "pc2", "cluster"}};
  for (std::size_t i = 0; i < kept_ids.size(); ++i) {
    const std::string cluster_label = std::to_string(model.assignments[i] + 1);
    assign_rows.push_back({kept_ids[i], cluster_label});
    pca_rows.push_back({kept_ids[i], general(projection.coords(static_cast<Eigen::Index>(i), 0)),
                        general(projection.coords(static_cast<Eigen::Index>(i), 1)), cluster_label});
  }
  section.tables.emplace_back("cluster_assignments.csv", csv_table(assign_rows));
  section.figures.emplace_back("pca_coordinates.csv", csv_table(pca_rows));

  std::vector<std::vector<std::string>> inertia_rows = {{"k", "inertia"}};
  for (std::size_t i = 0; i < selection.ks.size(); ++i)
    inertia_rows.push_back({std::to_string(selection.ks[i]), general(selection.inertias[i])});
  section.figures.emplace_back("inertia_curve.csv", csv_table(inertia_rows));

  // cluster stats table
  std::vector<std::vector<std::string>> stat_rows = {
      {"cluster", "players", "goals", "shots", "success_rate", "left_foot_goal_share",
       "representative"}};
  nlohmann::json jclusters = nlohmann::json::array();
  auto rate = [](double r) { return std::isnan(r) ? std::string("—") : fixed(r, 1); };
  for (int c = 0; c < model.k; ++c) {
    const auto& row = stats_table.per_cluster[static_cast<std::size_t>(c)];
    const std::string rep = row.players > 0
                                ? cluster::representative_player(model, features, kept_ids, c)
                                : "";
    stat_rows.push_back({std::to_string(c + 1), std::to_string(row.players),
                         std::to_string(row.goals), std::to_string(row.shots),
                         rate(row.success_rate()), rate(row.left_foot_goal_share()), rep});
    jclusters.push_back({{"cluster", c + 1},
                         {"players", row.players},
                         {"goals", row.goals},
                         {"shots", row.shots},
                         {"representative", rep}});
  }
  const auto& tot = stats_table.totals;
  stat_rows.push_back({"total", std::to_string(tot.players), std::to_string(tot.goals),
                       std::to_string(tot.shots), rate(tot.success_rate()),
                       rate(tot.left_foot_goal_share()), ""});
  if (stats_table.unassigned.shots > 0 || stats_table.unassigned.players > 0) {
    const auto& un = stats_table.unassigned;
    stat_rows.push_back({"unassigned", std::to_string(un.players), std::to_string(un.goals),
                         std::to_string(un.shots), rate(un.success_rate()),
                         rate(un.left_foot_goal_share()), ""});
  }
  section.data["clusters"] = std::move(jclusters);
  section.tables.emplace_back("cluster_stats.csv", csv_table(stat_rows));

  // per-cluster games
  nlohmann::json jgames = nlohmann::json::array();
  std::ostringstream md;
  md << "## " << section.caption << "\n\n";
  md << player_vectors.size() << " player vectors (" << cfg.segments.total()
     << " dimensions); inertia-drop selection over k = " << k_lo << "…" << k_hi
     << " chose k = " << selection.k << ".\n\n";
  md << "Cluster statistics:\n\n" << markdown_table(stat_rows) << "\n";
  for (const auto& g : games) {
    nlohmann::json jg;
    jg["cluster"] = g.cluster + 1;
    jg["game"] = game_to_json(g.game);
    jg["nash"] = profile_json(g.nash_profile);
    jg["empirical"] = profile_json(g.empirical);
    jg["jsd"] = g.jsd;
    jg["shots"] = g.shots;
    jg["low_sample"] = g.low_sample;
    jgames.push_back(std::move(jg));
    md << "### Cluster " << (g.cluster + 1) << " (" << g.shots << " shots"
       << (g.low_sample ? ", low sample" : "") << ")\n\n";
    md << render_payoff_table(g.game, TableFormat::Markdown) << "\n";
    md << render_nash_table(g.nash_profile, g.empirical, g.jsd, g.game.row_actions,
                            g.game.col_actions, TableFormat::Markdown);
    md << "\n";
    section.tables.emplace_back("cluster_game_" + std::to_string(g.cluster + 1) + ".csv",
                                render_payoff_table(g.game, TableFormat::Csv));
  }
  section.data["games"] = std::move(jgames);

  // pairwise comparisons over clusters that have kicks
  nlohmann::json jpairs = nlohmann::json::array();
  std::vector<std::vector<std::string>> pair_rows = {
      {"pair", "min_cell_p", "nash_jsd_pct", "empirical_jsd_pct", "footedness_p", "kicker_action_p",
       "keeper_action_p"}};
  for (std::size_t a = 0; a < games.size(); ++a)
    for (std::size_t b = a + 1; b < games.size(); ++b) {
      const int ca = games[a].cluster, cb = games[b].cluster;
      const auto pair = cluster::cluster_pair_report(model, kept_ids, ds, nat, ca, cb, boot);
      const auto equality = cluster::empirical_action_equality_test(model, kept_ids, ds, nat, ca, cb);
      nlohmann::json jp;
      jp["pair"] = {ca + 1, cb + 1};
      jp["min_cell_p"] = pair.min_cell_p ? nlohmann::json(*pair.min_cell_p) : nlohmann::json();
      jp["p_may_be_lower"] = pair.p_may_be_lower;
      jp["nash_jsd"] = pair.nash_jsd;
      jp["empirical_jsd"] = pair.empirical_jsd;
      jp["footedness_p"] =
          pair.footedness ? nlohmann::json(pair.footedness->p_value) : nlohmann::json();
      jp["kicker_action_p"] =
          equality.kicker ? nlohmann::json(equality.kicker->p_value) : nlohmann::json();
      jp["keeper_action_p"] =
          equality.keeper ? nlohmann::json(equality.keeper->p_value) : nlohmann::json();
      jpairs.push_back(std::move(jp));

      char min_p[40];
      if (pair.min_cell_p)
        std::snprintf(min_p, sizeof(min_p), "%s%.2e", pair.p_may_be_lower ? "<" : "",
                      *pair.min_cell_p);
      else
        std::snprintf(min_p, sizeof(min_p), "—");
      pair_rows.push_back(
          {std::to_string(ca + 1) + " vs " + std::to_string(cb + 1), min_p,
           fixed(pair.nash_jsd * 100.0, 2), fixed(pair.empirical_jsd * 100.0, 2),
           pair.footedness ? format_p_value(pair.footedness->p_value) : "—",
           equality.kicker ? format_p_value(equality.kicker->p_value) : "—",
           equality.keeper ? format_p_value(equality.keeper->p_value) : "—"});
    }
  section.data["pairs"] = std::move(jpairs);
  if (pair_rows.size() > 1) {
    md << "Pairwise cluster comparisons:\n\n" << markdown_table(pair_rows);
    section.tables.emplace_back("cluster_pair_tests.csv", csv_table(pair_rows));
  }
  section.markdown = md.str();
  return section;
}

}  // namespace detail

// Runs every analysis stage in a fixed order. A failing section is recorded
// with its error and the remaining sections still run.
inline AnalysisReport build_full_report(const KickDataset& ds,
                                        const std::vector<ActionEvent>* events,
                                        const RunConfig& cfg) {
  AnalysisReport report;
  report.dataset_hash = detail::dataset_hash(ds, events);
  report.config = config_metadata_json(cfg);
  report.seed = cfg.seed;

  const ActionAbstraction nat{AbstractionKind::NaturalNonNatural, cfg.keeper_center};
  const ActionAbstraction lcr{AbstractionKind::LeftCenterRight, cfg.keeper_center};
  KickDataset filtered = cfg.min_appearances > 1
                             ? filter_by_min_appearances(ds, cfg.min_appearances,
                                                         {Role::Kicker, Role::Keeper})
                             : ds;

  auto run = [&report](auto&& builder, const std::string& id, const std::string& caption) {
    try {
      report.sections.push_back(builder());
    } catch (const std::exception& e) {
      ReportSection failed;
      failed.id = id;
      failed.caption = caption;
      failed.error = e.what();
      failed.markdown = "## " + caption + "\n\nSection failed: " + e.what() + "\n";
      report.sections.push_back(std::move(failed));
    }
  };

  run([&] {
    return detail::game_section(
        "natural_game", "Natural / Non-Natural game (kicker vs. goalkeeper)", filtered, nat, true);
  }, "natural_game", "Natural / Non-Natural game (kicker vs. goalkeeper)");
  run([&] { return detail::footedness_section(filtered, cfg); }, "footedness",
      "Footedness equivalence p-values");
  run([&] { return detail::experience_section(ds, cfg); }, "experience",
      "Footedness p-values by kicker experience");
  run([&] {
    return detail::game_section("lcr_game", "Left / Center / Right game (goalkeeper frame)",
                                filtered, lcr, false);
  }, "lcr_game", "Left / Center / Right game (goalkeeper frame)");
  run([&] { return detail::heatmap_section(ds, events); }, "heatmap", "Shot heatmap");
  if (events) {
    run([&] { return detail::embeddings_section(ds, *events, cfg); }, "embeddings",
        "Player vectors and cluster analysis");
  } else {
    ReportSection skipped;
    skipped.id = "embeddings";
    skipped.caption = "Player vectors and cluster analysis";
    skipped.data["available"] = false;
    skipped.markdown = "## " + skipped.caption +
                       "\n\nNo action-event data supplied; embedding and cluster sections were "
                       "skipped.\n";
    report.sections.push_back(std::move(skipped));
  }
  return report;
}

inline nlohmann::json report_to_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["dataset_hash"] = report.dataset_hash;
  j["config"] = report.config;
  j["seed"] = report.seed;
  j["tool_version"] = report.tool_version;
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : report.sections) {
    nlohmann::json js;
    js["id"] = s.id;
    js["caption"] = s.caption;
    js["data"] = s.data;
    if (s.error) js["error"] = *s.error;
    sections.push_back(std::move(js));
  }
  j["sections"] = std::move(sections);
  return j;
}

inline std::string report_to_markdown(const AnalysisReport& report) {
  std::ostringstream md;
  md << "# Penalty kick analysis\n\n";
  md << "- dataset hash: `" << report.dataset_hash << "`\n";
  md << "- seed: " << report.seed << "\n";
  md << "- tool version: " << report.tool_version << "\n\n";
  for (const auto& s : report.sections) {
    md << s.markdown << "\n";
  }
  return md.str();
}

// Writes report.json, report.md, tables/*.csv, figures/*.csv under `dir`.
inline void write_report(const std::filesystem::path& dir, const AnalysisReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "tables");
  fs::create_directories(dir / "figures");
  auto write = [](const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << body;
  };
  write(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write(dir / "report.md", report_to_markdown(report));
  for (const auto& s : report.sections) {
    for (const auto& [name, body] : s.tables) write(dir / "tables" / name, body);
    for (const auto& [name, body] : s.figures) write(dir / "figures" / name, body);
  }
}

}  // namespace spotkick::report
