#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spotkick/clustering.hpp"
#include "spotkick/config.hpp"
#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/game.hpp"
#include "spotkick/nash.hpp"
#include "spotkick/player_vectors.hpp"
#include "spotkick/report.hpp"
#include "spotkick/stats.hpp"

// Command-line front end. Exit codes: 0 success, 2 data error, 3 numeric
// error, 4 argument or config error.

namespace {

namespace fs = std::filesystem;
using namespace spotkick;

// ---------------------------------------------------------------------------
// Option parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ArgumentError("invalid " + what + ": '" + text + "'");
  }
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_int(part, what));
  if (values.empty()) throw ArgumentError(what + " must be non-empty");
  return values;
}

// "1-7,5-12" -> inclusive bands
std::vector<stats::ExperienceBand> parse_bands(const std::string& text) {
  std::vector<stats::ExperienceBand> bands;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) throw ArgumentError("band '" + part + "' must look like lo-hi");
    bands.push_back({parse_int(part.substr(0, dash), "band bound"),
                     parse_int(part.substr(dash + 1), "band bound")});
  }
  if (bands.empty()) throw ArgumentError("bands must be non-empty");
  return bands;
}

vectors::SegmentSizes parse_segments(const std::string& text) {
  const auto values = parse_int_list(text, "segment size");
  if (values.size() != 4)
    throw ArgumentError("--segments needs four comma-separated sizes (pass,dribble,shot,cross)");
  return {values[0], values[1], values[2], values[3]};
}

AbstractionKind parse_abstraction(const std::string& text) {
  if (text == "natural") return AbstractionKind::NaturalNonNatural;
  if (text == "lcr") return AbstractionKind::LeftCenterRight;
  throw ArgumentError("--abstraction must be 'natural' or 'lcr'");
}

KeeperCenterPolicy parse_keeper_center(const std::string& text) {
  if (text == "natural") return KeeperCenterPolicy::CenterIsNatural;
  if (text == "exclude") return KeeperCenterPolicy::CenterExcluded;
  throw ArgumentError("--keeper-center must be 'natural' or 'exclude'");
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ArgumentError("config key '" + key + "' needs a boolean, got '" + text + "'");
}

// Extra per-command settings that live outside RunConfig.
struct CliExtras {
  std::string sweep;
  std::string bands;
  std::string k = "auto";
  bool zscore_export = false;
};

// Flat key=value file; keys mirror the long option names. Flags given on the
// command line override anything set here.
void apply_config_file(RunConfig& cfg, CliExtras& extras, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kicks") cfg.kicks_path = value;
    else if (key == "events") cfg.events_path = value;
    else if (key == "out") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "threads") cfg.threads = parse_int(value, "threads");
    else if (key == "min-appearances") cfg.min_appearances = parse_int(value, "min-appearances");
    else if (key == "bootstrap-n") cfg.bootstrap_n = parse_int(value, "bootstrap-n");
    else if (key == "abstraction") cfg.abstraction = parse_abstraction(value);
    else if (key == "keeper-center") cfg.keeper_center = parse_keeper_center(value);
    else if (key == "pooled") cfg.pooled = parse_bool(value, key);
    else if (key == "segments") cfg.segments = parse_segments(value);
    else if (key == "k-range") {
      const auto dash = value.find('-');
      if (dash == std::string::npos) throw ArgumentError("k-range must look like lo-hi");
      cfg.k_lo = parse_int(value.substr(0, dash), "k-range");
      cfg.k_hi = parse_int(value.substr(dash + 1), "k-range");
    } else if (key == "min-shots") cfg.cluster_min_shots = parse_int(value, "min-shots");
    else if (key == "remove-outliers") cfg.remove_outliers = parse_bool(value, key);
    else if (key == "outlier-count") cfg.outlier_count = parse_int(value, "outlier-count");
    else if (key == "sweep") extras.sweep = value;
    else if (key == "bands") extras.bands = value;
    else if (key == "k") extras.k = value;
    else if (key == "zscore") extras.zscore_export = parse_bool(value, key);
    else throw ArgumentError("unknown config key '" + key + "'");
  }
}

// ---------------------------------------------------------------------------
// I/O helpers
// ---------------------------------------------------------------------------

KickDataset load_kicks(const std::string& path) {
  if (path.empty()) throw ArgumentError("--kicks is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open kicks file: " + path);
  return parse_kick_records(in);
}

std::vector<ActionEvent> load_events(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open events file: " + path);
  return parse_action_events(in);
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << body;
}

KickDataset filtered_for_games(const KickDataset& ds, const RunConfig& cfg) {
  if (cfg.min_appearances <= 1) return ds;
  return filter_by_min_appearances(ds, cfg.min_appearances, {Role::Kicker, Role::Keeper});
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_ingest_check(const RunConfig& cfg) {
  const auto ds = load_kicks(cfg.kicks_path);
  std::map<std::string, long> outcomes, feet;
  for (const auto& r : ds.records()) {
    ++outcomes[to_string(r.outcome)];
    ++feet[to_string(r.kicker_foot)];
  }
  std::cout << "kicks: " << ds.size() << "\n";
  std::cout << "kickers: " << ds.appearance_counts(Role::Kicker).size() << "\n";
  std::cout << "keepers: " << ds.appearance_counts(Role::Keeper).size() << "\n";
  for (const auto& [k, v] : feet) std::cout << "foot " << k << ": " << v << "\n";
  for (const auto& [k, v] : outcomes) std::cout << "outcome " << k << ": " << v << "\n";
  if (!cfg.events_path.empty()) {
    const auto events = load_events(cfg.events_path);
    std::set<std::string> players;
    for (const auto& e : events) players.insert(e.player_id);
    std::cout << "events: " << events.size() << " (" << players.size() << " players)\n";
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_game(const RunConfig& cfg) {
  const auto ds = filtered_for_games(load_kicks(cfg.kicks_path), cfg);
  const ActionAbstraction abstraction{cfg.abstraction, cfg.keeper_center};
  const auto game = build_empirical_game(ds, abstraction);
  if (!game.fully_defined())
    throw MissingData("payoff table has undefined cells; cannot solve for Nash");
  const auto solution = nash::solve_constant_sum(game.payoff, game.constant_sum);
  const auto empirical = empirical_profile(game);
  const auto bimatrix = nash::BimatrixGame::constant_sum(game.payoff, game.constant_sum);
  const auto eps = nash::epsilon_of_profile(bimatrix, empirical);
  const double divergence = stats::game_jsd(solution.profile, empirical);

  nlohmann::json summary;
  summary["value"] = solution.value;
  summary["epsilon"] = {{"epsilon", eps.epsilon}, {"row_gain", eps.row_gain}, {"col_gain", eps.col_gain}};
  summary["jsd"] = divergence;
  summary["jsd_percent"] = report::format_jsd_percent(divergence);
  summary["total_attempts"] = game.total_attempts();

  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);
  write_file(out / "payoff.csv", report::render_payoff_table(game, report::TableFormat::Csv));
  write_file(out / "nash.csv",
             report::render_nash_table(solution.profile, empirical, divergence, game.row_actions,
                                       game.col_actions, report::TableFormat::Csv));
  write_file(out / "game.json", game_to_json(game).dump(2) + "\n");
  write_file(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "game value " << solution.value << ", epsilon " << eps.epsilon << ", JSD "
            << report::format_jsd_percent(divergence) << "\n";
  return 0;
}

int cmd_ttest(const RunConfig& cfg, const CliExtras& extras) {
  const auto ds = load_kicks(cfg.kicks_path);
  const ActionAbstraction abstraction{cfg.abstraction, cfg.keeper_center};
  const auto table = stats::footedness_p_table(ds, abstraction, cfg.test_kind());

  std::optional<std::vector<stats::ExperiencePoint>> sweep;
  std::optional<std::vector<stats::BandPoint>> bands;
  if (!extras.sweep.empty())
    sweep = stats::p_value_vs_min_experience(ds, abstraction,
                                             parse_int_list(extras.sweep, "sweep threshold"),
                                             cfg.test_kind());
  if (!extras.bands.empty())
    bands = stats::p_value_by_experience_band(ds, abstraction, parse_bands(extras.bands),
                                              cfg.test_kind());

  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);
  write_file(out / "p_values.csv", report::render_p_value_table(table, report::TableFormat::Csv));
  write_file(out / "p_values.json", report::render_p_value_table(table, report::TableFormat::Json));

  auto cell_headers = [&abstraction]() {
    std::vector<std::string> headers;
    for (const auto& rl : abstraction.row_labels())
      for (const auto& cl : abstraction.col_labels()) headers.push_back(rl + "/" + cl);
    return headers;
  };
  auto cells_of = [&abstraction](const std::optional<stats::PValueTable>& t) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i < abstraction.row_labels().size(); ++i)
      for (std::size_t j = 0; j < abstraction.col_labels().size(); ++j) {
        const bool have = t && t->cells[i][j].has_value();
        row.push_back(have ? report::format_p_value(t->cells[i][j]->p_value) : "");
      }
    return row;
  };
  if (sweep) {
    std::ostringstream body;
    std::vector<std::string> header = {"min_appearances", "kicks"};
    for (auto& h : cell_headers()) header.push_back(h);
    csv::write_row(body, header);
    for (const auto& point : *sweep) {
      std::vector<std::string> row = {std::to_string(point.threshold),
                                      std::to_string(point.dataset_size)};
      for (auto& c : cells_of(point.table)) row.push_back(c);
      csv::write_row(body, row);
    }
    write_file(out / "sweep.csv", body.str());
  }
  if (bands) {
    std::ostringstream body;
    std::vector<std::string> header = {"lo", "hi", "kicks"};
    for (auto& h : cell_headers()) header.push_back(h);
    csv::write_row(body, header);
    for (const auto& point : *bands) {
      std::vector<std::string> row = {std::to_string(point.band.lo), std::to_string(point.band.hi),
                                      std::to_string(point.dataset_size)};
      for (auto& c : cells_of(point.table)) row.push_back(c);
      csv::write_row(body, row);
    }
    write_file(out / "bands.csv", body.str());
  }
  std::cout << "p-value tables written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_vectors(const RunConfig& cfg, const CliExtras& extras) {
  if (cfg.events_path.empty()) throw ArgumentError("--events is required");
  const auto events = load_events(cfg.events_path);
  auto player_vectors = vectors::assemble_player_vectors(events, cfg.segments, cfg.seed);
  if (extras.zscore_export) {
    const Eigen::MatrixXd scaled = vectors::zscore_columns(vectors::vectors_to_matrix(player_vectors));
    for (std::size_t i = 0; i < player_vectors.size(); ++i)
      player_vectors[i].concatenated = scaled.row(static_cast<Eigen::Index>(i)).transpose();
  }
  fs::create_directories(cfg.output_dir);
  std::ostringstream body;
  vectors::write_player_vectors_csv(body, player_vectors, cfg.segments);
  write_file(fs::path(cfg.output_dir) / "player_vectors.csv", body.str());
  std::cout << player_vectors.size() << " player vectors (" << cfg.segments.total()
            << " dimensions)\n";
  return 0;
}

int cmd_cluster(const RunConfig& cfg, const CliExtras& extras) {
  if (cfg.events_path.empty()) throw ArgumentError("--events is required");
  const auto ds = load_kicks(cfg.kicks_path);
  const auto events = load_events(cfg.events_path);
  const auto player_vectors = vectors::assemble_player_vectors(events, cfg.segments, cfg.seed);
  std::vector<std::string> ids;
  for (const auto& v : player_vectors) ids.push_back(v.player_id);
  const Eigen::MatrixXd features = vectors::zscore_columns(vectors::vectors_to_matrix(player_vectors));

  cluster::KSelection selection;
  const int k_hi = std::min<int>(cfg.k_hi, static_cast<int>(features.rows()));
  if (extras.k == "auto") {
    selection = cluster::select_k_by_inertia_drop(features, std::min(cfg.k_lo, k_hi), k_hi, cfg.seed);
  } else {
    const int k = parse_int(extras.k, "k");
    selection.k = k;
    selection.ks = {k};
    selection.best = cluster::kmeans(features, k, derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    selection.inertias = {selection.best.inertia};
  }
  const auto& model = selection.best;
  const auto projection = cluster::pca(features, 2);
  const auto stats_table = cluster::cluster_stats(model, ids, ds);
  const ActionAbstraction nat{AbstractionKind::NaturalNonNatural, cfg.keeper_center};
  const cluster::BootstrapOptions boot{cfg.bootstrap_n, cfg.seed, cfg.threads, cfg.cluster_min_shots};
  const auto games = cluster::cluster_conditioned_games(model, ids, ds, nat, boot);

  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);

  std::ostringstream assignments;
  csv::write_row(assignments, {"player_id", "cluster"});
  for (std::size_t i = 0; i < ids.size(); ++i)
    csv::write_row(assignments, {ids[i], std::to_string(model.assignments[i] + 1)});
  write_file(out / "cluster_assignments.csv", assignments.str());

  std::ostringstream inertia;
  csv::write_row(inertia, {"k", "inertia"});
  for (std::size_t i = 0; i < selection.ks.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", selection.inertias[i]);
    csv::write_row(inertia, {std::to_string(selection.ks[i]), buf});
  }
  write_file(out / "inertia_curve.csv", inertia.str());

  std::ostringstream coords;
  csv::write_row(coords, {"player_id", "pc1", "pc2", "cluster"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    char c1[32], c2[32];
    std::snprintf(c1, sizeof(c1), "%.9g", projection.coords(static_cast<Eigen::Index>(i), 0));
    std::snprintf(c2, sizeof(c2), "%.9g", projection.coords(static_cast<Eigen::Index>(i), 1));
    csv::write_row(coords, {ids[i], c1, c2, std::to_string(model.assignments[i] + 1)});
  }
  write_file(out / "pca_coordinates.csv", coords.str());

  std::ostringstream stat_csv;
  csv::write_row(stat_csv, {"cluster", "players", "goals", "shots", "success_rate",
                            "left_foot_goal_share", "representative"});
  auto rate = [](double r) {
    if (std::isnan(r)) return std::string("");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", r);
    return std::string(buf);
  };
  for (int c = 0; c < model.k; ++c) {
    const auto& row = stats_table.per_cluster[static_cast<std::size_t>(c)];
    csv::write_row(stat_csv,
                   {std::to_string(c + 1), std::to_string(row.players), std::to_string(row.goals),
                    std::to_string(row.shots), rate(row.success_rate()),
                    rate(row.left_foot_goal_share()),
                    row.players > 0 ? cluster::representative_player(model, features, ids, c) : ""});
  }
  const auto& tot = stats_table.totals;
  csv::write_row(stat_csv, {"total", std::to_string(tot.players), std::to_string(tot.goals),
                            std::to_string(tot.shots), rate(tot.success_rate()),
                            rate(tot.left_foot_goal_share()), ""});
  write_file(out / "cluster_stats.csv", stat_csv.str());

  nlohmann::json jgames = nlohmann::json::array();
  for (const auto& g : games) {
    nlohmann::json jg;
    jg["cluster"] = g.cluster + 1;
    jg["game"] = game_to_json(g.game);
    jg["nash"] = {{"row", std::vector<double>(g.nash_profile.row.data(),
                                              g.nash_profile.row.data() + g.nash_profile.row.size())},
                  {"col", std::vector<double>(g.nash_profile.col.data(),
                                              g.nash_profile.col.data() + g.nash_profile.col.size())}};
    jg["empirical"] = {{"row", std::vector<double>(g.empirical.row.data(),
                                                   g.empirical.row.data() + g.empirical.row.size())},
                       {"col", std::vector<double>(g.empirical.col.data(),
                                                   g.empirical.col.data() + g.empirical.col.size())}};
    jg["jsd"] = g.jsd;
    jg["shots"] = g.shots;
    jg["low_sample"] = g.low_sample;
    jgames.push_back(std::move(jg));
  }
  write_file(out / "cluster_games.json", jgames.dump(2) + "\n");

  std::cout << "k = " << selection.k << " (" << ids.size() << " players, "
            << stats_table.totals.shots << " shots)\n";
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  const auto ds = load_kicks(cfg.kicks_path);
  std::optional<std::vector<ActionEvent>> events;
  if (!cfg.events_path.empty()) events = load_events(cfg.events_path);
  const auto analysis = report::build_full_report(ds, events ? &*events : nullptr, cfg);
  report::write_report(cfg.output_dir, analysis);
  int failures = 0;
  for (const auto& s : analysis.sections)
    if (s.error) {
      std::cerr << "section " << s.id << " failed: " << *s.error << "\n";
      ++failures;
    }
  std::cout << "report written to " << cfg.output_dir << " (" << analysis.sections.size()
            << " sections, " << failures << " failed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CliExtras extras;

  CLI::App app{"Empirical game-theoretic analysis of penalty kicks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("spotkick ") + kToolVersion);
  std::string config_path;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", config_path, "flat key=value config file (flags take precedence)");
    cmd->add_option("--kicks", cfg.kicks_path, "kick records CSV");
    cmd->add_option("--events", cfg.events_path, "action events CSV");
    if (needs_out) cmd->add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "master RNG seed")->capture_default_str();
    cmd->add_option("--threads", cfg.threads, "worker thread cap (never changes results)")
        ->capture_default_str();
    cmd->add_option("--min-appearances", cfg.min_appearances,
                    "restrict games to players with this many appearances")
        ->capture_default_str();
    cmd->add_option("--bootstrap-n", cfg.bootstrap_n, "payoff tables per bootstrap")
        ->capture_default_str();
    cmd->add_option_function<std::string>(
           "--abstraction", [&cfg](const std::string& v) { cfg.abstraction = parse_abstraction(v); },
           "action abstraction: natural or lcr")
        ->default_str("natural");
    cmd->add_option_function<std::string>(
           "--keeper-center",
           [&cfg](const std::string& v) { cfg.keeper_center = parse_keeper_center(v); },
           "center dives: natural or exclude")
        ->default_str("natural");
    cmd->add_flag("--pooled", cfg.pooled, "pooled-variance t-tests instead of Welch");
    cmd->add_option_function<std::string>(
           "--segments", [&cfg](const std::string& v) { cfg.segments = parse_segments(v); },
           "NMF components per action type")
        ->default_str("5,4,4,5");
    cmd->add_option_function<std::string>(
           "--k-range",
           [&cfg](const std::string& v) {
             const auto dash = v.find('-');
             if (dash == std::string::npos) throw ArgumentError("k-range must look like lo-hi");
             cfg.k_lo = parse_int(v.substr(0, dash), "k-range");
             cfg.k_hi = parse_int(v.substr(dash + 1), "k-range");
           },
           "k selection range")
        ->default_str("1-10");
    cmd->add_option("--min-shots", cfg.cluster_min_shots,
                    "flag cluster games below this shot count as low-sample")
        ->capture_default_str();
    cmd->add_flag("--remove-outliers", cfg.remove_outliers,
                  "drop the farthest vectors before clustering");
    cmd->add_option("--outlier-count", cfg.outlier_count, "how many outliers to drop")
        ->capture_default_str();
    return cmd;
  };

  auto* ingest = add_common(app.add_subcommand("ingest-check", "validate input files"), false);
  auto* game = add_common(app.add_subcommand("game", "empirical game, Nash, epsilon, divergence"),
                          true);
  auto* ttest = add_common(app.add_subcommand("ttest", "footedness equivalence p-values"), true);
  ttest->add_option("--sweep", extras.sweep, "comma-separated minimum-appearance thresholds");
  ttest->add_option("--bands", extras.bands, "comma-separated lo-hi appearance bands");
  auto* vectors_cmd = add_common(app.add_subcommand("vectors", "18-dim player style vectors"), true);
  vectors_cmd->add_flag("--zscore", extras.zscore_export, "export standardized columns");
  auto* cluster_cmd =
      add_common(app.add_subcommand("cluster", "k-means over player vectors + cluster games"), true);
  cluster_cmd->add_option("--k", extras.k, "cluster count or 'auto'")->capture_default_str();
  auto* report_cmd = add_common(app.add_subcommand("report", "full analysis document"), true);

  // Pre-scan for --config so file values land before parsing; parsed flags
  // then overwrite them, giving flags > config > defaults.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
      else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    if (!config_path.empty()) apply_config_file(cfg, extras, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  try {
    if (ingest->parsed()) return cmd_ingest_check(cfg);
    if (game->parsed()) return cmd_game(cfg);
    if (ttest->parsed()) return cmd_ttest(cfg, extras);
    if (vectors_cmd->parsed()) return cmd_vectors(cfg, extras);
    if (cluster_cmd->parsed()) return cmd_cluster(cfg, extras);
    if (report_cmd->parsed()) return cmd_report(cfg);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
