#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/game.hpp"
#include "spotkick/nash.hpp"
#include "spotkick/rng.hpp"
#include "spotkick/stats.hpp"

// K-means over player vectors with inertia-drop k selection, PCA projection,
// cluster statistics, and per-cluster empirical games.

namespace spotkick::cluster {

// ---------------------------------------------------------------------------
// K-means
// ---------------------------------------------------------------------------

struct ClusterModel {
  int k = 0;
  Eigen::MatrixXd centroids;      // k x d
  std::vector<int> assignments;   // row index -> cluster
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // per Lloyd iteration
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& x, Eigen::Index row, const Eigen::MatrixXd& c,
                      Eigen::Index centroid) {
  return (x.row(row) - c.row(centroid)).squaredNorm();
}

// Nearest centroid, smallest index within a 1e-9 tie band.
inline int nearest_centroid(const Eigen::MatrixXd& x, Eigen::Index row,
                            const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = sq_dist(x, row, centroids, 0);
  for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
    const double d = sq_dist(x, row, centroids, c);
    if (d < best_d - 1e-9) {
      best = static_cast<int>(c);
      best_d = d;
    }
  }
  return best;
}

inline Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const auto n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        chosen = i;  // numeric slack: falls through to the last viable point
        r -= d2[i];
        if (r <= 0.0) break;
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (x.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded to
// the point currently farthest from its assigned centroid.
inline ClusterModel kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                           int max_iters = 300) {
  const auto n = x.rows();
  if (k < 1 || k > n) throw InvalidK("k must satisfy 1 <= k <= number of points");
  if (x.cols() < 1) throw ArgumentError("points need at least one dimension");

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.centroids = detail::kmeanspp_init(x, k, rng);
  model.assignments.assign(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = iter == 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = detail::nearest_centroid(x, i, model.centroids);
      if (a != model.assignments[static_cast<std::size_t>(i)]) {
        model.assignments[static_cast<std::size_t>(i)] = a;
        changed = true;
      }
    }

    // Re-seed empty clusters before the update step.
    std::vector<long> sizes(static_cast<std::size_t>(k), 0);
    for (int a : model.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(model.assignments[static_cast<std::size_t>(i)])] <= 1)
          continue;
        const double d =
            detail::sq_dist(x, i, model.centroids, model.assignments[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(model.assignments[static_cast<std::size_t>(far)])];
      model.assignments[static_cast<std::size_t>(far)] = c;
      ++sizes[static_cast<std::size_t>(c)];
      model.centroids.row(c) = x.row(far);
      changed = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < n; ++i)
      sums.row(model.assignments[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c)
      model.centroids.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      inertia +=
          detail::sq_dist(x, i, model.centroids, model.assignments[static_cast<std::size_t>(i)]);
    model.inertia_trace.push_back(inertia);
    if (!changed) break;
  }

  // Final pass so every point sits with its nearest centroid.
  for (Eigen::Index i = 0; i < n; ++i)
    model.assignments[static_cast<std::size_t>(i)] = detail::nearest_centroid(x, i, model.centroids);
  model.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    model.inertia +=
        detail::sq_dist(x, i, model.centroids, model.assignments[static_cast<std::size_t>(i)]);
  return model;
}

// ---------------------------------------------------------------------------
// k selection
// ---------------------------------------------------------------------------

struct KSelection {
  int k = 1;
  std::vector<int> ks;
  std::vector<double> inertias;
  ClusterModel best;
};

// Runs kmeans per k on sub-stream (seed, k) and picks the interior k with the
// largest second difference of the inertia curve (the sharpest
// drop-then-flatten). Ties and too-short ranges fall back to the smallest k.
inline KSelection select_k_by_inertia_drop(const Eigen::MatrixXd& x, int k_lo, int k_hi,
                                           std::uint64_t seed) {
  if (k_lo < 1 || k_hi < k_lo || k_hi > x.rows())
    throw InvalidRange("k range must satisfy 1 <= lo <= hi <= number of points");
  KSelection sel;
  std::map<int, ClusterModel> models;
  for (int k = k_lo; k <= k_hi; ++k) {
    models[k] = kmeans(x, k, derive_seed(seed, static_cast<std::uint64_t>(k)));
    sel.ks.push_back(k);
    sel.inertias.push_back(models[k].inertia);
  }
  sel.k = k_lo;
  if (sel.ks.size() >= 3) {
    std::vector<double> drops;
    for (std::size_t i = 1; i + 1 < sel.ks.size(); ++i)
      drops.push_back(sel.inertias[i - 1] - 2.0 * sel.inertias[i] + sel.inertias[i + 1]);
    const double max_drop = *std::max_element(drops.begin(), drops.end());
    const double min_drop = *std::min_element(drops.begin(), drops.end());
    // A flat second-difference curve has no elbow; keep the smallest k.
    if (max_drop - min_drop > 1e-12) {
      for (std::size_t i = 0; i < drops.size(); ++i)
        if (drops[i] >= max_drop - 1e-12) {
          sel.k = sel.ks[i + 1];
          break;
        }
    }
  }
  sel.best = models[sel.k];
  return sel;
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

struct PcaResult {
  Eigen::MatrixXd coords;           // n x out_dims
  Eigen::MatrixXd components;       // d x out_dims
  Eigen::VectorXd explained_ratio;  // out_dims entries, sums to <= 1
};

// SVD of the centered matrix; each component's sign is fixed so its
// largest-magnitude loading is positive.
inline PcaResult pca(const Eigen::MatrixXd& x, int out_dims) {
  if (out_dims < 1 || out_dims > std::min(x.rows(), x.cols()))
    throw ArgumentError("out_dims must satisfy 1 <= out_dims <= min(rows, cols)");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV().leftCols(out_dims);
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
  }
  PcaResult out;
  out.components = v;
  out.coords = centered * v;
  const Eigen::VectorXd sv = svd.singularValues();
  const double total = sv.squaredNorm();
  out.explained_ratio = Eigen::VectorXd::Zero(out_dims);
  if (total > 0.0)
    out.explained_ratio = sv.head(out_dims).array().square() / total;
  return out;
}

// ---------------------------------------------------------------------------
// Cluster descriptions
// ---------------------------------------------------------------------------

inline std::map<std::string, int> assignments_by_player(const ClusterModel& model,
                                                        const std::vector<std::string>& ids) {
  if (ids.size() != model.assignments.size())
    throw DimensionMismatch("player ids and assignments differ in length");
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = model.assignments[i];
  return out;
}

// Member closest to the centroid; equal distances break toward the
// lexicographically smaller id.
inline std::string representative_player(const ClusterModel& model, const Eigen::MatrixXd& x,
                                         const std::vector<std::string>& ids, int cluster) {
  std::string best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (model.assignments[i] != cluster) continue;
    const double d = detail::sq_dist(x, static_cast<Eigen::Index>(i), model.centroids, cluster);
    if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && ids[i] < best)) {
      best_d = d;
      best = ids[i];
    }
  }
  if (best.empty() && best_d == std::numeric_limits<double>::infinity())
    throw EmptyCluster("cluster " + std::to_string(cluster) + " has no members");
  return best;
}

struct ClusterRow {
  long players = 0;
  long goals = 0;
  long shots = 0;
  long left_foot_goals = 0;

  // percentages; quiet NaN when the denominator is zero
  double success_rate() const {
    return shots > 0 ? 100.0 * static_cast<double>(goals) / static_cast<double>(shots)
                     : std::numeric_limits<double>::quiet_NaN();
  }
  double left_foot_goal_share() const {
    return goals > 0 ? 100.0 * static_cast<double>(left_foot_goals) / static_cast<double>(goals)
                     : std::numeric_limits<double>::quiet_NaN();
  }
};

struct ClusterStats {
  std::vector<ClusterRow> per_cluster;
  ClusterRow totals;      // over assigned clusters
  ClusterRow unassigned;  // kickers in the dataset but not in the model
};

inline ClusterStats cluster_stats(const ClusterModel& model, const std::vector<std::string>& ids,
                                  const KickDataset& ds) {
  const auto by_player = assignments_by_player(model, ids);
  ClusterStats stats;
  stats.per_cluster.assign(static_cast<std::size_t>(model.k), ClusterRow{});
  for (int a : model.assignments) ++stats.per_cluster[static_cast<std::size_t>(a)].players;

  for (const auto& r : ds.records()) {
    auto it = by_player.find(r.kicker_id);
    ClusterRow& row = it == by_player.end()
                          ? stats.unassigned
                          : stats.per_cluster[static_cast<std::size_t>(it->second)];
    ++row.shots;
    if (r.outcome == Outcome::Goal) {
      ++row.goals;
      if (r.kicker_foot == Foot::Left) ++row.left_foot_goals;
    }
  }
  if (stats.unassigned.shots > 0) {
    std::set<std::string> extra;
    for (const auto& r : ds.records())
      if (!by_player.count(r.kicker_id)) extra.insert(r.kicker_id);
    stats.unassigned.players = static_cast<long>(extra.size());
  }
  for (const auto& row : stats.per_cluster) {
    stats.totals.players += row.players;
    stats.totals.goals += row.goals;
    stats.totals.shots += row.shots;
    stats.totals.left_foot_goals += row.left_foot_goals;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Cluster-conditioned games
// ---------------------------------------------------------------------------

struct BootstrapOptions {
  int n = 50;
  std::uint64_t seed = 0;
  int threads = 1;
  long min_shots = 10;  // below this a cluster's game is flagged low-sample
};

struct ClusterGameReport {
  int cluster = 0;
  EmpiricalGame game;
  nash::MixedProfile nash_profile;  // bootstrapped
  nash::MixedProfile empirical;
  double jsd = 0.0;
  long shots = 0;
  bool low_sample = false;
};

namespace detail {

inline KickDataset cluster_kicks(const std::map<std::string, int>& by_player, const KickDataset& ds,
                                 int cluster) {
  std::vector<KickRecord> kept;
  for (const auto& r : ds.records()) {
    auto it = by_player.find(r.kicker_id);
    if (it != by_player.end() && it->second == cluster) kept.push_back(r);
  }
  return KickDataset::from_records(std::move(kept));
}

}  // namespace detail

// Per-cluster empirical game, bootstrapped Nash, empirical frequencies, and
// their divergence. Cluster c's bootstrap runs on sub-stream (seed, c), so a
// one-cluster model reproduces the all-players analysis bit for bit.
// Zero-shot clusters are omitted (they still appear in cluster_stats).
inline std::vector<ClusterGameReport> cluster_conditioned_games(
    const ClusterModel& model, const std::vector<std::string>& ids, const KickDataset& ds,
    const ActionAbstraction& abstraction, const BootstrapOptions& opts = {}) {
  const auto by_player = assignments_by_player(model, ids);
  std::vector<ClusterGameReport> out;
  for (int c = 0; c < model.k; ++c) {
    const auto kicks = detail::cluster_kicks(by_player, ds, c);
    if (kicks.empty()) continue;
    ClusterGameReport report;
    report.cluster = c;
    report.game = build_empirical_game(kicks, abstraction);
    report.shots = report.game.total_attempts();
    report.low_sample = report.shots < opts.min_shots;
    report.nash_profile = bootstrap_nash(report.game, opts.n,
                                         derive_seed(opts.seed, static_cast<std::uint64_t>(c)),
                                         opts.threads);
    report.empirical = empirical_profile(report.game);
    report.jsd = stats::game_jsd(report.nash_profile, report.empirical);
    out.push_back(std::move(report));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise cluster comparisons
// ---------------------------------------------------------------------------

struct ClusterPairReport {
  int cluster_a = 0;
  int cluster_b = 0;
  std::optional<double> min_cell_p;  // min over cells testable in both games
  bool p_may_be_lower = false;       // some cells lacked data
  double nash_jsd = 0.0;
  double empirical_jsd = 0.0;
  std::optional<stats::CellTestResult> footedness;
};

inline ClusterPairReport cluster_pair_report(const ClusterModel& model,
                                             const std::vector<std::string>& ids,
                                             const KickDataset& ds,
                                             const ActionAbstraction& abstraction, int a, int b,
                                             const BootstrapOptions& opts = {}) {
  const auto by_player = assignments_by_player(model, ids);
  const auto kicks_a = detail::cluster_kicks(by_player, ds, a);
  const auto kicks_b = detail::cluster_kicks(by_player, ds, b);
  if (kicks_a.empty() || kicks_b.empty()) throw EmptyCluster("pair comparison needs kicks in both clusters");
  const auto game_a = build_empirical_game(kicks_a, abstraction);
  const auto game_b = build_empirical_game(kicks_b, abstraction);

  ClusterPairReport report;
  report.cluster_a = a;
  report.cluster_b = b;

  const int n = abstraction.num_actions();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      try {
        const auto cell = stats::welch_t_test(game_a.counts[si][sj], game_b.counts[si][sj]);
        if (!report.min_cell_p || cell.p_value < *report.min_cell_p)
          report.min_cell_p = cell.p_value;
      } catch (const MissingData&) {
        report.p_may_be_lower = true;
      }
    }

  const auto nash_a = bootstrap_nash(game_a, opts.n, derive_seed(opts.seed, static_cast<std::uint64_t>(a)),
                                     opts.threads);
  const auto nash_b = bootstrap_nash(game_b, opts.n, derive_seed(opts.seed, static_cast<std::uint64_t>(b)),
                                     opts.threads);
  report.nash_jsd = stats::game_jsd(nash_a, nash_b);
  report.empirical_jsd = stats::game_jsd(empirical_profile(game_a), empirical_profile(game_b));

  auto left_counts = [](const KickDataset& kicks) {
    CellCounts counts;
    for (const auto& r : kicks.records()) {
      ++counts.attempts;
      if (r.kicker_foot == Foot::Left) ++counts.successes;
    }
    return counts;
  };
  try {
    report.footedness = stats::welch_t_test(left_counts(kicks_a), left_counts(kicks_b));
  } catch (const MissingData&) {
  }
  return report;
}

struct ActionEqualityResult {
  std::optional<stats::CellTestResult> kicker;
  std::optional<stats::CellTestResult> keeper;
  double min_p = 1.0;
};

// Two-proportion Welch test on the Natural-share indicators of each side's
// actions, comparing two clusters' kick sets.
inline ActionEqualityResult empirical_action_equality_test(const ClusterModel& model,
                                                           const std::vector<std::string>& ids,
                                                           const KickDataset& ds,
                                                           const ActionAbstraction& abstraction,
                                                           int a, int b) {
  const auto by_player = assignments_by_player(model, ids);
  const auto kicks_a = detail::cluster_kicks(by_player, ds, a);
  const auto kicks_b = detail::cluster_kicks(by_player, ds, b);
  if (kicks_a.empty() || kicks_b.empty()) throw MissingData("pair comparison needs kicks in both clusters");

  auto natural_counts = [&abstraction](const KickDataset& kicks, bool kicker_side) {
    CellCounts counts;
    for (const auto& r : kicks.records()) {
      const auto labels = classify_natural(r, abstraction.keeper_center);
      const NaturalLabel label = kicker_side ? labels.kicker : labels.keeper;
      if (label == NaturalLabel::Excluded) continue;
      ++counts.attempts;
      if (label == NaturalLabel::Natural) ++counts.successes;
    }
    return counts;
  };

  ActionEqualityResult result;
  double min_p = std::numeric_limits<double>::infinity();
  for (bool kicker_side : {true, false}) {
    try {
      const auto cell =
          stats::welch_t_test(natural_counts(kicks_a, kicker_side), natural_counts(kicks_b, kicker_side));
      (kicker_side ? result.kicker : result.keeper) = cell;
      min_p = std::min(min_p, cell.p_value);
    } catch (const MissingData&) {
    }
  }
  result.min_p = std::isfinite(min_p) ? min_p : 1.0;
  return result;
}

// Indices of the `count` points farthest from the global mean, for the
// optional outlier-removal step (off by default).
inline std::vector<std::size_t> outlier_indices(const Eigen::MatrixXd& x, int count) {
  if (count < 0 || count > x.rows()) throw ArgumentError("outlier count out of range");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  std::vector<std::pair<double, std::size_t>> by_dist;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    by_dist.emplace_back((x.row(i) - mean).squaredNorm(), static_cast<std::size_t>(i));
  std::sort(by_dist.begin(), by_dist.end(), [](const auto& l, const auto& r) {
    return l.first > r.first || (l.first == r.first && l.second < r.second);
  });
  std::vector<std::size_t> out;
  for (int i = 0; i < count; ++i) out.push_back(by_dist[static_cast<std::size_t>(i)].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace spotkick::cluster
