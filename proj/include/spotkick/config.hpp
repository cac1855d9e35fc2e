#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spotkick/game.hpp"
#include "spotkick/player_vectors.hpp"
#include "spotkick/stats.hpp"

// Run-wide configuration shared by the CLI and the report builder.

namespace spotkick {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  // Input and output locations; never part of report metadata so reruns into
  // different directories stay byte-identical.
  std::string kicks_path;
  std::string events_path;  // empty = no event data
  std::string output_dir = "out";

  // Analysis parameters.
  AbstractionKind abstraction = AbstractionKind::NaturalNonNatural;
  KeeperCenterPolicy keeper_center = KeeperCenterPolicy::CenterIsNatural;
  int min_appearances = 20;
  int bootstrap_n = 50;
  std::uint64_t seed = 0;
  vectors::SegmentSizes segments;
  int k_lo = 1;
  int k_hi = 10;
  long cluster_min_shots = 10;
  bool pooled = false;
  bool remove_outliers = false;
  int outlier_count = 2;
  std::vector<int> sweep_thresholds = {1, 5, 10, 20, 30};
  std::vector<stats::ExperienceBand> bands = {{1, 7}, {5, 12}};

  // Execution details; affect speed only, never numbers, and are likewise
  // excluded from report metadata.
  int threads = 1;

  stats::TestKind test_kind() const { return pooled ? stats::TestKind::Pooled : stats::TestKind::Welch; }
};

// Analysis-affecting parameters only.
inline nlohmann::json config_metadata_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["keeper_center"] =
      cfg.keeper_center == KeeperCenterPolicy::CenterIsNatural ? "natural" : "excluded";
  j["min_appearances"] = cfg.min_appearances;
  j["bootstrap_n"] = cfg.bootstrap_n;
  j["seed"] = cfg.seed;
  j["segments"] = {{"pass", cfg.segments.pass},
                   {"dribble", cfg.segments.dribble},
                   {"shot", cfg.segments.shot},
                   {"cross", cfg.segments.cross}};
  j["k_range"] = {cfg.k_lo, cfg.k_hi};
  j["cluster_min_shots"] = cfg.cluster_min_shots;
  j["pooled"] = cfg.pooled;
  j["remove_outliers"] = cfg.remove_outliers;
  j["outlier_count"] = cfg.outlier_count;
  j["sweep_thresholds"] = cfg.sweep_thresholds;
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : cfg.bands) bands.push_back({{"lo", b.lo}, {"hi", b.hi}});
  j["bands"] = std::move(bands);
  return j;
}

}  // namespace spotkick
