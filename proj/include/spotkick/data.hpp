#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spotkick/csv.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/rng.hpp"

// Penalty-kick records and action-event streams: CSV ingestion, appearance
// filtering, and a synthetic-dataset generator used as a test oracle.
// All directions are in the goalkeeper's frame.

namespace spotkick {

enum class Foot { Left, Right };
enum class Direction { Left, Center, Right };
enum class Outcome { Goal, Saved, Missed };
enum class ActionType { Pass, Dribble, Shot, Cross };
enum class Role { Kicker, Keeper };

constexpr std::array<ActionType, 4> kActionTypes = {ActionType::Pass, ActionType::Dribble,
                                                    ActionType::Shot, ActionType::Cross};

inline const char* to_string(Foot f) { return f == Foot::Left ? "Left" : "Right"; }
inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "Left";
    case Direction::Center: return "Center";
    default: return "Right";
  }
}
inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Goal: return "Goal";
    case Outcome::Saved: return "Saved";
    default: return "Missed";
  }
}
inline const char* to_string(ActionType t) {
  switch (t) {
    case ActionType::Pass: return "Pass";
    case ActionType::Dribble: return "Dribble";
    case ActionType::Shot: return "Shot";
    default: return "Cross";
  }
}

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(const std::string& text,
                               const std::array<std::pair<const char*, Enum>, N>& table) {
  const std::string key = lower(text);
  for (const auto& [name, value] : table) {
    if (key == name) return value;
  }
  return std::nullopt;
}

inline std::optional<Foot> parse_foot(const std::string& s) {
  static const std::array<std::pair<const char*, Foot>, 2> t = {
      {{"left", Foot::Left}, {"right", Foot::Right}}};
  return parse_enum(s, t);
}

inline std::optional<Direction> parse_direction(const std::string& s) {
  static const std::array<std::pair<const char*, Direction>, 3> t = {
      {{"left", Direction::Left}, {"center", Direction::Center}, {"right", Direction::Right}}};
  return parse_enum(s, t);
}

inline std::optional<Outcome> parse_outcome(const std::string& s) {
  static const std::array<std::pair<const char*, Outcome>, 3> t = {
      {{"goal", Outcome::Goal}, {"saved", Outcome::Saved}, {"missed", Outcome::Missed}}};
  return parse_enum(s, t);
}

inline std::optional<ActionType> parse_action_type(const std::string& s) {
  static const std::array<std::pair<const char*, ActionType>, 4> t = {
      {{"pass", ActionType::Pass},
       {"dribble", ActionType::Dribble},
       {"shot", ActionType::Shot},
       {"cross", ActionType::Cross}}};
  return parse_enum(s, t);
}

}  // namespace detail

struct KickRecord {
  std::string kick_id;
  std::string match_id;
  std::string league;
  std::string season;
  std::string kicker_id;
  std::string keeper_id;
  Foot kicker_foot = Foot::Right;
  Direction shot_direction = Direction::Right;  // goalkeeper frame
  Direction keeper_action = Direction::Right;   // goalkeeper frame
  Outcome outcome = Outcome::Saved;

  bool operator==(const KickRecord&) const = default;
};

struct ActionEvent {
  std::string player_id;
  ActionType action_type = ActionType::Pass;
  double x = 0.0;  // [0, 1)
  double y = 0.0;  // [0, 1)

  bool operator==(const ActionEvent&) const = default;
};

// Immutable record collection with derived per-role appearance counts.
class KickDataset {
public:
  KickDataset() = default;

  static KickDataset from_records(std::vector<KickRecord> records) {
    KickDataset ds;
    std::set<std::string> ids;
    for (const auto& r : records) {
      if (!ids.insert(r.kick_id).second)
        throw DuplicateKickId("duplicate kick_id '" + r.kick_id + "'");
      ++ds.kicker_counts_[r.kicker_id];
      ++ds.keeper_counts_[r.keeper_id];
    }
    ds.records_ = std::move(records);
    return ds;
  }

  const std::vector<KickRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const std::map<std::string, int>& appearance_counts(Role role) const {
    return role == Role::Kicker ? kicker_counts_ : keeper_counts_;
  }

  int appearances(Role role, const std::string& player_id) const {
    const auto& counts = appearance_counts(role);
    auto it = counts.find(player_id);
    return it == counts.end() ? 0 : it->second;
  }

private:
  std::vector<KickRecord> records_;
  std::map<std::string, int> kicker_counts_;
  std::map<std::string, int> keeper_counts_;
};

inline const std::vector<std::string>& kick_csv_columns() {
  static const std::vector<std::string> cols = {
      "kick_id", "match_id",    "league",         "season",        "kicker_id",
      "keeper_id", "kicker_foot", "shot_direction", "keeper_action", "outcome"};
  return cols;
}

inline const std::vector<std::string>& event_csv_columns() {
  static const std::vector<std::string> cols = {"player_id", "action_type", "x", "y"};
  return cols;
}

inline KickDataset parse_kick_records(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw MalformedRow(1, "missing header row");
  if (*header != kick_csv_columns()) {
    throw MalformedRow(1, "unexpected kicks header; expected "
                              "kick_id,match_id,league,season,kicker_id,keeper_id,"
                              "kicker_foot,shot_direction,keeper_action,outcome");
  }
  std::vector<KickRecord> records;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    if (row->size() != kick_csv_columns().size())
      throw MalformedRow(line, "expected 10 fields, got " + std::to_string(row->size()));
    KickRecord r;
    r.kick_id = (*row)[0];
    r.match_id = (*row)[1];
    r.league = (*row)[2];
    r.season = (*row)[3];
    r.kicker_id = (*row)[4];
    r.keeper_id = (*row)[5];
    if (r.kick_id.empty()) throw MalformedRow(line, "empty kick_id");
    const auto foot = detail::parse_foot((*row)[6]);
    if (!foot) throw MalformedRow(line, "bad kicker_foot '" + (*row)[6] + "'");
    const auto shot = detail::parse_direction((*row)[7]);
    if (!shot) throw MalformedRow(line, "bad shot_direction '" + (*row)[7] + "'");
    const auto dive = detail::parse_direction((*row)[8]);
    if (!dive) throw MalformedRow(line, "bad keeper_action '" + (*row)[8] + "'");
    const auto outcome = detail::parse_outcome((*row)[9]);
    if (!outcome) throw MalformedRow(line, "bad outcome '" + (*row)[9] + "'");
    r.kicker_foot = *foot;
    r.shot_direction = *shot;
    r.keeper_action = *dive;
    r.outcome = *outcome;
    records.push_back(std::move(r));
  }
  return KickDataset::from_records(std::move(records));
}

inline void write_kick_records(std::ostream& out, const KickDataset& ds) {
  csv::write_row(out, kick_csv_columns());
  for (const auto& r : ds.records()) {
    csv::write_row(out, {r.kick_id, r.match_id, r.league, r.season, r.kicker_id, r.keeper_id,
                         to_string(r.kicker_foot), to_string(r.shot_direction),
                         to_string(r.keeper_action), to_string(r.outcome)});
  }
}

inline std::vector<ActionEvent> parse_action_events(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw MalformedRow(1, "missing header row");
  if (*header != event_csv_columns())
    throw MalformedRow(1, "unexpected events header; expected player_id,action_type,x,y");
  std::vector<ActionEvent> events;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    if (row->size() != 4)
      throw MalformedRow(line, "expected 4 fields, got " + std::to_string(row->size()));
    ActionEvent e;
    e.player_id = (*row)[0];
    if (e.player_id.empty()) throw MalformedRow(line, "empty player_id");
    const auto type = detail::parse_action_type((*row)[1]);
    if (!type) throw MalformedRow(line, "bad action_type '" + (*row)[1] + "'");
    e.action_type = *type;
    try {
      std::size_t pos = 0;
      e.x = std::stod((*row)[2], &pos);
      if (pos != (*row)[2].size()) throw std::invalid_argument("trailing");
      e.y = std::stod((*row)[3], &pos);
      if (pos != (*row)[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw MalformedRow(line, "non-numeric coordinate");
    }
    if (!(e.x >= 0.0 && e.x < 1.0) || !(e.y >= 0.0 && e.y < 1.0))
      throw CoordinateOutOfRange("line " + std::to_string(line) + ": coordinates must lie in [0,1), got (" +
                                 (*row)[2] + ", " + (*row)[3] + ")");
    events.push_back(std::move(e));
  }
  return events;
}

inline void write_action_events(std::ostream& out, const std::vector<ActionEvent>& events) {
  csv::write_row(out, event_csv_columns());
  std::ostringstream num;
  for (const auto& e : events) {
    num.str("");
    num << e.x;
    const std::string xs = num.str();
    num.str("");
    num << e.y;
    csv::write_row(out, {e.player_id, to_string(e.action_type), xs, num.str()});
  }
}

// Keeps records whose players (for every selected role) appear at least
// `min_count` times in the ORIGINAL dataset; counts are recomputed on output.
inline KickDataset filter_by_min_appearances(const KickDataset& ds, int min_count,
                                             const std::set<Role>& roles) {
  if (min_count < 1) throw ArgumentError("min_count must be >= 1");
  std::vector<KickRecord> kept;
  for (const auto& r : ds.records()) {
    bool keep = true;
    if (roles.count(Role::Kicker) && ds.appearances(Role::Kicker, r.kicker_id) < min_count)
      keep = false;
    if (roles.count(Role::Keeper) && ds.appearances(Role::Keeper, r.keeper_id) < min_count)
      keep = false;
    if (keep) kept.push_back(r);
  }
  return KickDataset::from_records(std::move(kept));
}

// ---------------------------------------------------------------------------
// Synthetic kick generation (deterministic; supports the statistical oracles)
// ---------------------------------------------------------------------------

// One 2x2 cell of the Natural/Non-Natural game: attempts plus per-foot
// success probabilities (equal probabilities give the footedness null).
struct SyntheticCell {
  int attempts = 0;
  double p_left = 0.0;
  double p_right = 0.0;
};

struct SyntheticSpec {
  // cells[kicker][keeper], index 0 = Natural, 1 = Non-Natural
  std::array<std::array<SyntheticCell, 2>, 2> cells{};
  double left_foot_share = 0.25;
  int num_kickers = 40;
  int num_keepers = 20;
  double shot_center_share = 0.0;    // natural kicks realized as Center
  double keeper_center_share = 0.0;  // natural dives realized as Center
  double miss_share = 0.0;           // failures recorded as Missed instead of Saved
  std::string league = "SYN";
  std::string season = "2026";

  static SyntheticSpec uniform_cells(int attempts_per_cell, double p) {
    SyntheticSpec s;
    for (auto& row : s.cells)
      for (auto& cell : row) cell = {attempts_per_cell, p, p};
    return s;
  }
};

namespace detail {

inline void validate(const SyntheticSpec& spec) {
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (const auto& row : spec.cells)
    for (const auto& cell : row) {
      if (cell.attempts < 0) throw InvalidSpec("negative attempt count");
      if (!prob_ok(cell.p_left) || !prob_ok(cell.p_right))
        throw InvalidSpec("success probabilities must lie in [0,1]");
    }
  if (!prob_ok(spec.left_foot_share)) throw InvalidSpec("left_foot_share must lie in [0,1]");
  if (!prob_ok(spec.shot_center_share) || !prob_ok(spec.keeper_center_share) ||
      !prob_ok(spec.miss_share))
    throw InvalidSpec("shares must lie in [0,1]");
  if (spec.num_kickers < 1 || spec.num_keepers < 1)
    throw InvalidSpec("player pools must be non-empty");
}

inline std::string padded_id(const char* prefix, int n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%05d", prefix, n);
  return buf;
}

}  // namespace detail

// Builds a dataset realizing the per-cell attempt counts exactly; outcomes,
// footedness, and center realizations are drawn from the given seed. Each
// kicker keeps one foot for all of their kicks.
inline KickDataset generate_synthetic_kicks(const SyntheticSpec& spec, std::uint64_t seed) {
  detail::validate(spec);
  Rng rng(derive_seed(seed, 0));

  // split the kicker pool by foot so footedness is stable per player
  int n_left = static_cast<int>(std::lround(spec.left_foot_share * spec.num_kickers));
  if (spec.left_foot_share > 0.0 && n_left == 0) n_left = 1;
  if (spec.left_foot_share < 1.0 && n_left == spec.num_kickers) n_left = spec.num_kickers - 1;

  std::vector<KickRecord> records;
  int next_left = 0, next_right = 0, next_keeper = 0, serial = 0;
  for (int ka = 0; ka < 2; ++ka) {
    for (int ga = 0; ga < 2; ++ga) {
      const SyntheticCell& cell = spec.cells[static_cast<std::size_t>(ka)][static_cast<std::size_t>(ga)];
      for (int t = 0; t < cell.attempts; ++t) {
        const bool left = n_left == spec.num_kickers ||
                          (n_left > 0 && rng.bernoulli(spec.left_foot_share));
        KickRecord r;
        if (left) {
          r.kicker_id = detail::padded_id("KL", next_left % n_left);
          ++next_left;
          r.kicker_foot = Foot::Left;
        } else {
          r.kicker_id = detail::padded_id("KR", next_right % (spec.num_kickers - n_left));
          ++next_right;
          r.kicker_foot = Foot::Right;
        }
        r.keeper_id = detail::padded_id("G", next_keeper % spec.num_keepers);
        ++next_keeper;
        const Direction natural = left ? Direction::Left : Direction::Right;
        const Direction opposite = left ? Direction::Right : Direction::Left;
        r.shot_direction = ka == 0
                               ? (rng.bernoulli(spec.shot_center_share) ? Direction::Center : natural)
                               : opposite;
        r.keeper_action = ga == 0
                              ? (rng.bernoulli(spec.keeper_center_share) ? Direction::Center : natural)
                              : opposite;
        const double p = left ? cell.p_left : cell.p_right;
        if (rng.bernoulli(p)) {
          r.outcome = Outcome::Goal;
        } else {
          r.outcome = rng.bernoulli(spec.miss_share) ? Outcome::Missed : Outcome::Saved;
        }
        r.kick_id = detail::padded_id("S", serial);
        r.match_id = detail::padded_id("M", serial / 8);
        r.league = spec.league;
        r.season = spec.season;
        ++serial;
        records.push_back(std::move(r));
      }
    }
  }
  return KickDataset::from_records(std::move(records));
}

}  // namespace spotkick
