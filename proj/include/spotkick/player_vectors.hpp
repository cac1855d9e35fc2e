#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "spotkick/csv.hpp"
#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/rng.hpp"

// 18-dimensional non-negative player-style embeddings: per-action-type spatial
// count matrices over a 60x40 grid, compressed by NMF and concatenated.

namespace spotkick::vectors {

struct GridSpec {
  int width = 60;
  int height = 40;

  int cells() const { return width * height; }

  // Flat row-major cell index; valid for x, y in [0, 1).
  int cell_index(double x, double y) const {
    const int cx = static_cast<int>(x * width);
    const int cy = static_cast<int>(y * height);
    return cy * width + cx;
  }
};

struct CountMatrix {
  std::vector<std::string> players;  // sorted ids, shared across action types
  ActionType action_type = ActionType::Pass;
  Eigen::MatrixXd matrix;  // players x cells, integral non-negative entries
};

// Rows cover every player appearing anywhere in `events`, so the four
// per-type matrices share one row ordering; players without events of this
// type keep zero rows.
inline CountMatrix build_count_matrix(const std::vector<ActionEvent>& events, ActionType type,
                                      const GridSpec& grid = {}) {
  std::set<std::string> ids;
  for (const auto& e : events) ids.insert(e.player_id);
  CountMatrix out;
  out.players.assign(ids.begin(), ids.end());
  out.action_type = type;
  out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.players.size()), grid.cells());
  std::map<std::string, Eigen::Index> row_of;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(out.players.size()); ++i)
    row_of[out.players[static_cast<std::size_t>(i)]] = i;
  for (const auto& e : events) {
    if (e.action_type != type) continue;
    out.matrix(row_of[e.player_id], grid.cell_index(e.x, e.y)) += 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// NMF
// ---------------------------------------------------------------------------

struct NmfModel {
  Eigen::MatrixXd W;  // players x k
  Eigen::MatrixXd H;  // k x cells
  std::vector<double> objective_trace;  // Frobenius error per iteration
};

// Lee-Seung multiplicative updates minimizing ||M - WH||_F. W and H start
// from seeded uniforms scaled by sqrt(mean(M)/k); zero rows of M collapse to
// zero W rows after the first update and stay there.
inline NmfModel nmf(const Eigen::MatrixXd& M, int k, std::uint64_t seed, int max_iters = 500,
                    double rel_tol = 1e-4) {
  if (k < 1 || k > std::min(M.rows(), M.cols()))
    throw InvalidRank("nmf rank must satisfy 1 <= k <= min(rows, cols)");
  if ((M.array() < 0.0).any()) throw ArgumentError("nmf input must be non-negative");
  if (M.maxCoeff() <= 0.0) throw AllZeroMatrix("nmf input has no positive entry");

  const double scale = std::sqrt(M.mean() / static_cast<double>(k));
  Rng rng(seed);
  NmfModel model;
  model.W.resize(M.rows(), k);
  model.H.resize(k, M.cols());
  for (Eigen::Index i = 0; i < model.W.rows(); ++i)
    for (Eigen::Index j = 0; j < model.W.cols(); ++j) model.W(i, j) = rng.uniform() * scale;
  for (Eigen::Index i = 0; i < model.H.rows(); ++i)
    for (Eigen::Index j = 0; j < model.H.cols(); ++j) model.H(i, j) = rng.uniform() * scale;

  constexpr double kDenomFloor = 1e-12;
  double prev = (M - model.W * model.H).norm();
  model.objective_trace.push_back(prev);
  for (int iter = 0; iter < max_iters; ++iter) {
    // H <- H .* (W'M) ./ (W'WH), then W <- W .* (MH') ./ (WHH')
    const Eigen::MatrixXd wt_m = model.W.transpose() * M;
    const Eigen::MatrixXd wt_w_h = model.W.transpose() * model.W * model.H;
    model.H.array() *= wt_m.array() / (wt_w_h.array() + kDenomFloor);
    const Eigen::MatrixXd m_ht = M * model.H.transpose();
    const Eigen::MatrixXd w_h_ht = model.W * (model.H * model.H.transpose());
    model.W.array() *= m_ht.array() / (w_h_ht.array() + kDenomFloor);

    const double cur = (M - model.W * model.H).norm();
    model.objective_trace.push_back(cur);
    if (prev > 0.0 && (prev - cur) / prev < rel_tol) break;
    prev = cur;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Vector assembly
// ---------------------------------------------------------------------------

struct SegmentSizes {
  int pass = 5;
  int dribble = 4;
  int shot = 4;
  int cross = 5;

  int of(ActionType type) const {
    switch (type) {
      case ActionType::Pass: return pass;
      case ActionType::Dribble: return dribble;
      case ActionType::Shot: return shot;
      default: return cross;
    }
  }

  int total() const { return pass + dribble + shot + cross; }
};

struct PlayerVector {
  std::string player_id;
  std::map<ActionType, Eigen::VectorXd> segments;
  Eigen::VectorXd concatenated;
};

// Per type: count matrix then NMF at the configured rank; player p's segment
// is row p of W. Concatenation order is fixed (Pass, Dribble, Shot, Cross)
// and each type's NMF runs on its own sub-stream of `seed`.
inline std::vector<PlayerVector> assemble_player_vectors(const std::vector<ActionEvent>& events,
                                                         const SegmentSizes& sizes = {},
                                                         std::uint64_t seed = 0,
                                                         const GridSpec& grid = {}) {
  if (sizes.pass < 1 || sizes.dribble < 1 || sizes.shot < 1 || sizes.cross < 1)
    throw ArgumentError("segment sizes must be positive");
  if (events.empty()) throw EmptyDataset("no action events");

  for (ActionType type : kActionTypes) {
    const bool present = std::any_of(events.begin(), events.end(),
                                     [type](const ActionEvent& e) { return e.action_type == type; });
    if (!present) {
      std::set<std::string> ids;
      for (const auto& e : events) ids.insert(e.player_id);
      std::string msg = "no events of type " + std::string(to_string(type)) + "; affected players:";
      for (const auto& id : ids) msg += " " + id;
      throw MissingActionType(msg);
    }
  }

  std::vector<PlayerVector> out;
  bool first_type = true;
  for (std::size_t t = 0; t < kActionTypes.size(); ++t) {
    const ActionType type = kActionTypes[t];
    const auto counts = build_count_matrix(events, type, grid);
    const auto model = nmf(counts.matrix, sizes.of(type), derive_seed(seed, t));
    if (first_type) {
      out.resize(counts.players.size());
      for (std::size_t i = 0; i < counts.players.size(); ++i) {
        out[i].player_id = counts.players[i];
        out[i].concatenated = Eigen::VectorXd::Zero(sizes.total());
      }
      first_type = false;
    }
    int offset = 0;
    for (std::size_t u = 0; u < t; ++u) offset += sizes.of(kActionTypes[u]);
    for (std::size_t i = 0; i < counts.players.size(); ++i) {
      out[i].segments[type] = model.W.row(static_cast<Eigen::Index>(i)).transpose();
      out[i].concatenated.segment(offset, sizes.of(type)) =
          model.W.row(static_cast<Eigen::Index>(i)).transpose();
    }
  }
  return out;
}

inline std::vector<std::string> vector_column_names(const SegmentSizes& sizes = {}) {
  std::vector<std::string> names;
  for (ActionType type : kActionTypes) {
    std::string prefix(to_string(type));
    std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (int i = 0; i < sizes.of(type); ++i) names.push_back(prefix + "_" + std::to_string(i));
  }
  return names;
}

inline void write_player_vectors_csv(std::ostream& out, const std::vector<PlayerVector>& vectors,
                                     const SegmentSizes& sizes = {}) {
  std::vector<std::string> header = {"player_id"};
  for (auto& name : vector_column_names(sizes)) header.push_back(name);
  csv::write_row(out, header);
  for (const auto& v : vectors) {
    std::vector<std::string> row = {v.player_id};
    for (Eigen::Index i = 0; i < v.concatenated.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", v.concatenated[i]);
      row.emplace_back(buf);
    }
    csv::write_row(out, row);
  }
}

// Stack the concatenated vectors into an n x d matrix (row i = vectors[i]).
inline Eigen::MatrixXd vectors_to_matrix(const std::vector<PlayerVector>& vectors) {
  if (vectors.empty()) throw EmptyDataset("no player vectors");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors.size()), vectors.front().concatenated.size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = vectors[i].concatenated.transpose();
  return m;
}

// Column-wise standardization to zero mean, unit variance; constant columns
// become zero instead of dividing by zero.
inline Eigen::MatrixXd zscore_columns(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).mean();
    const double var = (m.col(j).array() - mean).square().sum() / static_cast<double>(m.rows());
    const double sd = std::sqrt(var);
    if (sd > 0.0)
      out.col(j) = (m.col(j).array() - mean) / sd;
    else
      out.col(j).setZero();
  }
  return out;
}

}  // namespace spotkick::vectors
