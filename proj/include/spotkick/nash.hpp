#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spotkick/errors.hpp"

// Two-player normal-form game solvers: expected payoffs, best responses,
// constant-sum solving by linear programming, support enumeration for general
// bimatrix games, and the epsilon of an arbitrary profile.

namespace spotkick::nash {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Player { Row, Col };

// tie tolerance for argmax sets and support-validity checks
inline constexpr double kTieTol = 1e-9;

struct BimatrixGame {
  MatrixXd A;  // row player payoffs
  MatrixXd B;  // column player payoffs

  BimatrixGame() = default;
  BimatrixGame(MatrixXd a, MatrixXd b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
      throw DimensionMismatch("bimatrix payoff matrices must have equal shapes");
    if (A.rows() < 1 || A.cols() < 1) throw DimensionMismatch("empty payoff matrix");
  }

  // Constant-sum game: column player's utility is c - A.
  static BimatrixGame constant_sum(const MatrixXd& payoff, double c = 1.0) {
    return BimatrixGame(payoff, MatrixXd::Constant(payoff.rows(), payoff.cols(), c) - payoff);
  }

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
};

struct MixedProfile {
  VectorXd row;
  VectorXd col;
};

inline bool is_distribution(const VectorXd& p, double tol = 1e-9) {
  if (p.size() == 0) return false;
  if (p.minCoeff() < -tol) return false;
  return std::abs(p.sum() - 1.0) <= tol * std::max<double>(1, p.size());
}

inline VectorXd normalized(VectorXd p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = std::max(p[i], 0.0);
  const double s = p.sum();
  if (s <= 0.0) throw ArgumentError("cannot normalize a non-positive vector");
  return p / s;
}

inline void check_profile(const BimatrixGame& g, const MixedProfile& p) {
  if (p.row.size() != g.rows() || p.col.size() != g.cols())
    throw DimensionMismatch("profile dimensions do not match the game");
}

inline double expected_payoff(const BimatrixGame& g, const MixedProfile& p, Player player) {
  check_profile(g, p);
  const MatrixXd& M = player == Player::Row ? g.A : g.B;
  return p.row.dot(M * p.col);
}

struct BestResponse {
  double value = 0.0;
  std::vector<int> actions;  // all maximizers within kTieTol
};

inline BestResponse best_response(const BimatrixGame& g, Player player, const VectorXd& opponent) {
  VectorXd scores;
  if (player == Player::Row) {
    if (opponent.size() != g.cols()) throw DimensionMismatch("opponent strategy has wrong size");
    scores = g.A * opponent;
  } else {
    if (opponent.size() != g.rows()) throw DimensionMismatch("opponent strategy has wrong size");
    scores = g.B.transpose() * opponent;
  }
  BestResponse br;
  br.value = scores.maxCoeff();
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (scores[i] >= br.value - kTieTol) br.actions.push_back(static_cast<int>(i));
  return br;
}

struct EpsilonReport {
  double epsilon = 0.0;
  double row_gain = 0.0;
  double col_gain = 0.0;

  double mean_gain() const { return 0.5 * (row_gain + col_gain); }
};

inline EpsilonReport epsilon_of_profile(const BimatrixGame& g, const MixedProfile& p) {
  check_profile(g, p);
  EpsilonReport rep;
  rep.row_gain =
      std::max(0.0, best_response(g, Player::Row, p.col).value - expected_payoff(g, p, Player::Row));
  rep.col_gain =
      std::max(0.0, best_response(g, Player::Col, p.row).value - expected_payoff(g, p, Player::Col));
  rep.epsilon = std::max(rep.row_gain, rep.col_gain);
  return rep;
}

// ---------------------------------------------------------------------------
// Constant-sum solver: dense primal simplex with Bland's rule
// ---------------------------------------------------------------------------

namespace detail {

// max c.x  s.t.  D x <= b, x >= 0, with b >= 0 (slack basis is feasible).
// Returns primal solution, duals of the <= constraints, and the objective.
struct SimplexResult {
  VectorXd x;
  VectorXd duals;
  double objective = 0.0;
};

inline SimplexResult simplex_max(const MatrixXd& D, const VectorXd& b, const VectorXd& c) {
  const Eigen::Index m = D.rows();
  const Eigen::Index n = D.cols();
  const Eigen::Index cols = n + m;  // structural + slack
  constexpr double kPivTol = 1e-11;

  MatrixXd T(m, cols + 1);
  T.block(0, 0, m, n) = D;
  T.block(0, n, m, m) = MatrixXd::Identity(m, m);
  T.col(cols) = b;

  // objective row holds z_j = c_B B^-1 A_j - c_j; optimal when all >= 0
  VectorXd z(cols + 1);
  for (Eigen::Index j = 0; j < cols; ++j) z[j] = j < n ? -c[j] : 0.0;
  z[cols] = 0.0;

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const long max_iters = 200 + 50 * static_cast<long>(cols) * static_cast<long>(cols);
  for (long iter = 0;; ++iter) {
    if (iter > max_iters) throw SolverFailure("simplex exceeded iteration cap");

    // Bland: entering = smallest index with negative reduced cost
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (z[j] < -kPivTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;  // optimal

    // ratio test; ties broken by smallest basic variable index (Bland)
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > kPivTol) {
        const double ratio = T(i, cols) / a;
        if (ratio < best_ratio - kPivTol ||
            (ratio < best_ratio + kPivTol &&
             (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw SolverFailure("simplex detected an unbounded program");

    // pivot on (leave, enter)
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && std::abs(T(i, enter)) > 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    z -= z[enter] * T.row(leave).transpose();
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  SimplexResult res;
  res.x = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = basis[static_cast<std::size_t>(i)];
    if (j < n) res.x[j] = T(i, cols);
  }
  res.duals = z.segment(n, m);
  res.objective = z[cols];
  return res;
}

}  // namespace detail

struct ConstantSumSolution {
  MixedProfile profile;
  double value = 0.0;  // row player's guaranteed payoff
};

// Row player maximizes `payoff`, column player minimizes (utility c - payoff).
// Solved as the equivalent zero-sum game: shift the matrix positive, then
//   max 1.w  s.t.  M'w <= 1, w >= 0
// gives the column strategy (w normalized) and game value 1/sum(w); the duals
// of the row constraints give the row strategy.
inline ConstantSumSolution solve_constant_sum(const MatrixXd& payoff, double /*c*/ = 1.0) {
  if (payoff.rows() < 1 || payoff.cols() < 1) throw DimensionMismatch("empty payoff matrix");
  if (!payoff.allFinite()) throw ArgumentError("payoff matrix must be finite");

  const double shift = 1.0 - payoff.minCoeff();
  const MatrixXd M = payoff.array() + shift;

  const auto lp = detail::simplex_max(M, VectorXd::Ones(payoff.rows()), VectorXd::Ones(payoff.cols()));
  if (lp.objective <= 0.0) throw SolverFailure("degenerate LP objective");

  ConstantSumSolution sol;
  sol.profile.col = normalized(lp.x);
  sol.profile.row = normalized(lp.duals);
  sol.value = 1.0 / lp.objective - shift;
  return sol;
}

// ---------------------------------------------------------------------------
// Support enumeration for general bimatrix games
// ---------------------------------------------------------------------------

struct SupportEquilibrium {
  MixedProfile profile;
  double row_payoff = 0.0;
  double col_payoff = 0.0;
  std::vector<int> row_support;
  std::vector<int> col_support;
};

struct SupportEnumerationResult {
  std::vector<SupportEquilibrium> equilibria;
  bool degenerate = false;  // some candidate supports had singular systems
  int skipped_supports = 0;
};

namespace detail {

inline void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  cur.reserve(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= n - (k - static_cast<int>(cur.size())); ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

// Indifference system on a candidate support: solve for the opponent mix that
// makes every own support action earn the same value v.
//   [ M_sub  -1 ] [ y ]   [ 0 ]
//   [ 1^T     0 ] [ v ] = [ 1 ]
inline bool solve_indifference(const MatrixXd& M_sub, VectorXd& strategy, double& value) {
  const Eigen::Index k = M_sub.rows();
  MatrixXd S(k + 1, k + 1);
  S.setZero();
  S.block(0, 0, k, k) = M_sub;
  S.block(0, k, k, 1).setConstant(-1.0);
  S.block(k, 0, 1, k).setConstant(1.0);
  VectorXd rhs = VectorXd::Zero(k + 1);
  rhs[k] = 1.0;
  Eigen::FullPivLU<MatrixXd> lu(S);
  lu.setThreshold(1e-11);
  if (!lu.isInvertible()) return false;
  const VectorXd sol = lu.solve(rhs);
  strategy = sol.head(k);
  value = sol[k];
  return true;
}

}  // namespace detail

// Standard equal-size support enumeration. Candidate supports whose
// indifference systems are singular are skipped and counted; near-duplicate
// equilibria (same profile within kTieTol) are reported once.
inline SupportEnumerationResult solve_support_enumeration(const BimatrixGame& g, int max_size = 5) {
  const int m = static_cast<int>(g.rows());
  const int n = static_cast<int>(g.cols());
  if (m > max_size || n > max_size)
    throw ArgumentError("game exceeds support-enumeration size cap");

  SupportEnumerationResult result;
  for (int k = 1; k <= std::min(m, n); ++k) {
    std::vector<std::vector<int>> row_supports, col_supports;
    detail::subsets_of_size(m, k, row_supports);
    detail::subsets_of_size(n, k, col_supports);
    for (const auto& rows : row_supports) {
      for (const auto& cols : col_supports) {
        MatrixXd A_sub(k, k), Bt_sub(k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            A_sub(i, j) = g.A(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
            Bt_sub(i, j) = g.B(rows[static_cast<std::size_t>(j)], cols[static_cast<std::size_t>(i)]);
          }
        VectorXd y_sub, x_sub;
        double v = 0.0, w = 0.0;
        if (!detail::solve_indifference(A_sub, y_sub, v) ||
            !detail::solve_indifference(Bt_sub, x_sub, w)) {
          result.degenerate = true;
          ++result.skipped_supports;
          continue;
        }
        if (x_sub.minCoeff() < -kTieTol || y_sub.minCoeff() < -kTieTol) continue;

        VectorXd x = VectorXd::Zero(m), y = VectorXd::Zero(n);
        for (int i = 0; i < k; ++i) {
          x[rows[static_cast<std::size_t>(i)]] = std::max(x_sub[i], 0.0);
          y[cols[static_cast<std::size_t>(i)]] = std::max(y_sub[i], 0.0);
        }
        x /= x.sum();
        y /= y.sum();

        // no action outside the support may strictly improve
        const VectorXd row_scores = g.A * y;
        const VectorXd col_scores = g.B.transpose() * x;
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
          if (row_scores[i] > v + kTieTol) ok = false;
        for (int j = 0; j < n && ok; ++j)
          if (col_scores[j] > w + kTieTol) ok = false;
        if (!ok) continue;

        bool duplicate = false;
        for (const auto& eq : result.equilibria) {
          if ((eq.profile.row - x).lpNorm<Eigen::Infinity>() <= kTieTol &&
              (eq.profile.col - y).lpNorm<Eigen::Infinity>() <= kTieTol) {
            duplicate = true;
            break;
          }
        }
        if (duplicate) continue;

        SupportEquilibrium eq;
        eq.profile = {x, y};
        eq.row_payoff = x.dot(g.A * y);
        eq.col_payoff = x.dot(g.B * y);
        eq.row_support = rows;
        eq.col_support = cols;
        result.equilibria.push_back(std::move(eq));
      }
    }
  }
  return result;
}

// Headline pick when several equilibria exist: maximal row payoff, ties broken
// by lexicographic support order.
inline const SupportEquilibrium* select_headline(const SupportEnumerationResult& result) {
  const SupportEquilibrium* best = nullptr;
  for (const auto& eq : result.equilibria) {
    if (!best || eq.row_payoff > best->row_payoff + kTieTol) {
      best = &eq;
    } else if (eq.row_payoff >= best->row_payoff - kTieTol) {
      if (std::tie(eq.row_support, eq.col_support) < std::tie(best->row_support, best->col_support))
        best = &eq;
    }
  }
  return best;
}

}  // namespace spotkick::nash
