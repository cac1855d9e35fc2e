#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spotkick/data.hpp"
#include "spotkick/errors.hpp"
#include "spotkick/game.hpp"
#include "spotkick/nash.hpp"

// Divergence metrics and hypothesis tests: Jensen-Shannon divergence, Welch's
// t-test on per-cell scoring rates, footedness-equivalence tables, and
// experience sweeps.

namespace spotkick::stats {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace detail {

// Continued fraction for the incomplete beta function (Lentz's method).
// Converges for x < (a+1)/(a+b+2); callers apply the symmetry otherwise.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw SolverFailure("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), absolute error well below 1e-10 over
// the parameter ranges reached by t-tests.
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete_beta requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided tail probability P(|T| >= |t|) for Student's t with `df` degrees
// of freedom: I_x(df/2, 1/2) with x = df / (df + t^2).
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

// ---------------------------------------------------------------------------
// Jensen-Shannon divergence
// ---------------------------------------------------------------------------

struct Distribution {
  Eigen::VectorXd probabilities;
  std::vector<std::string> labels;
};

// JSD(p, q) = KL(p||m)/2 + KL(q||m)/2 with m = (p+q)/2, natural log,
// 0*log(0/x) = 0. Symmetric, in [0, ln 2].
inline double jsd(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw DimensionMismatch("distributions differ in dimension");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) total += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) total += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::max(total, 0.0);
}

inline double jsd(const Distribution& p, const Distribution& q) {
  if (p.labels != q.labels) throw DimensionMismatch("distribution label order differs");
  return jsd(p.probabilities, q.probabilities);
}

// Mean of the per-player divergences; the published footers quote 100x this.
inline double game_jsd(const nash::MixedProfile& a, const nash::MixedProfile& b) {
  return 0.5 * (jsd(a.row, b.row) + jsd(a.col, b.col));
}

// ---------------------------------------------------------------------------
// t-tests on per-cell scoring rates
// ---------------------------------------------------------------------------

struct CellTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  long n_a = 0;
  long n_b = 0;
};

enum class TestKind { Welch, Pooled };

// Two-sided t-test on the Bernoulli samples implied by the counts. Sample
// variance uses the n/(n-1) correction. Zero variance in both groups leaves t
// undefined and raises MissingData.
inline CellTestResult welch_t_test(const CellCounts& a, const CellCounts& b,
                                   TestKind kind = TestKind::Welch) {
  if (a.attempts < 2 || b.attempts < 2) throw MissingData("t-test needs >= 2 attempts per group");
  const auto na = static_cast<double>(a.attempts), nb = static_cast<double>(b.attempts);
  const double pa = static_cast<double>(a.successes) / na;
  const double pb = static_cast<double>(b.successes) / nb;
  const double var_a = pa * (1.0 - pa) * na / (na - 1.0);
  const double var_b = pb * (1.0 - pb) * nb / (nb - 1.0);

  CellTestResult result;
  result.n_a = a.attempts;
  result.n_b = b.attempts;
  double se2 = 0.0;
  if (kind == TestKind::Welch) {
    se2 = var_a / na + var_b / nb;
    if (se2 <= 0.0) throw MissingData("zero variance in both groups");
    const double ta = var_a / na, tb = var_b / nb;
    result.degrees_of_freedom =
        se2 * se2 / (ta * ta / (na - 1.0) + tb * tb / (nb - 1.0));
  } else {
    const double pooled = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / (na + nb - 2.0);
    se2 = pooled * (1.0 / na + 1.0 / nb);
    if (se2 <= 0.0) throw MissingData("zero variance in both groups");
    result.degrees_of_freedom = na + nb - 2.0;
  }
  result.t_statistic = (pa - pb) / std::sqrt(se2);
  result.p_value = student_t_two_sided_p(result.t_statistic, result.degrees_of_freedom);
  return result;
}

// ---------------------------------------------------------------------------
// Footedness equivalence tables
// ---------------------------------------------------------------------------

// Per-cell test results; a missing entry marks a cell that lacked data in one
// footedness group rather than a failed computation.
struct PValueTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::optional<CellTestResult>>> cells;
};

// Splits by kicker footedness, builds one empirical game per foot, and tests
// each corresponding cell pair.
inline PValueTable footedness_p_table(const KickDataset& ds, const ActionAbstraction& abstraction,
                                      TestKind kind = TestKind::Welch) {
  std::vector<KickRecord> left, right;
  for (const auto& r : ds.records())
    (r.kicker_foot == Foot::Left ? left : right).push_back(r);
  if (left.empty() || right.empty())
    throw MissingData("dataset lacks one footedness group");
  const auto game_l = build_empirical_game(KickDataset::from_records(std::move(left)), abstraction);
  const auto game_r = build_empirical_game(KickDataset::from_records(std::move(right)), abstraction);

  PValueTable table;
  table.row_labels = abstraction.row_labels();
  table.col_labels = abstraction.col_labels();
  const int n = abstraction.num_actions();
  table.cells.assign(static_cast<std::size_t>(n),
                     std::vector<std::optional<CellTestResult>>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      try {
        table.cells[si][sj] = welch_t_test(game_l.counts[si][sj], game_r.counts[si][sj], kind);
      } catch (const MissingData&) {
        table.cells[si][sj] = std::nullopt;
      }
    }
  return table;
}

// ---------------------------------------------------------------------------
// Experience sweeps
// ---------------------------------------------------------------------------

struct ExperiencePoint {
  int threshold = 1;
  std::size_t dataset_size = 0;
  std::optional<PValueTable> table;  // absent when a footedness group vanished
};

// Footedness table per minimum-appearance threshold over kickers.
inline std::vector<ExperiencePoint> p_value_vs_min_experience(const KickDataset& ds,
                                                              const ActionAbstraction& abstraction,
                                                              const std::vector<int>& thresholds,
                                                              TestKind kind = TestKind::Welch) {
  if (thresholds.empty()) throw InvalidRange("thresholds must be non-empty");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] < 1) throw InvalidRange("thresholds must be >= 1");
    if (i && thresholds[i] <= thresholds[i - 1]) throw InvalidRange("thresholds must be ascending");
  }
  std::vector<ExperiencePoint> curve;
  curve.reserve(thresholds.size());
  for (int tau : thresholds) {
    ExperiencePoint point;
    point.threshold = tau;
    const auto filtered = filter_by_min_appearances(ds, tau, {Role::Kicker});
    point.dataset_size = filtered.size();
    try {
      point.table = footedness_p_table(filtered, abstraction, kind);
    } catch (const MissingData&) {
    } catch (const EmptyDataset&) {
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

struct ExperienceBand {
  int lo = 1;
  int hi = 1;  // inclusive
};

struct BandPoint {
  ExperienceBand band;
  std::size_t dataset_size = 0;
  std::optional<PValueTable> table;
};

// Footedness table per experience band: keeps kicks whose kicker's appearance
// count in the ORIGINAL dataset falls inside the inclusive band. Bands may
// overlap.
inline std::vector<BandPoint> p_value_by_experience_band(const KickDataset& ds,
                                                         const ActionAbstraction& abstraction,
                                                         const std::vector<ExperienceBand>& bands,
                                                         TestKind kind = TestKind::Welch) {
  if (bands.empty()) throw InvalidRange("bands must be non-empty");
  for (const auto& band : bands)
    if (band.lo < 1 || band.hi < band.lo) throw InvalidRange("band must satisfy 1 <= lo <= hi");
  std::vector<BandPoint> out;
  out.reserve(bands.size());
  for (const auto& band : bands) {
    BandPoint point;
    point.band = band;
    std::vector<KickRecord> kept;
    for (const auto& r : ds.records()) {
      const int count = ds.appearances(Role::Kicker, r.kicker_id);
      if (count >= band.lo && count <= band.hi) kept.push_back(r);
    }
    point.dataset_size = kept.size();
    try {
      point.table = footedness_p_table(KickDataset::from_records(std::move(kept)), abstraction, kind);
    } catch (const MissingData&) {
    } catch (const EmptyDataset&) {
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace spotkick::stats
