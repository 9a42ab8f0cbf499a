#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mps/model.hpp"
#include "mps/sums.hpp"

namespace mps {

// Shared context of a batch of condition statistics (one CSV row group).
struct ConditionContext {
  std::string model_id;
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::optional<std::int64_t> ell;
  std::optional<double> delta;
  std::optional<double> eps;
  std::uint64_t seed = 0;
};

struct ConditionEntry {
  std::string statistic;
  double value = 0.0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  int verdict = -1;  // 1 pass, 0 fail, -1 not judged
};

struct ConditionReport {
  ConditionContext context;
  std::vector<ConditionEntry> entries;

  double get(const std::string& statistic) const;
  void add(std::string statistic, double value);
  void add(std::string statistic, double value, double threshold, bool pass);
};

// The scaling function a(t): grid values of s^2_{[nt]} / s^2_n (empirical) or
// a user-supplied analytic limit. Evaluation interpolates linearly between
// knots, with a(0) = 0.
struct ScalingFunction {
  std::vector<double> grid;    // strictly increasing, in (0,1]
  std::vector<double> values;  // nondecreasing
  std::string source;          // "analytic" or "empirical(n)"

  double eval(double t) const;
};

// --- Window-form convergence statistics (no block scheme involved) --------

// Lyapounov statistic A'_n(delta) = s'^{-(2+delta)} sum_k E|X_k|^{2+delta}.
double lyapounov_moving(const SequenceModel& model, const Window& window, double delta);

// Lindeberg statistic g_n(eps) = s'^{-2} sum_k E[X_k^2 1_{|X_k| >= eps s'_n}], in [0,1].
double lindeberg_moving(const SequenceModel& model, const Window& window, double eps);

// max_k (sigma_k / s'_n)^2 over the window.
double uan_ratio(const SequenceModel& model, const Window& window);

// nu-hat = s_{n+p(n)} / s'_n: transfers the moving-window CLT to the plain
// partial sum when the ratio tends to 1.
double remark_r1_ratio(const SequenceModel& model, const Window& window);

// Empirical scaling function a-hat(t_g) = s^2_{[n t_g]} / s^2_n, exact variances.
ScalingFunction scaling_ratio(const SequenceModel& model, std::int64_t n,
                              const std::vector<double>& grid);

// | Var(block(s1,s2] + block(t1,t2]) / s^2_n  -  [(a(s2)-a(s1)) + (a(t2)-a(t1))] |
// for 0 < s1 <= s2 <= t1 <= t2 <= 1, exact variances.
double pair_variance_gap(const SequenceModel& model, std::int64_t n, double s1, double s2,
                         double t1, double t2, const ScalingFunction& a);

// --- Block-scheme statistics ----------------------------------------------

// (L) = ell/n, (H0) = ell/s'^2, (Ha) = sum tau'^2_j / s'^2 (target 1),
// (Hab) = Var(remainder)/s'^2, (Hb) C1 = max_j tau'^2_j / s'^2.
ConditionReport block_hypotheses(const SequenceModel& model, const Window& window,
                                 const BlockScheme& scheme);

// Knobs for block moments that have no closed form (non-Gaussian models with
// blocks too long to enumerate).
struct BlockMomentOptions {
  std::size_t mc_replicates = 200000;
  std::uint64_t seed = 1;
  std::int64_t enumeration_limit = 20;  // Rademacher blocks up to 2^20 states
};

// E|T_j|^{2+delta} and E[T_j^2 1_{|T_j| >= a}] for the block variables.
MomentValue block_abs_moment(const SequenceModel& model, const Window& window,
                             const BlockScheme& scheme, std::int64_t j, double r,
                             const BlockMomentOptions& options = {});
MomentValue block_tail_second_moment(const SequenceModel& model, const Window& window,
                                     const BlockScheme& scheme, std::int64_t j, double a,
                                     const BlockMomentOptions& options = {});

// (Hc) C2(n) = s'^{-(2+delta)} sum_j E|T_j|^{2+delta}.
double hc_statistic(const SequenceModel& model, const Window& window,
                    const BlockScheme& scheme, double delta,
                    const BlockMomentOptions& options = {});

// Regrouped-data statistics: A''_n(delta), B''_n, L''_n(eps), tau'^2_n.
ConditionReport regrouped_statistics(const SequenceModel& model, const Window& window,
                                     const BlockScheme& scheme, double delta, double eps,
                                     const BlockMomentOptions& options = {});

// Raw-data statistics: A'_n(delta) (ell-weighted), B'_n, L'_n(eps).
ConditionReport nonregrouped_statistics(const SequenceModel& model, const Window& window,
                                        const BlockScheme& scheme, double delta, double eps);

struct DominationEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// The three regrouped-vs-raw domination inequalities, each required to hold
// with the exact-mode quantities on both sides. The Lindeberg-type right-hand
// side is evaluated at eps / (2 ell).
std::vector<DominationEntry> domination_check(const SequenceModel& model, const Window& window,
                                              const BlockScheme& scheme, double delta, double eps,
                                              const BlockMomentOptions& options = {});

// CLI-level report: every window-form and block statistic at n, judged by the
// decay rule "value <= 0.1 and value at 4n is <= half the value at n"
// (Ha instead passes when |Ha - 1| <= 0.1).
ConditionReport condition_report(const SequenceModel& model, const Window& window,
                                 std::optional<std::int64_t> ell, double delta, double eps,
                                 const BlockMomentOptions& options = {});

}  // namespace mps
