#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "tiqa/metrics.hpp"

namespace tiqa {

/// Scaled winning frequency w/n + tau/(2n). Throws domain error unless
/// w >= 0, n > 0, tau >= 0 and w + tau <= n.
double pref_prob(double wins, double n, double ties);

/// Exact binomial CDF P[X <= k], X ~ B(n, p), summed in log space.
double binom_cdf(int k, int n, double p);

struct Thresholds {
  std::optional<int> k_lo;  // largest k with cdf(k) <= alpha
  int k_hi{0};              // smallest k with cdf(k) >= 1 - alpha
};

inline constexpr double kDefaultAlpha = 0.06;

/// Vote counts at which a method is significantly disfavored (<= k_lo) or
/// favored (>= k_hi) against a fair-coin null.
Thresholds significance_thresholds(int n, double alpha = kDefaultAlpha);

enum class Verdict { favored, neutral, disfavored };

const char* to_string(Verdict v) noexcept;

Verdict classify(double wins, int n, double alpha = kDefaultAlpha);

/// Pairwise outcomes among M methods. wins(a, b) counts a beating b;
/// ties(a, b) is symmetric.
struct VoteMatrix {
  std::vector<std::string> methods;
  Eigen::MatrixXd wins;
  Eigen::MatrixXd ties;
  int n_per_pair{0};

  static VoteMatrix zeros(std::vector<std::string> methods, int n_per_pair = 0);

  int size() const noexcept { return static_cast<int>(methods.size()); }
  /// Index of `name`, or -1.
  int index_of(const std::string& name) const;
  /// Accumulates one comparison record between methods a and b.
  void add(int a, int b, double votes_a, double votes_b, double tied);
  /// Checks zero diagonal, non-negativity and tie symmetry.
  void validate() const;
  /// Wins with ties split as half-wins.
  Eigen::MatrixXd effective_wins() const;
};

struct PreferenceResult {
  std::string method;
  std::string opponent;  // empty for pooled results
  double pref_prob{0};
  double votes{0};
  Verdict verdict{Verdict::neutral};
};

/// Per ordered pair (a vs b, a != b) preference results using the pair's
/// own comparison count.
std::vector<PreferenceResult> pairwise_preferences(const VoteMatrix& votes,
                                                   double alpha = kDefaultAlpha);

struct BtScores {
  Eigen::VectorXd strengths;  // positive, sums to 1
  int iterations{0};
  bool converged{false};
  std::vector<std::string> warnings;
};

inline constexpr double kBtStrengthFloor = 1e-12;

/// Bradley-Terry maximum likelihood via minorization-maximization. Ties are
/// split as half-wins. Throws identifiability error if the comparison graph
/// is disconnected.
BtScores bradley_terry(const VoteMatrix& votes, double tol = 1e-8,
                       int max_iter = 10000);

/// Table-style objective preference. `scores` is scenes x methods; every
/// scene's unordered method pairs award 1 win to the better score (per
/// polarity) or 0.5 each on a tie (relative tolerance 1e-9). Returns per
/// method 100 * wins / (S * C(M, 2)).
Eigen::VectorXd objective_preference(const Eigen::MatrixXd& scores, Polarity polarity);

}  // namespace tiqa
