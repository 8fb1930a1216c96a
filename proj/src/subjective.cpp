#include "tiqa/subjective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace tiqa {

double pref_prob(double wins, double n, double ties) {
  if (!(wins >= 0.0) || !(n > 0.0) || !(ties >= 0.0) || wins + ties > n) {
    throw Error(ErrorKind::domain,
                "pref_prob: need w >= 0, n > 0, tau >= 0 and w + tau <= n");
  }
  return wins / n + ties / (2.0 * n);
}

double binom_cdf(int k, int n, double p) {
  if (n < 0 || k < 0 || k > n || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::domain, "binom_cdf: need 0 <= k <= n and p in [0, 1]");
  }
  if (k == n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(n + 1.0);
  // log-sum-exp over the terms.
  std::vector<double> logs(k + 1);
  for (int i = 0; i <= k; ++i) {
    logs[i] = log_n_fact - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
              i * log_p + (n - i) * log_q;
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - peak);
  return std::min(1.0, std::exp(peak + std::log(acc)));
}

Thresholds significance_thresholds(int n, double alpha) {
  if (n < 1) throw Error(ErrorKind::domain, "significance_thresholds: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorKind::domain, "significance_thresholds: alpha must be in (0, 0.5)");
  }
  Thresholds t;
  for (int k = 0; k <= n; ++k) {
    const double c = binom_cdf(k, n, 0.5);
    if (c <= alpha) t.k_lo = k;
  }
  for (int k = 0; k <= n; ++k) {
    if (binom_cdf(k, n, 0.5) >= 1.0 - alpha) {
      t.k_hi = k;
      break;
    }
  }
  return t;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::favored: return "favored";
    case Verdict::neutral: return "neutral";
    case Verdict::disfavored: return "disfavored";
  }
  return "neutral";
}

Verdict classify(double wins, int n, double alpha) {
  pref_prob(wins, n, 0.0);  // domain checks
  const Thresholds t = significance_thresholds(n, alpha);
  if (wins >= t.k_hi) return Verdict::favored;
  if (t.k_lo && wins <= *t.k_lo) return Verdict::disfavored;
  return Verdict::neutral;
}

VoteMatrix VoteMatrix::zeros(std::vector<std::string> methods, int n_per_pair) {
  VoteMatrix v;
  const auto m = static_cast<Eigen::Index>(methods.size());
  v.methods = std::move(methods);
  v.wins = Eigen::MatrixXd::Zero(m, m);
  v.ties = Eigen::MatrixXd::Zero(m, m);
  v.n_per_pair = n_per_pair;
  return v;
}

int VoteMatrix::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void VoteMatrix::add(int a, int b, double votes_a, double votes_b, double tied) {
  if (a == b) throw Error(ErrorKind::domain, "VoteMatrix::add: a method cannot face itself");
  if (votes_a < 0 || votes_b < 0 || tied < 0) {
    throw Error(ErrorKind::domain, "VoteMatrix::add: counts must be non-negative");
  }
  wins(a, b) += votes_a;
  wins(b, a) += votes_b;
  ties(a, b) += tied;
  ties(b, a) += tied;
}

void VoteMatrix::validate() const {
  const auto m = static_cast<Eigen::Index>(methods.size());
  if (wins.rows() != m || wins.cols() != m || ties.rows() != m || ties.cols() != m) {
    throw Error(ErrorKind::shape, "VoteMatrix: matrices do not match method count");
  }
  if ((wins.array() < 0).any() || (ties.array() < 0).any()) {
    throw Error(ErrorKind::domain, "VoteMatrix: negative counts");
  }
  if (wins.diagonal().any() || ties.diagonal().any()) {
    throw Error(ErrorKind::domain, "VoteMatrix: non-zero diagonal");
  }
  if (!ties.isApprox(ties.transpose(), 0.0)) {
    throw Error(ErrorKind::domain, "VoteMatrix: ties must be symmetric");
  }
}

Eigen::MatrixXd VoteMatrix::effective_wins() const { return wins + 0.5 * ties; }

std::vector<PreferenceResult> pairwise_preferences(const VoteMatrix& votes,
                                                   double alpha) {
  votes.validate();
  std::vector<PreferenceResult> out;
  for (int a = 0; a < votes.size(); ++a) {
    for (int b = 0; b < votes.size(); ++b) {
      if (a == b) continue;
      const double w = votes.wins(a, b);
      const double tau = votes.ties(a, b);
      const double n = w + votes.wins(b, a) + tau;
      if (n <= 0) continue;
      PreferenceResult r;
      r.method = votes.methods[a];
      r.opponent = votes.methods[b];
      r.votes = w;
      r.pref_prob = pref_prob(w, n, tau);
      r.verdict = classify(w, static_cast<int>(std::lround(n)), alpha);
      out.push_back(std::move(r));
    }
  }
  return out;
}

BtScores bradley_terry(const VoteMatrix& votes, double tol, int max_iter) {
  votes.validate();
  const int m = votes.size();
  if (m < 1) throw Error(ErrorKind::domain, "bradley_terry: no methods");
  const Eigen::MatrixXd w = votes.effective_wins();
  const Eigen::MatrixXd n = w + w.transpose();

  // Connectivity of the comparison graph.
  std::vector<bool> seen(m, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (int b = 0; b < m; ++b) {
      if (!seen[b] && n(a, b) > 0) {
        seen[b] = true;
        frontier.push(b);
      }
    }
  }
  for (int a = 0; a < m; ++a) {
    if (!seen[a]) {
      throw Error(ErrorKind::identifiability,
                  "bradley_terry: comparison graph is disconnected ('" +
                      votes.methods[a] + "' is unreachable)");
    }
  }

  BtScores result;
  const Eigen::VectorXd total_wins = w.rowwise().sum();
  std::vector<bool> pinned(m, false);
  int n_pinned = 0;
  for (int a = 0; a < m; ++a) {
    if (total_wins(a) <= 0) {
      pinned[a] = true;
      ++n_pinned;
      result.warnings.push_back("method '" + votes.methods[a] +
                                "' has no wins; strength pinned to the floor");
    }
  }
  const double free_mass = 1.0 - n_pinned * kBtStrengthFloor;

  auto normalize = [&](Eigen::VectorXd& pi) {
    double free_sum = 0.0;
    for (int a = 0; a < m; ++a) {
      if (!pinned[a]) free_sum += pi(a);
    }
    for (int a = 0; a < m; ++a) {
      pi(a) = pinned[a] ? kBtStrengthFloor : pi(a) / free_sum * free_mass;
    }
  };

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(m, 1.0);
  normalize(pi);
  if (n_pinned == m) {
    // Only possible without any comparisons; fall back to uniform.
    result.strengths = Eigen::VectorXd::Constant(m, 1.0 / m);
    result.converged = true;
    return result;
  }
  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::VectorXd next(m);
    for (int a = 0; a < m; ++a) {
      if (pinned[a]) {
        next(a) = kBtStrengthFloor;
        continue;
      }
      double denom = 0.0;
      for (int b = 0; b < m; ++b) {
        if (b != a && n(a, b) > 0) denom += n(a, b) / (pi(a) + pi(b));
      }
      next(a) = total_wins(a) / denom;
    }
    normalize(next);
    const double change = ((next - pi).array().abs() / pi.array()).maxCoeff();
    pi = next;
    result.iterations = iter;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  result.strengths = pi;
  return result;
}

Eigen::VectorXd objective_preference(const Eigen::MatrixXd& scores, Polarity polarity) {
  const Eigen::Index scenes = scores.rows();
  const Eigen::Index m = scores.cols();
  if (m < 2) throw Error(ErrorKind::domain, "objective_preference: need >= 2 methods");
  if (scenes < 1) throw Error(ErrorKind::domain, "objective_preference: need >= 1 scene");
  for (Eigen::Index s = 0; s < scenes; ++s) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (!std::isfinite(scores(s, k))) {
        throw Error(ErrorKind::incomplete_data,
                    "objective_preference: missing score at scene " + std::to_string(s) +
                        ", method " + std::to_string(k));
      }
    }
  }
  Eigen::VectorXd wins = Eigen::VectorXd::Zero(m);
  for (Eigen::Index s = 0; s < scenes; ++s) {
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = a + 1; b < m; ++b) {
        const double x = scores(s, a);
        const double y = scores(s, b);
        const double scale = std::max(std::abs(x), std::abs(y));
        if (std::abs(x - y) <= 1e-9 * scale) {
          wins(a) += 0.5;
          wins(b) += 0.5;
        } else if ((x > y) == (polarity == Polarity::higher_better)) {
          wins(a) += 1.0;
        } else {
          wins(b) += 1.0;
        }
      }
    }
  }
  const double comparisons = double(scenes) * double(m) * double(m - 1) / 2.0;
  return 100.0 * wins / comparisons;
}

}  // namespace tiqa
