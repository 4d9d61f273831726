#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exante/common.hpp"
#include "exante/simplex.hpp"

namespace exante {

/// Posterior (or prior) probability vector over states.
struct Belief {
  std::vector<double> probs;

  bool operator==(const Belief&) const = default;
};

/// State-conditional distribution over a finite realization space:
/// likelihood[state][realization], each row summing to 1.
struct Signal {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> likelihood;

  std::size_t num_states() const { return likelihood.size(); }
  std::size_t num_realizations() const {
    return likelihood.empty() ? 0 : likelihood[0].size();
  }
};

/// One signal per student, in market order.
struct SignalProfile {
  std::vector<Signal> signals;

  std::size_t size() const { return signals.size(); }
  const Signal& operator[](std::size_t k) const { return signals[k]; }
};

/// Distribution over posterior beliefs induced by a signal: support points
/// with positive weights summing to 1.
struct BeliefDistribution {
  std::vector<Belief> beliefs;
  std::vector<double> weights;
};

/// Row-stochastic map from the realizations of a finer signal to those of a
/// coarser one: rows[fine][coarse].
struct Garbling {
  std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> default_labels(std::size_t count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    labels.push_back("i" + std::to_string(i));
  }
  return labels;
}

/// Probability of observing `realization` under (prior, signal).
inline double realization_marginal(const std::vector<double>& prior,
                                   const Signal& signal,
                                   std::size_t realization) {
  double total = 0.0;
  for (std::size_t w = 0; w < signal.num_states(); ++w) {
    total += prior[w] * signal.likelihood[w][realization];
  }
  return total;
}

/// Bayes posterior over states after observing `realization`.
/// Realizations with zero marginal probability are an error, never NaN.
inline Belief posterior(const std::vector<double>& prior, const Signal& signal,
                        std::size_t realization) {
  if (realization >= signal.num_realizations()) {
    throw std::out_of_range("unknown realization");
  }
  double marginal = realization_marginal(prior, signal, realization);
  if (!(marginal > 0.0)) {
    throw std::domain_error("posterior of a zero-probability realization");
  }
  Belief b;
  b.probs.resize(signal.num_states());
  for (std::size_t w = 0; w < signal.num_states(); ++w) {
    b.probs[w] = prior[w] * signal.likelihood[w][realization] / marginal;
  }
  return b;
}

/// Distribution over posteriors; realizations inducing the same posterior
/// (max-norm distance < merge_tol) are merged and their marginals summed.
inline BeliefDistribution belief_distribution(const std::vector<double>& prior,
                                              const Signal& signal,
                                              double merge_tol = 1e-9) {
  BeliefDistribution dist;
  for (std::size_t i = 0; i < signal.num_realizations(); ++i) {
    double marginal = realization_marginal(prior, signal, i);
    if (!(marginal > 0.0)) continue;
    Belief mu = posterior(prior, signal, i);
    bool merged = false;
    for (std::size_t j = 0; j < dist.beliefs.size(); ++j) {
      double dist_max = 0.0;
      for (std::size_t w = 0; w < mu.probs.size(); ++w) {
        dist_max = std::max(dist_max,
                            std::abs(dist.beliefs[j].probs[w] - mu.probs[w]));
      }
      if (dist_max < merge_tol) {
        dist.weights[j] += marginal;
        merged = true;
        break;
      }
    }
    if (!merged) {
      dist.beliefs.push_back(std::move(mu));
      dist.weights.push_back(marginal);
    }
  }
  return dist;
}

/// True iff the expected posterior equals the prior component-wise within tol.
inline bool check_bayes_plausible(const BeliefDistribution& dist,
                                  const std::vector<double>& prior,
                                  double tol = 1e-9) {
  std::vector<double> mean(prior.size(), 0.0);
  for (std::size_t j = 0; j < dist.beliefs.size(); ++j) {
    for (std::size_t w = 0; w < prior.size(); ++w) {
      mean[w] += dist.weights[j] * dist.beliefs[j].probs[w];
    }
  }
  for (std::size_t w = 0; w < prior.size(); ++w) {
    if (std::abs(mean[w] - prior[w]) > tol) return false;
  }
  return true;
}

/// Garbled signal: likelihood' = likelihood x garbling.
inline Signal apply_garbling(const Signal& signal, const Garbling& g) {
  if (g.rows.size() != signal.num_realizations()) {
    throw std::invalid_argument("garbling rows != signal realizations");
  }
  const std::size_t coarse = g.rows.empty() ? 0 : g.rows[0].size();
  for (const auto& row : g.rows) {
    if (row.size() != coarse) {
      throw std::invalid_argument("ragged garbling matrix");
    }
  }
  Signal out;
  out.labels = default_labels(coarse);
  out.likelihood.assign(signal.num_states(), std::vector<double>(coarse, 0.0));
  for (std::size_t w = 0; w < signal.num_states(); ++w) {
    for (std::size_t i = 0; i < signal.num_realizations(); ++i) {
      double base = signal.likelihood[w][i];
      if (base == 0.0) continue;
      for (std::size_t j = 0; j < coarse; ++j) {
        out.likelihood[w][j] += base * g.rows[i][j];
      }
    }
  }
  return out;
}

struct InformativenessResult {
  bool more_informative = false;
  std::optional<Garbling> witness;
};

/// Blackwell comparison: `fine` is more informative than `coarse` iff some
/// row-stochastic garbling maps fine's likelihood onto coarse's. Solved as a
/// linear feasibility problem; a verified witness is returned on success.
inline InformativenessResult is_more_informative(const Signal& fine,
                                                 const Signal& coarse,
                                                 double tol = 1e-9) {
  if (fine.num_states() != coarse.num_states()) {
    throw std::invalid_argument("signals defined over different state spaces");
  }
  const std::size_t states = fine.num_states();
  const std::size_t nf = fine.num_realizations();
  const std::size_t nc = coarse.num_realizations();

  LinearProgram lp;
  lp.num_vars = nf * nc;  // T(coarse j | fine i) at index i * nc + j
  for (std::size_t i = 0; i < nf; ++i) {
    std::vector<double> row(lp.num_vars, 0.0);
    for (std::size_t j = 0; j < nc; ++j) row[i * nc + j] = 1.0;
    lp.eq_lhs.push_back(std::move(row));
    lp.eq_rhs.push_back(1.0);
  }
  for (std::size_t w = 0; w < states; ++w) {
    for (std::size_t j = 0; j < nc; ++j) {
      std::vector<double> row(lp.num_vars, 0.0);
      for (std::size_t i = 0; i < nf; ++i) {
        row[i * nc + j] = fine.likelihood[w][i];
      }
      lp.eq_lhs.push_back(std::move(row));
      lp.eq_rhs.push_back(coarse.likelihood[w][j]);
    }
  }

  LpSolution sol = feasible(lp, tol);
  InformativenessResult result;
  if (sol.status != LpStatus::Optimal) return result;

  Garbling g;
  g.rows.assign(nf, std::vector<double>(nc, 0.0));
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      g.rows[i][j] = sol.x[i * nc + j];
    }
  }
  // Re-verify the witness by direct multiplication.
  Signal check = apply_garbling(fine, g);
  for (std::size_t w = 0; w < states; ++w) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (std::abs(check.likelihood[w][j] - coarse.likelihood[w][j]) >
          std::max(tol, 1e2 * tol)) {
        return result;
      }
    }
  }
  result.more_informative = true;
  result.witness = std::move(g);
  return result;
}

/// Per-student conjunction of the Blackwell order over two profiles.
inline bool profile_more_informative(const SignalProfile& fine,
                                     const SignalProfile& coarse,
                                     double tol = 1e-9,
                                     std::vector<bool>* per_student = nullptr) {
  if (fine.size() != coarse.size()) {
    throw std::invalid_argument("profiles of different lengths");
  }
  bool all = true;
  if (per_student) per_student->assign(fine.size(), false);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    bool yes = is_more_informative(fine[k], coarse[k], tol).more_informative;
    if (per_student) (*per_student)[k] = yes;
    all = all && yes;
  }
  return all;
}

/// One distinct realization per state (identity likelihood).
inline Signal full_disclosure(std::size_t num_states) {
  Signal s;
  s.labels = default_labels(num_states);
  s.likelihood.assign(num_states, std::vector<double>(num_states, 0.0));
  for (std::size_t w = 0; w < num_states; ++w) s.likelihood[w][w] = 1.0;
  return s;
}

/// 0/1 likelihood revealing which cell of the partition contains the state.
/// Cells must cover every state exactly once.
inline Signal partition_signal(std::size_t num_states,
                               const std::vector<std::vector<std::size_t>>& cells) {
  std::vector<int> cell_of(num_states, -1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t w : cells[c]) {
      if (w >= num_states || cell_of[w] != -1) {
        throw std::invalid_argument("cells do not partition the state space");
      }
      cell_of[w] = static_cast<int>(c);
    }
  }
  for (int c : cell_of) {
    if (c == -1) throw std::invalid_argument("partition misses a state");
  }
  Signal s;
  s.labels = default_labels(cells.size());
  s.likelihood.assign(num_states, std::vector<double>(cells.size(), 0.0));
  for (std::size_t w = 0; w < num_states; ++w) {
    s.likelihood[w][static_cast<std::size_t>(cell_of[w])] = 1.0;
  }
  return s;
}

/// Uninformative signal: a single realization in every state.
inline Signal null_signal(std::size_t num_states) {
  Signal s;
  s.labels = {"i0"};
  s.likelihood.assign(num_states, std::vector<double>(1, 1.0));
  return s;
}

/// The same signal for every student.
inline SignalProfile common_profile(std::size_t num_students,
                                    const Signal& signal) {
  SignalProfile profile;
  profile.signals.assign(num_students, signal);
  return profile;
}

}  // namespace exante
