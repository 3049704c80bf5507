#pragma once

// Worked-example matrices and random model generators shared by the unit
// tests and the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "hmmrev/hmm.hpp"

namespace hmmrev::testing {

/// Irreversible rate matrix with a doubly repeated nonzero eigenvalue.
inline Mat3 example_rate_matrix() {
  return Mat3::from_rows({{-2.0 / 3, 1.0 / 3, 1.0 / 3}, {2.0 / 3, -1.0, 1.0 / 3}, {0.5, 0.5, -1.0}});
}

// Deterministic-function emissions: f = (1,1,0)' and f = (1,0,0)'.
inline Table function_emission_a() { return {{0, 1}, {0, 1}, {1, 0}}; }
inline Table function_emission_b() { return {{0, 1}, {1, 0}, {1, 0}}; }

// Regular emissions: full rank, rank 2, and the rank-2 clipping of the first.
inline Table regular_full_rank() { return {{1, 0, 0}, {0.25, 0.5, 0.25}, {0, 0, 1}}; }
inline Table regular_rank2() { return {{1, 0, 0}, {0.25, 0.5, 0.25}, {0.5, 1.0 / 3, 1.0 / 6}}; }
inline Table regular_clipped() { return {{1, 0}, {0.25, 0.75}, {0, 1}}; }

/// Stochastic matrix with det P = 0 (third row is the mean of the first two).
inline Mat3 zero_eigen_step_matrix() {
  return Mat3::from_rows({{0, 0.5, 0.5}, {0.5, 0.25, 0.25}, {0.25, 0.375, 0.375}});
}

inline HmmModel example_model(const Table& emission) {
  return build_hmm(build_chain(ChainKind::Continuous, example_rate_matrix()), build_emission(emission));
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Mat3 random_rate_matrix(Rng& rng) {
  Mat3 q;
  for (std::size_t i = 0; i < 3; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) out += (q(i, j) = uniform(rng, 0.05, 2.0));
    q(i, i) = -out;
  }
  return q;
}

/// Dominant 0 -> 1 -> 2 -> 0 circulation, which gives complex eigenvalues.
inline Mat3 random_cyclic_rate_matrix(Rng& rng) {
  Mat3 q;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t fwd = (i + 1) % 3, back = (i + 2) % 3;
    q(i, fwd) = uniform(rng, 1.5, 3.0);
    q(i, back) = uniform(rng, 0.01, 0.1);
    q(i, i) = -(q(i, fwd) + q(i, back));
  }
  return q;
}

inline Mat3 random_step_matrix(Rng& rng) {
  Mat3 p;
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += (p(i, j) = uniform(rng, 0.05, 1.0));
    for (std::size_t j = 0; j < 3; ++j) p(i, j) /= s;
  }
  return p;
}

inline Mat3 random_cyclic_step_matrix(Rng& rng) {
  Mat3 p;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t fwd = (i + 1) % 3, back = (i + 2) % 3;
    p(i, back) = uniform(rng, 0.01, 0.05);
    p(i, i) = uniform(rng, 0.01, 0.1);
    p(i, fwd) = 1.0 - p(i, back) - p(i, i);
  }
  return p;
}

/// Detailed balance by construction: Q_ij = S_ij / mu_i with S symmetric.
inline Mat3 random_reversible_matrix(Rng& rng, ChainKind kind) {
  Vec3 mu{{uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0)}};
  mu = (1.0 / mu.sum()) * mu;
  Mat3 s;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) s(i, j) = s(j, i) = uniform(rng, 0.05, 1.0);
  Mat3 q;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) q(i, j) = s(i, j) / mu[i];
  double scale = 1.0;
  if (kind == ChainKind::Discrete) {
    double widest = 0.0;
    for (std::size_t i = 0; i < 3; ++i) widest = std::max(widest, q.rows[i].sum());
    scale = 0.9 / widest;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) out += (q(i, j) *= scale);
    q(i, i) = (kind == ChainKind::Discrete ? 1.0 : 0.0) - out;
  }
  return q;
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t k) {
  std::vector<double> p(k);
  double s = 0.0;
  for (auto& x : p) s += (x = uniform(rng, 0.05, 1.0));
  for (auto& x : p) x /= s;
  return p;
}

/// Rows are independent random distributions (rank min(3, K), regular).
inline Table random_emission(Rng& rng, std::size_t k) {
  Table t(3, k);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = random_distribution(rng, k);
    for (std::size_t c = 0; c < k; ++c) t(i, c) = row[c];
  }
  return t;
}

/// Rows are distinct mixtures of two distributions: regular and rank 2.
inline Table random_rank2_emission(Rng& rng, std::size_t k) {
  const auto u = random_distribution(rng, k);
  const auto v = random_distribution(rng, k);
  const double w[3] = {uniform(rng, 0.0, 0.3), uniform(rng, 0.35, 0.65), uniform(rng, 0.7, 1.0)};
  Table t(3, k);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < k; ++c) t(i, c) = w[i] * u[c] + (1.0 - w[i]) * v[c];
  return t;
}

/// Rows `a` and `b` coincide.
inline Table random_singular_emission(Rng& rng, std::size_t k, std::size_t a = 0, std::size_t b = 1) {
  Table t = random_emission(rng, k);
  for (std::size_t c = 0; c < k; ++c) t(b, c) = t(a, c);
  return t;
}

inline Table random_rank1_emission(Rng& rng, std::size_t k) {
  const auto u = random_distribution(rng, k);
  Table t(3, k);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < k; ++c) t(i, c) = u[c];
  return t;
}

inline HmmModel random_model(Rng& rng, ChainKind kind, std::size_t k, bool cyclic = false) {
  const Mat3 m = kind == ChainKind::Continuous
                     ? (cyclic ? random_cyclic_rate_matrix(rng) : random_rate_matrix(rng))
                     : (cyclic ? random_cyclic_step_matrix(rng) : random_step_matrix(rng));
  return build_hmm(build_chain(kind, m), build_emission(random_emission(rng, k)));
}

}  // namespace hmmrev::testing
