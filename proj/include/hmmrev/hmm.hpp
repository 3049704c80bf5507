#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hmmrev/algebra.hpp"
#include "hmmrev/chain.hpp"

namespace hmmrev {

/// Coordinates of an emission column in the basis {e, phi_d}, where phi_d is
/// the distinguished column of a rank-2 emission table.
struct Rank2Coordinates {
  double ones = 0.0;
  double column = 0.0;
};

/// State-dependent probability table pi(k | i): 3 rows (hidden states), K
/// columns (observation symbols).
class EmissionMatrix {
 public:
  const Table& table() const { return table_; }
  std::size_t symbols() const { return table_.cols(); }
  int rank() const { return rank_; }
  /// No two rows are equal (entrywise within tol).
  bool regular() const { return regular_; }
  double tol() const { return tol_; }

  /// phi_k, the k-th column. Throws Error{IndexOutOfRange}.
  Vec3 column(std::size_t k) const;
  /// diag(phi_k). Throws Error{IndexOutOfRange}.
  Mat3 lambda_diag(std::size_t k) const;

  /// First column that is not a multiple of e, if any.
  std::optional<std::size_t> distinguished_column() const;
  /// For a rank-2 table, writes every column as x e + y phi_d.
  /// Throws Error{InvalidEmission} when the rank is not 2.
  std::vector<Rank2Coordinates> rank2_decomposition() const;

 private:
  friend EmissionMatrix build_emission(const Table& table, double tol);

  Table table_;
  int rank_ = 0;
  bool regular_ = false;
  double tol_ = kTol;
};

/// Throws Error{InvalidEmission} for a wrong shape, a negative entry or a row
/// that does not sum to 1 within tol.
EmissionMatrix build_emission(const Table& table, double tol = kTol);

bool is_regular(const EmissionMatrix& e, double tol);
Vec3 column(const EmissionMatrix& e, std::size_t k);
Mat3 lambda_diag(const EmissionMatrix& e, std::size_t k);

/// Hidden Markov model started from the chain's stationary law.
struct HmmModel {
  ChainModel chain;
  EmissionMatrix emission;

  ChainKind kind() const { return chain.kind(); }
  std::size_t symbols() const { return emission.symbols(); }
};

HmmModel build_hmm(ChainModel chain, EmissionMatrix emission);

}  // namespace hmmrev
