#pragma once

// Likelihoods of observation strings, their time-reversal flux, closed-form
// flux predictions, and the reversibility decision for the observed process.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "hmmrev/hmm.hpp"

namespace hmmrev {

/// Observation times (nondecreasing, nonnegative; integral for discrete
/// chains) with the symbol observed at each.
struct LikelihoodQuery {
  std::vector<double> times;
  std::vector<std::size_t> symbols;
};

/// Throws Error{InvalidQuery} or Error{SymbolOutOfRange}.
void validate_query(const HmmModel& model, const LikelihoodQuery& q);

/// Reflects the times (t_k -> t_1 + t_n - t_k), re-sorts them ascending and
/// reverses the symbols to match.
LikelihoodQuery reversed(const LikelihoodQuery& q);

struct FluxReport {
  double forward = 0.0;
  double backward = 0.0;
  double flux = 0.0;  ///< forward - backward
  /// Set for 2-point queries and for 3-point queries with a repeated symbol.
  std::optional<double> closed_form;
};

/// mu Lambda_{s1} P(t2 - t1) Lambda_{s2} ... P(tn - tn-1) Lambda_{sn} e.
double likelihood(const HmmModel& model, const LikelihoodQuery& q);

FluxReport likelihood_flux(const HmmModel& model, const LikelihoodQuery& q);

/// det[e, phi_i, phi_j].
double emission_area(const EmissionMatrix& emission, std::size_t i, std::size_t j);
/// (x - y)(y - z)(z - x) for phi_i = (x, y, z)'.
double emission_skew(const EmissionMatrix& emission, std::size_t i);

/// Pr{S_0 = i, S_t = j} - Pr{S_0 = j, S_t = i} from the eigenvalues.
double flux2_closed_form(const HmmModel& model, std::size_t i, std::size_t j, double t);

/// Pr{S_0 = S_r = S_{r+t} = i} - Pr{S_0 = S_t = S_{t+r} = i} from the eigenvalues.
double flux3_closed_form(const HmmModel& model, std::size_t i, double r, double t);

/// The skew matrix [0 1 -1; -1 0 1; 1 -1 0].
Mat3 cyclic_skew();

/// max |U Q - Q' U - nu K| with U = diag(mu) and K = cyclic_skew().
double skew_identity_residual(const ChainModel& chain);

struct DirectionalMoments {
  double forward = 0.0;   ///< E[S_0 * S_t^n]
  double backward = 0.0;  ///< E[S_0^n * S_t]
  double difference() const { return forward - backward; }
};

/// Symbols are read as the numbers 0..K-1.
DirectionalMoments directional_moments(const HmmModel& model, int n, double t);

enum class Decision { Reversible, Irreversible };

enum class VerdictBranch {
  ReversibleChain,          ///< nu = 0: the hidden chain is reversible
  SingularEmission,         ///< two hidden states emit identically
  RegularEmission,          ///< continuous, nu != 0, regular emission
  FullRankEmission,         ///< discrete, nu != 0, regular, rank 3
  RegularRank2NonzeroEigen, ///< discrete, nu != 0, regular, rank 2, det P != 0
  ZeroEigenvalue,           ///< discrete, nu != 0, regular, rank 2, det P == 0
};

std::string_view to_string(Decision d);
std::string_view to_string(VerdictBranch b);

struct ReversibilityVerdict {
  Decision decision = Decision::Reversible;
  VerdictBranch branch = VerdictBranch::ReversibleChain;
  double nu = 0.0;
  bool kolmogorov_reversible = true;
  int rank = 0;
  bool regular = false;
  /// Discrete chains only.
  std::optional<double> det_p;
  std::optional<bool> zero_eigenvalue;
};

ReversibilityVerdict reversibility_verdict(const HmmModel& model);

}  // namespace hmmrev
