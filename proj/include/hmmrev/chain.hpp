#pragma once

// Three-state Markov chains in continuous or discrete time.
//
// A chain is stored through its generator Q (for a discrete chain Q = P - I).
// Writing -lambda1, -lambda2 for the nonzero eigenvalues of Q, every
// transition matrix is a combination of three fixed matrices,
//
//     P(t) = g_t L + d_t Q + f_t I,     L = e * mu,
//
// where the scalar weights (d, f, g) depend only on the eigenvalues and t
// (or the step count n). When the two eigenvalues coincide the weights are
// taken in their confluent limit.

#include <array>
#include <complex>
#include <cstdint>

#include "hmmrev/algebra.hpp"

namespace hmmrev {

enum class ChainKind { Continuous, Discrete };

struct EigenData {
  double alpha = 0.0;  ///< -trace(Q)
  double beta = 0.0;   ///< sum of the 2x2 principal minors of Q
  double delta = 0.0;  ///< alpha^2 - 4 beta
  /// lambda1, lambda2: Q's nonzero eigenvalues are -lambda1, -lambda2.
  /// lambda1 has the larger real part (ties: nonnegative imaginary part).
  ComplexPair lambda;
  /// |delta| <= tol * max(1, alpha^2); both lambdas are then alpha / 2.
  bool confluent = false;
};

struct SpectralCoefficients {
  double d = 0.0;  ///< weight of Q
  double f = 1.0;  ///< weight of I
  double g = 0.0;  ///< weight of L, always 1 - f
};

namespace spectral {

SpectralCoefficients continuous_distinct(std::complex<double> lambda1,
                                         std::complex<double> lambda2, double t);
SpectralCoefficients continuous_confluent(double lambda, double t);

SpectralCoefficients discrete_distinct(std::complex<double> lambda1,
                                       std::complex<double> lambda2, std::int64_t n);
/// lambda2 -> lambda1 limit of the discrete weights:
/// d_n = n rho^(n-1), f_n = rho^(n-1) (rho + n lambda), rho = 1 - lambda.
SpectralCoefficients discrete_confluent(double lambda, std::int64_t n);

/// Integer power of a complex base by repeated squaring.
std::complex<double> ipow(std::complex<double> base, std::int64_t n);

}  // namespace spectral

class ChainModel {
 public:
  ChainKind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == ChainKind::Discrete; }

  /// Q for continuous chains, P - I for discrete ones.
  const Mat3& generator() const { return generator_; }
  /// The matrix the chain was built from (Q or P).
  Mat3 input_matrix() const;
  /// Off-diagonal entry i -> j of Q; shared by both kinds.
  double rate(std::size_t from, std::size_t to) const { return generator_(from, to); }

  const Vec3& stationary() const { return stationary_; }
  /// L = e * mu: every row equals the stationary distribution.
  Mat3 stationary_matrix() const;

  /// nu = mu1 a2 - mu2 b1.
  double flux() const { return flux_; }
  /// The three stationary expressions of the flux:
  /// mu1 a2 - mu2 b1, mu2 b3 - mu3 c2, mu3 c1 - mu1 a3.
  std::array<double, 3> flux_expressions() const;

  const EigenData& eigen() const { return eigen_; }
  double tol() const { return tol_; }
  /// Largest off-diagonal entry of Q.
  double rate_scale() const;
  /// |nu| <= tol * rate_scale.
  bool has_zero_flux() const;

 private:
  friend ChainModel build_chain(ChainKind kind, const Mat3& matrix, double tol);

  ChainKind kind_ = ChainKind::Continuous;
  Mat3 generator_;
  Vec3 stationary_;
  double flux_ = 0.0;
  EigenData eigen_;
  double tol_ = kTol;
};

/// Validates `matrix` (a rate matrix for Continuous, a stochastic matrix for
/// Discrete) and derives stationary law, flux and eigen data.
/// Throws Error{InvalidMatrix} or Error{NotIrreducible}.
ChainModel build_chain(ChainKind kind, const Mat3& matrix, double tol = kTol);

const EigenData& eigen_data(const ChainModel& chain);

/// Converts a time to a step count for discrete chains; throws
/// Error{InvalidQuery} if `t` is negative or not integral.
std::int64_t to_steps(double t);

/// Weights (d, f, g) at time t (continuous) or step count t (discrete).
SpectralCoefficients spectral_coefficients(const ChainModel& chain, double t);

/// P(t) or P^n from the spectral weights.
Mat3 transition_matrix(const ChainModel& chain, double t);

/// Kolmogorov cycle criterion a2 b3 c1 == a3 c2 b1, relative to rate_scale^3.
bool is_kolmogorov_reversible(const ChainModel& chain);

}  // namespace hmmrev
