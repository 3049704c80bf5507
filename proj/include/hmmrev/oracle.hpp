#pragma once

// Verification machinery that does not go through the spectral formulas:
// series matrix exponentials, repeated squaring, brute-force enumeration of
// hidden paths, trajectory simulation and Monte Carlo estimates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hmmrev/analysis.hpp"

namespace hmmrev {

/// e^{Q t} by scaling and squaring a truncated Taylor series.
Mat3 matrix_exponential(const Mat3& q, double t);

/// P^n by repeated squaring.
Mat3 matrix_power(const Mat3& p, std::int64_t n);

inline constexpr std::size_t kMaxEnumerationLength = 12;

/// Sum over all 3^L hidden paths of a discrete-time model; multi-step gaps are
/// marginalized exactly. Throws Error{QueryTooLong} beyond 12 observations.
double enumerate_likelihood_dtmc(const HmmModel& model, const LikelihoodQuery& q);

/// SplitMix64; small state so that every replicate can own a stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

/// Seed of replicate `index` under master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct Trajectory {
  /// Entry k is the time state k was entered; the first entry is 0.
  /// Discrete trajectories use the step number.
  std::vector<double> jump_times;
  std::vector<int> states;

  int state_at(double t) const;
};

/// Starts from the stationary law; holding times are exponential with rate
/// -Q_ii and jumps go to j != i with probability Q_ij / -Q_ii.
Trajectory simulate_ctmc(const ChainModel& chain, double horizon, std::uint64_t seed);

/// Stationary start, one entry per step 0..steps.
Trajectory simulate_dtmc(const ChainModel& chain, std::int64_t steps, std::uint64_t seed);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  ///< sample std / sqrt(replicates)
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
};

/// Fraction of simulated replicates whose emitted symbols match the query.
/// Replicate r draws from derive_seed(seed, r), so the estimate does not
/// depend on `threads` (0 = hardware concurrency).
McEstimate monte_carlo_joint(const HmmModel& model, const LikelihoodQuery& q,
                             std::uint64_t replicates, std::uint64_t seed, unsigned threads = 0);

inline constexpr std::uint64_t kMaxScanEvaluations = 10'000'000;
inline constexpr int kMaxScanLength = 6;

struct ScanResult {
  double max_abs_flux = 0.0;
  /// Query attaining the maximum (lowest scan index on ties).
  std::optional<LikelihoodQuery> witness;
  std::uint64_t evaluations = 0;
};

/// Number of queries visited: sum over L = 2..max_len of K^L |grid|^(L-1).
std::uint64_t scan_size(std::size_t symbols, int max_len, std::size_t grid_size);

/// Maximum |likelihood flux| over every symbol string of length <= max_len and
/// every tuple of gaps drawn from `grid`. Throws Error{ScanTooLarge} when
/// max_len > 6 or the scan exceeds 10^7 evaluations. The result is identical
/// for any thread count.
ScanResult exhaustive_flux_scan(const HmmModel& model, int max_len, std::span<const double> grid,
                                unsigned threads = 0);

}  // namespace hmmrev
