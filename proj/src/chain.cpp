#include "hmmrev/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmmrev/error.hpp"

namespace hmmrev {

namespace spectral {

std::complex<double> ipow(std::complex<double> base, std::int64_t n) {
  std::complex<double> result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

SpectralCoefficients continuous_distinct(std::complex<double> lambda1,
                                         std::complex<double> lambda2, double t) {
  const std::complex<double> e1 = std::exp(-lambda1 * t);
  const std::complex<double> e2 = std::exp(-lambda2 * t);
  const std::complex<double> gap = lambda1 - lambda2;
  SpectralCoefficients c;
  c.d = checked_real((e2 - e1) / gap);
  c.f = checked_real((lambda1 * e2 - lambda2 * e1) / gap);
  c.g = 1.0 - c.f;
  return c;
}

SpectralCoefficients continuous_confluent(double lambda, double t) {
  const double e = std::exp(-lambda * t);
  SpectralCoefficients c;
  c.d = t * e;
  c.f = (1.0 + lambda * t) * e;
  c.g = 1.0 - c.f;
  return c;
}

SpectralCoefficients discrete_distinct(std::complex<double> lambda1,
                                       std::complex<double> lambda2, std::int64_t n) {
  const std::complex<double> p1 = ipow(1.0 - lambda1, n);
  const std::complex<double> p2 = ipow(1.0 - lambda2, n);
  const std::complex<double> gap = lambda1 - lambda2;
  SpectralCoefficients c;
  c.d = checked_real((p2 - p1) / gap);
  c.f = checked_real((lambda1 * p2 - lambda2 * p1) / gap);
  c.g = 1.0 - c.f;
  return c;
}

SpectralCoefficients discrete_confluent(double lambda, std::int64_t n) {
  if (n == 0) return {};
  const double rho = 1.0 - lambda;
  const double base = std::pow(rho, static_cast<double>(n - 1));
  SpectralCoefficients c;
  c.d = static_cast<double>(n) * base;
  c.f = base * (rho + static_cast<double>(n) * lambda);
  c.g = 1.0 - c.f;
  return c;
}

}  // namespace spectral

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

EigenData compute_eigen(const Mat3& q, double tol) {
  EigenData e;
  e.alpha = -q.trace();
  e.beta = (q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0)) + (q(0, 0) * q(2, 2) - q(0, 2) * q(2, 0)) +
           (q(1, 1) * q(2, 2) - q(1, 2) * q(2, 1));
  e.delta = e.alpha * e.alpha - 4.0 * e.beta;
  e.confluent = std::abs(e.delta) <= tol * std::max(1.0, e.alpha * e.alpha);

  if (e.confluent) {
    e.lambda = {e.alpha / 2.0, e.alpha / 2.0};
  } else if (e.delta > 0.0) {
    const double l1 = 0.5 * (e.alpha + std::sqrt(e.delta));
    e.lambda = {l1, e.beta / l1};
  } else {
    const double im = 0.5 * std::sqrt(-e.delta);
    e.lambda = {{e.alpha / 2.0, im}, {e.alpha / 2.0, -im}};
  }
  return e;
}

}  // namespace

Mat3 ChainModel::input_matrix() const {
  return is_discrete() ? generator_ + Mat3::identity() : generator_;
}

Mat3 ChainModel::stationary_matrix() const { return Mat3{{stationary_, stationary_, stationary_}}; }

std::array<double, 3> ChainModel::flux_expressions() const {
  const Vec3& mu = stationary_;
  const Mat3& q = generator_;
  return {mu[0] * q(0, 1) - mu[1] * q(1, 0), mu[1] * q(1, 2) - mu[2] * q(2, 1),
          mu[2] * q(2, 0) - mu[0] * q(0, 2)};
}

double ChainModel::rate_scale() const {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) s = std::max(s, std::abs(generator_(i, j)));
  return s;
}

bool ChainModel::has_zero_flux() const { return std::abs(flux_) <= tol_ * rate_scale(); }

ChainModel build_chain(ChainKind kind, const Mat3& matrix, double tol) {
  for (const Vec3& r : matrix.rows)
    for (double x : r.c)
      if (!std::isfinite(x)) fail(ErrorKind::InvalidMatrix, "matrix has a non-finite entry");

  const bool discrete = kind == ChainKind::Discrete;
  const double scale = std::max(1.0, matrix.max_abs());
  for (std::size_t i = 0; i < 3; ++i) {
    const double target = discrete ? 1.0 : 0.0;
    if (std::abs(matrix.rows[i].sum() - target) > tol * scale) {
      std::ostringstream os;
      os << "row " << i << " sums to " << matrix.rows[i].sum() << ", expected " << target;
      fail(ErrorKind::InvalidMatrix, os.str());
    }
    for (std::size_t j = 0; j < 3; ++j) {
      const double x = matrix(i, j);
      const bool bad = discrete ? (x < -tol || x > 1.0 + tol) : (i != j && x < -tol * scale);
      if (bad) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << x
           << (discrete ? " is not a probability" : " is a negative rate");
        fail(ErrorKind::InvalidMatrix, os.str());
      }
    }
  }

  ChainModel chain;
  chain.kind_ = kind;
  chain.tol_ = tol;
  chain.generator_ = discrete ? matrix - Mat3::identity() : matrix;
  const Mat3& q = chain.generator_;

  // a1 b2 c3 > 0, b1 + c1 > 0, a2 + c2 > 0, a3 + b3 > 0.
  const double floor = tol * scale;
  const double out0 = q(0, 1) + q(0, 2), out1 = q(1, 0) + q(1, 2), out2 = q(2, 0) + q(2, 1);
  const double in0 = q(1, 0) + q(2, 0), in1 = q(0, 1) + q(2, 1), in2 = q(0, 2) + q(1, 2);
  if (!(out0 > floor && out1 > floor && out2 > floor && in0 > floor && in1 > floor && in2 > floor))
    fail(ErrorKind::NotIrreducible, "every state needs positive inflow and outflow");

  // mu Q = 0 with one balance equation replaced by sum(mu) = 1.
  Mat3 system = q.transposed();
  system.rows[2] = Vec3::ones();
  try {
    chain.stationary_ = solve_linear_3(system, Vec3::unit(2));
  } catch (const Error& e) {
    fail(ErrorKind::NotIrreducible, std::string("stationary system: ") + e.what());
  }
  for (double m : chain.stationary_.c)
    if (!(m > 0.0)) fail(ErrorKind::NotIrreducible, "stationary distribution is not positive");

  chain.flux_ = chain.stationary_[0] * q(0, 1) - chain.stationary_[1] * q(1, 0);
  chain.eigen_ = compute_eigen(q, tol);
  return chain;
}

const EigenData& eigen_data(const ChainModel& chain) { return chain.eigen(); }

std::int64_t to_steps(double t) {
  if (!(t >= 0.0) || std::floor(t) != t || t > 9.0e15) {
    std::ostringstream os;
    os << "step count must be a nonnegative integer, got " << t;
    throw Error(ErrorKind::InvalidQuery, os.str());
  }
  return static_cast<std::int64_t>(t);
}

SpectralCoefficients spectral_coefficients(const ChainModel& chain, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidQuery, "time must be nonnegative");
  const EigenData& e = chain.eigen();
  if (chain.is_discrete()) {
    const std::int64_t n = to_steps(t);
    return e.confluent ? spectral::discrete_confluent(e.lambda.first.real(), n)
                       : spectral::discrete_distinct(e.lambda.first, e.lambda.second, n);
  }
  if (t == 0.0) return {};
  return e.confluent ? spectral::continuous_confluent(e.lambda.first.real(), t)
                     : spectral::continuous_distinct(e.lambda.first, e.lambda.second, t);
}

Mat3 transition_matrix(const ChainModel& chain, double t) {
  const SpectralCoefficients c = spectral_coefficients(chain, t);
  return c.g * chain.stationary_matrix() + c.d * chain.generator() + c.f * Mat3::identity();
}

bool is_kolmogorov_reversible(const ChainModel& chain) {
  const Mat3& q = chain.generator();
  const double clockwise = q(0, 1) * q(1, 2) * q(2, 0);
  const double counter = q(0, 2) * q(2, 1) * q(1, 0);
  const double s = chain.rate_scale();
  return std::abs(clockwise - counter) <= chain.tol() * s * s * s;
}

}  // namespace hmmrev
