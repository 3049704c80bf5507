#include "hmmrev/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "hmmrev/error.hpp"

namespace hmmrev {

void validate_query(const HmmModel& model, const LikelihoodQuery& q) {
  if (q.times.empty() || q.times.size() != q.symbols.size())
    throw Error(ErrorKind::InvalidQuery, "query needs equally many times and symbols (at least one)");
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    const double t = q.times[k];
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorKind::InvalidQuery, "times must be finite and nonnegative");
    if (k > 0 && t < q.times[k - 1]) throw Error(ErrorKind::InvalidQuery, "times must be nondecreasing");
    if (model.chain.is_discrete()) to_steps(t);
    if (q.symbols[k] >= model.symbols()) {
      std::ostringstream os;
      os << "symbol " << q.symbols[k] << " out of range for " << model.symbols() << " symbols";
      throw Error(ErrorKind::SymbolOutOfRange, os.str());
    }
  }
}

LikelihoodQuery reversed(const LikelihoodQuery& q) {
  const std::size_t n = q.times.size();
  LikelihoodQuery r;
  r.times.resize(n);
  r.symbols.resize(n);
  if (n == 0) return r;
  const double span = q.times.front() + q.times.back();
  for (std::size_t k = 0; k < n; ++k) {
    r.times[k] = span - q.times[n - 1 - k];
    r.symbols[k] = q.symbols[n - 1 - k];
  }
  return r;
}

namespace {

double likelihood_unchecked(const HmmModel& model, const LikelihoodQuery& q) {
  const EmissionMatrix& em = model.emission;
  Vec3 v = hadamard(model.chain.stationary(), em.column(q.symbols[0]));
  for (std::size_t k = 1; k < q.times.size(); ++k) {
    v = v * transition_matrix(model.chain, q.times[k] - q.times[k - 1]);
    v = hadamard(v, em.column(q.symbols[k]));
  }
  return v.sum();
}

}  // namespace

double likelihood(const HmmModel& model, const LikelihoodQuery& q) {
  validate_query(model, q);
  return likelihood_unchecked(model, q);
}

FluxReport likelihood_flux(const HmmModel& model, const LikelihoodQuery& q) {
  validate_query(model, q);
  FluxReport report;
  report.forward = likelihood_unchecked(model, q);
  // Reflection keeps the reversed query on the same integer grid and the same span.
  report.backward = likelihood_unchecked(model, reversed(q));
  report.flux = report.forward - report.backward;

  const auto& s = q.symbols;
  const auto& t = q.times;
  if (s.size() == 2) {
    report.closed_form = flux2_closed_form(model, s[0], s[1], t[1] - t[0]);
  } else if (s.size() == 3 && s[0] == s[1] && s[1] == s[2]) {
    report.closed_form = flux3_closed_form(model, s[0], t[1] - t[0], t[2] - t[1]);
  }
  return report;
}

double emission_area(const EmissionMatrix& emission, std::size_t i, std::size_t j) {
  return det_columns(Vec3::ones(), emission.column(i), emission.column(j));
}

double emission_skew(const EmissionMatrix& emission, std::size_t i) {
  const Vec3 c = emission.column(i);
  return (c[0] - c[1]) * (c[1] - c[2]) * (c[2] - c[0]);
}

namespace {

// e^{-lambda t} for continuous chains, (1 - lambda)^n for discrete ones.
std::complex<double> decay(const ChainModel& chain, std::complex<double> lambda, double t) {
  if (chain.is_discrete()) return spectral::ipow(1.0 - lambda, to_steps(t));
  return std::exp(-lambda * t);
}

void check_gap(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidQuery, "gaps must be finite and nonnegative");
}

}  // namespace

double flux2_closed_form(const HmmModel& model, std::size_t i, std::size_t j, double t) {
  check_gap(t);
  const ChainModel& chain = model.chain;
  const double scale = chain.flux() * emission_area(model.emission, i, j);
  const EigenData& e = chain.eigen();
  if (e.confluent) {
    const double lambda = e.lambda.first.real();
    if (chain.is_discrete()) {
      const std::int64_t n = to_steps(t);
      if (n == 0) return 0.0;
      return scale * static_cast<double>(n) * std::pow(1.0 - lambda, static_cast<double>(n - 1));
    }
    return scale * t * std::exp(-lambda * t);
  }
  const auto [l1, l2] = e.lambda;
  return checked_real(scale * (decay(chain, l2, t) - decay(chain, l1, t)) / (l1 - l2));
}

double flux3_closed_form(const HmmModel& model, std::size_t i, double r, double t) {
  check_gap(r);
  check_gap(t);
  const ChainModel& chain = model.chain;
  const double scale = chain.flux() * emission_skew(model.emission, i);
  const EigenData& e = chain.eigen();
  if (e.confluent) {
    const double lambda = e.lambda.first.real();
    if (chain.is_discrete()) {
      const std::int64_t n = to_steps(r), m = to_steps(t);
      if (n == m) return 0.0;
      return scale * static_cast<double>(n - m) *
             std::pow(1.0 - lambda, static_cast<double>(n + m - 1));
    }
    return scale * (r - t) * std::exp(-lambda * (r + t));
  }
  const auto [l1, l2] = e.lambda;
  const std::complex<double> ahead = decay(chain, l2, r) * decay(chain, l1, t);
  const std::complex<double> behind = decay(chain, l2, t) * decay(chain, l1, r);
  return checked_real(scale * (ahead - behind) / (l1 - l2));
}

Mat3 cyclic_skew() { return Mat3::from_rows({{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}}); }

double skew_identity_residual(const ChainModel& chain) {
  const Mat3 u = Mat3::diag(chain.stationary());
  const Mat3& q = chain.generator();
  return (u * q - q.transposed() * u - chain.flux() * cyclic_skew()).max_abs();
}

DirectionalMoments directional_moments(const HmmModel& model, int n, double t) {
  if (n < 1) throw Error(ErrorKind::InvalidQuery, "moment order must be positive");
  const Mat3 p = transition_matrix(model.chain, t);
  const Vec3& mu = model.chain.stationary();
  const std::size_t k_count = model.symbols();
  DirectionalMoments m;
  for (std::size_t i = 0; i < k_count; ++i) {
    const Vec3 left = hadamard(mu, model.emission.column(i)) * p;
    for (std::size_t j = 0; j < k_count; ++j) {
      const double joint = dot(left, model.emission.column(j));
      const double x = static_cast<double>(i), y = static_cast<double>(j);
      m.forward += x * std::pow(y, n) * joint;
      m.backward += std::pow(x, n) * y * joint;
    }
  }
  return m;
}

std::string_view to_string(Decision d) {
  return d == Decision::Reversible ? "reversible" : "irreversible";
}

std::string_view to_string(VerdictBranch b) {
  switch (b) {
    case VerdictBranch::ReversibleChain: return "reversible-chain";
    case VerdictBranch::SingularEmission: return "singular-emission";
    case VerdictBranch::RegularEmission: return "regular-emission";
    case VerdictBranch::FullRankEmission: return "full-rank-emission";
    case VerdictBranch::RegularRank2NonzeroEigen: return "regular-rank2-nonzero-eigenvalue";
    case VerdictBranch::ZeroEigenvalue: return "rank2-zero-eigenvalue";
  }
  return "unknown";
}

ReversibilityVerdict reversibility_verdict(const HmmModel& model) {
  const ChainModel& chain = model.chain;
  ReversibilityVerdict v;
  v.nu = chain.flux();
  v.kolmogorov_reversible = is_kolmogorov_reversible(chain);
  v.rank = model.emission.rank();
  v.regular = model.emission.regular();
  if (chain.is_discrete()) {
    v.det_p = det3(chain.input_matrix());
    v.zero_eigenvalue = std::abs(*v.det_p) <= chain.tol();
  }

  auto decide = [&](Decision d, VerdictBranch b) {
    v.decision = d;
    v.branch = b;
    return v;
  };

  if (chain.has_zero_flux()) return decide(Decision::Reversible, VerdictBranch::ReversibleChain);
  if (!v.regular) return decide(Decision::Reversible, VerdictBranch::SingularEmission);
  if (!chain.is_discrete()) return decide(Decision::Irreversible, VerdictBranch::RegularEmission);
  if (v.rank == 3) return decide(Decision::Irreversible, VerdictBranch::FullRankEmission);
  if (*v.zero_eigenvalue) return decide(Decision::Reversible, VerdictBranch::ZeroEigenvalue);
  return decide(Decision::Irreversible, VerdictBranch::RegularRank2NonzeroEigen);
}

}  // namespace hmmrev
