#include "hmmrev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "hmmrev/error.hpp"

namespace hmmrev {

namespace {

double inf_norm(const Mat3& m) {
  double best = 0.0;
  for (const Vec3& r : m.rows) best = std::max(best, std::abs(r[0]) + std::abs(r[1]) + std::abs(r[2]));
  return best;
}

unsigned resolve_threads(unsigned requested, std::uint64_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work, 1)));
}

// Runs body(begin, end, block) over `threads` contiguous blocks of [0, n).
template <class Body>
void for_blocks(std::uint64_t n, unsigned threads, Body body) {
  if (threads <= 1) {
    body(std::uint64_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned b = 0; b < threads; ++b) {
    const std::uint64_t begin = n * b / threads, end = n * (b + 1) / threads;
    pool.emplace_back(body, begin, end, b);
  }
  for (auto& t : pool) t.join();
}

std::size_t sample_categorical(SplitMix64& rng, const Vec3& weights, std::size_t skip = 3) {
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j)
    if (j != skip) total += weights[j];
  double u = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == skip || weights[j] <= 0.0) continue;
    last = j;
    if (u < weights[j]) return j;
    u -= weights[j];
  }
  return last;
}

std::size_t sample_symbol(SplitMix64& rng, const Table& emission, std::size_t state) {
  double u = rng.uniform();
  std::size_t last = 0;
  for (std::size_t k = 0; k < emission.cols(); ++k) {
    const double w = emission(state, k);
    if (w <= 0.0) continue;
    last = k;
    if (u < w) return k;
    u -= w;
  }
  return last;
}

}  // namespace

Mat3 matrix_exponential(const Mat3& q, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidQuery, "time must be nonnegative");
  const Mat3 a = t * q;
  const double norm = inf_norm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat3 scaled = std::ldexp(1.0, -squarings) * a;

  Mat3 sum = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int k = 1; k < 60; ++k) {
    term = (1.0 / k) * (term * scaled);
    sum = sum + term;
    if (term.max_abs() < 1e-16) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Mat3 matrix_power(const Mat3& p, std::int64_t n) {
  if (n < 0) throw Error(ErrorKind::InvalidQuery, "matrix power needs a nonnegative exponent");
  Mat3 result = Mat3::identity();
  Mat3 base = p;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

double enumerate_likelihood_dtmc(const HmmModel& model, const LikelihoodQuery& q) {
  if (!model.chain.is_discrete())
    throw Error(ErrorKind::InvalidQuery, "path enumeration needs a discrete-time model");
  validate_query(model, q);
  const std::size_t len = q.times.size();
  if (len > kMaxEnumerationLength) {
    std::ostringstream os;
    os << "query length " << len << " exceeds " << kMaxEnumerationLength;
    throw Error(ErrorKind::QueryTooLong, os.str());
  }

  const Mat3 p = model.chain.input_matrix();
  std::vector<Mat3> steps(len);
  for (std::size_t k = 1; k < len; ++k) steps[k] = matrix_power(p, to_steps(q.times[k] - q.times[k - 1]));

  const Table& pi = model.emission.table();
  const Vec3& mu = model.chain.stationary();
  std::size_t paths = 1;
  for (std::size_t k = 0; k < len; ++k) paths *= 3;

  double total = 0.0;
  std::vector<std::size_t> path(len);
  for (std::size_t code = 0; code < paths; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < len; ++k) {
      path[k] = c % 3;
      c /= 3;
    }
    double prob = mu[path[0]] * pi(path[0], q.symbols[0]);
    for (std::size_t k = 1; k < len && prob != 0.0; ++k)
      prob *= steps[k](path[k - 1], path[k]) * pi(path[k], q.symbols[k]);
    total += prob;
  }
  return total;
}

SplitMix64::result_type SplitMix64::operator()() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 outer(seed);
  const std::uint64_t base = outer();
  SplitMix64 inner(base ^ (index * 0xD1B54A32D192ED03ULL));
  return inner();
}

int Trajectory::state_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto idx = it == jump_times.begin() ? 0 : (it - jump_times.begin()) - 1;
  return states[static_cast<std::size_t>(idx)];
}

namespace {

// Walks a continuous-time path forward, only as far as it is asked for.
class CtmcWalker {
 public:
  CtmcWalker(const ChainModel& chain, SplitMix64& rng) : chain_(chain), rng_(rng) {
    state_ = sample_categorical(rng_, chain.stationary());
    time_ = 0.0;
    next_ = hold();
  }

  std::size_t state() const { return state_; }
  double entered() const { return time_; }

  // Advances until the next jump would be after `t`; returns true on each jump.
  bool step_until(double t) {
    if (next_ > t) return false;
    state_ = sample_categorical(rng_, chain_.generator().row(state_), state_);
    time_ = next_;
    next_ = time_ + hold();
    return true;
  }

 private:
  double hold() {
    const double rate = -chain_.generator()(state_, state_);
    return -std::log1p(-rng_.uniform()) / rate;
  }

  const ChainModel& chain_;
  SplitMix64& rng_;
  std::size_t state_;
  double time_;
  double next_;
};

}  // namespace

Trajectory simulate_ctmc(const ChainModel& chain, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidQuery, "horizon must be positive");
  SplitMix64 rng(seed);
  CtmcWalker walker(chain, rng);
  Trajectory traj;
  traj.jump_times.push_back(0.0);
  traj.states.push_back(static_cast<int>(walker.state()));
  while (walker.step_until(horizon)) {
    traj.jump_times.push_back(walker.entered());
    traj.states.push_back(static_cast<int>(walker.state()));
  }
  return traj;
}

Trajectory simulate_dtmc(const ChainModel& chain, std::int64_t steps, std::uint64_t seed) {
  if (steps < 0) throw Error(ErrorKind::InvalidQuery, "step count must be nonnegative");
  SplitMix64 rng(seed);
  const Mat3 p = chain.input_matrix();
  Trajectory traj;
  std::size_t state = sample_categorical(rng, chain.stationary());
  for (std::int64_t n = 0; n <= steps; ++n) {
    if (n > 0) state = sample_categorical(rng, p.row(state));
    traj.jump_times.push_back(static_cast<double>(n));
    traj.states.push_back(static_cast<int>(state));
  }
  return traj;
}

namespace {

bool replicate_matches(const HmmModel& model, const LikelihoodQuery& q, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Table& pi = model.emission.table();
  const double origin = q.times.front();

  if (model.chain.is_discrete()) {
    const Mat3 p = model.chain.input_matrix();
    std::size_t state = sample_categorical(rng, model.chain.stationary());
    double now = origin;
    for (std::size_t k = 0; k < q.times.size(); ++k) {
      for (; now < q.times[k]; now += 1.0) state = sample_categorical(rng, p.row(state));
      if (sample_symbol(rng, pi, state) != q.symbols[k]) return false;
    }
    return true;
  }

  CtmcWalker walker(model.chain, rng);
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    while (walker.step_until(q.times[k] - origin)) {
    }
    if (sample_symbol(rng, pi, walker.state()) != q.symbols[k]) return false;
  }
  return true;
}

}  // namespace

McEstimate monte_carlo_joint(const HmmModel& model, const LikelihoodQuery& q,
                             std::uint64_t replicates, std::uint64_t seed, unsigned threads) {
  if (replicates < 1) throw Error(ErrorKind::InvalidQuery, "need at least one replicate");
  validate_query(model, q);

  const unsigned workers = resolve_threads(threads, replicates);
  std::vector<std::uint64_t> hits(workers, 0);
  for_blocks(replicates, workers, [&](std::uint64_t begin, std::uint64_t end, unsigned block) {
    std::uint64_t h = 0;
    for (std::uint64_t r = begin; r < end; ++r) h += replicate_matches(model, q, derive_seed(seed, r)) ? 1 : 0;
    hits[block] = h;
  });

  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double n = static_cast<double>(replicates);
  const double p = static_cast<double>(total) / n;

  McEstimate est;
  est.estimate = p;
  est.replicates = replicates;
  est.seed = seed;
  // Sample variance of 0/1 outcomes with the n - 1 denominator.
  est.standard_error = replicates > 1 ? std::sqrt(p * (1.0 - p) * n / (n - 1.0) / n) : 0.0;
  return est;
}

std::uint64_t scan_size(std::size_t symbols, int max_len, std::size_t grid_size) {
  std::uint64_t total = 0;
  for (int len = 2; len <= max_len; ++len) {
    long double count = 1.0L;
    for (int k = 0; k < len; ++k) count *= static_cast<long double>(symbols);
    for (int k = 0; k + 1 < len; ++k) count *= static_cast<long double>(grid_size);
    if (count + static_cast<long double>(total) > 1e18L) return ~std::uint64_t{0};
    total += static_cast<std::uint64_t>(count);
  }
  return total;
}

namespace {

struct ScanBest {
  double value = -1.0;
  std::uint64_t index = 0;

  void offer(double v, std::uint64_t i) {
    if (v > value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

struct ScanLayout {
  std::size_t symbols;
  std::size_t grid;
  std::vector<std::uint64_t> offsets;  // first flat index of each length
  std::vector<int> lengths;

  // Decodes a flat index into symbol digits and gap digits.
  int decode(std::uint64_t index, std::vector<std::size_t>& syms, std::vector<std::size_t>& gaps) const {
    std::size_t slot = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), index) - offsets.begin() - 1);
    const int len = lengths[slot];
    std::uint64_t local = index - offsets[slot];
    for (int k = 0; k < len; ++k) {
      syms[static_cast<std::size_t>(k)] = local % symbols;
      local /= symbols;
    }
    for (int k = 0; k + 1 < len; ++k) {
      gaps[static_cast<std::size_t>(k)] = local % grid;
      local /= grid;
    }
    return len;
  }
};

}  // namespace

ScanResult exhaustive_flux_scan(const HmmModel& model, int max_len, std::span<const double> grid,
                                unsigned threads) {
  if (max_len < 1) throw Error(ErrorKind::InvalidQuery, "scan length must be positive");
  if (grid.empty()) throw Error(ErrorKind::InvalidQuery, "scan needs at least one gap");
  if (max_len > kMaxScanLength) {
    std::ostringstream os;
    os << "scan length " << max_len << " exceeds " << kMaxScanLength;
    throw Error(ErrorKind::ScanTooLarge, os.str());
  }
  const std::size_t symbols = model.symbols();
  const std::uint64_t total = scan_size(symbols, max_len, grid.size());
  if (total > kMaxScanEvaluations) {
    std::ostringstream os;
    os << "scan would evaluate " << total << " queries (limit " << kMaxScanEvaluations << ")";
    throw Error(ErrorKind::ScanTooLarge, os.str());
  }

  std::vector<Mat3> steps;
  for (double g : grid) steps.push_back(transition_matrix(model.chain, g));
  std::vector<Mat3> emit;
  for (std::size_t k = 0; k < symbols; ++k) emit.push_back(model.emission.lambda_diag(k));

  ScanLayout layout{symbols, grid.size(), {}, {}};
  std::uint64_t offset = 0;
  for (int len = 2; len <= max_len; ++len) {
    layout.offsets.push_back(offset);
    layout.lengths.push_back(len);
    offset += scan_size(symbols, len, grid.size()) - scan_size(symbols, len - 1, grid.size());
  }

  ScanResult result;
  result.evaluations = total;
  if (total == 0) return result;

  const Vec3& mu = model.chain.stationary();
  const unsigned workers = resolve_threads(threads, total);
  std::vector<ScanBest> best(workers);
  for_blocks(total, workers, [&](std::uint64_t begin, std::uint64_t end, unsigned block) {
    std::vector<std::size_t> syms(static_cast<std::size_t>(max_len)), gaps(static_cast<std::size_t>(max_len));
    ScanBest local;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const auto len = static_cast<std::size_t>(layout.decode(idx, syms, gaps));
      Vec3 fwd = mu * emit[syms[0]];
      Vec3 bwd = mu * emit[syms[len - 1]];
      for (std::size_t k = 1; k < len; ++k) {
        fwd = (fwd * steps[gaps[k - 1]]) * emit[syms[k]];
        bwd = (bwd * steps[gaps[len - 1 - k]]) * emit[syms[len - 1 - k]];
      }
      local.offer(std::abs(fwd.sum() - bwd.sum()), idx);
    }
    best[block] = local;
  });

  ScanBest overall;
  for (const auto& b : best) overall.offer(b.value, b.index);
  result.max_abs_flux = overall.value;

  std::vector<std::size_t> syms(static_cast<std::size_t>(max_len)), gaps(static_cast<std::size_t>(max_len));
  const auto len = static_cast<std::size_t>(layout.decode(overall.index, syms, gaps));
  LikelihoodQuery w;
  w.times.push_back(0.0);
  for (std::size_t k = 0; k + 1 < len; ++k) w.times.push_back(w.times.back() + grid[gaps[k]]);
  w.symbols.assign(syms.begin(), syms.begin() + static_cast<std::ptrdiff_t>(len));
  result.witness = std::move(w);
  return result;
}

}  // namespace hmmrev
