// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hmmrev/analysis.hpp"
#include "hmmrev/cli.hpp"
#include "hmmrev/oracle.hpp"
#include "support/fixtures.hpp"

using namespace hmmrev;
namespace ht = hmmrev::testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
  std::printf("%s AC%d %s: %s (%.3f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs `body`, which fills `detail` and returns pass/fail, and times it.
void criterion(int id, const std::string& title, double budget_seconds,
               const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  detail.precision(3);
  const auto start = Clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0 && seconds >= budget_seconds) {
    detail << "; over the " << budget_seconds << " s budget";
    ok = false;
  }
  report(id, title, ok, detail.str(), seconds);
}

std::string model_path(const std::string& name) { return std::string(HMMREV_MODELS_DIR) + "/" + name + ".json"; }

// The 100 random models shared by criteria 2 to 5: 50 continuous then 50
// discrete, K cycling through 2, 3, 4, every fifth one with complex spectrum.
std::vector<HmmModel> random_models() {
  ht::Rng rng(20240611);
  std::vector<HmmModel> models;
  for (int k = 0; k < 100; ++k) {
    const ChainKind kind = k < 50 ? ChainKind::Continuous : ChainKind::Discrete;
    models.push_back(ht::random_model(rng, kind, 2 + k % 3, k % 5 == 0));
  }
  return models;
}

std::vector<double> gaps(const HmmModel& m) {
  return m.kind() == ChainKind::Continuous ? std::vector<double>{0.1, 0.5, 1, 2, 5}
                                           : std::vector<double>{1, 2, 3, 4, 5, 6};
}

}  // namespace

int main() {
  const std::vector<HmmModel> models = random_models();

  criterion(1, "worked-example verdicts", 1.0, [](std::ostringstream& d) {
    const std::pair<const char*, const char*> cases[] = {
        {"example2_pi1", "irreversible"}, {"example2_pi2", "irreversible"}, {"example2_pi3", "irreversible"},
        {"example1_pi1", "reversible"},   {"example1_pi2", "reversible"},
    };
    bool ok = true;
    for (const auto& [name, expected] : cases) {
      std::ostringstream out, err;
      const int code = cli::run({"analyze", model_path(name)}, out, err);
      const bool hit = code == 0 && out.str().find(std::string("decision: ") + expected + "\n") != std::string::npos;
      ok = ok && hit;
      d << name << "=" << (hit ? expected : "MISMATCH") << " ";
    }
    return ok;
  });

  criterion(2, "closed-form flux vs direct likelihood", 30.0, [&](std::ostringstream& d) {
    double worst2 = 0.0, worst3 = 0.0;
    std::size_t evaluations = 0;
    for (const HmmModel& m : models) {
      const auto grid = gaps(m);
      for (std::size_t i = 0; i < m.symbols(); ++i)
        for (double r : grid) {
          for (std::size_t j = 0; j < m.symbols(); ++j, ++evaluations)
            worst2 = std::max(worst2, std::abs(flux2_closed_form(m, i, j, r) -
                                               likelihood_flux(m, {{0.0, r}, {i, j}}).flux));
          for (double t : grid) {
            worst3 = std::max(worst3, std::abs(flux3_closed_form(m, i, r, t) -
                                               likelihood_flux(m, {{0.0, r, r + t}, {i, i, i}}).flux));
            ++evaluations;
          }
        }
    }
    d << "max |flux2 diff| " << worst2 << ", max |flux3 diff| " << worst3 << " over " << evaluations
      << " queries, tol 1e-10";
    return worst2 <= 1e-10 && worst3 <= 1e-10;
  });

  criterion(3, "spectral transition matrix vs oracle", 0.0, [&](std::ostringstream& d) {
    std::vector<ChainModel> chains;
    for (const HmmModel& m : models) chains.push_back(m.chain);
    chains.push_back(build_chain(ChainKind::Continuous, ht::example_rate_matrix()));
    int complex_count = 0, confluent_count = 0;
    double worst = 0.0;
    for (const ChainModel& c : chains) {
      if (c.eigen().delta < 0 && !c.eigen().confluent) ++complex_count;
      if (c.eigen().confluent) ++confluent_count;
      const bool discrete = c.is_discrete();
      for (double t : discrete ? std::vector<double>{0, 1, 2, 3, 4, 5, 6, 10, 25}
                               : std::vector<double>{0, 0.1, 0.5, 1, 2, 5, 10}) {
        const Mat3 oracle = discrete ? matrix_power(c.input_matrix(), std::int64_t(t))
                                     : matrix_exponential(c.generator(), t);
        worst = std::max(worst, max_abs_diff(transition_matrix(c, t), oracle));
      }
    }
    d << chains.size() << " chains (" << complex_count << " with complex eigenvalues, " << confluent_count
      << " confluent), max entry diff " << worst << ", tol 1e-10";
    return worst <= 1e-10 && complex_count >= 5 && confluent_count >= 1;
  });

  criterion(4, "rank <= 2 emissions give zero 2-point flux", 0.0, [&](std::ostringstream& d) {
    ht::Rng rng(4);
    double worst = 0.0;
    int scanned = 0;
    auto scan = [&](const HmmModel& m) {
      const auto grid = gaps(m);
      worst = std::max(worst, exhaustive_flux_scan(m, 2, grid).max_abs_flux);
      ++scanned;
    };
    for (const Table& t : {ht::function_emission_a(), ht::function_emission_b(), ht::regular_rank2(),
                           ht::regular_clipped()})
      scan(ht::example_model(t));
    for (const HmmModel& m : models) {
      const std::size_t k = 2 + rng() % 4;
      const Table t = scanned % 3 == 0 ? ht::random_rank1_emission(rng, k)
                      : scanned % 3 == 1 ? ht::random_singular_emission(rng, k)
                                         : ht::random_rank2_emission(rng, k);
      const EmissionMatrix e = build_emission(t);
      if (e.rank() > 2) throw std::logic_error("generator produced a rank-3 table");
      scan(build_hmm(m.chain, e));
    }
    d << scanned << " models, max |2-point flux| " << worst << ", tol 1e-12";
    return worst <= 1e-12;
  });

  criterion(5, "skew identity U Q - Q'U = nu K", 0.0, [&](std::ostringstream& d) {
    ht::Rng rng(5);
    std::vector<ChainModel> chains;
    for (const HmmModel& m : models) chains.push_back(m.chain);
    for (int k = 0; k < 20; ++k) {
      const ChainKind kind = k % 2 ? ChainKind::Discrete : ChainKind::Continuous;
      chains.push_back(build_chain(kind, ht::random_reversible_matrix(rng, kind)));
    }
    chains.push_back(build_chain(ChainKind::Continuous, ht::example_rate_matrix()));
    chains.push_back(build_chain(ChainKind::Discrete, ht::zero_eigen_step_matrix()));
    double worst = 0.0;
    for (const ChainModel& c : chains) worst = std::max(worst, skew_identity_residual(c));
    d << chains.size() << " chains, max residual " << worst << ", tol 1e-12";
    return worst <= 1e-12;
  });

  criterion(6, "discrete zero-eigenvalue model", 0.0, [](std::ostringstream& d) {
    const ChainModel chain = build_chain(ChainKind::Discrete, ht::zero_eigen_step_matrix());
    const std::vector<double> grid{1, 2, 3};
    const HmmModel rank2 = build_hmm(chain, build_emission(ht::regular_clipped()));
    const HmmModel rank3 = build_hmm(chain, build_emission(ht::regular_full_rank()));
    const ReversibilityVerdict v = reversibility_verdict(rank2);
    const ScanResult flat = exhaustive_flux_scan(rank2, 6, grid);
    const ScanResult witness = exhaustive_flux_scan(rank3, 6, grid);
    d << "det P " << *v.det_p << ", nu " << chain.flux() << ", rank-2 scan max " << flat.max_abs_flux
      << " over " << flat.evaluations << " queries; rank-3 scan max " << witness.max_abs_flux;
    return std::abs(chain.flux()) > 1e-3 && v.regular && v.rank == 2 && flat.max_abs_flux <= 1e-12 &&
           witness.max_abs_flux > 1e-8 && v.decision == Decision::Reversible;
  });

  criterion(7, "directional moments miss what 3-point flux sees", 0.0, [](std::ostringstream& d) {
    const HmmModel m = ht::example_model(ht::regular_rank2());
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n)
      for (double t : {0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(directional_moments(m, n, t).difference()));
    double strongest = 0.0;
    d << "max moment difference " << worst << "; flux3(1,2) by symbol:";
    for (std::size_t i = 0; i < m.symbols(); ++i) {
      const double f = likelihood_flux(m, {{0.0, 1.0, 3.0}, {i, i, i}}).flux;
      d << " " << f;
      strongest = std::max(strongest, std::abs(f));
    }
    return worst <= 1e-12 && strongest > 1e-5;
  });

  criterion(8, "Monte Carlo concordance", 60.0, [](std::ostringstream& d) {
    const HmmModel m = ht::example_model(ht::regular_full_rank());
    const LikelihoodQuery presets[] = {
        {{0.0, 0.25}, {0, 0}}, {{0.0, 0.5}, {0, 2}}, {{0.0, 0.5}, {2, 0}}, {{0.0, 0.75}, {1, 2}},
        {{0.0, 1.0}, {0, 1}},  {{0.0, 1.0}, {2, 2}}, {{0.0, 1.5}, {1, 0}}, {{0.0, 2.0}, {0, 2}},
        {{0.0, 3.0}, {2, 1}},  {{0.0, 5.0}, {1, 1}},
    };
    double worst_z = 0.0;
    int inside = 0;
    std::uint64_t seed = 2718;
    for (const LikelihoodQuery& q : presets) {
      const McEstimate e = monte_carlo_joint(m, q, 1'000'000, seed++);
      const double z = (e.estimate - likelihood(m, q)) / e.standard_error;
      worst_z = std::max(worst_z, std::abs(z));
      if (std::abs(z) <= 3.0) ++inside;
    }
    d << inside << "/10 within 3 SE at 1e6 replicates, max |z| " << worst_z;
    return inside == 10;
  });

  criterion(9, "reversible chains give zero flux", 0.0, [](std::ostringstream& d) {
    ht::Rng rng(9);
    double worst = 0.0;
    std::uint64_t evaluations = 0;
    for (int k = 0; k < 20; ++k) {
      const ChainKind kind = k % 2 ? ChainKind::Discrete : ChainKind::Continuous;
      const HmmModel m = build_hmm(build_chain(kind, ht::random_reversible_matrix(rng, kind)),
                                   build_emission(ht::random_emission(rng, 2 + k % 3)));
      const std::vector<double> grid =
          kind == ChainKind::Discrete ? std::vector<double>{1, 2, 3} : std::vector<double>{0.5, 1, 2};
      const ScanResult r = exhaustive_flux_scan(m, 4, grid);
      worst = std::max(worst, r.max_abs_flux);
      evaluations += r.evaluations;
    }
    d << "20 chains, " << evaluations << " queries, max |flux| " << worst << ", tol 1e-12";
    return worst <= 1e-12;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
