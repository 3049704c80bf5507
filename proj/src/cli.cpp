#include "hmmrev/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "hmmrev/analysis.hpp"
#include "hmmrev/error.hpp"
#include "hmmrev/model_file.hpp"
#include "hmmrev/oracle.hpp"

namespace hmmrev::cli {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

namespace {

constexpr double kClosedFormTol = 1e-10;
constexpr double kReversibleFluxTol = 1e-12;

struct Loaded {
  ModelFile file;
  HmmModel model;
};

Loaded load(const std::string& path) {
  ModelFile file = load_model_file(path);
  HmmModel model = build_model(file);
  return {std::move(file), std::move(model)};
}

std::string kind_name(ChainKind k) { return k == ChainKind::Continuous ? "ctmc" : "dtmc"; }

std::string format_complex(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out;
  if (steps <= 1) return {lo};
  for (int k = 0; k < steps; ++k) out.push_back(lo + (hi - lo) * k / (steps - 1));
  return out;
}

// Discrete chains use every integer step inside [lo, hi].
std::vector<double> time_axis(const HmmModel& model, double lo, double hi, int steps) {
  if (!(lo >= 0.0) || !(hi >= lo)) throw Error(ErrorKind::InvalidQuery, "need 0 <= min <= max");
  if (!model.chain.is_discrete()) return linspace(lo, hi, steps);
  std::vector<double> out;
  for (double n = std::ceil(lo); n <= std::floor(hi); n += 1.0) out.push_back(n);
  return out;
}

void check_symbol(const HmmModel& model, std::size_t s, const char* flag) {
  if (s >= model.symbols()) {
    std::ostringstream os;
    os << flag << "=" << s << " out of range for " << model.symbols() << " symbols";
    throw Error(ErrorKind::SymbolOutOfRange, os.str());
  }
}

json verdict_json(const Loaded& l, const ReversibilityVerdict& v) {
  const ChainModel& chain = l.model.chain;
  const EigenData& e = chain.eigen();
  auto cx = [](std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
  const Vec3& mu = chain.stationary();
  json j{{"kind", kind_name(chain.kind())},
         {"decision", std::string(to_string(v.decision))},
         {"branch", std::string(to_string(v.branch))},
         {"nu", v.nu},
         {"kolmogorov_reversible", v.kolmogorov_reversible},
         {"mu", {mu[0], mu[1], mu[2]}},
         {"rank", v.rank},
         {"regular", v.regular},
         {"tolerance", chain.tol()},
         {"eigen",
          {{"alpha", e.alpha},
           {"beta", e.beta},
           {"delta", e.delta},
           {"confluent", e.confluent},
           {"lambda1", cx(e.lambda.first)},
           {"lambda2", cx(e.lambda.second)}}}};
  if (v.det_p) {
    j["det_p"] = *v.det_p;
    j["zero_eigenvalue"] = *v.zero_eigenvalue;
  }
  return j;
}

int cmd_analyze(const std::string& path, bool as_json, const std::string& dump_path, std::ostream& out) {
  const Loaded l = load(path);
  const ReversibilityVerdict v = reversibility_verdict(l.model);
  if (!dump_path.empty()) {
    std::ofstream f(dump_path, std::ios::binary);
    if (!f) throw ModelFileError(dump_path + ": cannot write file");
    f << dump_normalized(l.file);
  }
  if (as_json) {
    out << verdict_json(l, v).dump(2) << "\n";
    return kOk;
  }
  const ChainModel& chain = l.model.chain;
  const EigenData& e = chain.eigen();
  const Vec3& mu = chain.stationary();
  out << "model: " << path << "\n"
      << "kind: " << kind_name(chain.kind()) << "\n"
      << "decision: " << to_string(v.decision) << "\n"
      << "branch: " << to_string(v.branch) << "\n"
      << "nu: " << format_double(v.nu) << "\n"
      << "kolmogorov_reversible: " << (v.kolmogorov_reversible ? "true" : "false") << "\n"
      << "mu: " << format_double(mu[0]) << " " << format_double(mu[1]) << " " << format_double(mu[2]) << "\n"
      << "rank: " << v.rank << "\n"
      << "regular: " << (v.regular ? "true" : "false") << "\n"
      << "alpha: " << format_double(e.alpha) << "\n"
      << "beta: " << format_double(e.beta) << "\n"
      << "delta: " << format_double(e.delta) << (e.confluent ? " (confluent)" : "") << "\n"
      << "lambda1: " << format_complex(e.lambda.first) << "\n"
      << "lambda2: " << format_complex(e.lambda.second) << "\n";
  if (v.det_p)
    out << "det_p: " << format_double(*v.det_p) << (*v.zero_eigenvalue ? " (zero eigenvalue)" : "") << "\n";
  return kOk;
}

int cmd_flux(const std::string& path, std::size_t i, std::size_t j, double tmin, double tmax, int steps,
             std::ostream& out) {
  const Loaded l = load(path);
  check_symbol(l.model, i, "--i");
  check_symbol(l.model, j, "--j");
  out << "t,flux_closed_form,flux_direct,abs_diff\r\n";
  for (double t : time_axis(l.model, tmin, tmax, steps)) {
    const double closed = flux2_closed_form(l.model, i, j, t);
    const double direct = likelihood_flux(l.model, {{0.0, t}, {i, j}}).flux;
    out << format_double(t) << "," << format_double(closed) << "," << format_double(direct) << ","
        << format_double(std::abs(closed - direct)) << "\r\n";
  }
  return kOk;
}

int cmd_flux3(const std::string& path, std::size_t i, double rmin, double rmax, double tmin, double tmax,
              int steps, std::ostream& out) {
  const Loaded l = load(path);
  check_symbol(l.model, i, "--i");
  out << "r,t,flux_closed_form,flux_direct,abs_diff\r\n";
  for (double r : time_axis(l.model, rmin, rmax, steps))
    for (double t : time_axis(l.model, tmin, tmax, steps)) {
      const double closed = flux3_closed_form(l.model, i, r, t);
      const double direct = likelihood_flux(l.model, {{0.0, r, r + t}, {i, i, i}}).flux;
      out << format_double(r) << "," << format_double(t) << "," << format_double(closed) << ","
          << format_double(direct) << "," << format_double(std::abs(closed - direct)) << "\r\n";
    }
  return kOk;
}

std::string describe(const LikelihoodQuery& q) {
  std::ostringstream os;
  os << "times=(";
  for (std::size_t k = 0; k < q.times.size(); ++k) os << (k ? "," : "") << format_double(q.times[k]);
  os << ") symbols=(";
  for (std::size_t k = 0; k < q.symbols.size(); ++k) os << (k ? "," : "") << q.symbols[k];
  os << ")";
  return os.str();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_number_text(item);
    if (!v || !(*v >= 0.0)) throw Error(ErrorKind::InvalidQuery, "bad grid value \"" + item + "\"");
    grid.push_back(*v);
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidQuery, "empty grid");
  return grid;
}

int cmd_verify(const std::string& path, int max_len, const std::string& grid_text, std::uint64_t replicates,
               std::uint64_t seed, std::ostream& out) {
  const Loaded l = load(path);
  const HmmModel& m = l.model;
  const ChainModel& chain = m.chain;
  const std::vector<double> grid =
      parse_grid(grid_text.empty() ? (chain.is_discrete() ? "1,2,3" : "0.5,1,2") : grid_text);
  for (double g : grid)
    if (chain.is_discrete()) to_steps(g);

  bool ok = true;
  auto report = [&](bool pass, const std::string& name, const std::string& detail) {
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };

  const double skew = skew_identity_residual(chain);
  report(skew <= 1e-12, "skew-identity", "residual " + format_double(skew));

  double spectral = 0.0;
  for (double t : grid) {
    const Mat3 oracle = chain.is_discrete() ? matrix_power(chain.input_matrix(), to_steps(t))
                                            : matrix_exponential(chain.generator(), t);
    spectral = std::max(spectral, max_abs_diff(transition_matrix(chain, t), oracle));
  }
  report(spectral <= kClosedFormTol, "transition-matrix-vs-oracle", "max diff " + format_double(spectral));

  double diff2 = 0.0, diff3 = 0.0;
  for (std::size_t i = 0; i < m.symbols(); ++i) {
    for (std::size_t j = 0; j < m.symbols(); ++j)
      for (double t : grid)
        diff2 = std::max(diff2, std::abs(flux2_closed_form(m, i, j, t) -
                                         likelihood_flux(m, {{0.0, t}, {i, j}}).flux));
    for (double r : grid)
      for (double t : grid)
        diff3 = std::max(diff3, std::abs(flux3_closed_form(m, i, r, t) -
                                         likelihood_flux(m, {{0.0, r, r + t}, {i, i, i}}).flux));
  }
  report(diff2 <= kClosedFormTol, "flux2-closed-form-vs-direct", "max diff " + format_double(diff2));
  report(diff3 <= kClosedFormTol, "flux3-closed-form-vs-direct", "max diff " + format_double(diff3));

  const ReversibilityVerdict verdict = reversibility_verdict(m);
  const ScanResult scan = exhaustive_flux_scan(m, max_len, grid);
  std::string scan_detail = "max |flux| " + format_double(scan.max_abs_flux) + " over " +
                            std::to_string(scan.evaluations) + " queries";
  if (scan.witness) scan_detail += ", witness " + describe(*scan.witness);
  out << "INFO verdict: " << to_string(verdict.decision) << " (" << to_string(verdict.branch) << ")\n";
  if (verdict.decision == Decision::Reversible) {
    report(scan.max_abs_flux <= kReversibleFluxTol, "flux-scan", scan_detail);
  } else if (scan.max_abs_flux > kReversibleFluxTol) {
    report(true, "flux-scan", scan_detail);
  } else {
    out << "WARN flux-scan: no witness within scan bounds; " << scan_detail << "\n";
  }

  if (replicates == 0) {
    out << "SKIP monte-carlo: --mc-replicates 0\n";
  } else {
    const double t = grid.front();
    for (std::size_t i = 0; i < m.symbols(); ++i)
      for (std::size_t j = 0; j < m.symbols(); ++j) {
        const LikelihoodQuery q{{0.0, t}, {i, j}};
        const double exact = likelihood(m, q);
        const McEstimate est = monte_carlo_joint(m, q, replicates, seed);
        const double z = est.standard_error > 0 ? (est.estimate - exact) / est.standard_error : 0.0;
        out << "INFO monte-carlo " << describe(q) << ": estimate " << format_double(est.estimate) << " se "
            << format_double(est.standard_error) << " exact " << format_double(exact) << " z "
            << format_double(z) << (std::abs(z) <= 4.0 ? " (within 4 se)" : " (outside 4 se)") << "\n";
      }
  }

  out << (ok ? "RESULT PASS\n" : "RESULT FAIL\n");
  return ok ? kOk : kCheckFailed;
}

int cmd_moments(const std::string& path, int nmax, double t, std::ostream& out) {
  const Loaded l = load(path);
  out << "n,E[S0*St^n],E[S0^n*St],difference\r\n";
  for (int n = 1; n <= nmax; ++n) {
    const DirectionalMoments m = directional_moments(l.model, n, t);
    out << n << "," << format_double(m.forward) << "," << format_double(m.backward) << ","
        << format_double(m.difference()) << "\r\n";
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMatrix:
    case ErrorKind::NotIrreducible:
    case ErrorKind::InvalidEmission:
    case ErrorKind::SingularSystem:
    case ErrorKind::ImaginaryResidue: return kInvalidModel;
    case ErrorKind::SymbolOutOfRange:
    case ErrorKind::IndexOutOfRange: return kSymbolOutOfRange;
    case ErrorKind::ScanTooLarge: return kScanTooLarge;
    case ErrorKind::InvalidQuery:
    case ErrorKind::QueryTooLong: return kUsage;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-reversibility analysis of three-state hidden Markov models", "hmmrev"};
  app.require_subcommand(1);

  std::string model;
  bool as_json = false;
  std::string dump_path;
  auto* analyze = app.add_subcommand("analyze", "Decide whether the observed process is reversible");
  analyze->add_option("model", model, "Model file (JSON)")->required();
  analyze->add_flag("--json", as_json, "Machine-readable output");
  analyze->add_option("--dump-normalized", dump_path, "Write the parsed model back as canonical JSON");

  std::size_t sym_i = 0, sym_j = 0;
  double tmin = 0.1, tmax = 5.0, rmin = 0.1, rmax = 5.0;
  int steps = 50;
  auto* flux = app.add_subcommand("flux", "2-point flux curve: closed form against direct evaluation (CSV)");
  flux->add_option("model", model, "Model file (JSON)")->required();
  flux->add_option("--i", sym_i, "First symbol")->required();
  flux->add_option("--j", sym_j, "Second symbol")->required();
  flux->add_option("--tmin", tmin, "Smallest gap")->capture_default_str();
  flux->add_option("--tmax", tmax, "Largest gap")->capture_default_str();
  flux->add_option("--steps", steps, "Number of gaps (continuous time)")->capture_default_str()->check(CLI::PositiveNumber);

  int steps3 = 10;
  auto* flux3 = app.add_subcommand("flux3", "Repeated-symbol 3-point flux grid (CSV)");
  flux3->add_option("model", model, "Model file (JSON)")->required();
  flux3->add_option("--i", sym_i, "Symbol")->required();
  flux3->add_option("--rmin", rmin, "Smallest first gap")->capture_default_str();
  flux3->add_option("--rmax", rmax, "Largest first gap")->capture_default_str();
  flux3->add_option("--tmin", tmin, "Smallest second gap")->capture_default_str();
  flux3->add_option("--tmax", tmax, "Largest second gap")->capture_default_str();
  flux3->add_option("--steps", steps3, "Points per axis (continuous time)")->capture_default_str()->check(CLI::PositiveNumber);

  int max_len = 4;
  std::string grid;
  std::uint64_t replicates = 0, seed = 1;
  auto* verify = app.add_subcommand("verify", "Check every closed form against the independent oracles");
  verify->add_option("model", model, "Model file (JSON)")->required();
  verify->add_option("--max-len", max_len, "Longest scanned symbol string")->capture_default_str();
  verify->add_option("--grid", grid, "Comma-separated gaps (default 0.5,1,2 or 1,2,3)");
  verify->add_option("--mc-replicates", replicates, "Monte Carlo replicates per query (0 = skip)")->capture_default_str();
  verify->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();

  int nmax = 5;
  double moment_t = 1.0;
  auto* moments = app.add_subcommand("moments", "Directional moments E[S0 St^n] and E[S0^n St] (CSV)");
  moments->add_option("model", model, "Model file (JSON)")->required();
  moments->add_option("--nmax", nmax, "Largest moment order")->capture_default_str()->check(CLI::PositiveNumber);
  moments->add_option("--t", moment_t, "Gap between the two observations")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(model, as_json, dump_path, out);
    if (flux->parsed()) return cmd_flux(model, sym_i, sym_j, tmin, tmax, steps, out);
    if (flux3->parsed()) return cmd_flux3(model, sym_i, rmin, rmax, tmin, tmax, steps3, out);
    if (verify->parsed()) return cmd_verify(model, max_len, grid, replicates, seed, out);
    if (moments->parsed()) return cmd_moments(model, nmax, moment_t, out);
  } catch (const ModelFileError& e) {
    err << "error: " << e.what() << "\n";
    return kFileError;
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kUsage;
}

}  // namespace hmmrev::cli
