#pragma once

// JSON model files:
//
//   {
//     "kind": "ctmc" | "dtmc",
//     "matrix": [[...], [...], [...]],      // rates or transition probabilities
//     "emission": [[...], [...], [...]],    // 3 x K, rows sum to 1
//     "tolerance": 1e-10                     // optional
//   }
//
// Entries are JSON numbers or strings holding a decimal ("0.25") or an exact
// fraction ("1/3").

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hmmrev/hmm.hpp"

namespace hmmrev {

/// Unreadable file, malformed JSON or schema violation. The message names the
/// line/column (syntax) or the JSON path (schema) at fault.
class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFile {
  ChainKind kind = ChainKind::Continuous;
  Mat3 matrix;
  Table emission;
  std::optional<double> tolerance;
};

/// Parses "p/q", a decimal string, or anything std::from_chars accepts.
std::optional<double> parse_number_text(std::string_view text);

ModelFile parse_model_file(std::string_view json_text);
ModelFile load_model_file(const std::string& path);

/// Canonical JSON with every entry written as a round-tripping number.
std::string dump_normalized(const ModelFile& file);

/// Tolerance in force: the file's override, else HMMREV_TOL, else kTol.
/// Throws ModelFileError when HMMREV_TOL is set but not a positive number.
double effective_tolerance(const ModelFile& file);

/// Throws hmmrev::Error for invalid chains or emissions.
HmmModel build_model(const ModelFile& file);

}  // namespace hmmrev
