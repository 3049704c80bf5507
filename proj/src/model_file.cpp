#include "hmmrev/model_file.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hmmrev {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw ModelFileError(path + ": " + msg);
}

template <class T>
std::optional<T> parse_exact(std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double read_entry(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto v = parse_number_text(j.get<std::string>())) return *v;
    schema_error(path, "cannot read \"" + j.get<std::string>() + "\" as a number or p/q fraction");
  }
  schema_error(path, std::string("expected a number or string, got ") + j.type_name());
}

std::vector<std::vector<double>> read_rows(const json& doc, const char* field) {
  if (!doc.contains(field)) schema_error(field, "missing field");
  const json& rows = doc.at(field);
  if (!rows.is_array()) schema_error(field, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rpath = std::string(field) + "[" + std::to_string(i) + "]";
    if (!rows[i].is_array()) schema_error(rpath, "expected an array");
    std::vector<double> row;
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      row.push_back(read_entry(rows[i][k], rpath + "[" + std::to_string(k) + "]"));
    out.push_back(std::move(row));
  }
  return out;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::optional<double> parse_number_text(std::string_view text) {
  text = trim(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_exact<long long>(trim(text.substr(0, slash)));
    auto den = parse_exact<long long>(trim(text.substr(slash + 1)));
    if (!num || !den || *den == 0) return std::nullopt;
    return static_cast<double>(*num) / static_cast<double>(*den);
  }
  return parse_exact<double>(text);
}

ModelFile parse_model_file(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelFileError("malformed JSON at " + line_column(json_text, e.byte == 0 ? 0 : e.byte - 1) +
                         ": " + e.what());
  }
  if (!doc.is_object()) schema_error("$", "model file must be a JSON object");

  ModelFile file;
  if (!doc.contains("kind") || !doc["kind"].is_string()) schema_error("kind", "expected \"ctmc\" or \"dtmc\"");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "ctmc") {
    file.kind = ChainKind::Continuous;
  } else if (kind == "dtmc") {
    file.kind = ChainKind::Discrete;
  } else {
    schema_error("kind", "expected \"ctmc\" or \"dtmc\", got \"" + kind + "\"");
  }

  const auto matrix = read_rows(doc, "matrix");
  if (matrix.size() != 3) schema_error("matrix", "expected 3 rows");
  for (std::size_t i = 0; i < 3; ++i) {
    if (matrix[i].size() != 3) schema_error("matrix[" + std::to_string(i) + "]", "expected 3 entries");
    for (std::size_t j = 0; j < 3; ++j) file.matrix(i, j) = matrix[i][j];
  }

  const auto emission = read_rows(doc, "emission");
  if (emission.size() != 3) schema_error("emission", "expected 3 rows");
  const std::size_t k = emission[0].size();
  if (k == 0) schema_error("emission[0]", "expected at least one symbol");
  file.emission = Table(3, k);
  for (std::size_t i = 0; i < 3; ++i) {
    if (emission[i].size() != k)
      schema_error("emission[" + std::to_string(i) + "]", "expected " + std::to_string(k) + " entries");
    for (std::size_t j = 0; j < k; ++j) file.emission(i, j) = emission[i][j];
  }

  if (doc.contains("tolerance")) {
    const double tol = read_entry(doc["tolerance"], "tolerance");
    if (!(tol > 0.0)) schema_error("tolerance", "must be positive");
    file.tolerance = tol;
  }

  for (const auto& [key, value] : doc.items())
    if (key != "kind" && key != "matrix" && key != "emission" && key != "tolerance")
      schema_error(key, "unknown field");
  return file;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model_file(buf.str());
  } catch (const ModelFileError& e) {
    throw ModelFileError(path + ": " + e.what());
  }
}

std::string dump_normalized(const ModelFile& file) {
  json doc;
  doc["kind"] = file.kind == ChainKind::Continuous ? "ctmc" : "dtmc";
  json matrix = json::array();
  for (std::size_t i = 0; i < 3; ++i) matrix.push_back({file.matrix(i, 0), file.matrix(i, 1), file.matrix(i, 2)});
  doc["matrix"] = matrix;
  json emission = json::array();
  for (std::size_t i = 0; i < file.emission.rows(); ++i) emission.push_back(file.emission.row(i));
  doc["emission"] = emission;
  if (file.tolerance) doc["tolerance"] = *file.tolerance;
  return doc.dump(2) + "\n";
}

double effective_tolerance(const ModelFile& file) {
  if (file.tolerance) return *file.tolerance;
  if (const char* env = std::getenv("HMMREV_TOL")) {
    const auto v = parse_number_text(env);
    if (!v || !(*v > 0.0)) throw ModelFileError(std::string("HMMREV_TOL: not a positive number: ") + env);
    return *v;
  }
  return kTol;
}

HmmModel build_model(const ModelFile& file) {
  const double tol = effective_tolerance(file);
  return build_hmm(build_chain(file.kind, file.matrix, tol), build_emission(file.emission, tol));
}

}  // namespace hmmrev
