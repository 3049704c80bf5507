#include "hmmrev/hmm.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "hmmrev/error.hpp"

namespace hmmrev {

namespace {

bool rows_equal(const Table& t, std::size_t a, std::size_t b, double tol) {
  for (std::size_t k = 0; k < t.cols(); ++k)
    if (std::abs(t(a, k) - t(b, k)) > tol) return false;
  return true;
}

void check_index(const EmissionMatrix& e, std::size_t k) {
  if (k >= e.symbols()) {
    std::ostringstream os;
    os << "column " << k << " out of range for " << e.symbols() << " symbols";
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
}

}  // namespace

Vec3 EmissionMatrix::column(std::size_t k) const {
  check_index(*this, k);
  return {{table_(0, k), table_(1, k), table_(2, k)}};
}

Mat3 EmissionMatrix::lambda_diag(std::size_t k) const { return Mat3::diag(column(k)); }

std::optional<std::size_t> EmissionMatrix::distinguished_column() const {
  for (std::size_t k = 0; k < symbols(); ++k) {
    const Vec3 c = column(k);
    if (std::abs(c[0] - c[1]) > tol_ || std::abs(c[1] - c[2]) > tol_) return k;
  }
  return std::nullopt;
}

std::vector<Rank2Coordinates> EmissionMatrix::rank2_decomposition() const {
  if (rank_ != 2) throw Error(ErrorKind::InvalidEmission, "decomposition needs a rank-2 table");
  const Vec3 basis = column(*distinguished_column());
  const double mean = basis.sum() / 3.0;
  // Project onto span{e, basis - mean e}, an orthogonal pair.
  const Vec3 centered = basis - mean * Vec3::ones();
  const double cc = dot(centered, centered);
  std::vector<Rank2Coordinates> coords;
  coords.reserve(symbols());
  for (std::size_t k = 0; k < symbols(); ++k) {
    const Vec3 phi = column(k);
    const double y = dot(centered, phi) / cc;
    coords.push_back({phi.sum() / 3.0 - y * mean, y});
  }
  return coords;
}

EmissionMatrix build_emission(const Table& table, double tol) {
  if (table.rows() != 3 || table.cols() < 1) {
    std::ostringstream os;
    os << "emission table must be 3 x K with K >= 1, got " << table.rows() << " x " << table.cols();
    throw Error(ErrorKind::InvalidEmission, os.str());
  }
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < table.cols(); ++k) {
      const double x = table(i, k);
      if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) {
        std::ostringstream os;
        os << "emission entry (" << i << "," << k << ") = " << x << " is not a probability";
        throw Error(ErrorKind::InvalidEmission, os.str());
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "emission row " << i << " sums to " << sum;
      throw Error(ErrorKind::InvalidEmission, os.str());
    }
  }

  EmissionMatrix e;
  e.table_ = table;
  e.tol_ = tol;
  e.rank_ = rank_with_tol(table, tol);
  e.regular_ = is_regular(e, tol);
  return e;
}

bool is_regular(const EmissionMatrix& e, double tol) {
  const Table& t = e.table();
  return !rows_equal(t, 0, 1, tol) && !rows_equal(t, 0, 2, tol) && !rows_equal(t, 1, 2, tol);
}

Vec3 column(const EmissionMatrix& e, std::size_t k) { return e.column(k); }
Mat3 lambda_diag(const EmissionMatrix& e, std::size_t k) { return e.lambda_diag(k); }

HmmModel build_hmm(ChainModel chain, EmissionMatrix emission) {
  if (emission.table().rows() != 3)
    throw Error(ErrorKind::InvalidEmission, "emission table needs one row per hidden state");
  return {std::move(chain), std::move(emission)};
}

}  // namespace hmmrev
