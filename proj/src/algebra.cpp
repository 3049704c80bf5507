#include "hmmrev/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "hmmrev/error.hpp"

namespace hmmrev {

double Vec3::max_abs() const {
  return std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
}

Mat3 Mat3::identity() { return diag(Vec3::ones()); }

Mat3 Mat3::diag(const Vec3& d) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = d[i];
  return m;
}

Mat3 Mat3::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Mat3 m;
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (i >= 3 || r.size() != 3) throw Error(ErrorKind::InvalidMatrix, "Mat3 needs 3x3 entries");
    std::copy(r.begin(), r.end(), m.rows[i].c.begin());
    ++i;
  }
  if (i != 3) throw Error(ErrorKind::InvalidMatrix, "Mat3 needs 3x3 entries");
  return m;
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat3::max_abs() const {
  return std::max({rows[0].max_abs(), rows[1].max_abs(), rows[2].max_abs()});
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}}; }
Vec3 operator*(double s, const Vec3& a) { return {{s * a[0], s * a[1], s * a[2]}}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 hadamard(const Vec3& a, const Vec3& b) { return {{a[0] * b[0], a[1] * b[1], a[2] * b[2]}}; }

Mat3 operator+(const Mat3& a, const Mat3& b) {
  return {{a.rows[0] + b.rows[0], a.rows[1] + b.rows[1], a.rows[2] + b.rows[2]}};
}
Mat3 operator-(const Mat3& a, const Mat3& b) {
  return {{a.rows[0] - b.rows[0], a.rows[1] - b.rows[1], a.rows[2] - b.rows[2]}};
}
Mat3 operator*(double s, const Mat3& a) { return {{s * a.rows[0], s * a.rows[1], s * a.rows[2]}}; }

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

Vec3 operator*(const Vec3& v, const Mat3& m) {
  Vec3 r;
  for (std::size_t j = 0; j < 3; ++j) r[j] = v[0] * m(0, j) + v[1] * m(1, j) + v[2] * m(2, j);
  return r;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {{dot(m.rows[0], v), dot(m.rows[1], v), dot(m.rows[2], v)}};
}

double max_abs_diff(const Mat3& a, const Mat3& b) { return (a - b).max_abs(); }
double max_abs_diff(const Vec3& a, const Vec3& b) { return (a - b).max_abs(); }

Table::Table(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Table::Table(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorKind::InvalidMatrix, "ragged table rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Table::Table(const Mat3& m) : Table(3, 3) {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) (*this)(i, j) = m(i, j);
}

std::vector<double> Table::row(std::size_t i) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

double Table::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double det3(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double det_columns(const Vec3& a, const Vec3& b, const Vec3& c) {
  return det3(Mat3{{a, b, c}}.transposed());
}

int rank_with_tol(const Table& m, double tol) {
  Table work = m;
  const std::size_t rows = work.rows();
  const std::size_t cols = work.cols();
  const double threshold = tol * std::max(1.0, m.max_abs());

  std::vector<std::size_t> col_order(cols);
  std::iota(col_order.begin(), col_order.end(), std::size_t{0});

  int rank = 0;
  for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
    std::size_t pr = step, pc = step;
    double best = -1.0;
    for (std::size_t i = step; i < rows; ++i)
      for (std::size_t j = step; j < cols; ++j)
        if (std::abs(work(i, col_order[j])) > best) {
          best = std::abs(work(i, col_order[j]));
          pr = i;
          pc = j;
        }
    if (best <= threshold) break;

    for (std::size_t j = 0; j < cols; ++j) std::swap(work(step, j), work(pr, j));
    std::swap(col_order[step], col_order[pc]);

    const double pivot = work(step, col_order[step]);
    for (std::size_t i = step + 1; i < rows; ++i) {
      const double factor = work(i, col_order[step]) / pivot;
      for (std::size_t j = step; j < cols; ++j)
        work(i, col_order[j]) -= factor * work(step, col_order[j]);
    }
    ++rank;
  }
  return rank;
}

int rank_with_tol(const Mat3& m, double tol) { return rank_with_tol(Table(m), tol); }

Vec3 solve_linear_3(const Mat3& a, const Vec3& b) {
  const double scale = std::max(a.max_abs(), b.max_abs());
  const double threshold = 1e-12 * scale;

  Mat3 m = a;
  Vec3 rhs = b;
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < 3; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (!(std::abs(m(p, k)) >= threshold) || scale == 0.0) {
      std::ostringstream os;
      os << "pivot " << m(p, k) << " below threshold " << threshold;
      throw Error(ErrorKind::SingularSystem, os.str());
    }
    std::swap(m.rows[k], m.rows[p]);
    std::swap(rhs[k], rhs[p]);
    for (std::size_t i = k + 1; i < 3; ++i) {
      const double f = m(i, k) / m(k, k);
      m.rows[i] = m.rows[i] - f * m.rows[k];
      rhs[i] -= f * rhs[k];
    }
  }

  Vec3 x;
  for (std::size_t k = 3; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < 3; ++j) s -= m(k, j) * x[j];
    x[k] = s / m(k, k);
  }
  return x;
}

double checked_real(std::complex<double> z, double residue) {
  if (std::abs(z.imag()) > residue * std::max(1.0, std::abs(z))) {
    std::ostringstream os;
    os << "imaginary residue " << z.imag() << " exceeds " << residue;
    throw Error(ErrorKind::ImaginaryResidue, os.str());
  }
  return z.real();
}

}  // namespace hmmrev
