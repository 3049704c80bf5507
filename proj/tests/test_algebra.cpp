#include <doctest.h>

#include <algorithm>
#include <random>

#include "hmmrev/algebra.hpp"
#include "hmmrev/error.hpp"
#include "support/fixtures.hpp"

using namespace hmmrev;
using hmmrev::testing::uniform;

namespace {

Mat3 random_unit_box(std::mt19937_64& rng) {
  Mat3 m;
  for (auto& r : m.rows)
    for (auto& x : r.c) x = uniform(rng, -1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("det3 on hand-expanded matrices") {
  CHECK(det3(Mat3::identity()) == 1.0);
  CHECK(det3(Mat3::from_rows({{1, 2, 3}, {1, 2, 3}, {4, 5, 7}})) == 0.0);
  // 1*(1/4 - 0) - 1*(1 - 1/4) + 0 = -1/2
  CHECK(det3(Mat3::from_rows({{1, 1, 0}, {1, 0.25, 0.25}, {1, 0, 1}})) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("det3 is multiplicative") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Mat3 a = random_unit_box(rng), b = random_unit_box(rng);
    const double expect = det3(a) * det3(b);
    CHECK(std::abs(det3(a * b) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("rank_with_tol") {
  CHECK(rank_with_tol(testing::regular_rank2(), 1e-10) == 2);
  CHECK(rank_with_tol(testing::regular_full_rank(), 1e-10) == 3);
  CHECK(rank_with_tol(Table{{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}}, 1e-10) == 1);
  CHECK(rank_with_tol(Table(3, 4, 0.0), 1e-10) == 0);
  CHECK(rank_with_tol(testing::regular_clipped(), 1e-10) == 2);
  CHECK(rank_with_tol(Table{{1}, {1}, {1}}, 1e-10) == 1);
}

TEST_CASE("rank is invariant under row permutation and scaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 4;
    Table t = trial % 3 == 0   ? testing::random_rank2_emission(rng, k)
              : trial % 3 == 1 ? testing::random_emission(rng, k)
                               : testing::random_rank1_emission(rng, k);
    const int base = rank_with_tol(t);

    std::array<std::size_t, 3> perm{0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    const double s = uniform(rng, 0.5, 20.0) * (trial % 2 ? -1.0 : 1.0);
    Table permuted(3, k), scaled(3, k);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t c = 0; c < k; ++c) {
        permuted(i, c) = t(perm[i], c);
        scaled(i, c) = s * t(i, c);
      }
    CHECK(rank_with_tol(permuted) == base);
    CHECK(rank_with_tol(scaled) == base);
  }
}

TEST_CASE("solve_linear_3") {
  const Vec3 b{{0.3, -2.0, 7.5}};
  CHECK(solve_linear_3(Mat3::identity(), b) == b);
  const Vec3 x = solve_linear_3(Mat3::diag({{2, 4, 8}}), {{2, 4, 8}});
  CHECK(max_abs_diff(x, Vec3::ones()) == 0.0);

  SUBCASE("singular systems are rejected") {
    CHECK_THROWS_AS(solve_linear_3(Mat3::from_rows({{1, 2, 3}, {2, 4, 6}, {0, 1, 1}}), b), Error);
    try {
      solve_linear_3(Mat3{}, b);
      FAIL("expected SingularSystem");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularSystem);
    }
  }

  SUBCASE("residual of random well-conditioned systems") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
      Mat3 a = random_unit_box(rng);
      for (std::size_t i = 0; i < 3; ++i) a(i, i) += 3.0;  // diagonally dominant
      Vec3 rhs{{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)}};
      const Vec3 sol = solve_linear_3(a, rhs);
      const double scale = std::max(a.max_abs(), rhs.max_abs());
      CHECK(max_abs_diff(a * sol, rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("checked_real rejects real-valued claims with a large imaginary part") {
  CHECK(checked_real({2.5, 1e-14}) == 2.5);
  CHECK_THROWS_AS(checked_real({2.5, 1e-3}), Error);
}
