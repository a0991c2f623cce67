#include "doctest.h"
#include "support/generators.hpp"

using namespace pm;
using pm::testing::Rng;
using pm::testing::random_matrix;
using pm::testing::uniform;

namespace {

Matrix m2(std::vector<std::vector<std::int64_t>> rows, std::uint32_t p = 2) {
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  return Matrix::from_rows(p, cols, rows);
}

}  // namespace

TEST_CASE("rank of small matrices") {
  CHECK(rank(Matrix::identity(2, 2)) == 2);
  CHECK(rank(Matrix::zeros(2, 2, 2)) == 0);
  CHECK(rank(m2({{1, 1}, {1, 1}})) == 1);
  CHECK(rank(m2({{1, 1}, {1, 2}}, 3)) == 2);
  CHECK(rank(m2({{1, 2}, {2, 4}}, 5)) == 1);
}

TEST_CASE("kernel basis") {
  CHECK(kernel_basis(Matrix::identity(2, 3)).cols() == 0);
  CHECK(kernel_basis(Matrix::zeros(2, 2, 3)) == Matrix::identity(2, 3));
  auto k = kernel_basis(m2({{1, 1}}));
  REQUIRE(k.cols() == 1);
  CHECK(k == m2({{1}, {1}}));
}

TEST_CASE("solve") {
  auto b = m2({{1}, {0}});
  CHECK(*solve(Matrix::identity(2, 2), b) == b);
  CHECK_FALSE(solve(Matrix::zeros(2, 2, 2), b).has_value());
  auto x = solve(m2({{1, 1}, {0, 1}}), m2({{0}, {1}}));
  REQUIRE(x);
  CHECK(*x == m2({{1}, {1}}));
  CHECK_THROWS_AS(solve(Matrix::identity(2, 2), m2({{1}})), std::invalid_argument);
}

TEST_CASE("cokernel presentation") {
  auto zero = cokernel_presentation(Matrix::zeros(2, 3, 1));
  CHECK(zero.dim == 3);
  CHECK(zero.proj == Matrix::identity(2, 3));
  CHECK(cokernel_presentation(Matrix::identity(2, 2)).dim == 0);
  auto c = cokernel_presentation(m2({{1}, {1}}));
  CHECK(c.dim == 1);
  CHECK((c.proj * m2({{1}, {1}})).is_zero());
  CHECK(rank(c.proj) == 1);
}

TEST_CASE("induced map on quotients") {
  auto f = m2({{1, 0}, {1, 1}});
  CHECK(induced_map_on_quotients(Matrix::identity(2, 2), f, Matrix::identity(2, 2)) == f);
  auto z = Matrix::zeros(2, 2, 2);
  CHECK(induced_map_on_quotients(Matrix::identity(2, 2), z, Matrix::identity(2, 2)).is_zero());
  // Kernel of proj_a not carried into kernel of proj_b.
  auto pa = cokernel_presentation(m2({{1}, {0}})).proj;
  CHECK_THROWS_AS(induced_map_on_quotients(pa, Matrix::identity(2, 2), Matrix::identity(2, 2)), std::invalid_argument);
}

TEST_CASE("random matrices: rank-nullity, kernels, solving, quotients") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t p = std::vector<std::uint32_t>{2, 3, 5, 7}[trial % 4];
    const auto r = static_cast<std::size_t>(uniform(rng, 0, 5));
    const auto c = static_cast<std::size_t>(uniform(rng, 0, 5));
    auto m = random_matrix(rng, p, r, c);
    auto k = kernel_basis(m);
    CHECK(rank(m) + k.cols() == c);
    CHECK((m * k).is_zero());
    CHECK(rank(k) == k.cols());
    CHECK(image_basis(m).cols() == rank(m));
    CHECK(rank(m.transpose()) == rank(m));

    // A consistent right-hand side is always solvable.
    auto x0 = random_matrix(rng, p, c, 1);
    auto x = solve(m, m * x0);
    REQUIRE(x);
    CHECK(m * *x == m * x0);

    auto cok = cokernel_presentation(m);
    CHECK(cok.dim == r - rank(m));
    CHECK((cok.proj * m).is_zero());
    CHECK(rank(cok.proj) == cok.dim);

    // q proj_a = proj_b f whenever f maps im(a) into im(b): take b = f a.
    auto f = random_matrix(rng, p, static_cast<std::size_t>(uniform(rng, 0, 4)), r);
    auto pa = cok.proj;
    auto pb = cokernel_presentation(f * m).proj;
    auto q = induced_map_on_quotients(pa, f, pb);
    CHECK(q * pa == pb * f);

    if (r == c) {
      auto inv = inverse(m);
      CHECK(inv.has_value() == (rank(m) == r));
      if (inv) CHECK(m * *inv == Matrix::identity(p, r));
    }
  }
}

TEST_CASE("prime helpers") {
  CHECK(is_prime(2));
  CHECK(is_prime(7));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(9));
  for (Residue a = 1; a < 11; ++a) CHECK((a * inverse_mod(a, 11)) % 11 == 1);
}
