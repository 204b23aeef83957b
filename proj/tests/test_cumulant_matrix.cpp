#include <doctest.h>

#include "cmcausal/cumulant_matrix.hpp"
#include "cmcausal/model.hpp"
#include "support/random_tables.hpp"

using namespace cmcausal;

namespace {

CumulantTable<double> symbolic_table(int order) {
  CumulantTable<double> t(order);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) t(a, b) = 100.0 * a + b;  // encodes (a, b)
  return t;
}

ModelSpec no_confounder_model() {
  return ModelSpec::from_path_coefficients(Direction::x_to_y, 2.0, {}, {},
                                           NoiseSpec::from_cumulants({0, 1, 1}),
                                           NoiseSpec::from_cumulants({0, 1, 1}), {});
}

CumulantMatrix<double> from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  CumulantMatrix<double> m;
  m.k = static_cast<int>(rows.size());
  m.entries.resize(m.k, m.k);
  int r = 0;
  for (auto row : rows) {
    int c = 0;
    for (double v : row) m.entries(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST_CASE("layout of the k = 2 and k = 3 matrices") {
  auto t = symbolic_table(5);
  auto m2 = build_cumulant_matrix(t, 2, Orientation::xy);
  CHECK(m2.entries(0, 0) == 300);
  CHECK(m2.entries(0, 1) == 201);
  CHECK(m2.entries(1, 0) == 201);
  CHECK(m2.entries(1, 1) == 102);
  auto m3 = build_cumulant_matrix(t, 3, Orientation::xy);
  CHECK(m3.entries(0, 0) == 500);
  CHECK(m3.entries(2, 2) == 104);
  CHECK(m3.source_order() == 5);
}

TEST_CASE("Hankel structure, symmetry and total order") {
  auto t = symbolic_table(11);
  for (int k = 1; k <= 6; ++k)
    for (auto o : {Orientation::xy, Orientation::yx}) {
      auto m = build_cumulant_matrix(t, k, o);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          CHECK(m.entries(i, j) == m.entries(j, i));
          if (i + 1 < k && j > 0) CHECK(m.entries(i, j) == m.entries(i + 1, j - 1));
          int code = static_cast<int>(m.entries(i, j));
          CHECK(code / 100 + code % 100 == 2 * k - 1);
        }
    }
}

TEST_CASE("orientation duality is exact") {
  auto s = cmcausal::testing::random_sample(3000, 12);
  auto t = estimate_cumulants(s, 9);
  for (int k = 2; k <= 5; ++k) {
    auto a = build_cumulant_matrix(t, k, Orientation::yx);
    auto b = build_cumulant_matrix(t.swapped(), k, Orientation::xy);
    CHECK((a.entries.array() == b.entries.array()).all());
    auto twice = build_cumulant_matrix(t.swapped().swapped(), k, Orientation::xy);
    CHECK(matrix_abs_determinant(twice) == matrix_abs_determinant(build_cumulant_matrix(t, k, Orientation::xy)));
    CumulantMatrix<double> tr = a;
    tr.entries.transposeInPlace();
    CHECK(matrix_abs_determinant(tr) == doctest::Approx(matrix_abs_determinant(a)).epsilon(1e-12));
  }
}

TEST_CASE("insufficient table order is rejected") {
  CHECK_THROWS_AS(build_cumulant_matrix(symbolic_table(4), 3, Orientation::xy), ConfigError);
}

TEST_CASE("no-confounder model, gamma = 2, unit third cumulants") {
  auto pop = population_cumulants(no_confounder_model(), 3);
  auto xy = build_cumulant_matrix(pop, 2, Orientation::xy);
  auto yx = build_cumulant_matrix(pop, 2, Orientation::yx);
  Eigen::Matrix2d exy, eyx;
  exy << 1, 2, 2, 4;
  eyx << 9, 4, 4, 2;
  CHECK((xy.entries - exy).norm() < 1e-14);
  CHECK((yx.entries - eyx).norm() < 1e-14);
}

TEST_CASE("rank examples") {
  auto r = matrix_rank(from_rows({{1, 2}, {2, 4}}), 0.05);
  CHECK(r.rank == 1);
  CHECK(r.deficient);
  auto id = matrix_rank(from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 0.05);
  CHECK(id.rank == 3);
  CHECK_FALSE(id.deficient);
  auto z = matrix_rank(from_rows({{0, 0}, {0, 0}}), 0.05);
  CHECK(z.rank == 0);
  CHECK_THROWS_AS(matrix_rank(from_rows({{1}}), 0.0), ConfigError);
  CHECK_THROWS_AS(matrix_rank(from_rows({{1}}), 1.0), ConfigError);
  for (Eigen::Index i = 1; i < r.singular_values.size(); ++i)
    CHECK(r.singular_values(i) <= r.singular_values(i - 1));
}

TEST_CASE("rank is monotone in the tolerance") {
  auto s = cmcausal::testing::random_sample(4000, 21);
  auto t = estimate_cumulants(s, 9);
  for (int k = 2; k <= 5; ++k) {
    auto m = build_cumulant_matrix(t, k, Orientation::xy);
    int prev = k + 1;
    for (double tol : {1e-12, 1e-8, 1e-4, 1e-2, 0.05, 0.2, 0.5, 0.9}) {
      int r = matrix_rank(m, tol).rank;
      CHECK(r <= prev);
      CHECK(r >= 0);
      CHECK(r <= k);
      prev = r;
    }
  }
}

TEST_CASE("determinant examples") {
  CHECK(matrix_abs_determinant(from_rows({{1, 2}, {2, 4}})) == doctest::Approx(0.0));
  CHECK(matrix_abs_determinant(from_rows({{9, 4}, {4, 2}})) == doctest::Approx(2.0));
  for (int k = 1; k <= 6; ++k) {
    CumulantMatrix<double> id;
    id.k = k;
    id.entries = Eigen::MatrixXd::Identity(k, k);
    CHECK(matrix_abs_determinant(id) == doctest::Approx(1.0));
  }
  CHECK(matrix_abs_determinant(from_rows({{0, 1}, {1, 0}})) == doctest::Approx(1.0));
}

TEST_CASE("one-latent factorization of the k = 3 matrices") {
  const double a1 = 0.9, b1 = -1.1, g = 0.7;
  const double k5l = 1.3, k5x = -0.8, k5y = 1.7;
  auto cum = [](double k5) { return NoiseSpec::from_cumulants({0, 1, 0.5, 0.5, k5}); };
  auto model = ModelSpec::from_path_coefficients(Direction::x_to_y, g, {a1}, {b1}, cum(k5x), cum(k5y), {cum(k5l)});
  auto pop = population_cumulants(model, 5);

  Eigen::Matrix3d path, sxy, syx, flip;
  path << a1 * a1, 1, 0, a1 * b1, g, 0, b1 * b1, g * g, 1;
  sxy = Eigen::Vector3d(a1 * k5l, 1 * k5x, 0 * k5y).asDiagonal();
  syx = Eigen::Vector3d(b1 * k5l, g * k5x, 1 * k5y).asDiagonal();
  flip << 0, 0, 1, 0, 1, 0, 1, 0, 0;

  Eigen::Matrix3d fxy = path * sxy * path.transpose();
  Eigen::Matrix3d fyx = path * syx * path.transpose();
  auto xy = build_cumulant_matrix(pop, 3, Orientation::xy);
  auto yx = build_cumulant_matrix(pop, 3, Orientation::yx);
  CHECK((xy.entries - fxy).norm() <= 1e-10 * fxy.norm());
  // the (Y,X) factor product lists rows in reverse order
  CHECK((yx.entries - flip * fyx * flip).norm() <= 1e-10 * fyx.norm());
  CHECK(matrix_abs_determinant(yx) == doctest::Approx(std::abs(fyx.determinant())).epsilon(1e-10));
  CHECK(matrix_rank(xy, 1e-8).rank == 2);
  CHECK(matrix_rank(yx, 1e-8).rank == 3);
}
