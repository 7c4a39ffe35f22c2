#include "cornerlab/errors.hpp"
#include "cornerlab/expr.hpp"
#include "cornerlab/hyperbolic_system.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace cornerlab;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("toy model diagonalization") {
  const CharDecomp d = diagonalize(mat({{-1}}));
  CHECK(d.eigenvalues(0) == -1.0);
  CHECK(d.incoming == std::vector<int>{0});
  CHECK(d.outgoing.empty());
}

TEST_CASE("diagonal A sorts eigenvalues") {
  const CharDecomp d = diagonalize(mat({{1, 0}, {0, -2}}));
  CHECK(d.eigenvalues(0) == -2.0);
  CHECK(d.eigenvalues(1) == 1.0);
  CHECK(d.incoming.size() == 1);
  CHECK(d.outgoing.size() == 1);
}

TEST_CASE("symmetric off-diagonal A") {
  const CharDecomp d = diagonalize(mat({{0, 1}, {1, 0}}));
  CHECK(d.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  // Columns are unique up to sign.
  CHECK(std::abs(d.P(0, 0) * d.P(1, 0)) == doctest::Approx(r * r));
  CHECK(d.P(0, 0) * d.P(1, 0) < 0.0);
  CHECK(d.P(0, 1) * d.P(1, 1) == doctest::Approx(r * r));
}

TEST_CASE("non-hyperbolic and defective matrices are rejected") {
  CHECK_THROWS_WITH_AS(diagonalize(mat({{0, 1}, {-1, 0}})), doctest::Contains("not hyperbolic"), AdmissibilityError);
  CHECK_THROWS_WITH_AS(diagonalize(mat({{1, 1}, {0, 1}})), doctest::Contains("not diagonalizable"), AdmissibilityError);
}

TEST_CASE("repeated eigenvalues with a full basis are accepted") {
  const CharDecomp d = diagonalize(mat({{-1, 0}, {0, -1}}));
  CHECK(d.incoming.size() == 2);
}

TEST_CASE("noncharacteristic check") {
  CHECK(check_noncharacteristic(mat({{-1}})).pass);
  CHECK_FALSE(check_noncharacteristic(mat({{1, 0}, {0, 0}})).pass);
  CHECK(check_noncharacteristic(mat({{0, 1}, {1, 0}})).pass);
}

TEST_CASE("Kreiss-Lopatinskii examples") {
  CHECK(check_kreiss_lopatinskii_1d(mat({{-1}}), mat({{1}})).pass);
  const Eigen::MatrixXd A = mat({{1, 0}, {0, -1}});
  const AdmissibilityReport ok = check_kreiss_lopatinskii_1d(A, mat({{0, 1}}));
  CHECK(ok.pass);
  CHECK(std::abs(ok.determinant) == doctest::Approx(1.0));
  CHECK_FALSE(check_kreiss_lopatinskii_1d(A, mat({{1, 0}})).pass);
  CHECK_THROWS_WITH_AS(check_kreiss_lopatinskii_1d(A, mat({{1, 0}, {0, 1}})),
                       doctest::Contains("boundary condition count mismatch"), AdmissibilityError);
}

TEST_CASE("reconstruction and count identity on random symmetric matrices") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 4;
    Eigen::MatrixXd S(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) S(i, j) = n01(rng);
    const Eigen::MatrixXd A = S + S.transpose();
    const CharDecomp d = diagonalize(A);
    const Eigen::MatrixXd R = d.P * d.eigenvalues.asDiagonal() * d.P_inv;
    CHECK((R - A).norm() <= 1e-10 * A.norm());
    if (check_noncharacteristic(A).pass) CHECK(d.incoming.size() + d.outgoing.size() == static_cast<std::size_t>(q));
  }
}

TEST_CASE("Kreiss-Lopatinskii verdict is similarity invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  const Eigen::MatrixXd A = mat({{2, 0, 0}, {0, -1, 0}, {0, 0, -3}});
  const std::vector<Eigen::MatrixXd> Bs{mat({{0, 1, 0}, {0, 0, 1}}), mat({{1, 0, 0}, {0, 1, 0}}),
                                        mat({{1, 1, 1}, {0, 1, -1}}), mat({{0, 1, 1}, {0, 2, 2}})};
  for (const auto& B : Bs) {
    const bool base = check_kreiss_lopatinskii_1d(A, B).pass;
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) += u(rng);
      const Eigen::MatrixXd Si = S.inverse();
      CHECK(check_kreiss_lopatinskii_1d(S * A * Si, B * Si).pass == base);
    }
  }
}

TEST_CASE("SystemSpec construction and forcing jets") {
  const SystemSpec toy = SystemSpec::toy();
  CHECK(toy.q() == 1);
  CHECK(toy.b() == 1);
  CHECK(toy.A(0, 0) == -1.0);
  CHECK(toy.A_taylor.front() == toy.A);
  CHECK(toy.constant_coefficients());
  CHECK(toy.A_l(3).norm() == 0.0);
  CHECK_THROWS(SystemSpec::constant(mat({{1, 0}, {0, -1}}), mat({{0, 0}})).validate());

  ForcingSpec f;
  f.terms.push_back({Eigen::VectorXd::Ones(1), parse_function("exp(-x)"), parse_function("cos(t)", "t")});
  CHECK(f.kind() == ForcingSpec::Kind::separable_smooth);
  CHECK(f.evaluate(1.0, 0.5, 1)(0) == doctest::Approx(std::exp(-1.0) * std::cos(0.5)));
  CHECK(f.time_jet(1.0, 2, 1)(0) == doctest::Approx(-std::exp(-1.0)));
  CHECK(f.consistent(1, 4));
}
